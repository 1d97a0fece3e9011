"""Independent numerical and closed-form checks for the exact engine."""
