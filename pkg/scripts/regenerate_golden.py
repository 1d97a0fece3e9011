"""Rewrite tests/golden/<name>.json from the canonical problems (run after an intended report change)."""

import sys
from pathlib import Path

from zetascope.pipeline import ProblemSpec, render_json, run_analyze

ROOT = Path(__file__).resolve().parents[1]
CANONICAL = ("x2", "x3", "cusp", "x2_y4", "w1")


def main() -> int:
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in CANONICAL:
        spec = ProblemSpec.from_text((ROOT / "problems" / f"{name}.json").read_text(encoding="utf-8"))
        report, code = run_analyze(spec, do_verify=False)
        if code:
            print(f"{name}: exit {code}", file=sys.stderr)
            return code
        (out_dir / f"{name}.json").write_text(render_json(report), encoding="utf-8")
        print(f"wrote {name}.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
