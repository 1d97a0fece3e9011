"""Analyze every problem in problems/ with numerical verification and summarise the outcome."""

import sys
import time
from pathlib import Path

from zetascope.pipeline import ProblemSpec, run_analyze

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    worst = 0
    for path in sorted((ROOT / "problems").glob("*.json")):
        spec = ProblemSpec.from_text(path.read_text(encoding="utf-8"))
        start = time.perf_counter()
        report, code = run_analyze(spec, do_verify=True)
        elapsed = time.perf_counter() - start
        if report["status"] != "ok":
            print(f"{path.stem:12s} exit {code}  {report['hypothesis']}: {report['detail']}")
            continue
        v = report["verification"]
        n_pass = sum(c["pass"] for c in v["checks"])
        print(
            f"{path.stem:12s} exit {code}  {n_pass}/{len(v['checks'])} checks passed, "
            f"{len(v['skipped'])} poles skipped  ({elapsed:.1f} s)"
        )
        for c in v["checks"]:
            if not c["pass"]:
                print(f"    FAIL {c['name']}: {c.get('error') or (c['predicted'], c['fitted'])}")
        if code == 3:
            worst = 3
    return worst


if __name__ == "__main__":
    sys.exit(main())
