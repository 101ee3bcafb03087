"""Run the default verification grid and print one line per check.

Run: python demos/run_checks.py [seed]
"""

import sys

from treegroups.verify import run_suite

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
reports = run_suite(seed)
width = max(len(r.check) for r in reports)
for r in reports:
    params = ", ".join(f"{k}={v}" for k, v in sorted(r.params.items()) if k not in ("family",))
    print(f"{r.check:<{width}}  {r.verdict:<13} {r.params.get('family', '')} {params}  {r.duration_ms:7.1f} ms")
print(sum(r.ok for r in reports), "of", len(reports), "checks without failure")
