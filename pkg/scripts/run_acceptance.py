#!/usr/bin/env python3
"""Run the nine acceptance criteria and print one PASS/FAIL line each.

Usage: python scripts/run_acceptance.py [N ...]
Exit status is the number of failing criteria.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

import acceptance_checks as ac  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default: all)")
    args = ap.parse_args()
    wanted = set(args.criteria) or {c.number for c in ac.CRITERIA}
    ac.warm_up()
    failed = 0
    for check in ac.CRITERIA:
        if check.number in wanted:
            out = check()
            print(out.line(), flush=True)
            failed += not out.passed
    return failed


if __name__ == "__main__":
    sys.exit(main())
