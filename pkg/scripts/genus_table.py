"""Print the genus table of y^m = phi^n(x) with the two sandwich bounds and the verdict."""

import argparse

from powerorbits.cli import parse_map
from powerorbits.genus import dichotomy_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--map", default="x^2+1")
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--N", type=int, default=6)
    args = ap.parse_args()

    report = dichotomy_report(parse_map(args.map), args.m, args.N)
    print(f"y^{args.m} = phi^n(x),  phi = {args.map}")
    print(f"{'n':>3} {'genus':>7} {'rho':>6} {'genuscor':>14} {'rhocor':>14}")
    for r in report.rows:
        print(f"{r.n:>3} {r.genus:>7} {r.rho:>6} {str(r.genuscor):>14} {str(r.rhocor):>14}")
    print("verdict:", report.verdict)


if __name__ == "__main__":
    main()
