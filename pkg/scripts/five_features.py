"""Print the five-feature example table (BH, pi0 = 1) at display precision."""

import argparse

from fdrkit import p_fdr
from fdrkit.report import ResultsTable

P = [0.005, 0.049, 0.050, 0.051, 0.700]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--threshold", type=float, default=0.05)
    ap.add_argument("--method", default="BH")
    args = ap.parse_args()
    res = p_fdr(P, args.method, args.threshold)
    table = ResultsTable.from_result(res)
    print(table.to_csv(display=True), end="")
    chosen = [i + 1 for i, r in enumerate(res.reject) if r]
    small = [i + 1 for i, f in enumerate(res.fdrs) if f < args.threshold]
    print(f"selected by control: {chosen}")
    print(f"fdr below threshold: {small}")


if __name__ == "__main__":
    main()
