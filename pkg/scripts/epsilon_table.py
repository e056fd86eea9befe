"""eps(X) over a grid of X and M, structured and coarse envelopes side by side."""

import argparse

from repdiag.benchmarks import EPS_VALUES
from repdiag.bounds import epsilon_of_X


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lambda", dest="lam", type=complex, default=1j)
    ap.add_argument("--xs", type=float, nargs="+", default=[10.0, 15.0, 20.0, 40.0])
    ap.add_argument("--ms", type=int, nargs="+", default=[4, 5, 6])
    args = ap.parse_args()
    for alpha in (0.5, 1.0, 4 / 3):
        for M in args.ms:
            for X in args.xs:
                fine = epsilon_of_X(alpha, args.lam, X, M)
                coarse = epsilon_of_X(alpha, args.lam, X, M, method="coarse")
                ref = EPS_VALUES.get((alpha, X)) if M == 6 else None
                fmt = lambda r: f"{r.eps:.3e}" if r.valid else "invalid  "
                extra = f"  reference {ref:.3e}" if ref else ""
                print(f"alpha={alpha:.4g} M={M} X={X:5.1f}  structured {fmt(fine)}  coarse {fmt(coarse)}{extra}")


if __name__ == "__main__":
    main()
