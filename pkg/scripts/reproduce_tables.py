"""Recompute the reference M(lambda) values and print per-entry agreement."""

import argparse
import time

from repdiag.asymsol import solution_frame
from repdiag.benchmarks import M_VALUES, entries
from repdiag.bounds import epsilon_of_X
from repdiag.recur import generate_transcript
from repdiag.riccati import m_matrix
from repdiag.verify import sig_figs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--x-large", type=float, default=10.0)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--oracle", action="store_true", help="also compare with the alpha=1 series solution")
    args = ap.parse_args()
    tr = generate_transcript(6)
    for alpha, table in M_VALUES.items():
        print(f"alpha = {alpha:.4g}")
        for lam, want in table.items():
            t0 = time.perf_counter()
            eps = epsilon_of_X(alpha, lam, args.x_large, 6, tr).eps
            res = m_matrix(solution_frame(alpha, lam, args.x_large, 6, eps=eps or 0.0, transcript=tr), args.tol)
            dt = time.perf_counter() - t0
            got = entries(res.M)
            figs = " ".join(f"{sig_figs(g, w):5.2f}" for g, w in zip(got, want))
            line = f"  {str(lam):>12}  sf(m11 m12 m22) = {figs}  eps = {eps:.2e}  {dt:.2f} s"
            if args.oracle and alpha == 1.0:
                from repdiag.airy import airy_m_matrix

                o = entries(airy_m_matrix(lam).M)
                line += "  oracle sf = " + " ".join(f"{sig_figs(g, w):5.2f}" for g, w in zip(got, o))
            print(line)
            for name, g in zip(("m11", "m12", "m22"), got):
                print(f"      {name} = {g.real:+.10f} {g.imag:+.10f}i")


if __name__ == "__main__":
    main()
