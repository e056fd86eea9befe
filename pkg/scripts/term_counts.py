"""Component counts of S_m and E_m under several counting conventions."""

from repdiag.ncalg import NCExpr
from repdiag.recur import generate_transcript


def inline_S(e: NCExpr, tr) -> NCExpr:
    """Replace every S atom by its definition, recursively."""
    out = NCExpr.zero()
    for f, c in e.items():
        prod = NCExpr.identity() * c
        for a in f:
            if a.kind == "S" and a.m >= 2:
                prod = prod * inline_S(tr.S(a.m), tr)
            else:
                prod = prod * NCExpr.atom(a)
        out = out + prod
    return out


def main():
    for M in (6, 8):
        tr = generate_transcript(M)
        raw = len(tr.E(M))
        kept = tr.expanded_E(M)
        expanded = tr.expanded_E(M, expand_identity=True)
        print(
            f"E{M}: stored {raw}, nested E inlined {len(kept)}, (I+P) expanded {len(expanded)}, "
            f"S inlined {len(inline_S(kept, tr))} / {len(inline_S(expanded, tr))}"
        )
    tr9 = generate_transcript(9)
    print(f"S8: compressed {len(tr9.S(8))}, S inlined {len(inline_S(tr9.S(8), tr9))}")


if __name__ == "__main__":
    main()
