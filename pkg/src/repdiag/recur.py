"""Symbolic recurrence generator for repeated approximate diagonalization.

One level of the process maps the system ``Z_m' = Q^(1/n)(D_m + R_m) Z_m``
through ``Z_m = (I + P_m) Z_{m+1}``.  The operands on which ``(I+P_m)^(-1)``
acts are expanded in a truncated Neumann series, regrouped by exact order
into the buckets ``V_{j,m+1}`` of the next level, and everything of order
``>= M`` is swept into the remainder ``E_{m+1}``.

Compression rule: the operands of order ``m+1`` sum to ``S_{m+1}`` by
definition, so their higher Neumann terms are written with the single atom
``S_{m+1}`` instead of the expanded sum.  Buckets ``V_{j,m}`` with ``j >= 2``
are inlined wherever they are used; ``P``, ``DP``, ``T``, ``S``, ``V_{1,m}``
and ``E_m`` stay atomic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .ncalg import (
    DP,
    Atom,
    Dg,
    E,
    IdP,
    Inv,
    NCExpr,
    P,
    S,
    T,
    V,
    collect_by_order,
    power,
)


def nu_for(order_U: int, m: int, M: int) -> int:
    """Smallest ``nu >= 0`` with ``m*(nu+1) + order_U >= M``."""
    if m < 1 or order_U < 1:
        raise ValueError("need m >= 1 and order_U >= 1")
    return max(0, math.ceil((M - order_U) / m) - 1)


def neumann_expand(m: int, u: NCExpr, M: int, head: Optional[NCExpr] = None) -> NCExpr:
    """Expand ``(I+P_m)^(-1) u`` to the accuracy needed for remainder order ``M``.

    Returns ``sum_{r<=nu} (-P_m)^r u + (-1)^(nu+1) A_m P_m^(nu+1) u`` as a single
    expression.  ``u`` must have uniform order.  If ``head`` is given it is
    used in place of ``u`` in every term with ``r >= 1`` (it must realize to
    the same matrix).  Operands already of order ``>= M`` come back as
    ``A_m u``.
    """
    if not u:
        return NCExpr.zero()
    if not u.is_uniform():
        raise ValueError("operand must have uniform order")
    o = u.min_order()
    if o >= M:
        return NCExpr.atom(Inv(m)) * u
    rep = u if head is None else head
    nu = nu_for(o, m, M)
    out = u
    for r in range(1, nu + 1):
        out = out + power(P(m), r) * rep * (-1) ** r
    return out + NCExpr.atom(Inv(m)) * power(P(m), nu + 1) * rep * (-1) ** (nu + 1)


@dataclass(frozen=True)
class Level:
    """Bookkeeping for the step from level ``m`` to ``m+1``."""

    m: int
    uset: Tuple[NCExpr, ...]
    nus: Dict[int, int]
    S_next: Optional[NCExpr]
    V_next: Dict[int, NCExpr]
    E_next: NCExpr


@dataclass(frozen=True)
class Transcript:
    M: int
    levels: Tuple[Level, ...]

    def level(self, m: int) -> Level:
        return self.levels[m - 1]

    def S(self, m: int) -> NCExpr:
        if not 2 <= m <= self.M - 1:
            raise KeyError(f"S{m} not generated for M={self.M}")
        return self.level(m - 1).S_next

    def V(self, j: int, m: int) -> NCExpr:
        """Definition of ``V_{j,m}`` (``V_{1,1}`` is the base matrix: returns the atom)."""
        if j == 1:
            if m == 1:
                return NCExpr.atom(V(1, 1))
            self.S(m)
            return NCExpr.atom(S(m)) - NCExpr.atom(Dg(NCExpr.atom(S(m))))
        if m == 1:
            return NCExpr.zero()
        return self.level(m - 1).V_next.get(j, NCExpr.zero())

    def E(self, m: int) -> NCExpr:
        if m == 1:
            return NCExpr.zero()
        return self.level(m - 1).E_next

    def mu(self, m: int) -> int:
        return 1 if m == 1 else self.M - m

    def definition(self, atom: Atom) -> NCExpr:
        if atom.kind == "S":
            return self.S(atom.m)
        if atom.kind == "V":
            return self.V(atom.j, atom.m)
        if atom.kind == "E":
            return self.E(atom.m)
        raise KeyError(f"{atom} has no symbolic definition")

    def expanded_E(self, m: int, expand_identity: bool = False) -> NCExpr:
        """``E_m`` with all nested ``E`` atoms inlined (for term counting)."""
        e = self.E(m)
        out = NCExpr.zero()
        for f, c in e.items():
            prod = NCExpr.identity() * c
            for a in f:
                if a.kind == "E":
                    prod = prod * self.expanded_E(a.m, expand_identity)
                elif a.kind == "IP" and expand_identity:
                    prod = prod * (NCExpr.identity() + NCExpr.atom(P(a.m)))
                else:
                    prod = prod * NCExpr.atom(a)
            out = out + prod
        return out


def _uset(tr_V, m: int, M: int) -> List[Tuple[NCExpr, NCExpr]]:
    """Operands at level ``m`` as (atom form, inlined form) pairs."""
    Pm = NCExpr.atom(P(m))
    out = [
        (NCExpr.atom(DP(m)), NCExpr.atom(DP(m))),
        (NCExpr.atom(T(m)), NCExpr.atom(T(m))),
        (NCExpr.atom(V(1, m)) * Pm, NCExpr.atom(V(1, m)) * Pm),
    ]
    if m > 1:
        for j in range(2, M - m + 1):
            vj = tr_V.get((j, m), NCExpr.zero())
            out.append((NCExpr.atom(V(j, m)), vj))
            out.append((NCExpr.atom(V(j, m)) * Pm, vj * Pm))
    return out


def generate_transcript(M: int) -> Transcript:
    """Run the level recursion for ``m = 1 .. M-1``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    Vdefs: Dict[Tuple[int, int], NCExpr] = {}
    levels: List[Level] = []
    E_prev = NCExpr.zero()
    for m in range(1, M):
        ops = _uset(Vdefs, m, M)
        groups: Dict[int, NCExpr] = {}
        for _, inl in ops:
            if inl:
                o = inl.min_order()
                groups[o] = groups.get(o, NCExpr.zero()) + inl

        if E_prev:
            E_next = NCExpr.product(Inv(m), E(m, M), IdP(m))
        else:
            E_next = NCExpr.zero()
        nus: Dict[int, int] = {}
        buckets = NCExpr.zero()
        for o, g in sorted(groups.items()):
            if not g:
                continue
            head = NCExpr.atom(S(m + 1)) if (o == m + 1 and m + 1 <= M - 1) else None
            expansion = neumann_expand(m, g, M, head=head)
            nus[o] = -1 if o >= M else nu_for(o, m, M)
            low, rem = collect_by_order(expansion, M)
            E_next = E_next + rem
            for part in low.values():
                buckets = buckets + part
        low, rem = collect_by_order(buckets, M)
        assert not rem
        S_next = low.get(m + 1) if m + 1 <= M - 1 else None
        V_next = {}
        for o, part in low.items():
            j = o - m
            if j >= 2:
                V_next[j] = part
                Vdefs[(j, m + 1)] = part
        levels.append(
            Level(m=m, uset=tuple(a for a, _ in ops), nus=nus, S_next=S_next, V_next=V_next, E_next=E_next)
        )
        E_prev = E_next
    return Transcript(M=M, levels=tuple(levels))


def reference_expressions() -> Dict[str, NCExpr]:
    """Hand transcriptions of the closed forms for S_2, S_3, S_4, S_6 and E_5.

    In E_5 the inner operand of the level-2 group is ``S_3`` and the
    level-3 group carries ``-P_3 S_4``; these are the only readings for
    which every term has order >= 5.
    """
    a = NCExpr.atom
    p = {m: a(P(m)) for m in range(1, 6)}
    A = {m: a(Inv(m)) for m in range(1, 6)}
    IP = {m: a(IdP(m)) for m in range(1, 6)}
    dp = {m: a(DP(m)) for m in range(1, 6)}
    t = {m: a(T(m)) for m in range(1, 6)}
    s = {m: a(S(m)) for m in range(2, 7)}
    v1 = {m: a(V(1, m)) for m in range(1, 6)}

    S2 = dp[1] + v1[1] * p[1]
    S3 = dp[2] + t[1] - p[1] * s[2]
    S4 = dp[3] + t[2] - p[1] * t[1] + v1[2] * p[2] + p[1] * p[1] * s[2]
    V32 = -p[1] * t[1] + p[1] * p[1] * s[2]
    S6 = (
        dp[5]
        + t[4]
        + V32 * p[2]
        - p[2] * (V32 + v1[2] * p[2] + t[2])
        - p[1] * p[1] * p[1] * t[1]
        + p[1] * p[1] * p[1] * p[1] * s[2]
        + v1[3] * p[3]
    )
    E5 = (
        A[4] * A[3] * A[2] * A[1] * (p[1] * p[1] * t[1] - p[1] * p[1] * p[1] * s[2]) * IP[2] * IP[3] * IP[4]
        + A[4] * A[3] * A[2]
        * ((V32 - p[1] * s[2] + t[1]) * p[2] - p[2] * (s[3] + V32 + t[2] + v1[2] * p[2]))
        * IP[3] * IP[4]
        + A[4] * A[3] * (t[3] - p[3] * s[4] + v1[3] * p[3] + (V32 + v1[2] * p[2] + t[2]) * p[3]) * IP[4]
        + A[4] * (dp[4] + t[4] + v1[4] * p[4])
    )
    return {"S2": S2, "S3": S3, "S4": S4, "S6": S6, "E5": E5}


def dump_transcript(tr: Transcript) -> str:
    """Plain-text listing, one term per line."""
    lines = [f"transcript M={tr.M}"]

    def block(name: str, e: NCExpr) -> None:
        lines.append(f"  {name}:")
        if not e:
            lines.append("    0")
        for term in e:
            lines.append("    " + str(term))

    for lv in tr.levels:
        lines.append(f"level m={lv.m} mu={tr.mu(lv.m)}")
        if lv.S_next is not None:
            block(f"S{lv.m + 1}", lv.S_next)
            block(f"V[1,{lv.m + 1}]", tr.V(1, lv.m + 1))
        for j, e in sorted(lv.V_next.items()):
            block(f"V[{j},{lv.m + 1}]", e)
        block(f"E{lv.m + 1}", lv.E_next)
    return "\n".join(lines)
