"""Graded non-commutative term algebra.

Expressions are integer-coefficient sums of ordered products of symbolic
matrix atoms.  Every atom carries an integer *order*: the power of
``x**(-a)`` (with ``a = 1 + alpha/n``) by which the realized matrix decays.
Products add orders, so every term has a well-defined order and sums can be
bucketed by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple


@dataclass(frozen=True)
class Atom:
    """A symbolic matrix-valued factor.

    ``kind`` is one of

    ``P``   corrector P_m                       order m
    ``DP``  composite -Q^(-1/n) P'_m            order m+1
    ``V``   bucket V_{j,m}                      order m+j-1
    ``T``   commutator Delta_m P_m - P_m Delta_m order m+2
    ``S``   dominant group S_m                  order m
    ``E``   remainder E_m                       order >= M
    ``A``   (I+P_m)^(-1)                        order 0
    ``IP``  (I+P_m)                             order 0
    ``Dg``  diagonal part of ``inner``          order of ``inner``

    Build atoms with the factory functions below rather than directly.
    """

    kind: str
    m: int = 0
    j: int = 0
    grade: int = 0
    inner: Optional["NCExpr"] = field(default=None, compare=True)

    @property
    def order(self) -> int:
        return self.grade

    def __str__(self) -> str:
        k = self.kind
        if k == "V":
            return f"V[{self.j},{self.m}]"
        if k == "IP":
            return f"(I+P{self.m})"
        if k == "Dg":
            return f"dg({self.inner})"
        return f"{k}{self.m}"

    __repr__ = __str__

    def sort_key(self) -> str:
        return str(self)


def P(m: int) -> Atom:
    return Atom("P", m, grade=m)


def DP(m: int) -> Atom:
    return Atom("DP", m, grade=m + 1)


def V(j: int, m: int) -> Atom:
    if j < 1 or m < 1:
        raise ValueError("V(j, m) needs j, m >= 1")
    return Atom("V", m, j, grade=m + j - 1)


def T(m: int) -> Atom:
    return Atom("T", m, grade=m + 2)


def S(m: int) -> Atom:
    return Atom("S", m, grade=m)


def E(m: int, M: int) -> Atom:
    return Atom("E", m, grade=M)


def Inv(m: int) -> Atom:
    return Atom("A", m, grade=0)


def IdP(m: int) -> Atom:
    return Atom("IP", m, grade=0)


def Dg(e: "NCExpr") -> Atom:
    if not e:
        raise ValueError("dg of the zero expression")
    return Atom("Dg", grade=e.min_order(), inner=e)


Factors = Tuple[Atom, ...]


class Term(NamedTuple):
    coeff: int
    factors: Factors

    @property
    def order(self) -> int:
        return sum(a.order for a in self.factors)

    def __str__(self) -> str:
        body = " ".join(str(a) for a in self.factors) or "I"
        return f"{'-' if self.coeff < 0 else '+'} {abs(self.coeff)} [{body}] order={self.order}"


def _key(factors: Factors) -> Tuple[int, Tuple[str, ...]]:
    return (sum(a.order for a in factors), tuple(a.sort_key() for a in factors))


class NCExpr:
    """Normalized sum of signed non-commutative products.

    Instances are immutable.  Identical factor sequences are merged and zero
    coefficients dropped on construction, so ``==`` compares normal forms.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Factors, int] | Iterable[Tuple[Factors, int]]] = None):
        acc: Dict[Factors, int] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for factors, c in items:
                factors = tuple(factors)
                acc[factors] = acc.get(factors, 0) + int(c)
        self._terms = {f: c for f, c in sorted(acc.items(), key=lambda fc: _key(fc[0])) if c != 0}
        self._hash: Optional[int] = None

    @classmethod
    def atom(cls, a: Atom, coeff: int = 1) -> "NCExpr":
        return cls({(a,): coeff})

    @classmethod
    def product(cls, *atoms: Atom, coeff: int = 1) -> "NCExpr":
        return cls({tuple(atoms): coeff})

    @classmethod
    def zero(cls) -> "NCExpr":
        return cls()

    @classmethod
    def identity(cls) -> "NCExpr":
        return cls({(): 1})

    # container protocol
    def __iter__(self) -> Iterator[Term]:
        for f, c in self._terms.items():
            yield Term(c, f)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, factors: Iterable[Atom]) -> int:
        return self._terms.get(tuple(factors), 0)

    # grading
    def orders(self) -> set:
        return {t.order for t in self}

    def min_order(self) -> int:
        if not self._terms:
            raise ValueError("zero expression has no order")
        return min(self.orders())

    def is_uniform(self) -> bool:
        return len(self.orders()) <= 1

    def atoms(self) -> set:
        return {a for f in self._terms for a in f}

    # algebra
    def __add__(self, other: "NCExpr") -> "NCExpr":
        return nc_add(self, other)

    def __neg__(self) -> "NCExpr":
        return NCExpr({f: -c for f, c in self._terms.items()})

    def __sub__(self, other: "NCExpr") -> "NCExpr":
        return nc_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, int):
            return NCExpr({f: c * other for f, c in self._terms.items()})
        if isinstance(other, Atom):
            other = NCExpr.atom(other)
        return nc_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        if isinstance(other, Atom):
            return nc_mul(NCExpr.atom(other), self)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for t in self:
            body = "*".join(str(a) for a in t.factors) or "I"
            c = abs(t.coeff)
            parts.append(("- " if t.coeff < 0 else "+ ") + (f"{c}*" if c != 1 else "") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s

    __repr__ = __str__


def nc_add(lhs: NCExpr, rhs: NCExpr) -> NCExpr:
    return NCExpr(list(lhs.items()) + list(rhs.items()))


def nc_mul(lhs: NCExpr, rhs: NCExpr) -> NCExpr:
    out = []
    for fl, cl in lhs.items():
        for fr, cr in rhs.items():
            out.append((fl + fr, cl * cr))
    return NCExpr(out)


def power(a: Atom, r: int) -> NCExpr:
    return NCExpr.product(*([a] * r)) if r else NCExpr.identity()


def collect_by_order(e: NCExpr, M: int) -> Tuple[Dict[int, NCExpr], NCExpr]:
    """Split ``e`` into exact-order buckets below ``M`` and a remainder.

    Terms of order ``>= M`` are returned together as the remainder.
    """
    buckets: Dict[int, list] = {}
    rest = []
    for f, c in e.items():
        o = sum(a.order for a in f)
        (rest if o >= M else buckets.setdefault(o, [])).append((f, c))
    return {o: NCExpr(ts) for o, ts in sorted(buckets.items())}, NCExpr(rest)


def substitute(e: NCExpr, atom: Atom, replacement: NCExpr) -> NCExpr:
    """Replace every occurrence of ``atom`` by ``replacement`` (distributing)."""
    out = NCExpr.zero()
    for f, c in e.items():
        prod = NCExpr.identity() * c
        for a in f:
            prod = prod * (replacement if a == atom else NCExpr.atom(a))
        out = out + prod
    return out
