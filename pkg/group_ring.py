"""
group_ring.py - Integer group ring Z[H]

Sparse integer combinations of group elements with convolution, the power
map x -> x^(m), and the Schur-Wielandt extraction principle: for a prime m
the elements whose coefficient is nonzero mod m form an A-set whenever x
lies in the S-ring A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple

from abelian_core import GroupSpec
from errors import GroupMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RingElement:
    """
    An element of Z[H], stored as rank -> nonzero integer coefficient.

    Values are immutable; every operation returns a new element.
    """
    group: GroupSpec
    coefficients: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(r): int(c) for r, c in dict(self.coefficients).items() if c}
        for r in clean:
            if not 0 <= r < self.group.order:
                raise ValueError(f"rank {r} outside {self.group.label}")
        object.__setattr__(self, 'coefficients', clean)

    # ---------- basic access ----------

    def coeff(self, r: int) -> int:
        return self.coefficients.get(r, 0)

    def support(self) -> FrozenSet[int]:
        return frozenset(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def items(self) -> Iterable[Tuple[int, int]]:
        return sorted(self.coefficients.items())

    def dump(self) -> str:
        return " ".join(f"{r}:{c}" for r, c in self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.group == other.group and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash((self.group, tuple(self.items())))

    def __repr__(self) -> str:
        return f"RingElement({self.group.label}, {{{self.dump()}}})"

    # ---------- arithmetic ----------

    def _check(self, other: "RingElement") -> None:
        if self.group != other.group:
            raise GroupMismatchError(
                f"ring elements over {self.group.label} and {other.group.label}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        out = dict(self.coefficients)
        for r, c in other.coefficients.items():
            out[r] = out.get(r, 0) + c
        return RingElement(self.group, out)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + other.scaled(-1)

    def __neg__(self) -> "RingElement":
        return self.scaled(-1)

    def scaled(self, k: int) -> "RingElement":
        return RingElement(self.group, {r: k * c for r, c in self.coefficients.items()})

    def __rmul__(self, k: int) -> "RingElement":
        return self.scaled(k)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scaled(other)
        return multiply(self, other)

    def __pow__(self, k: int) -> "RingElement":
        """Convolution power x * x * ... * x (k >= 0)."""
        if k < 0:
            raise ValueError("ring power needs k >= 0")
        result = unit(self.group)
        base = self
        while k:
            if k & 1:
                result = multiply(result, base)
            base = multiply(base, base)
            k >>= 1
        return result


# ========== Constructors ==========

def simple_quantity(G: GroupSpec, S: Iterable[int]) -> RingElement:
    return RingElement(G, {r: 1 for r in S})


def unit(G: GroupSpec) -> RingElement:
    return RingElement(G, {0: 1})


def zero(G: GroupSpec) -> RingElement:
    return RingElement(G, {})


# ========== Operations ==========

def multiply(x: RingElement, y: RingElement) -> RingElement:
    """Convolution: coeff(g) = sum over a + b = g of x(a) y(b)."""
    x._check(y)
    add = x.group.add_table
    out: Dict[int, int] = {}
    for a, ca in x.coefficients.items():
        row = add[a]
        for b, cb in y.coefficients.items():
            g = row[b]
            out[g] = out.get(g, 0) + ca * cb
    return RingElement(x.group, out)


def power_map(x: RingElement, m: int) -> RingElement:
    """Push coefficients forward along g -> m*g, summing on collisions."""
    G = x.group
    out: Dict[int, int] = {}
    for r, c in x.coefficients.items():
        g = G.scale(m, r)
        out[g] = out.get(g, 0) + c
    return RingElement(G, out)


def schur_wielandt_extract(x: RingElement, m: int) -> FrozenSet[int]:
    """{g : coeff(g) != 0 mod m}."""
    return frozenset(r for r, c in x.coefficients.items() if c % m)


def coefficient_class(x: RingElement, k: int) -> FrozenSet[int]:
    """{g : coeff(g) == k}; k = 0 gives the complement of the support."""
    if k == 0:
        return frozenset(r for r in x.group.elements() if r not in x.coefficients)
    return frozenset(r for r, c in x.coefficients.items() if c == k)


def freshman_congruence(x: RingElement, m: int) -> bool:
    """x^m == x^(m) coefficientwise mod the prime m."""
    lhs = x ** m
    rhs = power_map(x, m)
    return all((lhs.coeff(r) - rhs.coeff(r)) % m == 0
               for r in lhs.support() | rhs.support())


__all__ = [
    'RingElement', 'simple_quantity', 'unit', 'zero', 'multiply', 'power_map',
    'schur_wielandt_extract', 'coefficient_class', 'freshman_congruence',
]
