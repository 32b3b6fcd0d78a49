"""
abelian_core.py - Finite abelian groups

A group is a list of cyclic factors Z_k1 x Z_k2 x ... ; elements are exponent
vectors, addressed everywhere else by their mixed-radix rank with the LAST
factor varying fastest. The group is written additively throughout.

Provides:
- GroupSpec / Element / Subgroup / GroupAutomorphism value types
- spec-string parsing ("Z2^3xZ3"), subgroup lattice, Aut(H) enumeration
- the q-decomposition h = h_q' + h_q and the unit action h -> t*h
- Section: a subquotient U/L re-presented as a GroupSpec with rank maps
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import sring_config
from errors import (InvalidSpecError, NonUnitError, NotASubgroupError,
                    NotSimpleDivisorError, SizeLimitError)

logger = logging.getLogger(__name__)

_FACTOR_RE = re.compile(r'z(\d+)(?:\^(\d+))?')
_SPEC_RE = re.compile(r'^z\d+(\^\d+)?(xz\d+(\^\d+)?)*$')


# ========== Tables (cached per factor tuple) ==========

@lru_cache(maxsize=None)
def _weights(factors: Tuple[int, ...]) -> Tuple[int, ...]:
    weights = []
    w = 1
    for f in reversed(factors):
        weights.append(w)
        w *= f
    return tuple(reversed(weights))


@lru_cache(maxsize=None)
def _exponent_table(factors: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    order = math.prod(factors)
    weights = _weights(factors)
    return tuple(
        tuple((r // w) % f for w, f in zip(weights, factors))
        for r in range(order)
    )


@lru_cache(maxsize=None)
def _add_table(factors: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    exps = _exponent_table(factors)
    weights = _weights(factors)
    order = len(exps)
    rows = []
    for a in range(order):
        ea = exps[a]
        row = []
        for b in range(order):
            eb = exps[b]
            row.append(sum(((x + y) % f) * w
                           for x, y, f, w in zip(ea, eb, factors, weights)))
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def _neg_table(factors: Tuple[int, ...]) -> Tuple[int, ...]:
    exps = _exponent_table(factors)
    weights = _weights(factors)
    return tuple(
        sum(((-x) % f) * w for x, f, w in zip(e, factors, weights))
        for e in exps
    )


# ========== Group values ==========

@dataclass(frozen=True)
class GroupSpec:
    """
    A finite abelian group given by its cyclic factors.

    The empty factor list is the trivial group; it only arises as a
    subquotient (restriction to {e}, quotient by H).
    """
    invariant_factors: Tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.invariant_factors)
        for f in factors:
            if f < 2:
                raise InvalidSpecError(f"cyclic factor must be >= 2, got {f}")
        object.__setattr__(self, 'invariant_factors', factors)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.invariant_factors) if self.invariant_factors else 1

    @property
    def label(self) -> str:
        """Render back to spec-string form, e.g. "Z2^3xZ3"."""
        if not self.invariant_factors:
            return "1"
        parts = []
        run_factor, run_len = self.invariant_factors[0], 0
        for f in self.invariant_factors + (0,):
            if f == run_factor:
                run_len += 1
                continue
            parts.append(f"Z{run_factor}" + (f"^{run_len}" if run_len > 1 else ""))
            run_factor, run_len = f, 1
        return "x".join(parts)

    def elements(self) -> range:
        return range(self.order)

    def exponents(self, r: int) -> Tuple[int, ...]:
        return _exponent_table(self.invariant_factors)[r]

    def rank(self, exponents: Sequence[int]) -> int:
        if len(exponents) != len(self.invariant_factors):
            raise InvalidSpecError(
                f"expected {len(self.invariant_factors)} exponents, got {len(exponents)}")
        return sum((e % f) * w for e, f, w in
                   zip(exponents, self.invariant_factors, _weights(self.invariant_factors)))

    @property
    def add_table(self) -> Tuple[Tuple[int, ...], ...]:
        return _add_table(self.invariant_factors)

    @property
    def neg_table(self) -> Tuple[int, ...]:
        return _neg_table(self.invariant_factors)

    def add(self, a: int, b: int) -> int:
        return _add_table(self.invariant_factors)[a][b]

    def neg(self, a: int) -> int:
        return _neg_table(self.invariant_factors)[a]

    def sub(self, a: int, b: int) -> int:
        """a - b."""
        return _add_table(self.invariant_factors)[a][_neg_table(self.invariant_factors)[b]]

    def scale(self, m: int, a: int) -> int:
        """m * a for any integer m."""
        return sum(((m * e) % f) * w for e, f, w in
                   zip(self.exponents(a), self.invariant_factors,
                       _weights(self.invariant_factors)))

    def basis(self) -> Tuple[int, ...]:
        """Ranks of the unit vectors, one per cyclic factor."""
        k = len(self.invariant_factors)
        return tuple(self.rank([1 if j == i else 0 for j in range(k)]) for i in range(k))

    def order_of(self, a: int) -> int:
        return math.lcm(1, *(f // math.gcd(e, f)
                             for e, f in zip(self.exponents(a), self.invariant_factors)))

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Element:
    """An element as an exponent vector bound to its group."""
    group: GroupSpec
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if len(exps) != len(self.group.invariant_factors):
            raise InvalidSpecError("exponent vector length does not match group")
        for e, f in zip(exps, self.group.invariant_factors):
            if not 0 <= e < f:
                raise InvalidSpecError(f"exponent {e} out of range for Z{f}")
        object.__setattr__(self, 'exponents', exps)

    @classmethod
    def from_rank(cls, group: GroupSpec, r: int) -> "Element":
        return cls(group, group.exponents(r))

    @property
    def rank(self) -> int:
        return self.group.rank(self.exponents)

    def __add__(self, other: "Element") -> "Element":
        return Element.from_rank(self.group, self.group.add(self.rank, other.rank))

    def __neg__(self) -> "Element":
        return Element.from_rank(self.group, self.group.neg(self.rank))


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup as a sorted tuple of member ranks."""
    group: GroupSpec
    members: Tuple[int, ...]
    generators: Tuple[int, ...] = field(default=())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.group == other.group and self.members == other.members

    def __hash__(self) -> int:
        return hash((self.group, self.members))

    def __contains__(self, r: int) -> bool:
        return r in self.member_set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def member_set(self) -> frozenset:
        cached = self.__dict__.get('_member_set')
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, '_member_set', cached)
        return cached

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def is_whole(self) -> bool:
        return len(self.members) == self.group.order

    def __repr__(self) -> str:
        return f"Subgroup({self.group.label}, order={self.order}, members={list(self.members)})"


# ========== Construction ==========

def make_group(factors: Sequence[int]) -> GroupSpec:
    """
    Build a group from its cyclic factors.

    Args:
        factors: list of integers >= 2, e.g. [2, 2, 2, 3]

    Returns:
        GroupSpec with order and exponent available as properties
    """
    factors = list(factors)
    if not factors:
        raise InvalidSpecError("a group needs at least one cyclic factor")
    return GroupSpec(tuple(factors))


def parse_group_spec(text: str) -> GroupSpec:
    """
    Parse "Z2^3xZ3"-style strings, case-insensitively, ignoring whitespace.
    """
    compact = re.sub(r'\s+', '', str(text)).lower()
    if not _SPEC_RE.match(compact):
        raise InvalidSpecError(f"malformed group spec: {text!r}")
    factors: List[int] = []
    for k, e in _FACTOR_RE.findall(compact):
        times = int(e) if e else 1
        if times < 1:
            raise InvalidSpecError(f"power must be >= 1 in {text!r}")
        factors.extend([int(k)] * times)
    return make_group(factors)


def trivial_group() -> GroupSpec:
    return GroupSpec(())


def element_orders(G: GroupSpec) -> Tuple[int, ...]:
    """Order of every element, indexed by rank."""
    return tuple(G.order_of(r) for r in range(G.order))


def closure(G: GroupSpec, gens: Iterable[int]) -> Subgroup:
    """Subgroup generated by the given ranks."""
    gens = tuple(sorted(set(gens)))
    add = G.add_table
    members = {0}
    for g in gens:
        if g in members:
            continue
        cyclic = [0]
        x = g
        while x != 0:
            cyclic.append(x)
            x = add[x][g]
        members = {add[s][c] for s in members for c in cyclic}
    return Subgroup(G, tuple(sorted(members)), gens)


def subgroup_from_members(G: GroupSpec, members: Iterable[int]) -> Subgroup:
    """Wrap a member set, checking closure."""
    ms = tuple(sorted(set(members)))
    mset = set(ms)
    if 0 not in mset:
        raise NotASubgroupError("set does not contain the identity")
    add = G.add_table
    neg = G.neg_table
    for a in ms:
        if neg[a] not in mset:
            raise NotASubgroupError(f"not closed under inverse at {a}")
        row = add[a]
        for b in ms:
            if row[b] not in mset:
                raise NotASubgroupError(f"not closed: {a} + {b}")
    return Subgroup(G, ms, ms)


def trivial_subgroup(G: GroupSpec) -> Subgroup:
    return Subgroup(G, (0,), ())


def whole_group(G: GroupSpec) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)), G.basis())


def join(A: Subgroup, B: Subgroup) -> Subgroup:
    add = A.group.add_table
    members = {add[a][b] for a in A.members for b in B.members}
    return Subgroup(A.group, tuple(sorted(members)), A.generators + B.generators)


def meet(A: Subgroup, B: Subgroup) -> Subgroup:
    members = tuple(sorted(A.member_set & B.member_set))
    return Subgroup(A.group, members, members)


def all_subgroups(G: GroupSpec, bound: Optional[int] = None) -> List[Subgroup]:
    """
    Complete subgroup lattice by closure: every subgroup is reached by adding
    cyclic subgroups one at a time to a smaller one.

    Returns:
        subgroups sorted by (order, members)
    """
    bound = sring_config.MAX_GROUP_ORDER if bound is None else bound
    if G.order > bound:
        raise SizeLimitError("all_subgroups", G.order, bound)
    return list(_all_subgroups_cached(G))


@lru_cache(maxsize=64)
def _all_subgroups_cached(G: GroupSpec) -> Tuple[Subgroup, ...]:
    cyclics: Dict[frozenset, Subgroup] = {}
    for g in G.elements():
        c = closure(G, [g])
        cyclics.setdefault(c.member_set, c)
    seen: Dict[frozenset, Subgroup] = {}
    start = trivial_subgroup(G)
    seen[start.member_set] = start
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            for C in cyclics.values():
                if C.member_set <= S.member_set:
                    continue
                T = join(S, C)
                if T.member_set not in seen:
                    seen[T.member_set] = T
                    nxt.append(T)
        frontier = nxt
    subs = sorted(seen.values(), key=lambda s: (s.order, s.members))
    logger.debug("[AbelianCore] %s has %d subgroups", G.label, len(subs))
    return tuple(subs)


# ========== Automorphisms ==========

@dataclass(frozen=True)
class GroupAutomorphism:
    """
    An automorphism, stored as the images of the factor basis together with
    the full permutation of ranks.
    """
    group: GroupSpec
    images: Tuple[int, ...]
    perm: Tuple[int, ...]

    @classmethod
    def from_images(cls, G: GroupSpec, images: Sequence[int]) -> "GroupAutomorphism":
        images = tuple(images)
        if len(images) != len(G.invariant_factors):
            raise InvalidSpecError("one image per cyclic factor expected")
        for x, f in zip(images, G.invariant_factors):
            if G.scale(f, x) != 0:
                raise InvalidSpecError(f"image {x} does not have order dividing {f}")
        perm = _perm_from_images(G, images)
        if len(set(perm)) != G.order:
            raise InvalidSpecError("generator images do not define a bijection")
        return cls(G, images, perm)

    @classmethod
    def identity(cls, G: GroupSpec) -> "GroupAutomorphism":
        return cls(G, G.basis(), tuple(range(G.order)))

    def __call__(self, r: int) -> int:
        return self.perm[r]

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self o other: apply other first."""
        perm = tuple(self.perm[x] for x in other.perm)
        return GroupAutomorphism(self.group, tuple(self.perm[x] for x in other.images), perm)

    def inverse(self) -> "GroupAutomorphism":
        inv = [0] * len(self.perm)
        for x, y in enumerate(self.perm):
            inv[y] = x
        inv = tuple(inv)
        return GroupAutomorphism(self.group, tuple(inv[b] for b in self.group.basis()), inv)

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.perm))

    def apply_set(self, s: Iterable[int]) -> frozenset:
        return frozenset(self.perm[x] for x in s)


def _perm_from_images(G: GroupSpec, images: Sequence[int]) -> Tuple[int, ...]:
    add = G.add_table
    multiples = []
    for x, f in zip(images, G.invariant_factors):
        row = [0]
        for _ in range(f - 1):
            row.append(add[row[-1]][x])
        multiples.append(row)
    perm = []
    for r in G.elements():
        acc = 0
        for i, e in enumerate(G.exponents(r)):
            if e:
                acc = add[acc][multiples[i][e]]
        perm.append(acc)
    return tuple(perm)


def automorphism_group(G: GroupSpec, bound: Optional[int] = None) -> List[GroupAutomorphism]:
    """
    Aut(H) by free choice of generator images, filtered for bijectivity.

    Images of the i-th basis vector range over elements of order exactly
    f_i; a branch is cut as soon as the images chosen so far stop spanning a
    group of the expected size.
    """
    bound = sring_config.MAX_GROUP_ORDER if bound is None else bound
    if G.order > bound:
        raise SizeLimitError("automorphism_group", G.order, bound)
    return list(_automorphisms_cached(G))


@lru_cache(maxsize=32)
def _automorphisms_cached(G: GroupSpec) -> Tuple[GroupAutomorphism, ...]:
    if not G.invariant_factors:
        return (GroupAutomorphism(G, (), (0,)),)
    add = G.add_table
    by_order: Dict[int, List[int]] = {}
    for r in G.elements():
        by_order.setdefault(G.order_of(r), []).append(r)
    candidates = [by_order.get(f, []) for f in G.invariant_factors]
    total = math.prod(len(c) for c in candidates)
    if total > sring_config.MAX_AUT_CANDIDATES:
        raise SizeLimitError("automorphism candidates", total, sring_config.MAX_AUT_CANDIDATES)

    found: List[GroupAutomorphism] = []
    k = len(G.invariant_factors)

    def extend(i: int, chosen: List[int], span: frozenset, expected: int) -> None:
        if i == k:
            perm = _perm_from_images(G, chosen)
            found.append(GroupAutomorphism(G, tuple(chosen), perm))
            return
        f = G.invariant_factors[i]
        for x in candidates[i]:
            cyc = [0]
            for _ in range(f - 1):
                cyc.append(add[cyc[-1]][x])
            new_span = frozenset(add[s][c] for s in span for c in cyc)
            if len(new_span) != expected * f:
                continue
            chosen.append(x)
            extend(i + 1, chosen, new_span, expected * f)
            chosen.pop()

    extend(0, [], frozenset([0]), 1)
    logger.debug("[AbelianCore] Aut(%s): %d automorphisms", G.label, len(found))
    return tuple(found)


# ========== q-decomposition and unit action ==========

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def prime_factors(n: int) -> List[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def check_simple_divisor(G: GroupSpec, q: int) -> None:
    """Raise unless q is a prime dividing |H| exactly once."""
    if not _is_prime(q):
        raise NotSimpleDivisorError(f"{q} is not prime")
    if G.order % q != 0:
        raise NotSimpleDivisorError(f"{q} does not divide |{G.label}| = {G.order}")
    if (G.order // q) % q == 0:
        raise NotSimpleDivisorError(f"{q}^2 divides |{G.label}| = {G.order}")


def _q_multiplier(G: GroupSpec, q: int) -> int:
    e = G.exponent // q
    q_star = pow(q, -1, e) if e > 1 else 0
    return (q * q_star) % G.exponent


def q_split(G: GroupSpec, r: int, q: int) -> Tuple[int, int]:
    """Rank-level decompose_q: returns (h_q', h_q)."""
    check_simple_divisor(G, q)
    hp = G.scale(_q_multiplier(G, q), r)
    return hp, G.sub(r, hp)


def decompose_q(h: Element, q: int) -> Tuple[Element, Element]:
    """
    Split h into its q'-part and q-part.

    h_q' = (q q*) h where q* inverts q modulo e = exp(H)/q; then h_q' lies in
    the q-complement P, h_q in the order-q subgroup Q, and h = h_q' + h_q.
    """
    hp, hq = q_split(h.group, h.rank, q)
    return Element.from_rank(h.group, hp), Element.from_rank(h.group, hq)


def q_parts(G: GroupSpec, q: int) -> Tuple[Subgroup, Subgroup]:
    """(P, Q): the q-complement and the subgroup of order q."""
    check_simple_divisor(G, q)
    m = _q_multiplier(G, q)
    P = sorted({G.scale(m, r) for r in G.elements()})
    Q = sorted(r for r in G.elements() if G.scale(q, r) == 0)
    return Subgroup(G, tuple(P), tuple(P)), Subgroup(G, tuple(Q), tuple(Q))


def unit_action(G: GroupSpec, t: int) -> GroupAutomorphism:
    """h -> t*h for t a unit modulo the exponent."""
    if math.gcd(t, G.exponent) != 1:
        raise NonUnitError(f"{t} is not a unit modulo {G.exponent}")
    perm = tuple(G.scale(t, r) for r in G.elements())
    return GroupAutomorphism(G, tuple(perm[b] for b in G.basis()), perm)


def units(G: GroupSpec) -> List[int]:
    exp = G.exponent
    return [t for t in range(1, max(exp, 2)) if math.gcd(t, exp) == 1]


def m_q_units(G: GroupSpec, q: int) -> List[int]:
    """The units t of Z_exp with t = 1 mod exp/q; a group isomorphic to Z_q^*."""
    check_simple_divisor(G, q)
    exp = G.exponent
    e = exp // q
    return [t for t in range(1, exp) if t % e == 1 % e and math.gcd(t, exp) == 1]


def is_e_group(G: GroupSpec) -> bool:
    """Every Sylow subgroup elementary abelian, i.e. the exponent is squarefree."""
    return all((G.exponent // p) % p != 0 for p in prime_factors(G.exponent))


# ========== Sections U/L ==========

@dataclass(frozen=True, eq=False)
class Section:
    """
    A subquotient U/L re-presented as its own GroupSpec.

    lift[s] is the smallest rank of the coset named by section rank s;
    to_section maps every member of U to its section rank.
    """
    spec: GroupSpec
    ambient: GroupSpec
    members: Tuple[int, ...]
    kernel: Tuple[int, ...]
    lift: Tuple[int, ...]
    to_section: Dict[int, int]

    def project(self, r: int) -> int:
        return self.to_section[r]


def section(G: GroupSpec, U: Subgroup, L: Subgroup) -> Section:
    """
    Build U/L for L <= U <= H.

    Factors are primary (prime powers, primes ascending, powers descending);
    a basis is found by backtracking over coset representatives. When L is
    trivial and U = H the section is the identity map on H itself.
    """
    if not L.member_set <= U.member_set:
        raise NotASubgroupError("kernel is not contained in the subgroup")
    if L.is_trivial() and U.is_whole():
        ident = tuple(range(G.order))
        return Section(G, G, ident, (0,), ident, {r: r for r in ident})

    add = G.add_table
    coset_rep: Dict[int, int] = {}
    for u in U.members:
        if u in coset_rep:
            continue
        coset = [add[u][l] for l in L.members]
        rep = min(coset)
        for x in coset:
            coset_rep[x] = rep
    reps = sorted(set(coset_rep.values()))
    m = len(reps)

    def q_order(x: int) -> int:
        k, y = 1, x
        while coset_rep[y] != 0:
            y = add[y][x]
            k += 1
        return k

    factors: List[int] = []
    for p in prime_factors(m):
        omega_sizes = [1]
        pj = 1
        while True:
            pj *= p
            size = sum(1 for x in reps if coset_rep[G.scale(pj, x)] == 0)
            omega_sizes.append(size)
            if size == omega_sizes[-2]:
                break
        counts = [round(math.log(omega_sizes[j] / omega_sizes[j - 1], p))
                  for j in range(1, len(omega_sizes))]
        counts.append(0)
        prime_factors_here = []
        for j in range(len(counts) - 1, 0, -1):
            prime_factors_here.extend([p ** j] * (counts[j - 1] - counts[j]))
        factors.extend(prime_factors_here)

    orders = {x: q_order(x) for x in reps}
    basis: List[int] = []

    def span_of(chosen: List[int]) -> set:
        span = {0}
        for g in chosen:
            cyc = [0]
            while True:
                nxt = coset_rep[add[cyc[-1]][g]]
                if nxt == 0:
                    break
                cyc.append(nxt)
            span = {coset_rep[add[s][c]] for s in span for c in cyc}
        return span

    def search(i: int, expected: int) -> bool:
        if i == len(factors):
            return True
        d = factors[i]
        for x in reps:
            if orders[x] != d:
                continue
            basis.append(x)
            if len(span_of(basis)) == expected * d and search(i + 1, expected * d):
                return True
            basis.pop()
        return False

    if not search(0, 1):
        raise NotASubgroupError("could not decompose section")  # unreachable for abelian input

    spec = GroupSpec(tuple(factors))
    lift = []
    for s in spec.elements():
        acc = 0
        for e, g in zip(spec.exponents(s), basis):
            for _ in range(e):
                acc = add[acc][g]
        lift.append(coset_rep[acc])
    rep_to_s = {rep: s for s, rep in enumerate(lift)}
    to_section = {u: rep_to_s[coset_rep[u]] for u in U.members}
    return Section(spec, G, U.members, L.members, tuple(lift), to_section)


__all__ = [
    'GroupSpec', 'Element', 'Subgroup', 'GroupAutomorphism', 'Section',
    'make_group', 'parse_group_spec', 'trivial_group', 'closure',
    'subgroup_from_members', 'trivial_subgroup', 'whole_group', 'join', 'meet',
    'all_subgroups', 'automorphism_group', 'check_simple_divisor', 'q_split',
    'decompose_q', 'q_parts', 'unit_action', 'units', 'm_q_units', 'is_e_group',
    'prime_factors', 'section',
]
