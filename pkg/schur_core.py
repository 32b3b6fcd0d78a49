"""
schur_core.py - Schur partitions (S-rings)

A Schur partition of H is the combinatorial face of an S-ring: blocks
(basic sets) that isolate the identity, are closed under inversion, and
whose simple quantities span a subring of Z[H].

Provides:
- SchurPartition with canonical block order and validation of the axioms
- generated_sring: least S-ring containing given sets (closure to fixpoint)
- A-subgroups, radical, restriction and quotient onto sections
- cyclotomic S-rings, P1/Q1, primitivity and the Wielandt check
- generalized-wreath and star certificates
- the M_q trichotomy of basic sets
- wreath-chain and tensor builders used by the catalog
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from abelian_core import (GroupSpec, GroupAutomorphism, Section, Subgroup,
                          all_subgroups, automorphism_group, check_simple_divisor,
                          closure, join, m_q_units, q_parts, q_split, section,
                          trivial_subgroup, units, whole_group)
from errors import (InvalidSpecError, NotASubgroupError, PreconditionViolation,
                    RefutationWitness)
from group_ring import coefficient_class, multiply, simple_quantity

logger = logging.getLogger(__name__)


# ========== Partition value ==========

@dataclass(frozen=True, eq=False)
class SchurPartition:
    """
    Blocks in canonical order: the block holding the identity first, the
    rest by (size, smallest rank). block_of[r] is the index of r's block.
    """
    group: GroupSpec
    blocks: Tuple[Tuple[int, ...], ...]
    block_of: Tuple[int, ...]

    @classmethod
    def from_blocks(cls, G: GroupSpec, blocks: Iterable[Iterable[int]]) -> "SchurPartition":
        """Canonicalize; raise InvalidSpecError unless blocks partition H."""
        normalized = []
        for b in blocks:
            b = tuple(sorted(set(int(x) for x in b)))
            if not b:
                raise InvalidSpecError("empty block")
            normalized.append(b)
        seen = [False] * G.order
        for b in normalized:
            for x in b:
                if not 0 <= x < G.order:
                    raise InvalidSpecError(f"rank {x} outside {G.label}")
                if seen[x]:
                    raise InvalidSpecError(f"rank {x} appears in two blocks")
                seen[x] = True
        if not all(seen):
            missing = seen.index(False)
            raise InvalidSpecError(f"rank {missing} is not covered")
        normalized.sort(key=lambda b: (0 not in b, len(b), b[0]))
        block_of = [0] * G.order
        for i, b in enumerate(normalized):
            for x in b:
                block_of[x] = i
        return cls(G, tuple(normalized), tuple(block_of))

    @classmethod
    def from_labels(cls, G: GroupSpec, labels: Sequence) -> "SchurPartition":
        """Blocks from any per-rank labelling (equal labels share a block)."""
        groups: Dict = {}
        for r, lab in enumerate(labels):
            groups.setdefault(lab, []).append(r)
        return cls.from_blocks(G, groups.values())

    @property
    def rank(self) -> int:
        return len(self.blocks)

    @property
    def is_discrete(self) -> bool:
        return len(self.blocks) == self.group.order

    @property
    def is_rank_two(self) -> bool:
        return len(self.blocks) == 2

    def block_sizes(self) -> List[int]:
        return [len(b) for b in self.blocks]

    def block_sets(self) -> FrozenSet[FrozenSet[int]]:
        return frozenset(frozenset(b) for b in self.blocks)

    def key(self) -> str:
        """Canonical serialization, used for dedup and sort order."""
        return json.dumps({"group": self.group.label,
                           "blocks": [list(b) for b in self.blocks]},
                          separators=(",", ":"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchurPartition):
            return NotImplemented
        return self.group == other.group and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.group, self.blocks))

    def __repr__(self) -> str:
        return f"SchurPartition({self.group.label}, rank={self.rank}, sizes={self.block_sizes()})"


def discrete_partition(G: GroupSpec) -> SchurPartition:
    return SchurPartition.from_blocks(G, [[r] for r in G.elements()])


def rank_two_partition(G: GroupSpec) -> SchurPartition:
    rest = [r for r in G.elements() if r != 0]
    return SchurPartition.from_blocks(G, [[0]] + ([rest] if rest else []))


def is_union_of_blocks(P: SchurPartition, S: Iterable[int]) -> bool:
    S = set(S)
    return all(set(P.blocks[P.block_of[x]]) <= S for x in S)


# ========== Validation ==========

@dataclass
class ValidityReport:
    """Outcome of validate(); axiom is the first violated one."""
    valid: bool
    axiom: Optional[str] = None      # "identity", "inverse" or "closure"
    witness: Optional[tuple] = None  # block indices (and element) involved
    message: str = ""

    def to_dict(self) -> dict:
        return {"valid": self.valid, "axiom": self.axiom,
                "witness": list(self.witness) if self.witness else None,
                "message": self.message}


def _product_counts(P: SchurPartition, i: int, j: int) -> List[int]:
    add = P.group.add_table
    counts = [0] * P.group.order
    Tj = P.blocks[j]
    for a in P.blocks[i]:
        row = add[a]
        for b in Tj:
            counts[row[b]] += 1
    return counts


def validate(P: SchurPartition) -> ValidityReport:
    """
    Check the three S-ring axioms.

    Closure is checked by multiplying every pair of block simple quantities
    and testing that each coefficient is constant on every block.
    """
    if P.blocks[0] != (0,):
        return ValidityReport(False, "identity", (0,),
                              f"block 0 is {list(P.blocks[0])}, expected [0]")
    neg = P.group.neg_table
    for i, T in enumerate(P.blocks):
        j = P.block_of[neg[T[0]]]
        for x in T:
            if P.block_of[neg[x]] != j:
                return ValidityReport(False, "inverse", (i, j),
                                      f"-{x} and -{T[0]} lie in different blocks")
        if len(P.blocks[j]) != len(T):
            return ValidityReport(False, "inverse", (i, j),
                                  f"inverse of block {i} is a proper part of block {j}")
    for i in range(P.rank):
        for j in range(i, P.rank):
            counts = _product_counts(P, i, j)
            for k, T in enumerate(P.blocks):
                first = counts[T[0]]
                for x in T:
                    if counts[x] != first:
                        return ValidityReport(
                            False, "closure", (i, j, k),
                            f"T{i}*T{j} has coefficients {first} and {counts[x]} "
                            f"on block {k} (elements {T[0]}, {x})")
    return ValidityReport(True)


def structure_constants(P: SchurPartition) -> Dict[Tuple[int, int], Dict[int, int]]:
    """T_i * T_j = sum_k c[i,j][k] T_k for a valid partition."""
    out = {}
    for i in range(P.rank):
        for j in range(P.rank):
            counts = _product_counts(P, i, j)
            out[(i, j)] = {k: counts[T[0]] for k, T in enumerate(P.blocks) if counts[T[0]]}
    return out


# ========== Closure ==========

def generated_sring(G: GroupSpec, seeds: Iterable[Iterable[int]] = ()) -> SchurPartition:
    """
    Least S-ring in which every seed is a union of basic sets.

    Starts from the atoms of {0}, H-{0} and the seeds, then splits classes
    until stable by: inverse images, coprime power maps, and the exact
    coefficients of every pairwise product (coefficient classes). Each split
    is forced, so the fixpoint is the generated S-ring; no seeds gives the
    rank-two S-ring.
    """
    n = G.order
    seeds = [frozenset(s) for s in seeds]
    neg = G.neg_table
    multipliers = [m for m in units(G) if m != 1]
    power_tables = [[G.scale(m, r) for r in range(n)] for m in multipliers]

    labels = [(r == 0,) + tuple(r in s for s in seeds) for r in range(n)]
    colors = _relabel(labels)
    num = max(colors) + 1
    rounds = 0
    while True:
        rounds += 1
        blocks: List[List[int]] = [[] for _ in range(num)]
        for r, c in enumerate(colors):
            blocks[c].append(r)
        quantities = [simple_quantity(G, b) for b in blocks]
        products = []
        for i in range(num):
            for j in range(i, num):
                x = multiply(quantities[i], quantities[j])
                levels = {}
                for k in set(x.coefficients.values()) | {0}:
                    for r in coefficient_class(x, k):
                        levels[r] = k
                products.append(levels)
        signature = [
            (colors[r], colors[neg[r]])
            + tuple(colors[t[r]] for t in power_tables)
            + tuple(c[r] for c in products)
            for r in range(n)
        ]
        new_colors = _relabel(signature)
        new_num = max(new_colors) + 1
        colors = new_colors
        if new_num == num:
            break
        num = new_num
    logger.debug("[Closure] %s: %d classes after %d rounds", G.label, num, rounds)
    return SchurPartition.from_labels(G, colors)


def _relabel(signature: Sequence) -> List[int]:
    index = {key: i for i, key in enumerate(sorted(set(signature)))}
    return [index[key] for key in signature]


# ========== A-subgroups and radical ==========

def asubgroups(P: SchurPartition) -> List[Subgroup]:
    """All subgroups that are unions of basic sets, sorted by (order, members)."""
    sizes = [len(b) for b in P.blocks]
    out = []
    for S in all_subgroups(P.group):
        touched = {P.block_of[x] for x in S.members}
        if sum(sizes[i] for i in touched) == S.order:
            out.append(S)
    return out


def is_asubgroup(P: SchurPartition, S: Subgroup) -> bool:
    return is_union_of_blocks(P, S.members)


def radical(G: GroupSpec, T: Iterable[int]) -> Subgroup:
    """{g in H : T + g = T}, computed over the whole of H."""
    T = frozenset(T)
    if not T:
        raise PreconditionViolation("radical of the empty set")
    add = G.add_table
    members = [g for g in G.elements() if all(add[t][g] in T for t in T)]
    return Subgroup(G, tuple(members), tuple(members))


def thin_radical(P: SchurPartition) -> Subgroup:
    members = sorted(b[0] for b in P.blocks if len(b) == 1)
    return Subgroup(P.group, tuple(members), tuple(members))


def is_p_sring(P: SchurPartition, p: int) -> bool:
    def p_power(k: int) -> bool:
        while k % p == 0:
            k //= p
        return k == 1
    return all(p_power(len(b)) for b in P.blocks)


def automorphisms_of(P: SchurPartition) -> List[GroupAutomorphism]:
    """Aut_H(A): group automorphisms mapping every basic set onto itself."""
    blocks = [frozenset(b) for b in P.blocks if len(b) > 1]
    return [phi for phi in automorphism_group(P.group)
            if all(phi.apply_set(b) == b for b in blocks)]


# ========== Restriction and quotient ==========

def restrict_with_section(P: SchurPartition, U: Subgroup) -> Tuple[SchurPartition, Section]:
    if not is_asubgroup(P, U):
        raise NotASubgroupError(f"{list(U.members)} is not a union of basic sets")
    sec = section(P.group, U, trivial_subgroup(P.group))
    blocks = [[sec.to_section[x] for x in b] for b in P.blocks if b[0] in U.member_set]
    return SchurPartition.from_blocks(sec.spec, blocks), sec


def restriction(P: SchurPartition, U: Subgroup) -> SchurPartition:
    """A_U: the blocks inside U, re-indexed to U's own rank space."""
    return restrict_with_section(P, U)[0]


def quotient_with_section(P: SchurPartition, L: Subgroup) -> Tuple[SchurPartition, Section]:
    if not is_asubgroup(P, L):
        raise NotASubgroupError(f"{list(L.members)} is not an A-subgroup")
    sec = section(P.group, whole_group(P.group), L)
    images = {frozenset(sec.to_section[x] for x in b) for b in P.blocks}
    return SchurPartition.from_blocks(sec.spec, images), sec


def quotient(P: SchurPartition, L: Subgroup) -> SchurPartition:
    """A_{H/L}: images of the blocks under H -> H/L, multiplicities dropped."""
    return quotient_with_section(P, L)[0]


def subquotient(P: SchurPartition, U: Subgroup, L: Subgroup) -> SchurPartition:
    """A_{U/L} for A-subgroups L <= U."""
    for S in (U, L):
        if not is_asubgroup(P, S):
            raise NotASubgroupError(f"{list(S.members)} is not an A-subgroup")
    sec = section(P.group, U, L)
    images = {frozenset(sec.to_section[x] for x in b)
              for b in P.blocks if b[0] in U.member_set}
    return SchurPartition.from_blocks(sec.spec, images)


# ========== Cyclotomic ==========

def cyclotomic(G: GroupSpec, M: Sequence[GroupAutomorphism]) -> SchurPartition:
    """Partition of H into orbits of the automorphism group M."""
    perms = {phi.perm for phi in M}
    if not perms:
        raise NotASubgroupError("empty automorphism set")
    for a in perms:
        for b in perms:
            if tuple(a[x] for x in b) not in perms:
                raise NotASubgroupError("automorphism set is not closed under composition")
    orbit_of = [-1] * G.order
    orbits = []
    for r in G.elements():
        if orbit_of[r] >= 0:
            continue
        orbit = {p[r] for p in perms}
        for x in orbit:
            orbit_of[x] = len(orbits)
        orbits.append(orbit)
    return SchurPartition.from_blocks(G, orbits)


# ========== P1 / Q1 ==========

def p1_q1(P: SchurPartition, q: int) -> Tuple[Subgroup, Subgroup]:
    """
    P1 = largest A-subgroup inside the q-complement, Q1 = smallest
    A-subgroup containing the order-q subgroup.
    """
    Pq, Qq = q_parts(P.group, q)
    A = asubgroups(P)
    inside = [S for S in A if S.member_set <= Pq.member_set]
    P1 = inside[0]
    for S in inside[1:]:
        P1 = join(P1, S)
    above = [S for S in A if Qq.member_set <= S.member_set]
    members = frozenset(above[0].members)
    for S in above[1:]:
        members &= S.member_set
    Q1 = Subgroup(P.group, tuple(sorted(members)), tuple(sorted(members)))
    for S, name in ((P1, "P1"), (Q1, "Q1")):
        if S not in A:
            raise RefutationWitness(f"{name} is not an A-subgroup", list(S.members))
    return P1, Q1


def is_primitive(P: SchurPartition) -> bool:
    return len(asubgroups(P)) <= 2


def wielandt_check(P: SchurPartition, q: int) -> bool:
    """Primitive S-rings over H are trivial: rank <= 2, or |H| prime."""
    check_simple_divisor(P.group, q)
    if not is_primitive(P):
        return True
    n = P.group.order
    return P.rank <= 2 or all(n % d for d in range(2, n))


def p1_maximality_check(P: SchurPartition, q: int) -> Tuple[bool, List[Subgroup]]:
    """
    Every A-subgroup strictly between P1 and H1 = P1 Q1 contains Q1.

    Returns:
        (holds, offending subgroups)
    """
    P1, Q1 = p1_q1(P, q)
    H1 = join(P1, Q1)
    offending = [S for S in asubgroups(P)
                 if P1.member_set < S.member_set < H1.member_set
                 and not Q1.member_set <= S.member_set]
    return not offending, offending


# ========== Decomposition certificates ==========

@dataclass
class DecompositionCertificate:
    """
    kind is "generalized-wreath", "star", or "none" for a refusal.
    For refusals, witness holds the failed condition and block index.
    """
    kind: str
    subgroups: Tuple[Subgroup, Subgroup]
    trivial: bool = False
    witness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.kind != "none"

    def reverify(self, P: SchurPartition) -> bool:
        if not self.ok:
            return False
        add = P.group.add_table
        if self.kind == "generalized-wreath":
            L, _ = self.subgroups
            for idx, reps in self.witness.get("cosets", {}).items():
                union = {add[r][l] for r in reps for l in L.members}
                if union != set(P.blocks[int(idx)]):
                    return False
            return True
        for idx, (R, S) in self.witness.get("factors", {}).items():
            if not (is_union_of_blocks(P, R) and is_union_of_blocks(P, S)):
                return False
            if {add[r][s] for r in R for s in S} != set(P.blocks[int(idx)]):
                return False
        return True

    def to_dict(self) -> dict:
        def conv(w):
            if isinstance(w, dict):
                return {str(k): conv(v) for k, v in w.items()}
            if isinstance(w, (list, tuple)):
                return [conv(v) for v in w]
            return w
        return {"kind": self.kind,
                "subgroups": [list(S.members) for S in self.subgroups],
                "trivial": self.trivial,
                "witness": conv(self.witness)}


def detect_gwreath(P: SchurPartition) -> List[DecompositionCertificate]:
    """
    All pairs L <= U of A-subgroups such that every basic set outside U is a
    union of L-cosets. Witness: per outside block, its L-coset minima.
    """
    A = asubgroups(P)
    add = P.group.add_table
    radicals = [radical(P.group, b).member_set for b in P.blocks]
    certs = []
    for U in A:
        outside = [i for i, b in enumerate(P.blocks) if b[0] not in U.member_set]
        for L in A:
            if not L.member_set <= U.member_set:
                continue
            if not all(L.member_set <= radicals[i] for i in outside):
                continue
            cosets = {}
            for i in outside:
                reps = sorted({min(add[x][l] for l in L.members) for x in P.blocks[i]})
                cosets[i] = reps
            certs.append(DecompositionCertificate(
                "generalized-wreath", (L, U),
                trivial=L.is_trivial() or U.is_whole(),
                witness={"cosets": cosets}))
    certs.sort(key=lambda c: (c.subgroups[0].order, c.subgroups[0].members,
                              c.subgroups[1].order, c.subgroups[1].members))
    return certs


def _factor_block(P: SchurPartition, T: FrozenSet[int], K: Subgroup,
                  L: Subgroup) -> Optional[Tuple[List[int], List[int]]]:
    """Find A-sets R in K, S in L with R + S = T, or None."""
    add = P.group.add_table
    for S0 in (b for b in P.blocks if b[0] in L.member_set):
        R = [k for k in K.members if all(add[k][s] in T for s in S0)]
        if not R:
            continue
        S = [l for l in L.members if all(add[r][l] in T for r in R)]
        if {add[r][s] for r in R for s in S} == T \
                and is_union_of_blocks(P, R) and is_union_of_blocks(P, S):
            return R, S
    return None


def detect_star(P: SchurPartition, K: Subgroup, L: Subgroup) -> DecompositionCertificate:
    """
    Check A = A_K * A_L.

    (a) K meet L is normal in L: automatic for abelian H.
    (b) every basic set in L - K is a union of (K meet L)-cosets.
    (c) every basic set outside K u L is R + S for A-sets R in K, S in L.
    """
    for S in (K, L):
        if not is_asubgroup(P, S):
            raise NotASubgroupError(f"{list(S.members)} is not an A-subgroup")
    add = P.group.add_table
    KL = K.member_set & L.member_set
    trivial = K.is_trivial() or K.is_whole()
    for i, b in enumerate(P.blocks):
        if b[0] in L.member_set and b[0] not in K.member_set:
            T = set(b)
            if any(add[x][m] not in T for x in b for m in KL):
                return DecompositionCertificate("none", (K, L), trivial,
                                                {"failed": "b", "block": i})
    factors = {}
    for i, b in enumerate(P.blocks):
        if b[0] in K.member_set or b[0] in L.member_set:
            continue
        found = _factor_block(P, frozenset(b), K, L)
        if found is None:
            return DecompositionCertificate("none", (K, L), trivial,
                                            {"failed": "c", "block": i})
        factors[i] = found
    return DecompositionCertificate("star", (K, L), trivial, {"factors": factors})


def find_star(P: SchurPartition, q: int) -> Optional[DecompositionCertificate]:
    """
    First nontrivial star certificate, K over A-subgroups by descending
    order and L over A-subgroups containing Q by ascending order.
    """
    _, Qq = q_parts(P.group, q)
    A = asubgroups(P)
    Ks = sorted((S for S in A if not (S.is_trivial() or S.is_whole())),
                key=lambda S: (-S.order, S.members))
    Ls = [S for S in A if Qq.member_set <= S.member_set]
    for K in Ks:
        for L in Ls:
            cert = detect_star(P, K, L)
            if cert.ok:
                return cert
    return None


# ========== Trichotomy ==========

@dataclass
class TrichotomyResult:
    """Shape of an M_q-invariant basic set T = S1 u S_{-1}Q# u S0 Q."""
    block: int
    case: str  # "a", "b" or "c"
    s1: Tuple[int, ...]
    s_minus1: Tuple[int, ...]
    s0: Tuple[int, ...]
    clause_holds: bool
    violations: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"block": self.block, "case": self.case, "S1": list(self.s1),
                "S-1": list(self.s_minus1), "S0": list(self.s0),
                "clause_holds": self.clause_holds, "violations": self.violations}


def is_mq_invariant(P: SchurPartition, q: int, T: Iterable[int]) -> bool:
    G = P.group
    T = frozenset(T)
    return all(frozenset(G.scale(t, x) for x in T) == T for t in m_q_units(G, q))


def trichotomy_classify(P: SchurPartition, q: int, T, *,
                        p1q1: Optional[Tuple[Subgroup, Subgroup]] = None) -> TrichotomyResult:
    """
    Classify an M_q-invariant basic set T (block index or rank set).

    For each q'-part s of T, R_s = (T - s) meet Q must be {0}, Q# or Q; the
    parts S1, S_{-1}, S0 collect s by shape. Case (a) when S1 is nonempty,
    (b) when only S_{-1} is, (c) otherwise. The clause of the case is then
    checked: (a) T inside P1, (b) T = S_{-1} + (Q1 - P1) with S_{-1} inside
    P1, (c) Q1 + T = T.

    Raises:
        PreconditionViolation: T is not M_q-invariant
        RefutationWitness: some R_s has none of the three shapes
    """
    G = P.group
    check_simple_divisor(G, q)
    if isinstance(T, int):
        block = T
        T = frozenset(P.blocks[T])
    else:
        T = frozenset(T)
        block = P.block_of[min(T)]
    if not is_mq_invariant(P, q, T):
        raise PreconditionViolation(f"block {block} is not M_{q}-invariant")
    add = G.add_table
    _, Qq = q_parts(G, q)
    Q = Qq.member_set
    Q_sharp = Q - {0}
    s1, sm1, s0 = [], [], []
    for s in sorted({q_split(G, x, q)[0] for x in T}):
        R = frozenset(y for y in Q if add[s][y] in T)
        if R == frozenset([0]):
            s1.append(s)
        elif R == Q_sharp:
            sm1.append(s)
        elif R == Q:
            s0.append(s)
        else:
            raise RefutationWitness(
                f"block {block}: R_s for s={s} has shape {sorted(R)}",
                {"block": block, "s": s, "R_s": sorted(R)})
    case = "a" if s1 else ("b" if sm1 else "c")
    P1, Q1 = p1q1 if p1q1 is not None else p1_q1(P, q)
    violations = []
    if case == "a":
        if not T <= P1.member_set:
            violations.append("T not inside P1")
    elif case == "b":
        Q1_minus = Q1.member_set - P1.member_set
        if frozenset(add[s][y] for s in sm1 for y in Q1_minus) != T:
            violations.append("T != S_{-1}(Q1 - P1)")
        if not set(sm1) <= P1.member_set:
            violations.append("S_{-1} not inside P1")
    else:
        if frozenset(add[y][x] for y in Q1.members for x in T) != T:
            violations.append("Q1 T != T")
    for name, part in (("S1", s1), ("S_{-1}", sm1)):
        if part and not is_union_of_blocks(P, part):
            violations.append(f"{name} is not an A-set")
    return TrichotomyResult(block, case, tuple(s1), tuple(sm1), tuple(s0),
                            not violations, violations)


def trichotomy_table(P: SchurPartition, q: int) -> List[TrichotomyResult]:
    p1q1 = p1_q1(P, q)
    return [trichotomy_classify(P, q, i, p1q1=p1q1)
            for i, b in enumerate(P.blocks) if is_mq_invariant(P, q, b)]


# ========== Builders ==========

def wreath_chain_partition(G: GroupSpec, chain: Sequence[Subgroup]) -> SchurPartition:
    """
    Iterated wreath of full group rings along L1 < L2 < ... < Lk:
    singletons in L1, L_{i-1}-cosets in L_i - L_{i-1}, Lk-cosets outside Lk.
    """
    add = G.add_table
    blocks = [[x] for x in chain[0].members]
    levels = list(chain) + [whole_group(G)]
    for inner, outer in zip(levels, levels[1:]):
        placed = set(inner.members)
        for x in outer.members:
            if x in placed:
                continue
            coset = sorted(add[x][l] for l in inner.members)
            placed.update(coset)
            blocks.append(coset)
    return SchurPartition.from_blocks(G, blocks)


def tensor_partition(G: GroupSpec, left: Sequence[Iterable[int]],
                     right: Sequence[Iterable[int]]) -> SchurPartition:
    """
    Tensor product of S-rings over U and W with H = U + W direct; blocks
    are given as ambient ranks and combined as {a + b}.
    """
    add = G.add_table
    blocks = []
    for X in left:
        for Y in right:
            blocks.append({add[a][b] for a in X for b in Y})
    if sum(len(b) for b in blocks) != G.order:
        raise NotASubgroupError("tensor factors do not form a direct sum")
    return SchurPartition.from_blocks(G, blocks)


def wreath_partition(P_inner: Sequence[Iterable[int]], L: Subgroup,
                     outer: SchurPartition, sec: Section) -> SchurPartition:
    """
    A_L wr A_{H/L}: the given blocks inside L, plus preimages of the
    non-identity blocks of the outer S-ring over the section H/L.
    """
    G = L.group
    blocks = [list(b) for b in P_inner]
    by_section: Dict[int, List[int]] = {}
    for x, s in sec.to_section.items():
        by_section.setdefault(s, []).append(x)
    for b in outer.blocks[1:]:
        blocks.append([x for s in b for x in by_section[s]])
    return SchurPartition.from_blocks(G, blocks)


def block_ring_element(P: SchurPartition, i: int):
    return simple_quantity(P.group, P.blocks[i])


def block_product(P: SchurPartition, i: int, j: int):
    return multiply(block_ring_element(P, i), block_ring_element(P, j))


__all__ = [
    'SchurPartition', 'ValidityReport', 'DecompositionCertificate', 'TrichotomyResult',
    'discrete_partition', 'rank_two_partition', 'is_union_of_blocks', 'validate',
    'structure_constants', 'generated_sring', 'asubgroups', 'is_asubgroup', 'radical',
    'thin_radical', 'is_p_sring', 'automorphisms_of', 'restriction',
    'restrict_with_section', 'quotient', 'quotient_with_section', 'subquotient', 'cyclotomic',
    'p1_q1', 'is_primitive', 'wielandt_check', 'p1_maximality_check',
    'detect_gwreath', 'detect_star', 'find_star', 'is_mq_invariant',
    'trichotomy_classify', 'trichotomy_table', 'wreath_chain_partition',
    'tensor_partition', 'wreath_partition', 'block_ring_element', 'block_product',
]
