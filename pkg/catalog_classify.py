"""
catalog_classify.py - S-ring census and the C_p^3 catalog

Exhaustive enumeration of Schur partitions over small groups, the six
p-S-rings B1..B6 over C_p^3 as explicit constructions, Schurian testing and
catalog matching up to Cayley isomorphism.

Enumeration grows the block holding the smallest unassigned element. A
candidate block may only collect elements that agree with it on every
product coefficient of the blocks already placed, and it brings along its
images under every unit (those are basic sets too), so each partition is
reached exactly once.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sring_config
from abelian_core import (GroupAutomorphism, GroupSpec, automorphism_group, closure,
                          make_group, units)
from ci_engine import cayley_isomorphic
from errors import GroupMismatchError, InvalidSpecError, RefutationWitness, SizeLimitError
from perm_engine import aut_scheme, scheme, transitivity_module
from schur_core import (SchurPartition, cyclotomic, detect_gwreath, is_p_sring,
                        tensor_partition, validate, wreath_chain_partition)

logger = logging.getLogger(__name__)

CATALOG_PRIMES = (2, 3)


# ========== Catalog ==========

@dataclass
class CatalogEntry:
    """One of B1..B6 over C_p^3, with the parameters it was built from."""
    label: str
    p: int
    partition: SchurPartition
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        P = self.partition
        return {"label": self.label, "p": self.p, "group": P.group.label,
                "blocks": [list(b) for b in P.blocks], "params": self.params}


def elementary_group(p: int) -> GroupSpec:
    return make_group([p, p, p])


def _fixed_points(phi: GroupAutomorphism) -> int:
    return sum(1 for x, y in enumerate(phi.perm) if x == y)


def _order(phi: GroupAutomorphism) -> int:
    k, cur = 1, phi
    while not cur.is_identity():
        cur = cur.compose(phi)
        k += 1
    return k


def b6_alpha(p: int) -> Optional[GroupAutomorphism]:
    """First automorphism of C_p^3 of order p with exactly p fixed points, if any."""
    for phi in automorphism_group(elementary_group(p)):
        if not phi.is_identity() and _fixed_points(phi) == p and _order(phi) == p:
            return phi
    return None


def _powers(phi: GroupAutomorphism) -> List[GroupAutomorphism]:
    out = [GroupAutomorphism.identity(phi.group)]
    cur = phi
    while not cur.is_identity():
        out.append(cur)
        cur = cur.compose(phi)
    return out


def _checked(label: str, p: int, P: SchurPartition, params: dict) -> CatalogEntry:
    report = validate(P)
    if not report.valid:
        raise RefutationWitness(f"catalog entry {label} over p={p} is not an S-ring",
                                report.to_dict())
    return CatalogEntry(label, p, P, params)


@lru_cache(maxsize=None)
def _catalog_cached(p: int) -> Tuple[CatalogEntry, ...]:
    G = elementary_group(p)
    e1, e2, e3 = G.basis()
    L1 = closure(G, [e1])
    L2 = closure(G, [e1, e2])
    H = closure(G, [e1, e2, e3])
    W = closure(G, [e3])
    entries = [
        _checked("B1", p, wreath_chain_partition(G, [H]), {"chain": []}),
        _checked("B2", p, wreath_chain_partition(G, [L2]),
                 {"chain": [list(L2.members)]}),
    ]
    inner = wreath_chain_partition(G, [L1, L2])
    left = [b for b in inner.blocks if b[0] in L2.member_set]
    right = [[w] for w in W.members]
    entries.append(_checked("B3", p, tensor_partition(G, left, right),
                            {"wreath": [list(L1.members), list(L2.members)],
                             "discrete": list(W.members)}))
    entries.append(_checked("B4", p, wreath_chain_partition(G, [L1]),
                            {"chain": [list(L1.members)]}))
    entries.append(_checked("B5", p, wreath_chain_partition(G, [L1, L2]),
                            {"chain": [list(L1.members), list(L2.members)]}))
    alpha = b6_alpha(p)
    if alpha is not None:
        entries.append(_checked("B6", p, cyclotomic(G, _powers(alpha)),
                                {"alpha": list(alpha.images)}))
    else:
        logger.info("[Catalog] p=%d: no automorphism of order %d with %d fixed points, B6 absent",
                    p, p, p)
    return tuple(entries)


def build_catalog(p: int) -> List[CatalogEntry]:
    """
    Build B1..B5 (and B6 when a qualifying alpha exists) over C_p^3.

    Args:
        p: 2 or 3

    Returns:
        Catalog entries in label order
    """
    if p not in CATALOG_PRIMES:
        raise InvalidSpecError(f"catalog is built for p in {CATALOG_PRIMES}, got {p}")
    return list(_catalog_cached(p))


def match_catalog(P: SchurPartition, catalog: Sequence[CatalogEntry]) -> Optional[str]:
    """Label of the entry Cayley-isomorphic to P, or None."""
    for entry in catalog:
        if entry.partition.group != P.group:
            raise GroupMismatchError(
                f"catalog over {entry.partition.group.label}, partition over {P.group.label}")
        if cayley_isomorphic(P, entry.partition) is not None:
            return entry.label
    return None


def wreath_certificates(entry: CatalogEntry) -> List[Tuple[List[int], List[int]]]:
    """Nontrivial generalized-wreath pairs (L, U) of a catalog entry."""
    return [(list(c.subgroups[0].members), list(c.subgroups[1].members))
            for c in detect_gwreath(entry.partition) if not c.trivial]


# ========== Enumeration ==========

class _Enumerator:
    """Backtracking over block assignments for one group."""

    def __init__(self, G: GroupSpec):
        self.G = G
        self.n = G.order
        self.add = G.add_table
        self.unit_tables = [[G.scale(m, r) for r in range(self.n)] for m in units(G)]
        self.nodes = 0

    def images(self, T: frozenset) -> Optional[List[frozenset]]:
        """Distinct images of T under the units, or None if two of them overlap."""
        out: List[frozenset] = []
        for table in self.unit_tables:
            img = frozenset(table[x] for x in T)
            for other in out:
                if img == other:
                    break
                if img & other:
                    return None
            else:
                out.append(img)
        return out

    def signature(self, blocks: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
        n = self.n
        columns = []
        for i in range(len(blocks)):
            for j in range(i, len(blocks)):
                counts = [0] * n
                for a in blocks[i]:
                    row = self.add[a]
                    for b in blocks[j]:
                        counts[row[b]] += 1
                columns.append(counts)
        return [tuple(c[r] for c in columns) for r in range(n)]

    def choices(self, label: List[int], blocks: List[Tuple[int, ...]]):
        """Candidate image families for the block of the smallest unassigned element."""
        x = label.index(-1)
        sig = self.signature(blocks)
        eligible = [y for y in range(x + 1, self.n) if label[y] == -1 and sig[y] == sig[x]]
        for size in range(len(eligible) + 1):
            for extra in itertools.combinations(eligible, size):
                T = frozenset((x,) + extra)
                family = self.images(T)
                if family is None:
                    continue
                if any(label[y] != -1 for img in family for y in img):
                    continue
                yield family

    def extend(self, label: List[int], blocks: List[Tuple[int, ...]], out: Dict[str, SchurPartition]) -> None:
        self.nodes += 1
        if self.nodes > sring_config.SEARCH_NODE_BUDGET:
            raise SizeLimitError("enumerate_srings nodes", self.nodes, sring_config.SEARCH_NODE_BUDGET)
        if -1 not in label:
            P = SchurPartition.from_blocks(self.G, blocks)
            if validate(P).valid:
                out[P.key()] = P
            return
        for family in self.choices(label, blocks):
            self.place(label, blocks, family, out)

    def place(self, label, blocks, family, out) -> None:
        start = len(blocks)
        for img in family:
            for y in img:
                label[y] = len(blocks)
            blocks.append(tuple(sorted(img)))
        self.extend(label, blocks, out)
        for img in family:
            for y in img:
                label[y] = -1
        del blocks[start:]

    def start(self) -> Tuple[List[int], List[Tuple[int, ...]]]:
        label = [-1] * self.n
        label[0] = 0
        return label, [(0,)]


def _check_enum_size(G: GroupSpec, allow_large: bool) -> None:
    n = G.order
    if n > sring_config.MAX_ENUM_ORDER:
        raise SizeLimitError("enumerate_srings order", n, sring_config.MAX_ENUM_ORDER)
    if n > sring_config.GATED_ENUM_ORDER and not allow_large:
        raise SizeLimitError("enumerate_srings order (pass allow_large)", n,
                             sring_config.GATED_ENUM_ORDER)


def _enumerate_branch(factors: Tuple[int, ...], index: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Worker task: all S-rings below the index-th root choice."""
    G = GroupSpec(factors)
    enum = _Enumerator(G)
    label, blocks = enum.start()
    family = list(enum.choices(label, blocks))[index]
    out: Dict[str, SchurPartition] = {}
    enum.place(label, blocks, family, out)
    return [P.blocks for P in out.values()]


def enumerate_srings(G: GroupSpec, *, allow_large: bool = False,
                     workers: int = 1) -> List[SchurPartition]:
    """
    Every Schur partition over G, sorted by canonical key.

    Args:
        G: the group, |G| <= MAX_ENUM_ORDER
        allow_large: required above GATED_ENUM_ORDER
        workers: > 1 splits the search by the first block choice

    Raises:
        SizeLimitError: order over the bounds or node budget exhausted
    """
    _check_enum_size(G, allow_large)
    enum = _Enumerator(G)
    label, blocks = enum.start()
    out: Dict[str, SchurPartition] = {}
    if G.order == 1:
        return [SchurPartition.from_blocks(G, blocks)]
    if workers > 1:
        roots = len(list(enum.choices(label, blocks)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_enumerate_branch, [G.invariant_factors] * roots, range(roots))
            for found in results:
                for b in found:
                    P = SchurPartition.from_blocks(G, b)
                    out[P.key()] = P
    else:
        enum.extend(label, blocks, out)
    logger.info("[Enumerate] %s: %d S-rings (%d nodes)", G.label, len(out), enum.nodes)
    return [out[k] for k in sorted(out)]


def schurian_check(P: SchurPartition) -> bool:
    """P equals the transitivity module of the automorphism group of its scheme."""
    G = aut_scheme(scheme(P))
    return transitivity_module(G, P.group) == P


# ========== Census ==========

@dataclass
class CensusRow:
    partition: SchurPartition
    p_sring: bool
    schurian: bool
    label: Optional[str]

    def to_dict(self) -> dict:
        P = self.partition
        return {"group": P.group.label, "blocks": [list(b) for b in P.blocks],
                "rank": P.rank, "p_sring": self.p_sring, "schurian": self.schurian,
                "label": self.label}


def census(p: int, *, allow_large: bool = False, workers: int = 1) -> List[CensusRow]:
    """
    All S-rings over C_p^3, each marked p-S-ring / Schurian and, for
    Schurian p-S-rings, matched against the catalog.
    """
    catalog = build_catalog(p)
    rows = []
    for P in enumerate_srings(elementary_group(p), allow_large=allow_large, workers=workers):
        p_ring = is_p_sring(P, p)
        schurian = schurian_check(P)
        label = match_catalog(P, catalog) if p_ring else None
        rows.append(CensusRow(P, p_ring, schurian, label))
    return rows


def classify_group(G: GroupSpec, *, allow_large: bool = False, workers: int = 1) -> List[dict]:
    """Enumeration table for an arbitrary small group (rank, sizes, Schurian)."""
    return [{"blocks": [list(b) for b in P.blocks], "rank": P.rank,
             "sizes": P.block_sizes(), "schurian": schurian_check(P)}
            for P in enumerate_srings(G, allow_large=allow_large, workers=workers)]


__all__ = [
    'CatalogEntry', 'CensusRow', 'elementary_group', 'b6_alpha', 'build_catalog',
    'match_catalog', 'wreath_certificates', 'enumerate_srings', 'schurian_check',
    'census', 'classify_group',
]
