"""
perm_engine.py - Permutation groups acting on the ranks of H

Permutations are tuples of images. Products read left to right:
(p * q)[x] = q[p[x]], i.e. "p then q". Conjugation a^y = y^-1 a y maps
y(x) to y(a(x)).

Provides:
- PermGroup: deterministic Schreier-Sims chain with order, membership,
  orbits and element enumeration
- regular_representation / transitivity_module
- ColorMatrix and the scheme of a Schur partition
- aut_scheme: colour-preserving automorphisms by 1-dimensional refinement
  plus individualize-and-refine backtracking
- regular_subgroups and conjugate_into
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

import sring_config
from abelian_core import GroupAutomorphism, GroupSpec
from errors import NotOvergroupError, RefutationWitness, SizeLimitError
from schur_core import SchurPartition

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]


# ========== Permutation helpers ==========

def identity_perm(n: int) -> Permutation:
    return tuple(range(n))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """p then q."""
    return tuple(map(q.__getitem__, p))


def invert(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def conjugate(a: Permutation, y: Permutation) -> Permutation:
    """a^y = y^-1 a y."""
    out = [0] * len(a)
    for x in range(len(a)):
        out[y[x]] = y[a[x]]
    return tuple(out)


def is_identity(p: Permutation) -> bool:
    return all(x == y for x, y in enumerate(p))


def cycles(p: Permutation) -> List[Tuple[int, ...]]:
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p[x]
        out.append(tuple(cyc))
    return out


def perm_order(p: Permutation) -> int:
    return math.lcm(1, *(len(c) for c in cycles(p)))


def is_semiregular(p: Permutation) -> bool:
    """All cycles of equal length."""
    return len({len(c) for c in cycles(p)}) == 1


def powers(p: Permutation) -> List[Permutation]:
    out = [identity_perm(len(p))]
    x = p
    while not is_identity(x):
        out.append(x)
        x = compose(x, p)
    return out


# ========== Permutation groups ==========

class PermGroup:
    """
    Permutation group with a stabilizer chain.

    The chain is built by the deterministic Schreier-Sims algorithm; a base
    prefix may be requested, e.g. [0] so that level 1 is the stabilizer of
    the identity point.
    """

    def __init__(self, degree: int, generators: Sequence[Permutation] = (),
                 base: Sequence[int] = ()):
        self.degree = degree
        gens = []
        seen = set()
        for g in generators:
            g = tuple(g)
            if len(g) != degree:
                raise ValueError(f"permutation of length {len(g)} in degree {degree}")
            if not is_identity(g) and g not in seen:
                seen.add(g)
                gens.append(g)
        self.generators: List[Permutation] = gens
        self.base: List[int] = []
        self.strong_gens: List[List[Permutation]] = []
        self.transversals: List[Dict[int, Permutation]] = []
        self._inverse_cache: Dict[Permutation, Permutation] = {}
        self._schreier_sims(list(base))

    @classmethod
    def from_chain(cls, degree: int, base: Sequence[int],
                   strong_gens: Sequence[Sequence[Permutation]]) -> "PermGroup":
        """
        Adopt a known strong generating set: strong_gens[i] must generate
        the pointwise stabilizer of base[:i]. No sifting is done.
        """
        group = cls.__new__(cls)
        group.degree = degree
        group.base = list(base)
        group.strong_gens = [list(level) for level in strong_gens]
        group.generators = list(group.strong_gens[0]) if group.strong_gens else []
        group._inverse_cache = {}
        group.transversals = [group._transversal(b, level)
                              for b, level in zip(group.base, group.strong_gens)]
        return group

    # ---------- chain construction ----------

    def _inv(self, p: Permutation) -> Permutation:
        inv = self._inverse_cache.get(p)
        if inv is None:
            inv = invert(p)
            self._inverse_cache[p] = inv
        return inv

    def _transversal(self, point: int, gens: List[Permutation]) -> Dict[int, Permutation]:
        trans = {point: identity_perm(self.degree)}
        queue = [point]
        for x in queue:
            ux = trans[x]
            for s in gens:
                y = s[x]
                if y not in trans:
                    trans[y] = compose(ux, s)
                    queue.append(y)
        return trans

    def _sift(self, g: Permutation, start: int) -> Tuple[Permutation, int]:
        for level in range(start, len(self.base)):
            b = g[self.base[level]]
            trans = self.transversals[level]
            if b not in trans:
                return g, level
            g = compose(g, self._inv(trans[b]))
        return g, len(self.base)

    def _moved_point(self, g: Permutation) -> int:
        return next(x for x, y in enumerate(g) if x != y)

    def _schreier_sims(self, base: List[int]) -> None:
        for g in self.generators:
            if all(g[b] == b for b in base):
                base.append(self._moved_point(g))
        self.base = base
        self.strong_gens = [[g for g in self.generators if all(g[b] == b for b in base[:i])]
                            for i in range(len(base))]
        self.transversals = [self._transversal(base[i], self.strong_gens[i])
                             for i in range(len(base))]
        i = len(base) - 1
        while i >= 0:
            restart = False
            trans = self.transversals[i]
            for beta in list(trans):
                u = trans[beta]
                for s in list(self.strong_gens[i]):
                    gamma = s[beta]
                    schreier = compose(compose(u, s), self._inv(trans[gamma]))
                    if is_identity(schreier):
                        continue
                    h, j = self._sift(schreier, i + 1)
                    if j == len(self.base) and is_identity(h):
                        continue
                    if j == len(self.base):
                        self.base.append(self._moved_point(h))
                        self.strong_gens.append([])
                        self.transversals.append({})
                    for level in range(i + 1, j + 1):
                        self.strong_gens[level].append(h)
                        self.transversals[level] = self._transversal(
                            self.base[level], self.strong_gens[level])
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    # ---------- queries ----------

    @property
    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def contains(self, g: Sequence[int]) -> bool:
        g = tuple(g)
        if len(g) != self.degree:
            return False
        h, j = self._sift(g, 0)
        return j == len(self.base) and is_identity(h)

    __contains__ = contains

    def orbit(self, point: int) -> List[int]:
        seen = {point}
        queue = [point]
        for x in queue:
            for g in self.generators:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def orbits(self) -> List[List[int]]:
        done = set()
        out = []
        for x in range(self.degree):
            if x not in done:
                orb = self.orbit(x)
                done.update(orb)
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree if self.degree else True

    def with_base(self, prefix: Sequence[int]) -> "PermGroup":
        """Same group, chain rebuilt with the given base prefix."""
        if list(self.base[:len(prefix)]) == list(prefix):
            return self
        return PermGroup(self.degree, self.strong_generators(), base=prefix)

    def strong_generators(self) -> List[Permutation]:
        out = []
        seen = set()
        for level in self.strong_gens:
            for g in level:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        for g in self.generators:
            if g not in seen:
                seen.add(g)
                out.append(g)
        return out

    def stabilizer(self, point: int) -> "PermGroup":
        """Point stabilizer, read off level 1 of a chain based at point."""
        G = self.with_base([point])
        if not G.base:
            return PermGroup(self.degree)
        if len(G.base) == 1:
            return PermGroup(self.degree)
        return PermGroup.from_chain(self.degree, G.base[1:], G.strong_gens[1:])

    def stabilizer_orbits(self, point: int = 0) -> List[List[int]]:
        return self.stabilizer(point).orbits()

    def elements(self) -> Iterator[Permutation]:
        """All elements, as products u_k * ... * u_1 of transversal entries."""
        def walk(level: int) -> Iterator[Permutation]:
            if level == len(self.transversals):
                yield identity_perm(self.degree)
                return
            reps = list(self.transversals[level].values())
            for tail in walk(level + 1):
                for u in reps:
                    yield compose(tail, u)
        return walk(0)

    def element_list(self, bound: Optional[int] = None) -> List[Permutation]:
        if bound is not None and self.order > bound:
            raise SizeLimitError("group element enumeration", self.order, bound)
        return list(self.elements())

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order}, base={self.base})"


# ========== Groups on H ==========

def translation(H: GroupSpec, y: int) -> Permutation:
    """x -> x + y."""
    add = H.add_table
    return tuple(add[x][y] for x in H.elements())


def regular_representation(H: GroupSpec) -> PermGroup:
    """The right translations, generated by the factor basis."""
    return PermGroup(H.order, [translation(H, b) for b in H.basis()], base=[0])


def translations(H: GroupSpec) -> List[Permutation]:
    return [translation(H, y) for y in H.elements()]


def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        return PermGroup(n)
    swap = (1, 0) + tuple(range(2, n))
    cycle = tuple(range(1, n)) + (0,)
    return PermGroup(n, [swap, cycle], base=[0])


def holomorph(H: GroupSpec, M: Sequence[GroupAutomorphism]) -> PermGroup:
    """H^ x| M: translations together with the given automorphisms."""
    gens = [translation(H, b) for b in H.basis()] + [phi.perm for phi in M]
    return PermGroup(H.order, gens, base=[0])


def contains_translations(G: PermGroup, H: GroupSpec) -> bool:
    return G.degree == H.order and all(G.contains(translation(H, b)) for b in H.basis())


def transitivity_module(G: PermGroup, H: GroupSpec) -> SchurPartition:
    """V(G, H): the orbits of the stabilizer of the identity point."""
    if not contains_translations(G, H):
        raise NotOvergroupError("group does not contain the right translations of H")
    return SchurPartition.from_blocks(H, G.stabilizer_orbits(0))


# ========== Colour matrices ==========

@dataclass(frozen=True, eq=False)
class ColorMatrix:
    """n x n colour ids; colour 0 sits exactly on the diagonal."""
    matrix: np.ndarray
    group: Optional[GroupSpec] = None

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def num_colors(self) -> int:
        return int(self.matrix.max()) + 1 if self.matrix.size else 0

    def color(self, g: int, h: int) -> int:
        return int(self.matrix[g, h])

    def dump(self) -> str:
        """n rows of colour ids, space-separated."""
        return "\n".join(" ".join(str(int(c)) for c in row) for row in self.matrix)

    @classmethod
    def from_connection_sets(cls, H: GroupSpec, sets: Sequence[Sequence[int]]) -> "ColorMatrix":
        """
        The coloured Cayley structure Cay(H, (S_1, ..., S_r)): the colour of
        (g, h) records which S_i contain h - g.
        """
        masks = [0] * H.order
        for i, S in enumerate(sets):
            for x in S:
                if x != 0:
                    masks[x] |= 1 << i
        labels = sorted({masks[x] for x in H.elements() if x != 0})
        ids = {m: i + 1 for i, m in enumerate(labels)}
        diff = _difference_table(H)
        by_diff = np.array([0] + [ids[masks[x]] for x in range(1, H.order)], dtype=np.int64)
        return cls(by_diff[diff], H)


def _difference_table(H: GroupSpec) -> np.ndarray:
    """D[g, h] = h - g."""
    add = np.array(H.add_table, dtype=np.int64)
    neg = np.array(H.neg_table, dtype=np.int64)
    return add[:, neg].T


def scheme(P: SchurPartition) -> ColorMatrix:
    """color(g, h) = index of the block containing h - g."""
    block_of = np.array(P.block_of, dtype=np.int64)
    return ColorMatrix(block_of[_difference_table(P.group)], P.group)


# ========== Automorphism search ==========

class _SchemeSearch:
    """
    Colour-preserving automorphisms of a colour matrix.

    Vertex colourings are refined by counting, for every vertex, its
    neighbours per (relation colour, cell) in both directions. The search
    individualizes a vertex of the first smallest non-trivial cell; for the
    first vertex it recurses to get the stabilizer, and for every other
    vertex of the cell not yet in the known orbit it looks for a single
    automorphism mapping one to the other.
    """

    def __init__(self, matrix: np.ndarray, budget: int):
        self.C = np.ascontiguousarray(matrix, dtype=np.int64)
        self.Ct = np.ascontiguousarray(self.C.T)
        self.n = self.C.shape[0]
        self.k = int(self.C.max()) + 1 if self.n else 1
        self.rows = np.arange(self.n, dtype=np.int64)[:, None]
        self.budget = budget
        self.nodes = 0
        self.base: List[int] = []
        self.level_gens: List[List[Permutation]] = []

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SizeLimitError("automorphism search nodes", self.nodes, self.budget)

    def refine(self, colors: np.ndarray) -> Tuple[np.ndarray, Tuple[bytes, ...]]:
        self._tick()
        trace = []
        m = int(colors.max()) + 1
        while True:
            width = self.k * m
            offsets = self.rows * width
            out = np.bincount((self.C * m + colors[None, :] + offsets).ravel(),
                              minlength=self.n * width).reshape(self.n, width)
            inc = np.bincount((self.Ct * m + colors[None, :] + offsets).ravel(),
                              minlength=self.n * width).reshape(self.n, width)
            sig = np.concatenate([colors[:, None], out, inc], axis=1)
            uniq, inverse = np.unique(sig, axis=0, return_inverse=True)
            inverse = np.asarray(inverse).reshape(-1)
            trace.append(uniq.tobytes() + bytes(str(uniq.shape), "ascii"))
            if len(uniq) == m:
                return colors, tuple(trace)
            colors = inverse.astype(np.int64)
            m = len(uniq)

    @staticmethod
    def individualize(colors: np.ndarray, v: int) -> np.ndarray:
        marked = colors * 2
        marked[v] += 1
        return np.unique(marked, return_inverse=True)[1].reshape(-1).astype(np.int64)

    @staticmethod
    def target_cell(colors: np.ndarray) -> Optional[int]:
        sizes = np.bincount(colors)
        candidates = np.flatnonzero(sizes > 1)
        if not len(candidates):
            return None
        return int(candidates[np.argmin(sizes[candidates])])

    def _leaf(self, cs: np.ndarray, ct: np.ndarray) -> Optional[Permutation]:
        f = np.empty(self.n, dtype=np.int64)
        f[np.argsort(cs)] = np.argsort(ct)
        if np.array_equal(self.C[np.ix_(f, f)], self.C):
            return tuple(int(x) for x in f)
        return None

    def match(self, cs: np.ndarray, ct: np.ndarray) -> Optional[Permutation]:
        """An automorphism carrying colouring cs to ct (both refined, equal traces)."""
        cell = self.target_cell(cs)
        if cell is None:
            return self._leaf(cs, ct)
        x = int(np.flatnonzero(cs == cell)[0])
        cs2, trace = self.refine(self.individualize(cs, x))
        for y in np.flatnonzero(ct == cell):
            ct2, trace2 = self.refine(self.individualize(ct, int(y)))
            if trace2 != trace:
                continue
            found = self.match(cs2, ct2)
            if found is not None:
                return found
        return None

    def stabilizer(self, colors: np.ndarray,
                   known: Sequence[Permutation]) -> Tuple[List[Permutation], int]:
        """
        Generators and order of the automorphisms preserving colors.

        Walks the first path of the search tree; level_gens[d] collects the
        generators found at depth d, so the union over depths >= d generates
        the pointwise stabilizer of base[:d].
        """
        cell = self.target_cell(colors)
        if cell is None:
            return [], 1
        members = [int(v) for v in np.flatnonzero(colors == cell)]
        v = members[0]
        depth = len(self.base)
        self.base.append(v)
        self.level_gens.append([])
        cv, trace = self.refine(self.individualize(colors, v))
        sub_gens, sub_order = self.stabilizer(cv, ())
        found = list(known)
        gens = found + list(sub_gens)
        orbit = _orbit(v, gens)
        for w in members[1:]:
            if w in orbit:
                continue
            cw, trace_w = self.refine(self.individualize(colors, w))
            if trace_w != trace:
                continue
            g = self.match(cv, cw)
            if g is not None:
                found.append(g)
                gens.append(g)
                orbit = _orbit(v, gens)
        self.level_gens[depth] = found
        return gens, sub_order * len(orbit)

    def strong_levels(self) -> List[List[Permutation]]:
        out: List[List[Permutation]] = []
        acc: List[Permutation] = []
        for found in reversed(self.level_gens):
            acc = found + acc
            out.append(acc)
        return out[::-1]


def _orbit(v: int, gens: Sequence[Permutation]) -> set:
    seen = {v}
    queue = [v]
    for x in queue:
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def aut_scheme(C: ColorMatrix, known: Optional[Sequence[Permutation]] = None,
               bound: Optional[int] = None) -> PermGroup:
    """
    Full group of colour-preserving permutations of C.

    When C carries its group, the right translations are passed in as known
    automorphisms and prune the top level of the search.
    """
    bound = sring_config.MAX_SCHEME_DEGREE if bound is None else bound
    n = C.n
    if n > bound:
        raise SizeLimitError("aut_scheme degree", n, bound)
    if n == 0:
        return PermGroup(0)
    if known is None and C.group is not None:
        known = [translation(C.group, b) for b in C.group.basis()]
    known = list(known or [])
    search = _SchemeSearch(C.matrix, sring_config.SEARCH_NODE_BUDGET)
    start, _ = search.refine(np.diag(search.C).astype(np.int64).copy())
    gens, order = search.stabilizer(start, known)
    M = search.C
    for g in gens:
        f = np.array(g, dtype=np.int64)
        if not np.array_equal(M[np.ix_(f, f)], M):
            raise RefutationWitness("search produced a non-automorphism", list(g))
    group = PermGroup.from_chain(n, search.base, search.strong_levels())
    if group.order != order:
        raise RefutationWitness(
            f"search order {order} disagrees with stabilizer chain order {group.order}")
    logger.debug("[AutScheme] degree %d: order %d, %d generators, %d nodes",
                 n, order, len(gens), search.nodes)
    return group


def brute_force_automorphisms(C: ColorMatrix) -> List[Permutation]:
    """Every colour-preserving permutation, by scanning all n! (small n only)."""
    n = C.n
    M = C.matrix
    out = []
    for p in itertools.permutations(range(n)):
        f = np.array(p)
        if np.array_equal(M[np.ix_(f, f)], M):
            out.append(tuple(p))
    return out


# ========== Regular subgroups and conjugacy ==========

def _fixed_point_free(p: Permutation) -> bool:
    return all(x != y for x, y in enumerate(p))


def regular_subgroup_sets(G: PermGroup, H: GroupSpec,
                          bound: Optional[int] = None) -> List[Tuple[frozenset, List[Permutation]]]:
    """
    H-regular subgroups of G as (element set, generators), built along the
    cyclic factors of H: each new generator is semiregular of the factor's
    order, commutes with the subgroup so far, meets it trivially, and keeps
    every non-identity element fixed-point-free. Partial subgroups are
    deduplicated by element set at every depth.
    """
    bound = sring_config.DIRECT_REGULAR_BOUND if bound is None else bound
    if G.degree != H.order:
        return []
    elements = G.element_list(bound)
    by_order: Dict[int, List[Permutation]] = {}
    for g in elements:
        if not is_identity(g) and is_semiregular(g):
            by_order.setdefault(perm_order(g), []).append(g)
    ident = identity_perm(G.degree)
    current: Dict[frozenset, Tuple[set, List[Permutation]]] = {
        frozenset([ident]): ({ident}, [])}
    for d in H.invariant_factors:
        nxt: Dict[frozenset, Tuple[set, List[Permutation]]] = {}
        for members, gens in current.values():
            for g in by_order.get(d, []):
                if g in members:
                    continue
                if any(compose(g, s) != compose(s, g) for s in gens):
                    continue
                cyc = powers(g)
                new_members = {compose(s, c) for s in members for c in cyc}
                if len(new_members) != len(members) * d:
                    continue
                if not all(_fixed_point_free(t) for t in new_members if t != ident):
                    continue
                key = frozenset(new_members)
                if key not in nxt:
                    nxt[key] = (new_members, gens + [g])
        current = nxt
    out = [(key, gens) for key, (_, gens) in current.items()]
    out.sort(key=lambda item: sorted(item[0]))
    return out


def regular_subgroups(G: PermGroup, H: GroupSpec, bound: Optional[int] = None) -> List[PermGroup]:
    """All subgroups of G that act regularly and are isomorphic to H."""
    return [PermGroup(G.degree, gens, base=[0])
            for _, gens in regular_subgroup_sets(G, H, bound)]


def _is_regular(A: PermGroup) -> bool:
    return A.order == A.degree and A.is_transitive()


def conjugate_into(A: PermGroup, B: PermGroup, G: PermGroup,
                   stab_bound: Optional[int] = None) -> Optional[Permutation]:
    """
    Some y in G with A^y <= B, or None after exhausting the search.

    For regular A and B the conjugator may be taken in the stabilizer G_0
    (compose with the element of B moving y(0) back to 0). Small G_0 is
    scanned directly; otherwise the images t_i = y(a_i(0)) are chosen and
    y is propagated along y(a_i(x)) = b_i(y(x)) with b_i the element of B
    sending 0 to t_i, then tested for membership in G.
    """
    stab_bound = sring_config.STAB_ENUM_BOUND if stab_bound is None else stab_bound
    gens = A.generators
    if not gens:
        return identity_perm(A.degree)
    if _is_regular(A) and _is_regular(B):
        G0 = G.stabilizer(0)
        tuples = 1
        for a in gens:
            tuples *= len(G0.orbit(a[0]))
        if G0.order <= min(stab_bound, tuples):
            for y in G0.elements():
                if all(B.contains(conjugate(a, y)) for a in gens):
                    return y
            return None
        return _propagate_conjugator(A, B, G, G0)
    for y in G.element_list(sring_config.DIRECT_REGULAR_BOUND):
        if all(B.contains(conjugate(a, y)) for a in gens):
            return y
    return None


def _propagate_conjugator(A: PermGroup, B: PermGroup, G: PermGroup,
                          G0: PermGroup) -> Optional[Permutation]:
    n = A.degree
    b_at: Dict[int, Permutation] = {b[0]: b for b in B.elements()}
    gens = A.generators
    choices = []
    for a in gens:
        a_ord = perm_order(a)
        pts = [t for t in G0.orbit(a[0]) if perm_order(b_at[t]) == a_ord]
        choices.append(pts)
    for ts in itertools.product(*choices):
        bs = [b_at[t] for t in ts]
        y = [-1] * n
        y[0] = 0
        queue = [0]
        ok = True
        for x in queue:
            for a, b in zip(gens, bs):
                ax, bx = a[x], b[y[x]]
                if y[ax] == -1:
                    y[ax] = bx
                    queue.append(ax)
                elif y[ax] != bx:
                    ok = False
                    break
            if not ok:
                break
        if not ok or -1 in y or len(set(y)) != n:
            continue
        y = tuple(y)
        if G.contains(y):
            return y
    return None


__all__ = [
    'Permutation', 'PermGroup', 'ColorMatrix', 'identity_perm', 'compose', 'invert',
    'conjugate', 'is_identity', 'cycles', 'perm_order', 'is_semiregular', 'powers',
    'translation', 'translations', 'regular_representation', 'symmetric_group',
    'holomorph', 'contains_translations', 'transitivity_module', 'scheme',
    'aut_scheme', 'brute_force_automorphisms', 'regular_subgroup_sets',
    'regular_subgroups', 'conjugate_into',
]
