"""
ci_engine.py - CI decisions for Schur partitions

Babai's criterion is the ground truth: A is a CI-S-ring iff every H-regular
subgroup of G = Aut(scheme(A)) is conjugate in G to the right translations.
The theorem-based paths (star, generalized wreath) and the direct Iso_1
identity are always checked against it.

Provides:
- CiVerdict with a re-verifiable conjugator table or a certified refusal
- babai_ci_check: full-ring, rank-two, direct and normalized-search modes
- cayley_isomorphic / iso1_search / ci_sring_check
- overgroups, preceq_check and minimality_reduce on overgroups of H^
- aut_restricted_equality, ci_via_star, ci_via_gwreath
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import sring_config
from abelian_core import (GroupAutomorphism, GroupSpec, Subgroup, automorphism_group,
                          is_e_group, section, trivial_subgroup, whole_group)
from errors import (GroupMismatchError, NotOvergroupError, RefutationWitness,
                    SizeLimitError, VerdictMismatchError)
from perm_engine import (Permutation, PermGroup, aut_scheme, conjugate, contains_translations,
                         identity_perm, invert, regular_representation, regular_subgroup_sets,
                         scheme, conjugate_into, translation, translations)
from schur_core import (DecompositionCertificate, SchurPartition, automorphisms_of,
                        detect_gwreath, detect_star, quotient, restriction)

logger = logging.getLogger(__name__)

CI = "CI"
NOT_CI = "not-CI"


# ========== Verdicts ==========

@dataclass
class CiVerdict:
    """
    Outcome of a CI decision.

    conjugators holds (generators of a regular subgroup R, y) with R^y <= H^.
    A not-CI verdict carries the refused subgroup in refusal together with
    how the refusal was certified.
    """
    partition: SchurPartition
    verdict: str
    method: str  # babai, star, gwreath, full-ring, rank2
    regular_subgroup_count: Optional[int] = None
    conjugators: List[Tuple[List[Permutation], Permutation]] = field(default_factory=list)
    refusal: Optional[dict] = None
    details: dict = field(default_factory=dict)

    @property
    def is_ci(self) -> bool:
        return self.verdict == CI

    def reverify(self) -> bool:
        """Every conjugator maps its regular subgroup into H^, generator by generator."""
        hat = set(translations(self.partition.group))
        return all(conjugate(a, y) in hat
                   for gens, y in self.conjugators for a in gens)

    def to_dict(self, max_rows: Optional[int] = None) -> dict:
        max_rows = sring_config.MAX_CONJUGATOR_ROWS if max_rows is None else max_rows
        P = self.partition
        rows = [{"subgroup": [list(a) for a in gens], "conjugator": list(y)}
                for gens, y in self.conjugators[:max_rows]]
        return {
            "partition": {"group": P.group.label, "blocks": [list(b) for b in P.blocks]},
            "verdict": self.verdict,
            "method": self.method,
            "regular_subgroup_count": self.regular_subgroup_count,
            "conjugators": rows,
            "conjugators_total": len(self.conjugators),
            "refusal": self.refusal,
            "details": self.details,
        }


@dataclass
class HypothesisRefusal:
    """A theorem-based path declined to decide; this is not a not-CI verdict."""
    method: str
    reason: str
    details: dict = field(default_factory=dict)

    @property
    def is_ci(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"method": self.method, "refused": self.reason, "details": self.details}


def _hat(H: GroupSpec) -> PermGroup:
    return regular_representation(H)


def _brute_refusal(gens: Sequence[Permutation], G: PermGroup, H: GroupSpec) -> bool:
    """True when no element of G conjugates <gens> into H^ (full scan of G)."""
    hat = set(translations(H))
    for y in G.elements():
        if all(conjugate(a, y) in hat for a in gens):
            return False
    return True


def _finish(verdict: CiVerdict) -> CiVerdict:
    if verdict.is_ci and not verdict.reverify():
        raise RefutationWitness("conjugator table does not re-verify", verdict.to_dict())
    logger.debug("[BabaiCheck] %s: %s via %s (%s regular subgroups)",
                 verdict.partition.group.label, verdict.verdict, verdict.method,
                 verdict.regular_subgroup_count)
    return verdict


# ========== Babai check ==========

def babai_ci_check(P: SchurPartition, *, group: Optional[PermGroup] = None,
                   strategy: str = "auto", bound: Optional[int] = None) -> CiVerdict:
    """
    Decide whether P is a CI-S-ring by Babai's criterion.

    Args:
        P: a Schur partition over H
        group: Aut(scheme(P)) when the caller already has it
        strategy: "auto", "direct" (list the regular subgroups of G) or
            "search" (normalized bijections modulo G_0)
        bound: |H| limit, default MAX_CI_ORDER

    Returns:
        CiVerdict; not-CI verdicts carry a refused regular subgroup whose
        refusal was certified by an exhausted search (and by a full scan of
        G when |H| <= BRUTE_CONFIRM_ORDER)
    """
    bound = sring_config.MAX_CI_ORDER if bound is None else bound
    H = P.group
    n = H.order
    if n > bound:
        raise SizeLimitError("babai_ci_check order", n, bound)
    hat_gens = [translation(H, b) for b in H.basis()]
    if strategy == "auto" and P.is_discrete:
        return _finish(CiVerdict(P, CI, "full-ring", 1, [(hat_gens, identity_perm(n))]))
    if strategy == "auto" and P.is_rank_two:
        aut_order = len(automorphism_group(H))
        count = math.factorial(n - 1) // aut_order
        return _finish(CiVerdict(P, CI, "rank2", count, [(hat_gens, identity_perm(n))],
                                 details={"aut_order": math.factorial(n)}))

    G = group if group is not None else aut_scheme(scheme(P))
    if G.order == n:
        return _finish(CiVerdict(P, CI, "full-ring", 1, [(hat_gens, identity_perm(n))],
                                 details={"aut_order": n}))
    if strategy == "direct" or (strategy == "auto" and G.order <= sring_config.DIRECT_REGULAR_BOUND):
        verdict = _babai_direct(P, G)
    else:
        verdict = _babai_search(P, G)
    verdict.details["aut_order"] = G.order
    return _finish(verdict)


def _babai_direct(P: SchurPartition, G: PermGroup) -> CiVerdict:
    H = P.group
    n = H.order
    hat = _hat(H)
    hat_set = frozenset(translations(H))
    regs = regular_subgroup_sets(G, H, max(G.order, sring_config.DIRECT_REGULAR_BOUND))
    rows = []
    for members, gens in regs:
        if members == hat_set:
            rows.append((gens, identity_perm(n)))
            continue
        R = PermGroup(n, gens, base=[0])
        y = conjugate_into(R, hat, G)
        if y is None:
            return _refuse(P, G, gens, len(regs), "direct")
        rows.append((gens, y))
    return CiVerdict(P, CI, "babai", len(regs), rows, details={"mode": "direct"})


def _refuse(P: SchurPartition, G: PermGroup, gens: List[Permutation],
            count: Optional[int], mode: str) -> CiVerdict:
    H = P.group
    confirmed = None
    if H.order <= sring_config.BRUTE_CONFIRM_ORDER:
        confirmed = _brute_refusal(gens, G, H)
        if not confirmed:
            raise VerdictMismatchError("refused subgroup is conjugate into H^ by a full scan",
                                       {"subgroup": [list(a) for a in gens]})
    logger.info("[BabaiCheck] %s: regular subgroup not conjugate to H^ (%s)", H.label, mode)
    return CiVerdict(P, NOT_CI, "babai", count, [],
                     refusal={"subgroup": [list(a) for a in gens], "exhausted": True,
                              "brute_force_confirmed": confirmed},
                     details={"mode": mode})


class _NormalizedSearch:
    """
    Normalized bijections f (f(0) = 0) satisfying
    block[f^-1(f(h) - f(g))] == block[h - g] for all g, h,
    one per right coset f G_0.

    The coset representative is the one with f(b_i) < f(x) for every other
    point x of the i-th basic orbit of the stabilizer chain of G_0. Pairs are
    checked as soon as both ends are assigned; every difference value seen
    gets a required block, and a block is dead once it needs more values
    than it has unassigned points.
    """

    def __init__(self, P: SchurPartition, G0: PermGroup, budget: int):
        H = P.group
        n = H.order
        self.n = n
        self.block_of = P.block_of
        self.sub = [[H.sub(h, g) for h in range(n)] for g in range(n)]
        self.lower: List[List[int]] = [[] for _ in range(n)]
        for b, trans in zip(G0.base, G0.transversals):
            for x in trans:
                if x != b:
                    self.lower[x].append(b)
        order: List[int] = []
        for b in G0.base:
            if b != 0 and b not in order:
                order.append(b)
        order += [x for x in range(1, n) if x not in order]
        self.order = order
        self.f = [-1] * n
        self.finv = [-1] * n
        self.f[0] = self.finv[0] = 0
        self.required = [-1] * n
        self.required[0] = 0
        self.free = [len(b) for b in P.blocks]
        self.free[0] = 0
        self.need = [0] * P.rank
        self.assigned = [0]
        self.budget = budget
        self.nodes = 0

    def _assign(self, x: int, v: int) -> Optional[List[int]]:
        block_of, f, finv, required = self.block_of, self.f, self.finv, self.required
        bx = block_of[x]
        req = required[v]
        f[x] = v
        finv[v] = x
        self.free[bx] -= 1
        if req == bx:
            self.need[bx] -= 1
        trail: List[int] = []
        ok = True
        for g in self.assigned:
            fg = f[g]
            for d, expected in ((self.sub[fg][v], block_of[self.sub[g][x]]),
                                (self.sub[v][fg], block_of[self.sub[x][g]])):
                y = finv[d]
                if y >= 0:
                    if block_of[y] != expected:
                        ok = False
                        break
                    continue
                r = required[d]
                if r == -1:
                    required[d] = expected
                    self.need[expected] += 1
                    trail.append(d)
                elif r != expected:
                    ok = False
                    break
            if not ok:
                break
        if ok and any(need > free for need, free in zip(self.need, self.free)):
            ok = False
        if not ok:
            self._undo(x, v, trail, req)
            return None
        self.assigned.append(x)
        return trail

    def _undo(self, x: int, v: int, trail: List[int], req: int) -> None:
        for d in trail:
            self.need[self.required[d]] -= 1
            self.required[d] = -1
        bx = self.block_of[x]
        if req == bx:
            self.need[bx] += 1
        self.free[bx] += 1
        self.f[x] = -1
        self.finv[v] = -1

    def run(self, visit) -> bool:
        """Call visit(f) on every representative; stop early when it returns False."""
        return self._dfs(0, visit)

    def _dfs(self, i: int, visit) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SizeLimitError("normalized bijection search nodes", self.nodes, self.budget)
        if i == len(self.order):
            return visit(tuple(self.f))
        x = self.order[i]
        bx = self.block_of[x]
        lo = max((self.f[b] for b in self.lower[x]), default=0)
        for v in range(lo + 1, self.n):
            if self.finv[v] >= 0:
                continue
            r = self.required[v]
            if r != -1 and r != bx:
                continue
            req = r
            trail = self._assign(x, v)
            if trail is None:
                continue
            keep_going = self._dfs(i + 1, visit)
            self.assigned.pop()
            self._undo(x, v, trail, req)
            if not keep_going:
                return False
        return True


def _babai_search(P: SchurPartition, G: PermGroup) -> CiVerdict:
    """
    CI iff every representative f labels H like some phi in Aut(H) does:
    block[f^-1(y)] == block[phi^-1(y)]. Then gamma = phi^-1 f lies in G_0
    and conjugates R_f = {x -> f^-1(f(x) + b)} into H^.
    """
    H = P.group
    n = H.order
    add = H.add_table
    block_of = P.block_of
    auts = automorphism_group(H)
    labellings: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    for phi in auts:
        inv = phi.inverse().perm
        labellings.setdefault(tuple(block_of[inv[y]] for y in range(n)), inv)
    G0 = G.stabilizer(0)
    search = _NormalizedSearch(P, G0, sring_config.SEARCH_NODE_BUDGET)
    rows: List[Tuple[List[Permutation], Permutation]] = []
    seen_subgroups = set()
    state = {"count": 0, "refused": None}
    basis = H.basis()

    def visit(f: Tuple[int, ...]) -> bool:
        state["count"] += 1
        finv = invert(f)
        phi_inv = labellings.get(tuple(block_of[finv[y]] for y in range(n)))
        gens = [tuple(finv[add[f[x]][b]] for x in range(n)) for b in basis]
        if phi_inv is None:
            state["refused"] = gens
            return False
        members = frozenset(tuple(finv[add[f[x]][y]] for x in range(n)) for y in range(n))
        if members not in seen_subgroups:
            seen_subgroups.add(members)
            rows.append((gens, tuple(phi_inv[f[x]] for x in range(n))))
        return True

    search.run(visit)
    logger.debug("[BabaiCheck] %s: %d coset representatives, %d nodes, |G_0| = %d",
                 H.label, state["count"], search.nodes, G0.order)
    if state["refused"] is not None:
        gens = state["refused"]
        if conjugate_into(PermGroup(n, gens, base=[0]), _hat(H), G) is not None:
            raise VerdictMismatchError("search refusal contradicted by conjugate_into",
                                       {"subgroup": [list(a) for a in gens]})
        return _refuse(P, G, gens, None, "search")
    total = state["count"] * G0.order
    if total % len(auts):
        raise RefutationWitness(
            f"{total} normalized isomorphisms is not a multiple of |Aut(H)| = {len(auts)}")
    return CiVerdict(P, CI, "babai", total // len(auts), rows,
                     details={"mode": "search", "representatives": state["count"]})


# ========== Isomorphisms ==========

def cayley_isomorphic(P: SchurPartition, P2: SchurPartition) -> Optional[GroupAutomorphism]:
    """First phi in Aut(H) (canonical order) with phi(P) = P2 as block sets, else None."""
    if P.group != P2.group:
        raise GroupMismatchError(f"{P.group.label} vs {P2.group.label}")
    if P.rank != P2.rank or sorted(P.block_sizes()) != sorted(P2.block_sizes()):
        return None
    target = P2.block_sets()
    for phi in automorphism_group(P.group):
        if frozenset(phi.apply_set(b) for b in P.blocks) == target:
            return phi
    return None


def _colour_consistent(A: np.ndarray, B: np.ndarray) -> bool:
    """The colour pairs (A[i,j], B[i,j]) define a bijection of colours."""
    k = int(max(A.max(), B.max())) + 1
    pairs = np.unique(A.astype(np.int64) * k + B)
    return len(pairs) == len(np.unique(A)) == len(np.unique(B))


def iso1_search(P: SchurPartition, P2: SchurPartition) -> List[Permutation]:
    """
    All normalized combinatorial isomorphisms from scheme(P) to scheme(P2).

    Up to BRUTE_ISO_ORDER every normalized bijection is scanned; above it a
    backtracking search keeps the colour correspondence consistent pair by
    pair. Colours may be permuted.
    """
    if P.group != P2.group:
        raise GroupMismatchError(f"{P.group.label} vs {P2.group.label}")
    n = P.group.order
    if n > sring_config.MAX_ISO_SEARCH_ORDER:
        raise SizeLimitError("iso1_search order", n, sring_config.MAX_ISO_SEARCH_ORDER)
    if P.rank != P2.rank or sorted(P.block_sizes()) != sorted(P2.block_sizes()):
        return []
    A = scheme(P).matrix
    B = scheme(P2).matrix
    if n <= sring_config.BRUTE_ISO_ORDER:
        out = []
        for rest in itertools.permutations(range(1, n)):
            f = np.array((0,) + rest)
            if _colour_consistent(A, B[np.ix_(f, f)]):
                out.append((0,) + tuple(rest))
        return out
    return _iso_backtrack(A.tolist(), B.tolist(), n)


def _iso_backtrack(A: List[List[int]], B: List[List[int]], n: int) -> List[Permutation]:
    f = [-1] * n
    used = [False] * n
    f[0] = 0
    used[0] = True
    sigma: Dict[int, int] = {A[0][0]: B[0][0]}
    sigma_inv: Dict[int, int] = {B[0][0]: A[0][0]}
    out: List[Permutation] = []
    nodes = [0]

    def bind(a: int, b: int, added: List[int]) -> bool:
        if a in sigma:
            return sigma[a] == b
        if b in sigma_inv:
            return False
        sigma[a] = b
        sigma_inv[b] = a
        added.append(a)
        return True

    def dfs(x: int) -> None:
        nodes[0] += 1
        if nodes[0] > sring_config.SEARCH_NODE_BUDGET:
            raise SizeLimitError("iso1_search nodes", nodes[0], sring_config.SEARCH_NODE_BUDGET)
        if x == n:
            out.append(tuple(f))
            return
        for v in range(1, n):
            if used[v]:
                continue
            added: List[int] = []
            ok = True
            for g in range(x):
                if not (bind(A[g][x], B[f[g]][v], added) and bind(A[x][g], B[v][f[g]], added)):
                    ok = False
                    break
            if ok:
                f[x] = v
                used[v] = True
                dfs(x + 1)
                used[v] = False
                f[x] = -1
            for a in added:
                del sigma_inv[sigma.pop(a)]

    dfs(1)
    return out


def normalized_cayley_bijections(P: SchurPartition) -> List[Permutation]:
    """
    Iso_1(A, *): normalized f such that the image of scheme(P) under f is
    again a Cayley scheme, i.e. colour(f g, f h) depends only on f h - f g.
    Full scan, small n only.
    """
    H = P.group
    n = H.order
    M = scheme(P).matrix
    D = np.array([[H.sub(h, g) for h in range(n)] for g in range(n)], dtype=np.int64)
    out = []
    for rest in itertools.permutations(range(1, n)):
        f = (0,) + rest
        finv = np.array(invert(f))
        image = M[np.ix_(finv, finv)]
        if np.array_equal(image[0][D], image):
            out.append(f)
    return out


def ci_sring_check(P: SchurPartition) -> CiVerdict:
    """
    Babai verdict, plus for |H| <= DIRECT_ISO_ORDER a direct check of
    Iso_1(A, *) = Aut(A)_0 Aut(H) with every element factored explicitly.
    """
    n = P.group.order
    if n > sring_config.MAX_CI_SRING_ORDER:
        raise SizeLimitError("ci_sring_check order", n, sring_config.MAX_CI_SRING_ORDER)
    G = aut_scheme(scheme(P))
    verdict = babai_ci_check(P, group=G)
    if n > sring_config.DIRECT_ISO_ORDER:
        verdict.details["iso1_direct"] = False
        return verdict
    iso1 = set(normalized_cayley_bijections(P))
    auts = automorphism_group(P.group)
    stab = list(G.stabilizer(0).elements())
    product = {tuple(phi.perm[g[x]] for x in range(n)) for phi in auts for g in stab}
    holds = iso1 == product
    if holds:
        stab_set = set(stab)
        inverses = [phi.inverse().perm for phi in auts]
        for f in iso1:
            if not any(tuple(inv[f[x]] for x in range(n)) in stab_set for inv in inverses):
                raise RefutationWitness("Iso_1 element without a factorization", list(f))
    if holds != verdict.is_ci:
        raise VerdictMismatchError(
            "Iso_1 identity disagrees with Babai's criterion",
            {"iso1_identity": holds, "babai": verdict.verdict})
    verdict.details.update({"iso1_direct": True, "iso1_size": len(iso1),
                            "product_size": len(product)})
    return verdict


# ========== The order <= on overgroups ==========

@dataclass
class PreceqResult:
    """holds iff every H-regular subgroup of Y conjugates into X inside Y."""
    holds: bool
    certificates: List[Tuple[List[Permutation], Permutation]]
    refused: Optional[List[Permutation]] = None


def _check_overgroup(G: PermGroup, H: GroupSpec) -> None:
    if G.degree != H.order:
        raise GroupMismatchError(f"degree {G.degree} does not match |{H.label}|")
    if not contains_translations(G, H):
        raise NotOvergroupError("group does not contain the right translations of H")


def _conjugator_into(gens: Sequence[Permutation], X: PermGroup, Y: PermGroup,
                     stabilizer_only: bool) -> Optional[Permutation]:
    candidates = Y.stabilizer(0).elements() if stabilizer_only else Y.elements()
    for y in candidates:
        if all(X.contains(conjugate(a, y)) for a in gens):
            return y
    return None


def preceq_check(X: PermGroup, Y: PermGroup, H: GroupSpec) -> PreceqResult:
    """
    X <=_H Y: every H-regular subgroup of Y has a conjugate inside X by an
    element of Y. When X <= Y is transitive the conjugator can be taken in
    Y_0, since X carries y(0) back to 0.
    """
    n = H.order
    if n > sring_config.MAX_PRECEQ_DEGREE:
        raise SizeLimitError("preceq_check degree", n, sring_config.MAX_PRECEQ_DEGREE)
    _check_overgroup(X, H)
    _check_overgroup(Y, H)
    if Y.order > sring_config.PRECEQ_GROUP_BOUND:
        raise SizeLimitError("preceq_check group order", Y.order, sring_config.PRECEQ_GROUP_BOUND)
    stabilizer_only = X.is_subgroup_of(Y) and X.is_transitive()
    x_regular = X.order == n
    certs = []
    for _, gens in regular_subgroup_sets(Y, H, sring_config.PRECEQ_GROUP_BOUND):
        if x_regular:
            y = conjugate_into(PermGroup(n, gens, base=[0]), X, Y)
        else:
            y = _conjugator_into(gens, X, Y, stabilizer_only)
        if y is None:
            return PreceqResult(False, certs, gens)
        certs.append((gens, y))
    return PreceqResult(True, certs)


def _overgroup_key(X: PermGroup) -> frozenset:
    # X = H^ X_0 for transitive X >= H^, so the stabilizer names X
    return frozenset(X.stabilizer(0).elements())


def overgroups(G: PermGroup, H: GroupSpec) -> List[PermGroup]:
    """
    Every subgroup X with H^ <= X <= G, by ascending order.

    Each such X is generated by H^ and X_0, so closing the one-step
    extensions <H^, g> (g in G_0) under joins reaches all of them.
    """
    n = H.order
    _check_overgroup(G, H)
    if G.order > sring_config.PRECEQ_GROUP_BOUND:
        raise SizeLimitError("overgroups group order", G.order, sring_config.PRECEQ_GROUP_BOUND)
    hat_gens = [translation(H, b) for b in H.basis()]
    found: Dict[frozenset, PermGroup] = {}
    steps: Dict[frozenset, PermGroup] = {}
    for g in G.stabilizer(0).elements():
        X = PermGroup(n, hat_gens + [g], base=[0])
        steps.setdefault(_overgroup_key(X), X)
    found.update(steps)
    queue = list(found.values())
    for X in queue:
        for C in steps.values():
            if all(X.contains(c) for c in C.generators):
                continue
            J = PermGroup(n, X.generators + C.generators, base=[0])
            key = _overgroup_key(J)
            if key not in found:
                found[key] = J
                queue.append(J)
    return [X for _, X in sorted(found.items(), key=lambda item: (len(item[0]), sorted(item[0])))]


def minimality_reduce(G: PermGroup, H: GroupSpec) -> PermGroup:
    """
    Descend to a <=-minimal overgroup of H^ inside G.

    At each step the smallest proper overgroup X of H^ in the current group
    with X <= current is taken. The result has no proper overgroup of H^
    below it that passes the test.
    """
    n = H.order
    if n > sring_config.MAX_PRECEQ_DEGREE:
        raise SizeLimitError("minimality_reduce degree", n, sring_config.MAX_PRECEQ_DEGREE)
    _check_overgroup(G, H)
    current = G
    steps = 0
    while True:
        if current.order > sring_config.PRECEQ_GROUP_BOUND:
            raise SizeLimitError("minimality_reduce group order", current.order,
                                 sring_config.PRECEQ_GROUP_BOUND)
        for X in overgroups(current, H):
            if X.order < current.order and preceq_check(X, current, H).holds:
                current = X
                steps += 1
                break
        else:
            logger.debug("[Minimality] %s: stopped at order %d after %d steps",
                         H.label, current.order, steps)
            return current


# ========== Theorem-based paths ==========

def _block_images(P: SchurPartition, sec) -> SchurPartition:
    """Basic sets inside sec.members, pushed onto the section."""
    members = set(sec.members)
    images = {frozenset(sec.to_section[x] for x in b)
              for b in P.blocks if b[0] in members}
    return SchurPartition.from_blocks(sec.spec, images)


def aut_restricted_equality(P: SchurPartition, L: Subgroup, U: Subgroup) -> Tuple[bool, dict]:
    """
    Aut_{U/L}(A_{U/L}) == Aut_U(A_U)^{U/L} * Aut_{H/L}(A_{H/L})^{U/L}.

    Each Aut_X(A_X) is Aut(X) filtered to the automorphisms fixing every
    basic set; the first factor is induced on U/L, the second restricted.
    All three sets are realised as permutations of the section U/L.
    """
    H = P.group
    S = section(H, U, L)
    SU = section(H, U, trivial_subgroup(H))
    SQ = section(H, whole_group(H), L)
    lhs = {phi.perm for phi in automorphisms_of(_block_images(P, S))}
    m = S.spec.order

    def induced(phi_perm: Sequence[int], outer) -> Tuple[int, ...]:
        return tuple(S.to_section[outer.lift[phi_perm[outer.to_section[S.lift[s]]]]]
                     for s in range(m))

    from_u = {induced(phi.perm, SU) for phi in automorphisms_of(_block_images(P, SU))}
    from_q = {induced(phi.perm, SQ) for phi in automorphisms_of(_block_images(P, SQ))}
    product = {tuple(a[b[s]] for s in range(m)) for a in from_u for b in from_q}
    sizes = {"lhs": len(lhs), "from_U": len(from_u), "from_H/L": len(from_q),
             "product": len(product)}
    return product == lhs, sizes


def _factor_ci(P: SchurPartition, label: str) -> Optional[str]:
    verdict = babai_ci_check(P)
    return None if verdict.is_ci else f"{label} is not CI"


def _cross_check(P: SchurPartition, method: str, evidence: dict) -> CiVerdict:
    reference = babai_ci_check(P)
    if not reference.is_ci:
        raise VerdictMismatchError(
            f"{method} decides CI but Babai's criterion refuses",
            {method: CI, "babai": reference.verdict})
    return CiVerdict(P, CI, method, reference.regular_subgroup_count,
                     reference.conjugators, details={"evidence": evidence,
                                                     "babai": reference.details})


def ci_via_star(P: SchurPartition, K: Subgroup,
                L: Subgroup) -> Union[CiVerdict, HypothesisRefusal]:
    """
    CI by a nontrivial star decomposition A = A_K * A_L with CI factors,
    for H with elementary abelian Sylow subgroups.
    """
    if not is_e_group(P.group):
        return HypothesisRefusal("star", "H has a non-elementary Sylow subgroup")
    cert = detect_star(P, K, L)
    if not cert.ok:
        return HypothesisRefusal("star", "no star decomposition", cert.to_dict())
    if cert.trivial:
        return HypothesisRefusal("star", "star decomposition is trivial", cert.to_dict())
    for S, label in ((K, "A_K"), (L, "A_L")):
        reason = _factor_ci(restriction(P, S), label)
        if reason:
            return HypothesisRefusal("star", reason)
    return _cross_check(P, "star", cert.to_dict())


def _find_gwreath(P: SchurPartition, L: Subgroup, U: Subgroup) -> Optional[DecompositionCertificate]:
    for cert in detect_gwreath(P):
        if cert.subgroups[0] == L and cert.subgroups[1] == U:
            return cert
    return None


def ci_via_gwreath(P: SchurPartition, L: Subgroup,
                   U: Subgroup) -> Union[CiVerdict, HypothesisRefusal]:
    """
    CI by a nontrivial generalized wreath product with respect to L <= U,
    given CI restriction to U, CI quotient by L and the automorphism
    equality on U/L; H must have elementary abelian Sylow subgroups.
    """
    if not is_e_group(P.group):
        return HypothesisRefusal("gwreath", "H has a non-elementary Sylow subgroup")
    cert = _find_gwreath(P, L, U)
    if cert is None:
        return HypothesisRefusal("gwreath", "not a generalized wreath product for (L, U)")
    if cert.trivial:
        return HypothesisRefusal("gwreath", "generalized wreath product is trivial", cert.to_dict())
    reason = (_factor_ci(restriction(P, U), "A_U")
              or _factor_ci(quotient(P, L), "A_{H/L}"))
    if reason:
        return HypothesisRefusal("gwreath", reason)
    holds, sizes = aut_restricted_equality(P, L, U)
    if not holds:
        return HypothesisRefusal("gwreath", "automorphism equality fails on U/L", sizes)
    evidence = cert.to_dict()
    evidence["aut_sizes"] = sizes
    return _cross_check(P, "gwreath", evidence)


__all__ = [
    'CI', 'NOT_CI', 'CiVerdict', 'HypothesisRefusal', 'PreceqResult', 'babai_ci_check',
    'cayley_isomorphic', 'iso1_search', 'normalized_cayley_bijections', 'ci_sring_check',
    'preceq_check', 'overgroups', 'minimality_reduce', 'aut_restricted_equality', 'ci_via_star',
    'ci_via_gwreath',
]
