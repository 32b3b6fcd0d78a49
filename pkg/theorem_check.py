"""
theorem_check.py - Sampled verification of the CI property over C_p^3 x C_q

Draws coloured Cayley structures over H, takes the transitivity module of
each automorphism group and walks it through the structural case analysis:
P1 and Q1, the trichotomy of M_q-invariant basic sets, the wedge branch
(P1 Q1 != H: generalized wreath product with respect to Q1 <= P1 Q1, the
star split of A_(P1 Q1), catalog match of the quotient over H/Q1) and the
star branch (P1 Q1 = H). Every sample ends with Babai's criterion as the
verdict of record; a structural statement that fails, or two oracles that
disagree, becomes a refutation artifact.

Also home of find_non_ci_search, the exhaustive hunt for Cayley digraphs
whose transitivity module is not CI.
"""

import itertools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import sring_config
from abelian_core import (GroupSpec, Subgroup, all_subgroups, automorphism_group,
                          join, make_group, prime_factors, q_parts, subgroup_from_members)
from catalog_classify import CATALOG_PRIMES, build_catalog, match_catalog
from ci_engine import CiVerdict, HypothesisRefusal, babai_ci_check, ci_via_gwreath, ci_via_star
from errors import InvalidSpecError, RefutationWitness, SizeLimitError, VerdictMismatchError
from perm_engine import ColorMatrix, aut_scheme, scheme, transitivity_module
from schur_core import (SchurPartition, automorphisms_of, detect_gwreath, detect_star,
                        discrete_partition, is_p_sring, p1_maximality_check, p1_q1, quotient,
                        rank_two_partition, restrict_with_section, subquotient,
                        trichotomy_table, wielandt_check)

logger = logging.getLogger(__name__)

BRANCHES = ("full-ring", "rank2", "wedge-gwreath", "wedge-fallback",
            "star-rank2", "star-full", "fallback")
DENSITIES = (0.25, 0.5, 0.75)
ATOM_FAMILIES = ("singletons", "cosets", "orbits", "pairs")


# ========== Reports ==========

@dataclass
class SampleReport:
    """What the case analysis saw on one transitivity module."""
    key: str
    blocks: List[List[int]]
    rank: int
    aut_order: Optional[int] = None
    branch: Optional[str] = None
    verdict: Optional[str] = None
    method: Optional[str] = None
    regular_subgroup_count: Optional[int] = None
    p1: Optional[List[int]] = None
    q1: Optional[List[int]] = None
    trichotomy: List[str] = field(default_factory=list)
    p1_maximal: Optional[bool] = None
    wielandt: Optional[bool] = None
    catalog_label: Optional[str] = None
    aut_p1_order: Optional[int] = None
    refutations: List[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def refute(self, reason: str, witness=None) -> None:
        self.refutations.append({"sample": self.key, "reason": reason, "witness": witness})

    def to_dict(self) -> dict:
        return {
            "blocks": self.blocks, "rank": self.rank, "aut_order": self.aut_order,
            "branch": self.branch, "verdict": self.verdict, "method": self.method,
            "regular_subgroup_count": self.regular_subgroup_count,
            "P1": self.p1, "Q1": self.q1, "trichotomy": self.trichotomy,
            "p1_maximal": self.p1_maximal, "wielandt": self.wielandt,
            "catalog_label": self.catalog_label, "aut_p1_order": self.aut_p1_order,
            "refutations": self.refutations, "details": self.details,
        }


@dataclass
class TheoremReport:
    p: int
    q: int
    seed: int
    samples_drawn: int
    samples: List[SampleReport]

    @property
    def histogram(self) -> Dict[str, int]:
        counts = {b: 0 for b in BRANCHES}
        for s in self.samples:
            counts[s.branch] = counts.get(s.branch, 0) + 1
        return counts

    @property
    def refutations(self) -> List[dict]:
        return [r for s in self.samples for r in s.refutations]

    @property
    def clean(self) -> bool:
        return not self.refutations and all(s.verdict == "CI" for s in self.samples)

    def to_dict(self) -> dict:
        return {
            "group": make_group([self.p] * 3 + [self.q]).label,
            "p": self.p, "q": self.q, "seed": self.seed,
            "samples_drawn": self.samples_drawn,
            "distinct_modules": len(self.samples),
            "histogram": self.histogram,
            "refutations": self.refutations,
            "clean": self.clean,
            "samples": [s.to_dict() for s in self.samples],
        }


# ========== Sampler ==========

class ModuleSampler:
    """
    Seeded source of coloured Cayley structures over H.

    Each connection set is a random union of atoms from one family:
    singletons, cosets of a proper subgroup, orbits of a cyclic group of
    automorphisms, or inverse pairs {x, -x}.
    """

    def __init__(self, H: GroupSpec, seed: int = sring_config.DEFAULT_SEED,
                 colors: Tuple[int, int] = sring_config.SAMPLE_COLORS):
        self.H = H
        self.rng = random.Random(seed)
        self.colors = colors
        self._auts = None
        self._subgroups = [S for S in all_subgroups(H) if not (S.is_trivial() or S.is_whole())]

    @property
    def auts(self):
        if self._auts is None:
            self._auts = automorphism_group(self.H)
        return self._auts

    def _atoms(self, family: str) -> List[List[int]]:
        H = self.H
        add = H.add_table
        if family == "cosets" and self._subgroups:
            K = self.rng.choice(self._subgroups)
            seen, atoms = set(), []
            for x in H.elements():
                if x not in seen:
                    coset = [add[x][k] for k in K.members]
                    seen.update(coset)
                    atoms.append(coset)
            return atoms
        if family == "orbits":
            perm = self.rng.choice(self.auts).perm
            seen, atoms = set(), []
            for x in H.elements():
                if x in seen:
                    continue
                orbit, y = [], x
                while y not in seen:
                    seen.add(y)
                    orbit.append(y)
                    y = perm[y]
                atoms.append(orbit)
            return atoms
        if family == "pairs":
            return [sorted({x, H.neg(x)}) for x in H.elements() if x <= H.neg(x)]
        return [[x] for x in H.elements()]

    def connection_set(self) -> List[int]:
        family = self.rng.choice(ATOM_FAMILIES)
        density = self.rng.choice(DENSITIES)
        atoms = self._atoms(family)
        S = {x for atom in atoms if self.rng.random() < density for x in atom}
        S.discard(0)
        if not S:
            nonzero = [a for a in atoms if any(x != 0 for x in a)]
            S = set(self.rng.choice(nonzero)) - {0}
        return sorted(S)

    def draw(self) -> List[List[int]]:
        r = self.rng.randint(*self.colors)
        return [self.connection_set() for _ in range(r)]

    def modules(self, count: int) -> List[Tuple[SchurPartition, int]]:
        """
        Distinct transitivity modules from count draws, with the two baselines.

        Returns:
            (module, |Aut of the drawn structure|) pairs in draw order
        """
        H = self.H
        out: Dict[str, Tuple[SchurPartition, int]] = {}
        for base, order in ((discrete_partition(H), H.order),
                            (rank_two_partition(H), math.factorial(H.order))):
            out[base.key()] = (base, order)
        for _ in range(count):
            C = ColorMatrix.from_connection_sets(H, self.draw())
            G = aut_scheme(C)
            A = transitivity_module(G, H)
            out.setdefault(A.key(), (A, G.order))
        logger.info("[Sampler] %s: %d draws, %d distinct modules", H.label, count, len(out))
        return list(out.values())


# ========== Case analysis ==========

def _record(report: SampleReport, verdict: CiVerdict) -> None:
    report.verdict = verdict.verdict
    report.method = verdict.method
    report.regular_subgroup_count = verdict.regular_subgroup_count
    if not verdict.is_ci:
        report.refute("Babai's criterion refuses the module", verdict.refusal)


def _star_kind(A1: SchurPartition, q: int, P1: Subgroup) -> Optional[str]:
    top = quotient(A1, P1)
    if top.group.order == q and top.is_discrete:
        return "star-full"
    if top.is_rank_two:
        return "star-rank2"
    return None


def _star_forced(kind: str, H: GroupSpec, q: int, P1: Subgroup, H1: Subgroup) -> bool:
    # rank-two quotients only force a star product when P1 misses some q'-element of H1
    pq, _ = q_parts(H, q)
    return kind == "star-full" or P1.member_set != (H1.member_set & pq.member_set)


def _local(sec, S: Subgroup) -> Subgroup:
    return subgroup_from_members(sec.spec, [sec.to_section[x] for x in S.members])


def _star_on_h1(A: SchurPartition, q: int, P1: Subgroup, Q1: Subgroup,
                H1: Subgroup, report: SampleReport) -> None:
    """A_{P1 Q1} must split as A_P1 * A_Q1 once its quotient by P1 is forced."""
    A1, sec = restrict_with_section(A, H1)
    P1s, Q1s = _local(sec, P1), _local(sec, Q1)
    kind = _star_kind(A1, q, P1s)
    if kind is None:
        report.details["h1_star"] = {"kind": None}
        return
    cert = detect_star(A1, P1s, Q1s)
    report.details["h1_star"] = {"kind": kind, "ok": cert.ok, "trivial": cert.trivial}
    if not cert.ok and _star_forced(kind, A.group, q, P1, H1):
        report.refute(f"{kind} on P1 Q1: A_(P1 Q1) is not A_P1 * A_Q1", cert.to_dict())


def _wedge_branch(A: SchurPartition, p: int, q: int, P1: Subgroup, Q1: Subgroup,
                  H1: Subgroup, report: SampleReport) -> None:
    if not any(c.subgroups == (Q1, H1) for c in detect_gwreath(A)):
        raise RefutationWitness("P1 Q1 != H but no generalized wreath product for (Q1, P1 Q1)",
                                {"Q1": list(Q1.members), "P1Q1": list(H1.members)})
    _star_on_h1(A, q, P1, Q1, H1, report)
    top = quotient(A, Q1)
    if top.group.order == p ** 3 and is_p_sring(top, p) and p in CATALOG_PRIMES:
        report.catalog_label = match_catalog(top, build_catalog(p)) or "unmatched"
    bottom = subquotient(A, H1, Q1)
    if bottom.group.order == p * p and sorted(bottom.block_sizes()) == [1] * p + [p] * (p - 1):
        report.aut_p1_order = len(automorphisms_of(bottom))
        if report.aut_p1_order > p:
            report.refute("Aut of the wreath section over P1 Q1 / Q1 exceeds p",
                          {"order": report.aut_p1_order})
    result = ci_via_gwreath(A, Q1, H1)
    if isinstance(result, HypothesisRefusal):
        report.branch = "wedge-fallback"
        report.details["refused"] = result.reason
    else:
        report.branch = "wedge-gwreath"


def _star_branch(A: SchurPartition, q: int, P1: Subgroup, Q1: Subgroup,
                 H1: Subgroup, report: SampleReport) -> None:
    kind = _star_kind(A, q, P1)
    if kind is None:
        report.branch = "fallback"
        report.details["refused"] = "quotient by P1 is neither rank two nor the full group ring"
        return
    result = ci_via_star(A, P1, Q1)
    if isinstance(result, CiVerdict):
        report.branch = kind
        return
    report.branch = "fallback"
    report.details["refused"] = result.reason
    if result.reason == "no star decomposition" and _star_forced(kind, A.group, q, P1, H1):
        report.refute(f"{kind}: A is not A_P1 * A_Q1", result.details)


def _analyze(A: SchurPartition, p: int, q: int, sample_aut_order: Optional[int],
             report: SampleReport) -> None:
    H = A.group
    if A.is_discrete or A.is_rank_two:
        report.branch = "full-ring" if A.is_discrete else "rank2"
        _record(report, babai_ci_check(A))
        return

    # 2-closure and Schurity
    G = aut_scheme(scheme(A))
    report.aut_order = G.order
    if sample_aut_order is not None and G.order != sample_aut_order:
        raise RefutationWitness("automorphism group of the structure is not 2-closed",
                                {"structure": sample_aut_order, "scheme": G.order})
    if transitivity_module(G, H) != A:
        raise RefutationWitness("transitivity module is not Schurian")
    _record(report, babai_ci_check(A, group=G))

    # P1, Q1 and the shape of every M_q-invariant basic set
    P1, Q1 = p1_q1(A, q)
    report.p1, report.q1 = list(P1.members), list(Q1.members)
    for row in trichotomy_table(A, q):
        report.trichotomy.append(row.case)
        if not row.clause_holds:
            report.refute(f"trichotomy clause ({row.case}) fails", row.to_dict())
    report.p1_maximal, offending = p1_maximality_check(A, q)
    if not report.p1_maximal:
        report.refute("P1 is not maximal in A_{P1 Q1}", [list(S.members) for S in offending])
    H1 = join(P1, Q1)
    report.wielandt = wielandt_check(subquotient(A, H1, P1), q)
    if not report.wielandt:
        report.refute("primitive quotient A_{P1 Q1 / P1} is not trivial")

    # P1 Q1 = H: star; otherwise wedge
    if H1.is_whole():
        _star_branch(A, q, P1, Q1, H1, report)
    else:
        _wedge_branch(A, p, q, P1, Q1, H1, report)


def analyze_sample(A: SchurPartition, p: int, q: int,
                   sample_aut_order: Optional[int] = None) -> SampleReport:
    """
    Run the case analysis on one module.

    Structural failures and oracle disagreements never propagate; they are
    collected as refutations on the returned report.
    """
    report = SampleReport(A.key(), [list(b) for b in A.blocks], A.rank)
    try:
        _analyze(A, p, q, sample_aut_order, report)
    except RefutationWitness as exc:
        report.refute(str(exc), exc.witness)
    except VerdictMismatchError as exc:
        report.refute(str(exc), exc.verdicts)
    if report.refutations:
        logger.warning("[Theorem] refutation on %s: %s", report.key, report.refutations[0]["reason"])
    return report


def _analyze_task(args) -> SampleReport:
    return analyze_sample(*args)


def _check_prime(x: int) -> None:
    if x < 2 or prime_factors(x) != [x]:
        raise InvalidSpecError(f"{x} is not a prime")


def verify_main_theorem(p: int, q: int, samples: int = sring_config.DEFAULT_SAMPLES,
                        seed: int = sring_config.DEFAULT_SEED, workers: int = 1,
                        bound: Optional[int] = None) -> TheoremReport:
    """
    Sample transitivity modules over C_p^3 x C_q and check each one.

    Args:
        p, q: distinct primes with p^3 q <= bound
        samples: number of coloured structures drawn
        seed: sampler seed
        workers: > 1 analyses samples in a process pool

    Returns:
        TheoremReport; clean iff every module is CI and nothing was refuted
    """
    _check_prime(p)
    _check_prime(q)
    if p == q:
        raise InvalidSpecError("p and q must be distinct")
    bound = sring_config.MAX_CI_ORDER if bound is None else bound
    H = make_group([p, p, p, q])
    if H.order > bound:
        raise SizeLimitError("verify_main_theorem order", H.order, bound)

    drawn = ModuleSampler(H, seed).modules(samples)
    tasks = [(A, p, q, order) for A, order in drawn]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_analyze_task, tasks))
    else:
        reports = [_analyze_task(t) for t in tasks]
    reports.sort(key=lambda r: r.key)
    result = TheoremReport(p, q, seed, samples, reports)
    logger.info("[Theorem] %s seed=%d: %d modules, histogram %s, %d refutations",
                H.label, seed, len(reports), result.histogram, len(result.refutations))
    return result


# ========== Non-CI search ==========

@dataclass
class NonCiResult:
    group: GroupSpec
    undirected: bool
    witness_set: Optional[List[int]] = None
    partition: Optional[SchurPartition] = None
    verdict: Optional[CiVerdict] = None
    sets_examined: int = 0
    modules_examined: int = 0

    @property
    def exhausted(self) -> bool:
        return self.witness_set is None

    def to_dict(self) -> dict:
        out = {"group": self.group.label, "undirected": self.undirected,
               "exhausted": self.exhausted, "sets_examined": self.sets_examined,
               "modules_examined": self.modules_examined, "witness_set": self.witness_set}
        if self.partition is not None:
            out["partition"] = {"group": self.group.label,
                                "blocks": [list(b) for b in self.partition.blocks]}
        if self.verdict is not None:
            out["verdict"] = self.verdict.to_dict()
        return out


def _connection_sets(H: GroupSpec, undirected: bool):
    """Connection sets S of size 1..n-2, one per Aut(H)-orbit, in size order."""
    auts = automorphism_group(H)
    nonzero = list(range(1, H.order))
    seen = set()
    for size in range(1, H.order - 1):
        for combo in itertools.combinations(nonzero, size):
            S = frozenset(combo)
            if S in seen:
                continue
            if undirected and any(H.neg(x) not in S for x in S):
                continue
            seen.update(phi.apply_set(S) for phi in auts)
            yield list(combo)


def find_non_ci_search(H: GroupSpec, undirected: bool = False,
                       bound: int = sring_config.MAX_ISO_SEARCH_ORDER) -> NonCiResult:
    """
    First Cayley (di)graph over H whose transitivity module fails Babai's
    criterion, or an exhaustion report.

    Args:
        H: |H| <= bound
        undirected: only inverse-closed connection sets
    """
    if H.order > bound:
        raise SizeLimitError("find_non_ci_search order", H.order, bound)
    result = NonCiResult(H, undirected)
    modules = set()
    for S in _connection_sets(H, undirected):
        result.sets_examined += 1
        G = aut_scheme(ColorMatrix.from_connection_sets(H, [S]))
        A = transitivity_module(G, H)
        if A.key() in modules:
            continue
        modules.add(A.key())
        verdict = babai_ci_check(A, group=G)
        if not verdict.is_ci:
            result.witness_set, result.partition, result.verdict = S, A, verdict
            break
    result.modules_examined = len(modules)
    logger.info("[NonCi] %s%s: %s after %d sets, %d modules", H.label,
                " (undirected)" if undirected else "",
                "exhausted" if result.exhausted else f"witness {result.witness_set}",
                result.sets_examined, result.modules_examined)
    return result


__all__ = [
    'BRANCHES', 'SampleReport', 'TheoremReport', 'ModuleSampler', 'analyze_sample',
    'verify_main_theorem', 'NonCiResult', 'find_non_ci_search',
]
