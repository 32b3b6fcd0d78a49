"""Tests for theorem_check: sampling, the case analysis pipeline and the non-CI search"""
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
from hypothesis import given, strategies as st, settings

from abelian_core import GroupAutomorphism, make_group, q_parts
from ci_engine import NOT_CI
from errors import InvalidSpecError, SizeLimitError
from schur_core import (cyclotomic, discrete_partition, rank_two_partition, validate,
                        wreath_chain_partition)
from theorem_check import (BRANCHES, ModuleSampler, analyze_sample, find_non_ci_search,
                           verify_main_theorem)


class TestSampler:

    def setup_method(self):
        self.H = make_group([2, 2, 2, 3])

    def test_same_seed_same_draws(self):
        a = ModuleSampler(self.H, seed=7)
        b = ModuleSampler(self.H, seed=7)
        assert [a.draw() for _ in range(5)] == [b.draw() for _ in range(5)]

    def test_connection_sets_avoid_identity(self):
        sampler = ModuleSampler(self.H, seed=1)
        for _ in range(20):
            S = sampler.connection_set()
            assert S
            assert 0 not in S

    def test_baselines_come_first(self):
        modules = ModuleSampler(self.H, seed=0).modules(3)
        assert modules[0][0] == discrete_partition(self.H)
        assert modules[1][0] == rank_two_partition(self.H)
        assert all(validate(A).valid for A, _ in modules)


class TestAnalyzeSample:

    def setup_method(self):
        self.H = make_group([2, 2, 2, 3])

    def test_trivial_rings(self):
        report = analyze_sample(discrete_partition(self.H), 2, 3)
        assert report.branch == "full-ring"
        assert report.verdict == "CI"
        report = analyze_sample(rank_two_partition(self.H), 2, 3)
        assert report.branch == "rank2"
        assert not report.refutations

    def test_wreath_over_q_takes_the_wedge(self):
        _, Q = q_parts(self.H, 3)
        report = analyze_sample(wreath_chain_partition(self.H, [Q]), 2, 3)
        assert report.branch == "wedge-gwreath"
        assert report.catalog_label == "B1"
        assert report.p1 == [0]
        assert report.q1 == list(Q.members)
        assert report.verdict == "CI"
        assert not report.refutations

    def test_wedge_checks_the_star_split_below_p1_q1(self, monkeypatch):
        import theorem_check
        calls = []
        real = theorem_check.detect_star

        def spy(A1, K, L):
            cert = real(A1, K, L)
            calls.append((A1.group.order, cert))
            return cert

        monkeypatch.setattr(theorem_check, "detect_star", spy)
        _, Q = q_parts(self.H, 3)
        report = analyze_sample(wreath_chain_partition(self.H, [Q]), 2, 3)
        assert report.branch == "wedge-gwreath"
        # A_(P1 Q1) is the full group ring of C_3, split over P1 = 1 and Q1
        assert [(order, cert.ok) for order, cert in calls] == [(3, True)]
        assert report.details["h1_star"] == {"kind": "star-full", "ok": True, "trivial": True}
        assert not report.refutations

    def test_rank_two_quotient_without_star_falls_back(self):
        # swap e1, e2 and negate the order-3 factor: P1 = (H1)_{q'} and the
        # quotient by P1 has rank two, yet no star decomposition exists
        e1, e2, e3, f = self.H.basis()
        phi = GroupAutomorphism.from_images(self.H, [e2, e1, e3, self.H.neg(f)])
        A = cyclotomic(self.H, [GroupAutomorphism.identity(self.H), phi])
        report = analyze_sample(A, 2, 3)
        assert report.branch == "fallback"
        assert report.verdict == "CI"
        assert not report.refutations

    def test_mismatched_aut_order_is_refuted(self):
        _, Q = q_parts(self.H, 3)
        report = analyze_sample(wreath_chain_partition(self.H, [Q]), 2, 3, sample_aut_order=1)
        assert report.refutations
        assert "2-closed" in report.refutations[0]["reason"]


class TestVerifyTheorem:

    def test_small_run_is_clean(self):
        report = verify_main_theorem(2, 3, samples=8, seed=0)
        assert report.clean
        hist = report.histogram
        assert set(hist) == set(BRANCHES)
        assert sum(hist.values()) == len(report.samples)
        assert hist["full-ring"] == 1 and hist["rank2"] == 1
        out = report.to_dict()
        assert out["group"] == "Z2^3xZ3"
        assert out["distinct_modules"] == len(report.samples)

    def test_small_run_over_z3_cubed_z2(self):
        report = verify_main_theorem(3, 2, samples=3, seed=0)
        assert report.clean
        assert report.to_dict()["group"] == "Z3^3xZ2"
        assert report.histogram["full-ring"] == 1 and report.histogram["rank2"] == 1

    @pytest.mark.slow
    @pytest.mark.parametrize("p,q,samples", [(2, 3, 200), (3, 2, 50)])
    def test_acceptance_scale_run_is_clean(self, p, q, samples):
        report = verify_main_theorem(p, q, samples=samples, seed=0)
        assert report.refutations == []
        assert report.clean
        assert sum(report.histogram.values()) == len(report.samples)

    def test_deterministic(self):
        a = verify_main_theorem(2, 3, samples=4, seed=3).to_dict()
        b = verify_main_theorem(2, 3, samples=4, seed=3).to_dict()
        assert a == b

    @pytest.mark.parametrize("p,q", [(2, 2), (4, 3), (2, 1)])
    def test_bad_primes(self, p, q):
        with pytest.raises(InvalidSpecError):
            verify_main_theorem(p, q, samples=1)

    def test_order_bound(self):
        with pytest.raises(SizeLimitError):
            verify_main_theorem(3, 5, samples=1)


class TestNonCiSearch:

    def test_z8_directed_witness(self):
        result = find_non_ci_search(make_group([8]))
        assert not result.exhausted
        assert result.verdict.verdict == NOT_CI
        assert result.verdict.refusal["brute_force_confirmed"] is True
        assert result.to_dict()["witness_set"] == result.witness_set

    @pytest.mark.parametrize("factors,undirected", [([8], True), ([6], False), ([5], False)])
    def test_exhausted(self, factors, undirected):
        result = find_non_ci_search(make_group(factors), undirected=undirected)
        assert result.exhausted
        assert result.sets_examined > 0
        assert result.to_dict()["exhausted"] is True

    def test_order_bound(self):
        with pytest.raises(SizeLimitError):
            find_non_ci_search(make_group([2, 3, 3]))


# **Property 1: Sampled connection sets are well formed**
@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_property_1_draws_are_well_formed(seed):
    """
    Property 1: Sampled connection sets are well formed
    *For any* seed, a draw has between one and four colours, each a sorted
    nonempty subset of H without the identity.
    """
    H = make_group([2, 2, 2, 3])
    sets = ModuleSampler(H, seed=seed).draw()
    assert 1 <= len(sets) <= 4
    for S in sets:
        assert S == sorted(set(S))
        assert S and 0 not in S
        assert all(0 < x < H.order for x in S)
