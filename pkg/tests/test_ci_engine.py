"""Tests for ci_engine: Babai's criterion, Iso_1, the overgroup order and theorem-based paths"""
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
from hypothesis import given, strategies as st, settings

from abelian_core import (automorphism_group, closure, make_group, q_parts, trivial_subgroup,
                          whole_group)
from ci_engine import (
    CI, CiVerdict, HypothesisRefusal, aut_restricted_equality, babai_ci_check,
    cayley_isomorphic, ci_sring_check, ci_via_gwreath, ci_via_star, iso1_search,
    minimality_reduce, normalized_cayley_bijections, overgroups, preceq_check,
)
from errors import GroupMismatchError, SizeLimitError
from perm_engine import PermGroup, holomorph, regular_representation, symmetric_group
from schur_core import (SchurPartition, discrete_partition, generated_sring, rank_two_partition,
                        wreath_chain_partition)


def b5_over_z2_cubed(order=(0, 1)):
    G = make_group([2, 2, 2])
    basis = G.basis()
    a, b = basis[order[0]], basis[order[1]]
    L1, L2 = closure(G, [a]), closure(G, [a, b])
    return G, L1, L2, wreath_chain_partition(G, [L1, L2])


class TestBabai:

    def test_discrete_is_full_ring(self):
        verdict = babai_ci_check(discrete_partition(make_group([2, 3])))
        assert verdict.is_ci
        assert verdict.method == "full-ring"
        assert verdict.reverify()

    def test_rank_two_shortcut(self):
        verdict = babai_ci_check(rank_two_partition(make_group([4])))
        assert verdict.method == "rank2"
        # 3! normalized bijections over |Aut(Z4)| = 2
        assert verdict.regular_subgroup_count == 3

    @pytest.mark.parametrize("factors,blocks", [
        ([4], [[0], [2], [1, 3]]),
        ([6], [[0], [3], [1, 2, 4, 5]]),
        ([2, 2], [[0], [1], [2, 3]]),
        ([2, 2, 2], [[0], [1], [2, 3], [4, 5, 6, 7]]),
    ])
    def test_direct_and_search_agree(self, factors, blocks):
        P = SchurPartition.from_blocks(make_group(factors), blocks)
        direct = babai_ci_check(P, strategy="direct")
        search = babai_ci_check(P, strategy="search")
        assert direct.verdict == search.verdict == CI
        assert direct.regular_subgroup_count == search.regular_subgroup_count
        assert direct.details["mode"] == "direct"
        assert search.details["mode"] == "search"
        assert direct.reverify() and search.reverify()

    def test_order_bound(self):
        with pytest.raises(SizeLimitError):
            babai_ci_check(discrete_partition(make_group([3, 3])), bound=8)

    def test_verdict_dict(self):
        P = SchurPartition.from_blocks(make_group([4]), [[0], [2], [1, 3]])
        out = babai_ci_check(P).to_dict(max_rows=0)
        assert out["verdict"] == CI
        assert out["conjugators"] == []
        assert out["conjugators_total"] >= 1
        assert out["partition"]["group"] == "Z4"


class TestIsomorphisms:

    def setup_method(self):
        self.Z4 = make_group([4])

    def test_iso1_counts_on_z4(self):
        assert len(normalized_cayley_bijections(rank_two_partition(self.Z4))) == 6
        assert len(normalized_cayley_bijections(discrete_partition(self.Z4))) == 2

    def test_iso1_search(self):
        P = discrete_partition(self.Z4)
        assert len(iso1_search(P, P)) == 2
        R = rank_two_partition(self.Z4)
        assert len(iso1_search(R, R)) == 6
        assert iso1_search(P, R) == []

    def test_iso1_search_backtracking_matches_count(self):
        G = make_group([3, 3])
        P = discrete_partition(G)
        # above the scan threshold: normalized colour isomorphisms of the
        # discrete scheme are exactly the automorphisms of H
        assert len(iso1_search(P, P)) == 48

    def test_cayley_isomorphic(self):
        G, _, _, P = b5_over_z2_cubed()
        _, _, _, P2 = b5_over_z2_cubed(order=(2, 1))
        phi = cayley_isomorphic(P, P2)
        assert phi is not None
        assert frozenset(phi.apply_set(b) for b in P.blocks) == P2.block_sets()
        assert cayley_isomorphic(P, discrete_partition(G)) is None
        with pytest.raises(GroupMismatchError):
            cayley_isomorphic(P, discrete_partition(self.Z4))

    def test_ci_sring_check_iso1_identity(self):
        P = SchurPartition.from_blocks(self.Z4, [[0], [2], [1, 3]])
        verdict = ci_sring_check(P)
        assert verdict.is_ci
        assert verdict.details["iso1_direct"]
        assert verdict.details["iso1_size"] == verdict.details["product_size"]


class TestOvergroupOrder:

    def test_preceq_is_reflexive(self):
        H = make_group([5])
        hol = holomorph(H, automorphism_group(H))
        assert preceq_check(hol, hol, H).holds

    def test_translations_below_symmetric_group(self):
        H = make_group([4])
        result = preceq_check(regular_representation(H), symmetric_group(4), H)
        assert result.holds
        assert len(result.certificates) == 3

    def test_minimality_on_holomorph(self):
        H = make_group([5])
        G = minimality_reduce(holomorph(H, automorphism_group(H)), H)
        assert G.order == 5

    def test_minimality_on_s4_is_a_two_group(self):
        G = minimality_reduce(symmetric_group(4), make_group([4]))
        order = G.order
        while order % 2 == 0:
            order //= 2
        assert order == 1

    def test_overgroups_include_join_only_groups(self):
        H = make_group([2, 2])
        S4 = symmetric_group(4)
        found = overgroups(S4, H)
        assert [X.order for X in found] == [4, 8, 8, 8, 12, 24]
        # S4 is no single extension <H^, g>, only a join of them
        hat = regular_representation(H)
        assert all(PermGroup(4, hat.generators + [g]).order < 24
                   for g in S4.stabilizer(0).elements())

    def test_minimality_on_s4_over_klein(self):
        H = make_group([2, 2])
        assert minimality_reduce(symmetric_group(4), H).order == 4

    @pytest.mark.parametrize("factors", [[4], [2, 2], [5]])
    def test_minimal_result_has_nothing_below(self, factors):
        H = make_group(factors)
        G = holomorph(H, automorphism_group(H)) if factors == [5] else symmetric_group(4)
        X = minimality_reduce(G, H)
        for Y in overgroups(X, H):
            if Y.order < X.order:
                assert not preceq_check(Y, X, H).holds


class TestTheoremPaths:

    def test_star_on_direct_product(self):
        G = make_group([2, 3])
        K, L = q_parts(G, 3)
        verdict = ci_via_star(discrete_partition(G), K, L)
        assert isinstance(verdict, CiVerdict)
        assert verdict.method == "star"
        assert verdict.is_ci

    def test_star_refusals(self):
        G = make_group([2, 3])
        refusal = ci_via_star(rank_two_partition(G), trivial_subgroup(G), whole_group(G))
        assert isinstance(refusal, HypothesisRefusal)
        assert refusal.reason == "star decomposition is trivial"
        assert not refusal.is_ci
        Z4 = make_group([4])
        refusal = ci_via_star(discrete_partition(Z4), trivial_subgroup(Z4), whole_group(Z4))
        assert refusal.reason == "H has a non-elementary Sylow subgroup"

    def test_gwreath_on_wreath_chain(self):
        G, L1, L2, P = b5_over_z2_cubed()
        verdict = ci_via_gwreath(P, L1, L2)
        assert isinstance(verdict, CiVerdict)
        assert verdict.method == "gwreath"
        assert verdict.details["evidence"]["aut_sizes"]["lhs"] == 1

    def test_gwreath_refusals(self):
        G, L1, L2, P = b5_over_z2_cubed()
        refusal = ci_via_gwreath(P, trivial_subgroup(G), whole_group(G))
        assert refusal.reason == "generalized wreath product is trivial"
        refusal = ci_via_gwreath(discrete_partition(G), L1, L2)
        assert refusal.reason == "not a generalized wreath product for (L, U)"

    def test_aut_restricted_equality(self):
        _, L1, L2, P = b5_over_z2_cubed()
        holds, sizes = aut_restricted_equality(P, L1, L2)
        assert holds
        assert sizes["product"] == sizes["lhs"]


@st.composite
def srings_with_automorphism(draw):
    factors = draw(st.sampled_from([[4], [6], [2, 2], [2, 4], [2, 2, 2]]))
    G = make_group(factors)
    seeds = draw(st.lists(st.sets(st.integers(1, G.order - 1), min_size=1, max_size=3), max_size=2))
    phi = draw(st.sampled_from(automorphism_group(G)))
    return generated_sring(G, seeds), phi


# **Property 1: Cayley isomorphism invariance**
@settings(max_examples=25, deadline=None)
@given(sample=srings_with_automorphism())
def test_property_1_verdict_is_cayley_invariant(sample):
    """
    Property 1: Cayley isomorphism invariance
    *For any* S-ring A and phi in Aut(H), A and phi(A) get the same CI
    verdict and the same number of regular subgroups.
    """
    P, phi = sample
    image = SchurPartition.from_blocks(P.group, [phi.apply_set(b) for b in P.blocks])
    assert cayley_isomorphic(P, image) is not None
    a = babai_ci_check(P)
    b = babai_ci_check(image)
    assert a.verdict == b.verdict
    assert a.regular_subgroup_count == b.regular_subgroup_count


def overgroup_pool():
    pool = []
    for factors in ([4], [2, 2]):
        pool.append((make_group(factors), symmetric_group(4)))
    for factors in ([5], [6], [2, 4]):
        H = make_group(factors)
        pool.append((H, holomorph(H, automorphism_group(H))))
    return pool


OVERGROUP_POOL = overgroup_pool()


# **Property 2: The overgroup order is reflexive and transitive**
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_property_2_preceq_is_a_preorder(data):
    """
    Property 2: The overgroup order is reflexive and transitive
    *For any* chain X <= Y <= Z of overgroups of H^, X <= X holds, and
    X <= Y together with Y <= Z gives X <= Z.
    """
    H, G = data.draw(st.sampled_from(OVERGROUP_POOL))
    Z = data.draw(st.sampled_from(overgroups(G, H)))
    Y = data.draw(st.sampled_from(overgroups(Z, H)))
    X = data.draw(st.sampled_from(overgroups(Y, H)))
    assert preceq_check(X, X, H).holds
    if preceq_check(X, Y, H).holds and preceq_check(Y, Z, H).holds:
        assert preceq_check(X, Z, H).holds
