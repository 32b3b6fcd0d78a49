"""Tests for schur_core: axioms, closure, A-subgroups, sections and certificates"""
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
from hypothesis import given, strategies as st, settings

from abelian_core import (closure, make_group, q_parts, trivial_subgroup,
                          unit_action, units, whole_group)
from errors import InvalidSpecError, NotASubgroupError, PreconditionViolation
from group_ring import RingElement
from schur_core import (
    SchurPartition, asubgroups, automorphisms_of, block_product, cyclotomic, detect_gwreath,
    detect_star, discrete_partition, find_star, generated_sring, is_asubgroup, is_p_sring,
    is_primitive, is_union_of_blocks, p1_maximality_check, p1_q1, quotient,
    quotient_with_section, radical,
    rank_two_partition, restriction, structure_constants, subquotient, tensor_partition,
    thin_radical, trichotomy_classify, trichotomy_table, validate, wielandt_check,
    wreath_chain_partition, wreath_partition,
)


def b5_over_z2_cubed():
    G = make_group([2, 2, 2])
    e1, e2, _ = G.basis()
    L1, L2 = closure(G, [e1]), closure(G, [e1, e2])
    return G, L1, L2, wreath_chain_partition(G, [L1, L2])


class TestPartitionValue:

    def test_canonical_block_order(self):
        G = make_group([6])
        P = SchurPartition.from_blocks(G, [[3], [2, 4], [5, 1], [0]])
        assert P.blocks == ((0,), (3,), (1, 5), (2, 4))
        assert P.block_of[5] == 2

    @pytest.mark.parametrize("blocks", [[[0], [1, 2]], [[0, 1], [1, 2, 3]], [[0], [], [1, 2, 3]], [[0], [1, 2, 3, 4]]])
    def test_not_a_partition(self, blocks):
        with pytest.raises(InvalidSpecError):
            SchurPartition.from_blocks(make_group([4]), blocks)

    def test_from_labels(self):
        G = make_group([4])
        P = SchurPartition.from_labels(G, ["a", "b", "c", "b"])
        assert P.blocks == ((0,), (2,), (1, 3))

    def test_key_is_stable(self):
        G = make_group([5])
        assert discrete_partition(G).key() == '{"group":"Z5","blocks":[[0],[1],[2],[3],[4]]}'
        assert rank_two_partition(G).rank == 2


class TestValidate:

    def test_trivial_rings_are_valid(self):
        for factors in ([6], [2, 2, 2], [2, 2, 2, 3]):
            G = make_group(factors)
            assert validate(discrete_partition(G)).valid
            assert validate(rank_two_partition(G)).valid

    def test_identity_axiom(self):
        report = validate(SchurPartition.from_blocks(make_group([4]), [[0, 1], [2], [3]]))
        assert not report.valid
        assert report.axiom == "identity"

    def test_inverse_axiom(self):
        report = validate(SchurPartition.from_blocks(make_group([4]), [[0], [1, 2], [3]]))
        assert report.axiom == "inverse"

    def test_closure_axiom(self):
        report = validate(SchurPartition.from_blocks(make_group([7]), [[0], [1, 6], [2, 3, 4, 5]]))
        assert report.axiom == "closure"
        assert report.witness is not None
        assert report.to_dict()["valid"] is False

    def test_structure_constants(self):
        G = make_group([5])
        P = SchurPartition.from_blocks(G, [[0], [1, 4], [2, 3]])
        c = structure_constants(P)
        # {1,4}^2 = 2*0 + {2,3}
        assert c[(1, 1)] == {0: 2, 2: 1}
        assert block_product(P, 1, 1) == RingElement(G, {0: 2, 2: 1, 3: 1})


class TestClosure:

    def test_generated_from_nothing_is_rank_two(self):
        G = make_group([5])
        assert generated_sring(G) == rank_two_partition(G)

    def test_generated_from_inverse_pair(self):
        G = make_group([7])
        P = generated_sring(G, [[1, 6]])
        assert P.block_sets() == {frozenset(b) for b in ([0], [1, 6], [2, 5], [3, 4])}

    def test_generated_from_single_element_is_discrete_on_cyclic(self):
        G = make_group([6])
        assert generated_sring(G, [[1]]).is_discrete

    def test_closure_splits_by_product_coefficients(self, monkeypatch):
        import schur_core
        seen = []
        real = schur_core.coefficient_class

        def counting(x, k):
            seen.append(k)
            return real(x, k)

        monkeypatch.setattr(schur_core, "coefficient_class", counting)
        G = make_group([2, 2])
        P = generated_sring(G, [[1]])
        assert P.block_sets() == {frozenset(b) for b in ([0], [1], [2, 3])}
        # {2,3}^2 = 2*0 + 2*1: coefficient 2 is one of the classes split on
        assert 2 in seen and 0 in seen

    def test_cyclotomic(self):
        G = make_group([7])
        P = cyclotomic(G, [unit_action(G, t) for t in (1, 2, 4)])
        assert P.block_sizes() == [1, 3, 3]
        assert validate(P).valid

    def test_cyclotomic_needs_a_group(self):
        G = make_group([7])
        with pytest.raises(NotASubgroupError):
            cyclotomic(G, [unit_action(G, 1), unit_action(G, 2)])


class TestSubgroupsAndSections:

    def test_asubgroups_of_wreath_chain(self):
        G, L1, L2, P = b5_over_z2_cubed()
        assert asubgroups(P) == [trivial_subgroup(G), L1, L2, whole_group(G)]
        assert is_asubgroup(P, L2)
        assert not is_asubgroup(P, closure(G, [G.basis()[1]]))

    def test_radical_and_thin_radical(self):
        G, L1, L2, P = b5_over_z2_cubed()
        e1, e2, _ = G.basis()
        assert radical(G, [e2, G.add(e1, e2)]) == L1
        assert thin_radical(P) == L1
        with pytest.raises(PreconditionViolation):
            radical(G, [])

    def test_p_sring(self):
        _, _, _, P = b5_over_z2_cubed()
        assert P.block_sizes() == [1, 1, 2, 4]
        assert is_p_sring(P, 2)
        assert not is_p_sring(rank_two_partition(make_group([2, 3])), 2)

    def test_restriction_and_quotient(self):
        G, L1, L2, P = b5_over_z2_cubed()
        R = restriction(P, L2)
        assert R.group.order == 4
        assert R.block_sizes() == [1, 1, 2]
        Q = quotient(P, L1)
        assert Q.group.order == 4
        assert Q.block_sizes() == [1, 1, 2]
        assert subquotient(P, L2, L1).is_discrete
        with pytest.raises(NotASubgroupError):
            restriction(P, closure(G, [G.basis()[2]]))

    def test_automorphisms_of(self):
        G, L1, L2, P = b5_over_z2_cubed()
        assert len(automorphisms_of(discrete_partition(G))) == 168
        assert len(automorphisms_of(rank_two_partition(G))) == 168
        auts = automorphisms_of(P)
        assert all(phi(G.basis()[0]) == G.basis()[0] for phi in auts)

    def test_wreath_partition_builder(self):
        G, L1, L2, P = b5_over_z2_cubed()
        outer, sec = quotient_with_section(P, L1)
        inner = [b for b in P.blocks if b[0] in L1.member_set]
        assert wreath_partition(inner, L1, outer, sec) == P


class TestPQ:

    def setup_method(self):
        self.G = make_group([2, 2, 2, 3])

    def test_discrete(self):
        P1, Q1 = p1_q1(discrete_partition(self.G), 3)
        Pq, Qq = q_parts(self.G, 3)
        assert P1 == Pq
        assert Q1 == Qq

    def test_rank_two(self):
        P1, Q1 = p1_q1(rank_two_partition(self.G), 3)
        assert P1.is_trivial()
        assert Q1.is_whole()

    def test_primitivity_and_wielandt(self):
        assert is_primitive(rank_two_partition(self.G))
        assert wielandt_check(rank_two_partition(self.G), 3)
        Z5 = make_group([5])
        assert is_primitive(discrete_partition(Z5))
        assert wielandt_check(discrete_partition(Z5), 5)
        assert not is_primitive(discrete_partition(self.G))

    def test_p1_maximality(self):
        for P in (discrete_partition(self.G), rank_two_partition(self.G)):
            holds, offending = p1_maximality_check(P, 3)
            assert holds and offending == []


class TestCertificates:

    def test_gwreath_on_wreath_chain(self):
        G, L1, L2, P = b5_over_z2_cubed()
        pairs = {(c.subgroups[0], c.subgroups[1]) for c in detect_gwreath(P) if not c.trivial}
        assert (L1, L2) in pairs
        for c in detect_gwreath(P):
            assert c.reverify(P)

    def test_discrete_has_only_trivial_gwreath(self):
        G = make_group([2, 3])
        assert all(c.trivial for c in detect_gwreath(discrete_partition(G)))

    def test_star_on_direct_product(self):
        G = make_group([2, 3])
        P = discrete_partition(G)
        K, L = q_parts(G, 3)
        cert = detect_star(P, K, L)
        assert cert.ok and not cert.trivial
        assert cert.reverify(P)
        assert find_star(P, 3) is not None

    def test_star_refusal(self):
        G = make_group([2, 3])
        P = rank_two_partition(G)
        K, L = trivial_subgroup(G), whole_group(G)
        assert detect_star(P, K, L).trivial
        with pytest.raises(NotASubgroupError):
            detect_star(P, *q_parts(G, 3))

    def test_tensor_builder(self):
        G = make_group([2, 3])
        K, L = q_parts(G, 3)
        P = tensor_partition(G, [[0], [x for x in K.members if x]], [[y] for y in L.members])
        assert validate(P).valid
        assert P.block_sizes() == [1, 1, 1, 1, 1, 1]


class TestTrichotomy:

    def setup_method(self):
        self.G = make_group([2, 2, 2, 3])

    def test_discrete_q_prime_blocks_are_case_a(self):
        rows = trichotomy_table(discrete_partition(self.G), 3)
        assert len(rows) == 8
        assert all(r.case == "a" and r.clause_holds for r in rows)

    def test_rank_two_is_case_b(self):
        row = trichotomy_classify(rank_two_partition(self.G), 3, 1)
        assert row.case == "b"
        assert row.clause_holds

    def test_wreath_over_q_is_case_c(self):
        _, Q = q_parts(self.G, 3)
        P = wreath_chain_partition(self.G, [Q])
        rows = trichotomy_table(P, 3)
        assert {r.case for r in rows} == {"a", "c"}
        assert all(r.clause_holds for r in rows)

    def test_non_invariant_block(self):
        P = discrete_partition(self.G)
        # rank 1 is the generator of the order-3 factor: -1 acts on it
        with pytest.raises(PreconditionViolation):
            trichotomy_classify(P, 3, P.block_of[1])


@st.composite
def seeded_srings(draw):
    factors = draw(st.sampled_from([[6], [8], [2, 4], [2, 2, 2], [10], [2, 6], [12]]))
    G = make_group(factors)
    seeds = draw(st.lists(st.sets(st.integers(1, G.order - 1), min_size=1, max_size=4), max_size=2))
    return generated_sring(G, seeds), seeds


# **Property 1: Generated rings satisfy the axioms**
@settings(max_examples=100, deadline=None)
@given(sample=seeded_srings())
def test_property_1_generated_sring_is_valid(sample):
    """
    Property 1: Generated rings satisfy the axioms
    *For any* seed sets, generated_sring returns a partition passing all
    three axioms in which every seed is a union of basic sets.
    """
    P, seeds = sample
    assert validate(P).valid
    for s in seeds:
        assert is_union_of_blocks(P, s)


# **Property 2: Power maps permute basic sets**
@settings(max_examples=100, deadline=None)
@given(sample=seeded_srings())
def test_property_2_coprime_power_of_basic_set(sample):
    """
    Property 2: Power maps permute basic sets
    *For any* S-ring over an abelian group, basic set T and m coprime to |H|,
    T^(m) is again a basic set.
    """
    P, _ = sample
    G = P.group
    blocks = P.block_sets()
    for m in units(G):
        for T in P.blocks:
            assert frozenset(G.scale(m, x) for x in T) in blocks


# **Property 3: Radicals of A-sets**
@settings(max_examples=100, deadline=None)
@given(sample=seeded_srings(), data=st.data())
def test_property_3_radical_is_asubgroup(sample, data):
    """
    Property 3: Radicals of A-sets
    *For any* nonempty union of basic sets, its radical is an A-subgroup.
    """
    P, _ = sample
    chosen = data.draw(st.sets(st.integers(0, P.rank - 1), min_size=1))
    S = [x for i in chosen for x in P.blocks[i]]
    assert is_asubgroup(P, radical(P.group, S))


# **Property 4: Restriction and quotient stay S-rings**
@settings(max_examples=50, deadline=None)
@given(sample=seeded_srings(), data=st.data())
def test_property_4_sections_are_srings(sample, data):
    """
    Property 4: Restriction and quotient stay S-rings
    *For any* A-subgroup U, both A_U and A_{H/U} validate.
    """
    P, _ = sample
    U = data.draw(st.sampled_from(asubgroups(P)))
    assert validate(restriction(P, U)).valid
    assert validate(quotient(P, U)).valid
