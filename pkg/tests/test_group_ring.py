"""Tests for group_ring: convolution, power map and Schur-Wielandt extraction"""
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest
from hypothesis import given, strategies as st, settings

from abelian_core import closure, make_group
from errors import GroupMismatchError
from group_ring import (RingElement, coefficient_class, freshman_congruence, multiply,
                        power_map, schur_wielandt_extract, simple_quantity, unit, zero)
from schur_core import is_union_of_blocks, wreath_chain_partition


class TestRingElement:

    def setup_method(self):
        self.G = make_group([6])

    def test_zero_coefficients_are_dropped(self):
        x = RingElement(self.G, {1: 2, 2: 0})
        assert x.support() == frozenset([1])
        assert x == RingElement(self.G, {1: 2})

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError):
            RingElement(self.G, {6: 1})

    def test_multiply_is_convolution(self):
        x = simple_quantity(self.G, [1, 2])
        y = simple_quantity(self.G, [2, 5])
        # {1,2} * {2,5} = 3 + 0 + 4 + 1
        assert multiply(x, y) == simple_quantity(self.G, [0, 1, 3, 4])

    def test_subgroup_square(self):
        S = simple_quantity(self.G, [0, 3])
        assert S * S == S.scaled(2)

    def test_unit_and_zero(self):
        x = simple_quantity(self.G, [1, 4])
        assert x * unit(self.G) == x
        assert (x * zero(self.G)).is_zero()
        assert x ** 0 == unit(self.G)

    def test_arithmetic(self):
        x = simple_quantity(self.G, [1, 2])
        y = simple_quantity(self.G, [2, 3])
        assert (x + y).coeff(2) == 2
        assert (x - y).coefficients == {1: 1, 3: -1}
        assert (3 * x).coeff(1) == 3
        assert (-x).coeff(2) == -1

    def test_dump(self):
        x = RingElement(self.G, {4: -1, 1: 3})
        assert x.dump() == "1:3 4:-1"

    def test_mismatched_groups(self):
        with pytest.raises(GroupMismatchError):
            simple_quantity(self.G, [1]) + simple_quantity(make_group([5]), [1])


class TestPowerMap:

    def test_power_map_sums_collisions(self):
        G = make_group([4])
        x = simple_quantity(G, [1, 3])
        assert power_map(x, 2) == RingElement(G, {2: 2})

    def test_extraction_and_classes(self):
        G = make_group([5])
        x = RingElement(G, {0: 3, 1: 2, 2: 6})
        assert schur_wielandt_extract(x, 3) == frozenset([1])
        assert coefficient_class(x, 0) == frozenset([3, 4])
        assert coefficient_class(x, 6) == frozenset([2])

    def test_extraction_from_basic_quantities(self):
        G = make_group([2, 2, 2])
        e1, e2, _ = G.basis()
        P = wreath_chain_partition(G, [closure(G, [e1]), closure(G, [e1, e2])])
        quantities = [simple_quantity(G, b) for b in P.blocks]
        for a in quantities:
            for b in quantities:
                for m in (2, 3):
                    assert is_union_of_blocks(P, schur_wielandt_extract(a * b, m))


# **Property 1: Freshman's dream**
@settings(max_examples=100, deadline=None)
@given(
    factors=st.sampled_from([[5], [7], [2, 2], [3, 3], [2, 2, 3], [6]]),
    m=st.sampled_from([2, 3, 5, 7]),
    coeffs=st.dictionaries(st.integers(0, 11), st.integers(-3, 3), max_size=6),
)
def test_property_1_freshman_congruence(factors, m, coeffs):
    """
    Property 1: Freshman's dream
    *For any* x in Z[H] and prime m, x^m and x^(m) agree coefficientwise mod m.
    """
    G = make_group(factors)
    x = RingElement(G, {r % G.order: c for r, c in coeffs.items()})
    assert freshman_congruence(x, m)


# **Property 2: Ring laws**
@settings(max_examples=100, deadline=None)
@given(
    a=st.dictionaries(st.integers(0, 7), st.integers(-2, 2), max_size=4),
    b=st.dictionaries(st.integers(0, 7), st.integers(-2, 2), max_size=4),
    c=st.dictionaries(st.integers(0, 7), st.integers(-2, 2), max_size=4),
)
def test_property_2_commutative_ring(a, b, c):
    """
    Property 2: Ring laws
    *For any* x, y, z in Z[Z2 x Z4], multiplication is commutative,
    associative and distributes over addition.
    """
    G = make_group([2, 4])
    x, y, z = (RingElement(G, d) for d in (a, b, c))
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
