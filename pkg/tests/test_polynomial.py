from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spinfold import (MultilinearPolynomial, ValidationError,
                      interpolate_polynomial)


def poly(arity, *items):
    return MultilinearPolynomial.from_terms(arity, items)


class TestBasics:
    def test_duplicate_terms_merge(self):
        p = poly(2, ((1,), 1), ((1,), 2), ((1, 2), -1))
        assert p.coefficient([1]) == 3
        assert p.coefficient([1, 2]) == -1

    def test_repeated_index_collapses(self):
        # q1*q1 = q1 for binary variables
        p = poly(1, ((1, 1), 5))
        assert p.coefficient([1]) == 5
        assert p.degree() == 1

    def test_zero_polynomial(self):
        p = poly(3)
        assert p.degree() == 0
        assert p.evaluate([1, 1, 1]) == 0
        assert p.variables() == ()

    def test_evaluate_requires_full_assignment(self):
        p = poly(3, ((3,), 1))
        with pytest.raises(ValidationError):
            p.evaluate([1, 0])

    def test_algebra(self):
        a = poly(2, ((1,), 1))
        b = poly(2, ((2,), 2), ((), 7))
        s = a + b
        assert s.coefficient([]) == 7
        assert (s - b).same_terms(a)
        assert (2 * a).coefficient([1]) == 2

    def test_equality_is_term_equality(self):
        a = poly(2, ((1,), 1))
        b = poly(5, ((1,), 1))
        assert a == b and a.same_terms(b)
        assert a != poly(2, ((1,), 2))


class TestFix:
    def test_fix_to_zero_drops_terms(self):
        p = poly(3, ((1, 2), 4), ((3,), 1))
        q = p.fix({1: 0})
        assert q.arity == 2
        # variables 2,3 relabeled to 1,2
        assert q.coefficient([2]) == 1
        assert q.coefficient([1]) == 0

    def test_fix_to_one_merges_into_smaller_monomial(self):
        p = poly(3, ((1, 2, 3), 5), ((2, 3), 1))
        q = p.fix({1: 1}, relabel=False)
        assert q.coefficient([2, 3]) == 6

    def test_fix_rejects_unknown_variable(self):
        p = poly(2, ((1,), 1))
        with pytest.raises(ValidationError):
            p.fix({5: 1})

    def test_fix_rejects_non_bit(self):
        p = poly(2, ((1,), 1))
        with pytest.raises(ValidationError):
            p.fix({1: 2})

    @given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
    def test_fix_agrees_with_evaluation(self, b1, b2, b3):
        p = poly(3, ((1,), 2), ((1, 2), -3), ((1, 2, 3), 7), ((), 1))
        q = p.fix({2: b2})
        assert q.evaluate([b1, b3]) == p.evaluate([b1, b2, b3])


class TestSubstitutePair:
    def test_replaces_product_everywhere(self):
        p = poly(3, ((1, 2), 4), ((1, 2, 3), -2), ((1,), 1))
        q = p.substitute_pair(1, 2, 4)
        assert q.coefficient([4]) == 4
        assert q.coefficient([3, 4]) == -2
        assert q.coefficient([1]) == 1
        assert q.coefficient([1, 2]) == 0

    def test_rejects_same_variable(self):
        p = poly(2, ((1, 2), 1))
        with pytest.raises(ValidationError):
            p.substitute_pair(1, 1, 3)


class TestInterpolation:
    def test_recovers_table_exactly(self):
        table = {
            (0, 0): Fraction(1, 3), (1, 0): Fraction(-2),
            (0, 1): Fraction(5, 7), (1, 1): Fraction(0),
        }
        p = interpolate_polynomial(lambda a: table[tuple(a)], 2)
        for a, v in table.items():
            assert p.evaluate(a) == v

    def test_zero_arity(self):
        p = interpolate_polynomial(lambda a: Fraction(9, 2), 0)
        assert p.evaluate([]) == Fraction(9, 2)

    @given(st.lists(st.fractions(max_denominator=20), min_size=8, max_size=8))
    def test_roundtrip_on_random_tables(self, values):
        def oracle(a):
            return values[a[0] + 2 * a[1] + 4 * a[2]]
        p = interpolate_polynomial(oracle, 3)
        for v in range(8):
            a = (v & 1, (v >> 1) & 1, (v >> 2) & 1)
            assert p.evaluate(a) == oracle(a)


class TestSerialization:
    def test_dict_roundtrip(self):
        p = poly(4, ((1, 3), Fraction(-7, 3)), ((2,), 11), ((), Fraction(1, 2)))
        q = MultilinearPolynomial.from_dict(p.to_dict())
        assert q == p and q.arity == p.arity

    def test_malformed_data_raises(self):
        with pytest.raises(ValidationError):
            MultilinearPolynomial.from_dict({"arity": 2})

    def test_str_form_readable(self):
        p = poly(2, ((1,), -1), ((1, 2), Fraction(3, 4)))
        s = str(p)
        assert "q1" in s and "q2" in s and "3/4" in s
        assert str(poly(1)) == "0"
