"""Degree reduction via AND-ancilla penalties."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spinfold import (MultilinearPolynomial, ValidationError, and_penalty,
                      collapse_pair, minimum_delta, next_collapse_pair,
                      quadratize, verify_quadratization)
from spinfold.fixtures import get_fixture


def poly(arity, *items):
    return MultilinearPolynomial.from_terms(arity, items)


class TestPenaltyGadget:
    def test_zero_exactly_when_ancilla_equals_and(self):
        g = and_penalty(1, 2, 3, 3)
        for v in range(8):
            a = (v & 1, (v >> 1) & 1, (v >> 2) & 1)
            expected_zero = a[2] == (a[0] & a[1])
            assert (g.evaluate(a) == 0) == expected_zero
            if not expected_zero:
                assert g.evaluate(a) >= 1

    def test_shape(self):
        g = and_penalty(1, 2, 3, 3)
        assert g.coefficient([3]) == 3
        assert g.coefficient([1, 2]) == 1
        assert g.coefficient([1, 3]) == -2
        assert g.coefficient([2, 3]) == -2


class TestMinimumDelta:
    def test_floor_rule_on_negative_pressure(self):
        # deepest violating energy is -17 + 1 = -16, so 17 just clears it
        p = poly(3, ((1, 2, 3), -17), ((1, 2), 1))
        d = minimum_delta(p, (1, 2))
        assert d == 17

    def test_never_below_one(self):
        p = poly(3, ((1, 2, 3), 5))
        assert minimum_delta(p, (1, 2)) == 1

    def test_published_cubic_needs_nine(self):
        fx = get_fixture("exp3")
        assert minimum_delta(fx.polynomials["sanitized"], (2, 3)) == 9
        assert fx.reference["auto_delta"] == 9


class TestCollapse:
    def test_single_step(self):
        p = poly(3, ((1, 2, 3), 4), ((1,), -1))
        q, step = collapse_pair(p, (1, 2))
        assert step.ancilla == 4
        assert q.degree() <= 2
        assert q.coefficient([3, 4]) == 4

    def test_quadratize_greedy_terminates(self):
        p = poly(4, ((1, 2, 3, 4), 3), ((1, 2, 3), -2), ((2, 3, 4), 1))
        result = quadratize(p)
        assert result.polynomial.degree() <= 2
        assert result.original_arity == 4
        check = verify_quadratization(p, result)
        assert check.ok

    def test_quadratic_input_passes_through(self):
        p = poly(2, ((1, 2), 1), ((1,), -3))
        result = quadratize(p)
        assert result.polynomial == p
        assert result.steps == ()

    def test_explicit_plan_controls_pair_order(self):
        fx = get_fixture("exp6")
        result = quadratize(fx.polynomials["sanitized"], fx.plan)
        assert [s.pair for s in result.steps] == [(1, 2), (3, 4)]
        assert [s.delta for s in result.steps] == [6, 4]
        assert result.polynomial.same_terms(fx.polynomials["quadratic"])

    def test_plan_delta_below_minimum_rejected(self):
        fx = get_fixture("exp3")
        with pytest.raises(ValidationError):
            quadratize(fx.polynomials["sanitized"], [((2, 3), Fraction(1))])


class TestSpectrumContract:
    def test_consistent_states_exact_and_violations_positive(self):
        for name in ("exp1", "exp2", "exp3", "exp4", "exp5", "exp6"):
            p = get_fixture(name).polynomials["sanitized"]
            result = quadratize(p, get_fixture(name).plan)
            check = verify_quadratization(p, result)
            assert check.consistent_exact, name
            assert check.min_violating_energy is None \
                or check.min_violating_energy > 0, name

    def test_seven_bit_search_space_reduces_cleanly(self):
        p = get_fixture("psvkma").polynomials["sanitized"]
        result = quadratize(p)
        assert result.polynomial.arity <= 24
        assert verify_quadratization(p, result).ok

    def test_minimum_preserved(self):
        fx = get_fixture("exp3")
        p = fx.polynomials["sanitized"]
        result = quadratize(p, fx.plan)
        orig_min = min(p.evaluate(((v >> 0) & 1, (v >> 1) & 1, (v >> 2) & 1))
                       for v in range(8))
        q = result.polynomial
        red_min = min(q.evaluate(tuple((v >> b) & 1 for b in range(q.arity)))
                      for v in range(1 << q.arity))
        assert orig_min == red_min == -5


class TestGreedyPairChoice:
    def test_picks_most_shared_pair(self):
        p = poly(4, ((1, 2, 3), 1), ((1, 2, 4), 1), ((2, 3, 4), 1))
        assert next_collapse_pair(p) == (1, 2)

    def test_none_when_quadratic(self):
        assert next_collapse_pair(poly(2, ((1, 2), 1))) is None


@settings(deadline=None, max_examples=40)
@given(st.lists(
    st.tuples(st.sets(st.integers(1, 4), min_size=1, max_size=4),
              st.integers(-6, 6)),
    min_size=1, max_size=6))
def test_random_quartics_reduce_faithfully(terms):
    p = MultilinearPolynomial.from_terms(
        4, [(tuple(vs), Fraction(c)) for vs, c in terms])
    result = quadratize(p)
    assert result.polynomial.degree() <= 2
    assert verify_quadratization(p, result).ok
