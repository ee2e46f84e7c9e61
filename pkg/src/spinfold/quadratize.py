"""Degree reduction of pseudo-Boolean polynomials to quadratic form.

Each step collapses a variable pair (i, j) into a fresh ancilla r and adds
the penalty delta * (3r + q_i q_j - 2 q_i r - 2 q_j r), which vanishes
exactly when r = q_i q_j and is >= delta otherwise.  delta is chosen (or
validated) so that every assignment violating an AND constraint ends up
with strictly positive energy, leaving the low-energy spectrum untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .polynomial import INTERPOLATION_LIMIT, MultilinearPolynomial


@dataclass(frozen=True)
class CollapseStep:
    pair: tuple[int, int]
    ancilla: int
    delta: Fraction

    def to_dict(self):
        return {"pair": list(self.pair), "ancilla": self.ancilla,
                "delta": {"num": self.delta.numerator,
                          "den": self.delta.denominator}}

    @classmethod
    def from_dict(cls, data) -> "CollapseStep":
        i, j = data["pair"]
        d = data["delta"]
        return cls((int(i), int(j)), int(data["ancilla"]),
                   Fraction(int(d["num"]), int(d["den"])))


@dataclass(frozen=True)
class QuadratizationResult:
    polynomial: MultilinearPolynomial
    steps: tuple[CollapseStep, ...]
    original_arity: int

    def to_dict(self):
        return {"original_arity": self.original_arity,
                "steps": [s.to_dict() for s in self.steps],
                "polynomial": self.polynomial.to_dict()}

    def consistent_extension(self, assignment: Sequence[int]) -> tuple[int, ...]:
        """Extend an original assignment with the ancilla values it implies."""
        if len(assignment) != self.original_arity:
            raise ValidationError("assignment length != original arity")
        values = list(assignment)
        for step in self.steps:
            i, j = step.pair
            values.append(values[i - 1] * values[j - 1])
        return tuple(values)


def and_penalty(i: int, j: int, r: int, arity: int) -> MultilinearPolynomial:
    """3r + q_i q_j - 2 q_i r - 2 q_j r  (zero iff r = q_i q_j)."""
    return MultilinearPolynomial.from_terms(arity, [
        ((r,), Fraction(3)),
        ((i, j), Fraction(1)),
        ((i, r), Fraction(-2)),
        ((j, r), Fraction(-2)),
    ])


def _value_table(poly: MultilinearPolynomial) -> tuple[np.ndarray, int]:
    """Exact energies of all 2^arity assignments as (lcm-scaled int64, lcm).

    Assignment index encodes q_b in bit b-1.  The scaled integers are
    exact as long as they fit int64; guarded by an overflow check.
    """
    n = poly.arity
    if n > INTERPOLATION_LIMIT:
        raise CapacityError(
            f"enumeration over 2^{n} assignments exceeds the "
            f"2^{INTERPOLATION_LIMIT} bound")
    lcm = 1
    for c in poly.terms.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    bound = sum(abs(int(c * lcm)) for c in poly.terms.values())
    if bound >= (1 << 62):
        raise CapacityError("scaled coefficients overflow the integer table")
    idx = np.arange(1 << n, dtype=np.int64)
    values = np.zeros(1 << n, dtype=np.int64)
    for mono, c in poly.terms.items():
        mask = 0
        for i in mono:
            mask |= 1 << (i - 1)
        values[(idx & mask) == mask] += int(c * lcm)
    return values, lcm


def _worst_penalty_ratio(poly: MultilinearPolynomial,
                         pair: tuple[int, int]) -> Fraction:
    """sup of -energy/penalty over AND-violating assignments after the
    collapse; any delta strictly above it satisfies the criterion."""
    i, j = pair
    r = poly.arity + 1
    if r > INTERPOLATION_LIMIT:
        raise CapacityError(
            f"delta search over 2^{r} assignments exceeds the "
            f"2^{INTERPOLATION_LIMIT} bound")
    collapsed = poly.substitute_pair(i, j, r)
    values, lcm = _value_table(collapsed)
    idx = np.arange(1 << r, dtype=np.int64)
    bi = (idx >> (i - 1)) & 1
    bj = (idx >> (j - 1)) & 1
    br = (idx >> (r - 1)) & 1
    violating = br != (bi & bj)
    # the bare gadget evaluates to 3 when r=1, q_i=q_j=0; 1 on every
    # other violating assignment, so delta must beat -c and -c/3
    p3 = violating & (br == 1) & (bi == 0) & (bj == 0)
    p1 = violating & ~p3
    worst = Fraction(0)
    if p1.any():
        worst = max(worst, Fraction(int(-values[p1].min()), lcm))
    if p3.any():
        worst = max(worst, Fraction(int(-values[p3].min()), 3 * lcm))
    return worst


def minimum_delta(poly: MultilinearPolynomial, pair: tuple[int, int]) -> int:
    """Smallest integer delta >= 1 that lifts every AND-violating
    assignment of the collapsed polynomial to energy > 0.

    `poly` is the polynomial before this collapse (penalties from earlier
    steps included).  Enumerates the full assignment space, so it shares
    the interpolation capacity bound.
    """
    return max(1, math.floor(_worst_penalty_ratio(poly, pair)) + 1)


def collapse_pair(poly: MultilinearPolynomial, pair: tuple[int, int],
                  delta=None) -> tuple[MultilinearPolynomial, CollapseStep]:
    """One reduction step; delta=None picks the minimal admissible value."""
    i, j = pair
    if not (1 <= i <= poly.arity and 1 <= j <= poly.arity) or i == j:
        raise ValidationError(f"bad collapse pair {pair}")
    if i > j:
        i, j = j, i
    if delta is None:
        delta = Fraction(minimum_delta(poly, (i, j)))
    else:
        delta = Fraction(delta)
        if delta <= 0:
            raise ValidationError("delta must be positive")
        worst = _worst_penalty_ratio(poly, (i, j))
        if delta <= worst:
            raise ValidationError(
                f"delta {delta} leaves an AND-violating assignment at "
                f"energy <= 0 (needs > {worst})")
    r = poly.arity + 1
    collapsed = poly.substitute_pair(i, j, r)
    result = collapsed + (and_penalty(i, j, r, r) * delta)
    return result, CollapseStep((i, j), r, delta)


def _pair_counts(poly: MultilinearPolynomial) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for monomial, _ in poly.terms.items():
        if len(monomial) < 3:
            continue
        ordered = sorted(monomial)
        for a in range(len(ordered)):
            for b in range(a + 1, len(ordered)):
                key = (ordered[a], ordered[b])
                counts[key] = counts.get(key, 0) + 1
    return counts


def next_collapse_pair(poly: MultilinearPolynomial) -> tuple[int, int] | None:
    """Greedy choice: the pair appearing in the most degree->=3 monomials,
    ties broken lexicographically.  None once the polynomial is quadratic."""
    counts = _pair_counts(poly)
    if not counts:
        return None
    best = min(counts, key=lambda k: (-counts[k], k))
    return best


def quadratize(poly: MultilinearPolynomial,
               plan: Sequence[tuple[tuple[int, int], object]] | None = None
               ) -> QuadratizationResult:
    """Reduce to degree <= 2.

    plan: optional sequence of ((i, j), delta) steps; delta None within a
    step means "choose minimal".  Without a plan, pairs are picked
    greedily and every delta is minimal.
    """
    current = poly
    steps: list[CollapseStep] = []
    if plan is not None:
        for pair, delta in plan:
            current, step = collapse_pair(current, tuple(pair), delta)
            steps.append(step)
        if current.degree() > 2:
            raise ValidationError(
                "plan exhausted but polynomial still has degree "
                f"{current.degree()}")
    else:
        while current.degree() > 2:
            pair = next_collapse_pair(current)
            if pair is None:
                break
            current, step = collapse_pair(current, pair, None)
            steps.append(step)
    return QuadratizationResult(current, tuple(steps), poly.arity)


@dataclass(frozen=True)
class QuadratizationCheck:
    ok: bool
    consistent_exact: bool
    min_violating_energy: Fraction | None
    max_consistent_abs_error: Fraction


def verify_quadratization(original: MultilinearPolynomial,
                          result: QuadratizationResult) -> QuadratizationCheck:
    """Exhaustively confirm the two defining properties of a reduction:
    consistent-ancilla assignments reproduce the original energies exactly,
    and every AND-violating assignment has energy > 0."""
    n0 = original.arity
    n = result.polynomial.arity
    if n > INTERPOLATION_LIMIT:
        raise CapacityError(
            f"verification over 2^{n} assignments exceeds the "
            f"2^{INTERPOLATION_LIMIT} bound")
    consistent_idx = []
    max_err = Fraction(0)
    for value in range(1 << n0):
        x = tuple((value >> b) & 1 for b in range(n0))
        ext = result.consistent_extension(x)
        consistent_idx.append(sum(b << k for k, b in enumerate(ext)))
        err = abs(result.polynomial.evaluate(ext) - original.evaluate(x))
        max_err = max(max_err, err)
    values, lcm = _value_table(result.polynomial)
    violating = np.ones(1 << n, dtype=bool)
    violating[consistent_idx] = False
    min_violating = None
    if violating.any():
        min_violating = Fraction(int(values[violating].min()), lcm)
    ok = max_err == 0 and (min_violating is None or min_violating > 0)
    return QuadratizationCheck(ok, max_err == 0, min_violating, max_err)
