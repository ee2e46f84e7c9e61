"""Multilinear pseudo-Boolean polynomials over exact rationals.

A polynomial is stored as a map from monomials (frozensets of 1-based
variable indices) to nonzero Fraction coefficients.  Multilinearity is
automatic: a monomial is a set, so q_i^2 collapses to q_i on construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import CapacityError, ValidationError

Monomial = frozenset

INTERPOLATION_LIMIT = 24


def _coeff(value) -> Fraction:
    if isinstance(value, float):
        raise ValidationError("coefficients must be exact rationals, not floats")
    return Fraction(value)


class MultilinearPolynomial:
    """Immutable multilinear polynomial in binary variables q_1..q_arity."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: Mapping[Monomial, Fraction] | None = None):
        if arity < 0:
            raise ValidationError("arity must be nonnegative")
        clean = {}
        for mono, c in (terms or {}).items():
            mono = frozenset(mono)
            c = _coeff(c)
            if not all(isinstance(i, int) and 1 <= i <= arity for i in mono):
                raise ValidationError(
                    f"monomial {sorted(mono)} has indices outside 1..{arity}")
            if c != 0:
                clean[mono] = c
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("MultilinearPolynomial is immutable")

    @classmethod
    def from_terms(cls, arity: int, items: Iterable[tuple[Iterable[int], object]]):
        """Build from (variables, coefficient) pairs, merging duplicates.

        Repeated indices inside one term collapse by idempotence
        (q_i^2 = q_i for binary q_i).
        """
        acc: dict[Monomial, Fraction] = {}
        for vs, c in items:
            key = frozenset(vs)
            acc[key] = acc.get(key, Fraction(0)) + _coeff(c)
        return cls(arity, acc)

    # -- basic queries ----------------------------------------------------

    def coefficient(self, vs: Iterable[int]) -> Fraction:
        return self.terms.get(frozenset(vs), Fraction(0))

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({i for m in self.terms for i in m}))

    def evaluate(self, assignment) -> Fraction:
        """Evaluate at a 0/1 assignment (sequence indexed by variable-1)."""
        if len(assignment) < self.arity:
            raise ValidationError(
                f"assignment of length {len(assignment)} for arity {self.arity}")
        total = Fraction(0)
        for mono, c in self.terms.items():
            if all(assignment[i - 1] for i in mono):
                total += c
        return total

    # -- algebra ----------------------------------------------------------

    def _binop(self, other, sign):
        if isinstance(other, MultilinearPolynomial):
            arity = max(self.arity, other.arity)
            acc = dict(self.terms)
            for m, c in other.terms.items():
                acc[m] = acc.get(m, Fraction(0)) + sign * c
            return MultilinearPolynomial(arity, acc)
        acc = dict(self.terms)
        key = frozenset()
        acc[key] = acc.get(key, Fraction(0)) + sign * _coeff(other)
        return MultilinearPolynomial(self.arity, acc)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __mul__(self, scalar):
        c = _coeff(scalar)
        return MultilinearPolynomial(
            self.arity, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, MultilinearPolynomial)
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def same_terms(self, other: "MultilinearPolynomial") -> bool:
        """Term-for-term rational equality, ignoring declared arity."""
        return self.terms == other.terms

    # -- transformations --------------------------------------------------

    def with_arity(self, arity: int) -> "MultilinearPolynomial":
        return MultilinearPolynomial(arity, self.terms)

    def fix(self, bindings: Mapping[int, int], relabel: bool = True
            ) -> "MultilinearPolynomial":
        """Substitute constants for variables and simplify.

        With relabel=True the surviving variables are renamed to 1..arity'
        preserving their order.
        """
        for i, v in bindings.items():
            if not 1 <= i <= self.arity:
                raise ValidationError(f"binding references unknown variable q{i}")
            if v not in (0, 1):
                raise ValidationError(f"binding q{i}={v!r} is not 0/1")
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            if any(bindings.get(i) == 0 for i in mono):
                continue
            rest = frozenset(i for i in mono if i not in bindings)
            acc[rest] = acc.get(rest, Fraction(0)) + c
        survivors = sorted(i for i in range(1, self.arity + 1) if i not in bindings)
        if relabel:
            ren = {old: new for new, old in enumerate(survivors, start=1)}
            acc = {frozenset(ren[i] for i in m): c for m, c in acc.items()}
            return MultilinearPolynomial(len(survivors), acc)
        return MultilinearPolynomial(self.arity, acc)

    def substitute_pair(self, i: int, j: int, r: int) -> "MultilinearPolynomial":
        """Replace every occurrence of the product q_i q_j by q_r.

        Applies to all monomials containing both i and j, including the
        bare quadratic term.  r must be a fresh index beyond the current
        variables of the polynomial.
        """
        if i == j:
            raise ValidationError("pair must consist of two distinct variables")
        acc: dict[Monomial, Fraction] = {}
        arity = max(self.arity, r)
        for mono, c in self.terms.items():
            if i in mono and j in mono:
                if r in mono:
                    raise ValidationError(f"ancilla q{r} already present in a term")
                mono = (mono - {i, j}) | {r}
            acc[mono] = acc.get(mono, Fraction(0)) + c
        return MultilinearPolynomial(arity, acc)

    # -- serialization / display ------------------------------------------

    def to_dict(self) -> dict:
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {
            "arity": self.arity,
            "terms": [{"vars": sorted(m), "num": c.numerator, "den": c.denominator}
                      for m, c in items],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MultilinearPolynomial":
        try:
            arity = int(data["arity"])
            items = [(t["vars"], Fraction(int(t["num"]), int(t["den"])))
                     for t in data["terms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed polynomial data: {exc}") from exc
        return cls.from_terms(arity, items)

    def __repr__(self):
        return f"MultilinearPolynomial(arity={self.arity}, terms={len(self.terms)})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(),
                              key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            body = " ".join(f"q{i}" for i in sorted(mono))
            mag = abs(c)
            coeff = "" if (mag == 1 and body) else str(mag) + (" " if body else "")
            term = f"{coeff}{body}".strip()
            parts.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else ("-" + text[2:])


def interpolate_polynomial(oracle: Callable[[tuple[int, ...]], object],
                           arity: int) -> MultilinearPolynomial:
    """Unique multilinear polynomial agreeing with `oracle` on {0,1}^arity.

    Uses the Moebius (inclusion-exclusion) transform over the subset
    lattice, O(arity * 2^arity) exact-rational operations.  The oracle is
    called once per assignment, with q_1 first in the argument tuple.
    """
    if arity > INTERPOLATION_LIMIT:
        raise CapacityError(
            f"interpolation over {arity} variables exceeds the "
            f"2^{INTERPOLATION_LIMIT} enumeration bound")
    size = 1 << arity
    vals = []
    for mask in range(size):
        assignment = tuple((mask >> b) & 1 for b in range(arity))
        vals.append(Fraction(oracle(assignment)))
    for b in range(arity):
        bit = 1 << b
        for mask in range(size):
            if mask & bit:
                vals[mask] -= vals[mask ^ bit]
    terms = {
        frozenset(b + 1 for b in range(arity) if (mask >> b) & 1): c
        for mask, c in enumerate(vals) if c != 0
    }
    return MultilinearPolynomial(arity, terms)
