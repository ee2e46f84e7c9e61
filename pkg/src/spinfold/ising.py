"""Quadratic pseudo-Boolean to Ising spin form and back.

Bits map to spins via q = (1 - s)/2, so q = 0 is s = +1.  The constant
produced by the expansion is split off as `offset`, and the spin
coefficients are divided by `scale`, the largest absolute coefficient, so
that max(|h|, |J|) = 1.  The original energy is always
scale * E_spin(s) + offset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ValidationError
from .polynomial import MultilinearPolynomial


def spins_from_bits(bits: Sequence[int]) -> tuple[int, ...]:
    for b in bits:
        if b not in (0, 1):
            raise ValidationError(f"bit value {b!r} is not 0/1")
    return tuple(1 - 2 * int(b) for b in bits)


def bits_from_spins(spins: Sequence[int]) -> tuple[int, ...]:
    out = []
    for s in spins:
        if s not in (1, -1):
            raise ValidationError(f"spin value {s!r} is not +/-1")
        out.append((1 - s) // 2)
    return tuple(out)


@dataclass(frozen=True)
class IsingModel:
    n: int
    h: tuple[Fraction, ...]
    J: Mapping[tuple[int, int], Fraction]
    offset: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if len(self.h) != self.n:
            raise ValidationError("h length != n")
        for (i, j), _ in self.J.items():
            if not (1 <= i < j <= self.n):
                raise ValidationError(f"coupler key ({i}, {j}) not 1 <= i < j <= n")
        if self.scale <= 0:
            raise ValidationError("scale must be positive")

    def spin_energy(self, spins: Sequence[int]) -> Fraction:
        """E_spin(s) = sum h_i s_i + sum J_ij s_i s_j (normalized)."""
        if len(spins) != self.n:
            raise ValidationError("spin vector length != n")
        e = Fraction(0)
        for i, hi in enumerate(self.h, start=1):
            e += hi * spins[i - 1]
        for (i, j), v in self.J.items():
            e += v * spins[i - 1] * spins[j - 1]
        return e

    def energy(self, spins: Sequence[int]) -> Fraction:
        """Energy in the original (bit) units: scale * E_spin + offset."""
        return self.scale * self.spin_energy(spins) + self.offset

    def bit_energy(self, bits: Sequence[int]) -> Fraction:
        return self.energy(spins_from_bits(bits))

    def to_polynomial(self) -> MultilinearPolynomial:
        """Inverse transform back to a multilinear polynomial in bits."""
        terms: dict[tuple[int, ...], Fraction] = {}

        def add(vs: tuple[int, ...], c: Fraction):
            terms[vs] = terms.get(vs, Fraction(0)) + c

        add((), self.offset)
        for i, hi in enumerate(self.h, start=1):
            c = self.scale * hi
            add((), c)
            add((i,), -2 * c)
        for (i, j), v in self.J.items():
            c = self.scale * v
            add((), c)
            add((i,), -2 * c)
            add((j,), -2 * c)
            add((i, j), 4 * c)
        return MultilinearPolynomial.from_terms(self.n, terms.items())

    def rescaled(self, factor: Fraction) -> "IsingModel":
        """Fold `factor` out of the coefficients and into scale."""
        factor = Fraction(factor)
        if factor <= 0:
            raise ValidationError("rescale factor must be positive")
        return IsingModel(
            self.n,
            tuple(hi / factor for hi in self.h),
            {k: v / factor for k, v in self.J.items()},
            self.offset,
            self.scale * factor,
        )

    def max_abs_coefficient(self) -> Fraction:
        values = [abs(v) for v in self.h] + [abs(v) for v in self.J.values()]
        return max(values, default=Fraction(0))

    def to_dict(self):
        def frac(x: Fraction):
            return {"num": x.numerator, "den": x.denominator}

        return {
            "n": self.n,
            "h": [frac(v) for v in self.h],
            "J": [{"i": i, "j": j, "v": frac(v)}
                  for (i, j), v in sorted(self.J.items())],
            "offset": frac(self.offset),
            "scale": frac(self.scale),
        }

    @classmethod
    def from_dict(cls, data) -> "IsingModel":
        def frac(d):
            return Fraction(int(d["num"]), int(d["den"]))

        return cls(
            int(data["n"]),
            tuple(frac(v) for v in data["h"]),
            {(int(e["i"]), int(e["j"])): frac(e["v"]) for e in data["J"]},
            frac(data["offset"]),
            frac(data["scale"]),
        )


def to_ising(poly: MultilinearPolynomial, normalize: bool = True) -> IsingModel:
    """Convert a quadratic polynomial over bits into an IsingModel."""
    if poly.degree() > 2:
        raise ValidationError(
            f"polynomial has degree {poly.degree()}; quadratize first")
    n = poly.arity
    offset = Fraction(0)
    h = [Fraction(0)] * n
    J: dict[tuple[int, int], Fraction] = {}
    for monomial, c in poly.terms.items():
        vs = sorted(monomial)
        if not vs:
            offset += c
        elif len(vs) == 1:
            # q = (1 - s)/2
            offset += c / 2
            h[vs[0] - 1] -= c / 2
        else:
            i, j = vs
            offset += c / 4
            h[i - 1] -= c / 4
            h[j - 1] -= c / 4
            key = (i, j)
            J[key] = J.get(key, Fraction(0)) + c / 4
    J = {k: v for k, v in J.items() if v != 0}
    model = IsingModel(n, tuple(h), J, offset, Fraction(1))
    if normalize:
        scale = model.max_abs_coefficient()
        if scale not in (Fraction(0), Fraction(1)):
            model = model.rescaled(scale)
    return model
