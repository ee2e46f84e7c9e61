"""Classical solvers: exact enumeration and simulated annealing.

Both return SampleSets whose stored energies are exact rationals,
recomputed from the model; floating point is only used inside the
annealing inner loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .ising import IsingModel, bits_from_spins
from .polynomial import MultilinearPolynomial

SOLVE_LIMIT = 24
_CHUNK_BITS = 18


@dataclass(frozen=True)
class Sample:
    spins: tuple[int, ...]
    energy: Fraction
    count: int = 1

    def bits(self) -> tuple[int, ...]:
        return bits_from_spins(self.spins)

    def to_dict(self):
        return {"spins": list(self.spins),
                "energy": {"num": self.energy.numerator,
                           "den": self.energy.denominator},
                "count": self.count}


@dataclass(frozen=True)
class SampleSet:
    samples: tuple[Sample, ...]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def best(self) -> Sample:
        if not self.samples:
            raise ValidationError("empty sample set")
        return self.samples[0]

    def ground_states(self) -> tuple[Sample, ...]:
        e0 = self.best().energy
        return tuple(s for s in self.samples if s.energy == e0)

    def total_reads(self) -> int:
        return sum(s.count for s in self.samples)

    def to_dict(self):
        return {"metadata": dict(self.metadata),
                "samples": [s.to_dict() for s in self.samples]}

    @classmethod
    def from_dict(cls, data) -> "SampleSet":
        samples = tuple(
            Sample(tuple(int(v) for v in s["spins"]),
                   Fraction(int(s["energy"]["num"]), int(s["energy"]["den"])),
                   int(s.get("count", 1)))
            for s in data["samples"])
        return cls(samples, dict(data.get("metadata", {})))


def _sorted_samples(state_counts: Mapping[tuple[int, ...], int],
                    model: IsingModel) -> tuple[Sample, ...]:
    # order: energy ascending, then the bit pattern read as an integer
    rows = []
    for spins, count in state_counts.items():
        e = model.energy(spins)
        key = int("".join(str((1 - s) // 2) for s in spins), 2)
        rows.append((e, key, Sample(spins, e, count)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return tuple(r[2] for r in rows)


def _integer_tables(model: IsingModel):
    denom = 1
    for v in model.h:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    for v in model.J.values():
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    h_int = np.array([int(v * denom) for v in model.h], dtype=np.int64)
    edges = [(i - 1, j - 1, int(v * denom))
             for (i, j), v in sorted(model.J.items()) if v != 0]
    return denom, h_int, edges


def exhaustive_ground_states(model: IsingModel) -> SampleSet:
    """Every minimizing spin state, in deterministic order.

    Energies are computed over integer-scaled coefficients (the common
    denominator is divided back out afterwards), so the minimum is exact.
    """
    n = model.n
    if n > SOLVE_LIMIT:
        raise CapacityError(
            f"exhaustive enumeration of 2^{n} states exceeds the "
            f"2^{SOLVE_LIMIT} bound")
    denom, h_int, edges = _integer_tables(model)
    size = 1 << n
    chunk = 1 << min(_CHUNK_BITS, n)
    best_val = None
    best_masks: list[int] = []
    for start in range(0, size, chunk):
        masks = np.arange(start, min(start + chunk, size), dtype=np.int64)
        spins = 1 - 2 * ((masks[:, None] >> np.arange(n)) & 1)
        energies = spins @ h_int
        for i, j, val in edges:
            energies += val * spins[:, i] * spins[:, j]
        lo = int(energies.min())
        if best_val is None or lo < best_val:
            best_val = lo
            best_masks = []
        if lo == best_val:
            hits = masks[energies == best_val]
            best_masks.extend(int(m) for m in hits)
    counts = {}
    for m in sorted(best_masks):
        spins = tuple(1 - 2 * ((m >> b) & 1) for b in range(n))
        counts[spins] = 1
    samples = _sorted_samples(counts, model)
    expected = model.scale * Fraction(best_val, denom) + model.offset
    assert all(s.energy == expected for s in samples)
    return SampleSet(samples, {"method": "exhaustive", "n": n,
                               "states_scanned": size})


def default_beta_schedule(sweeps: int = 1000, beta_min: float = 0.1,
                          beta_max: float = 10.0) -> np.ndarray:
    """Geometric inverse-temperature ramp."""
    if sweeps < 1 or beta_min <= 0 or beta_max < beta_min:
        raise ValidationError("schedule must ramp upward from beta > 0")
    if sweeps == 1:
        return np.array([beta_max])
    return np.geomspace(beta_min, beta_max, sweeps)


def simulated_anneal(model: IsingModel, schedule=None, seed: int = 0,
                     n_reads: int = 1) -> SampleSet:
    """Metropolis single-spin-flip annealing.

    One read is one independent restart; read r draws every random number
    from a stream seeded by (seed, r), so results are identical no matter
    how reads are batched.  Spins are visited in fixed index order within
    a sweep.  A read reports the lowest-energy state it visited, and
    returned energies are recomputed exactly from the model.
    """
    if n_reads < 1:
        raise ValidationError("n_reads must be >= 1")
    betas = default_beta_schedule() if schedule is None else np.asarray(
        schedule, dtype=float)
    if betas.ndim != 1 or len(betas) == 0 or np.any(betas <= 0) \
            or np.any(np.diff(betas) < 0):
        raise ValidationError(
            "schedule must be a nondecreasing positive beta sequence")
    n = model.n
    sweeps = len(betas)
    # Metropolis weights use the model's true energy, so the stored
    # normalization scale multiplies back in here.
    sc = float(model.scale)
    h = np.array([sc * float(v) for v in model.h])
    jmat = np.zeros((n, n))
    for (i, j), v in model.J.items():
        jmat[i - 1, j - 1] += sc * float(v)
        jmat[j - 1, i - 1] += sc * float(v)

    spins = np.empty((n_reads, n), dtype=np.int8)
    uniforms = np.empty((n_reads, sweeps, n))
    for r in range(n_reads):
        rng = np.random.default_rng((seed, r))
        spins[r] = rng.integers(0, 2, n) * 2 - 1
        uniforms[r] = rng.random((sweeps, n))

    state = spins.astype(np.float64)
    energies = state @ h + 0.5 * np.einsum("ri,ij,rj->r", state, jmat, state)
    best_state = state.copy()
    best_energy = energies.copy()
    for t in range(sweeps):
        beta = betas[t]
        for i in range(n):
            local = h[i] + state @ jmat[i]
            delta = -2.0 * state[:, i] * local
            expo = np.clip(-beta * delta, None, 0.0)
            accept = uniforms[:, t, i] < np.exp(expo)
            accept |= delta <= 0
            state[accept, i] = -state[accept, i]
            energies[accept] += delta[accept]
            improved = energies < best_energy - 1e-9
            if improved.any():
                best_state[improved] = state[improved]
                best_energy[improved] = energies[improved]

    counts: dict[tuple[int, ...], int] = {}
    for r in range(n_reads):
        key = tuple(int(v) for v in best_state[r])
        counts[key] = counts.get(key, 0) + 1
    samples = _sorted_samples(counts, model)
    return SampleSet(samples, {
        "method": "sa", "n": n, "seed": seed, "n_reads": n_reads,
        "sweeps": sweeps, "beta_min": float(betas[0]),
        "beta_max": float(betas[-1])})


def _fixed_beta_counts(model: IsingModel, beta: float, sweeps: int,
                       seed: int = 0, burn_in: int | None = None
                       ) -> dict[tuple[int, ...], int]:
    """Visit histogram of the Metropolis chain held at constant beta.

    Diagnostic for the sampler's stationary distribution: the state is
    recorded once per sweep after burn-in (default sweeps // 10), under
    the same fixed visiting order and acceptance rule the annealer uses.
    """
    if burn_in is None:
        burn_in = sweeps // 10
    n = model.n
    rng = np.random.default_rng((seed, 0))
    sc = float(model.scale)
    h = [sc * float(v) for v in model.h]
    jmat = [[0.0] * n for _ in range(n)]
    for (i, j), v in model.J.items():
        jmat[i - 1][j - 1] += sc * float(v)
        jmat[j - 1][i - 1] += sc * float(v)
    spins = [int(s) for s in rng.integers(0, 2, n) * 2 - 1]
    uniforms = rng.random((sweeps, n))
    counts: dict[tuple[int, ...], int] = {}
    for t in range(sweeps):
        row = uniforms[t]
        for i in range(n):
            local = h[i]
            ji = jmat[i]
            for k in range(n):
                local += ji[k] * spins[k]
            delta = -2.0 * spins[i] * local
            if delta <= 0 or row[i] < math.exp(-beta * delta):
                spins[i] = -spins[i]
        if t >= burn_in:
            key = tuple(spins)
            counts[key] = counts.get(key, 0) + 1
    return counts


@dataclass(frozen=True)
class LandscapeEntry:
    assignment: str
    energy: Fraction
    label: str | None
    valid: bool | None
    group: int


def landscape_report(poly: MultilinearPolynomial,
                     decoder: Callable[[Sequence[int]],
                                       tuple[str, bool]] | None = None
                     ) -> tuple[LandscapeEntry, ...]:
    """Energy of every assignment of a polynomial, grouped by degeneracy.

    decoder, when given, maps an assignment to a (label, valid) pair,
    e.g. the encoded fold and its self-avoidance.  Rows are sorted by
    energy then assignment value; `group` numbers distinct energies.
    """
    arity = poly.arity
    if arity > SOLVE_LIMIT:
        raise CapacityError(
            f"landscape over 2^{arity} assignments exceeds the "
            f"2^{SOLVE_LIMIT} bound")
    rows = []
    for value in range(1 << arity):
        assignment = tuple((value >> (arity - 1 - b)) & 1
                           for b in range(arity))
        label, valid = decoder(assignment) if decoder else (None, None)
        rows.append(("".join(map(str, assignment)),
                     poly.evaluate(assignment), label, valid, value))
    rows.sort(key=lambda r: (r[1], r[4]))
    entries = []
    group = -1
    last = None
    for text, energy, label, valid, _ in rows:
        if energy != last:
            group += 1
            last = energy
        entries.append(LandscapeEntry(text, energy, label, valid, group))
    return tuple(entries)
