"""Annealing dynamics: spectra, closed evolution, open-system master equation.

Hamiltonian H(tau) = A(tau) * (-sum_i sigma_x_i) + B(tau) * H_p, dense real
symmetric, n <= 12.  A and B carry GHz (energy/h); time integrates in ns, so
phases are exp(-i 2 pi E_GHz t_ns).  H_p is diagonal in the computational
basis with the model's true energies (scale and offset included; the offset
shifts every level uniformly and cancels from all gaps and populations).

Basis convention: state index m assigns qubit i the bit (m >> (i-1)) & 1,
spin s_i = 1 - 2*bit, matching the classical solvers' enumeration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from .bath import BathParams, transition_rate
from .errors import CapacityError, StageError, ValidationError
from .ising import IsingModel
from .units import KB_GHZ_PER_MK

DENSE_LIMIT = 12
DEFAULT_A0_GHZ = 8.0
DEFAULT_B0_GHZ = 8.0
DEFAULT_T_RUN_US = 148.0
OPEN_LEVELS = 24


@dataclass(frozen=True)
class AnnealSchedule:
    """Tabulated A(tau), B(tau) in GHz plus the total run time."""
    tau: tuple[float, ...]
    a_ghz: tuple[float, ...]
    b_ghz: tuple[float, ...]
    t_run_us: float = DEFAULT_T_RUN_US

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        a = np.asarray(self.a_ghz, dtype=float)
        b = np.asarray(self.b_ghz, dtype=float)
        if len(tau) < 2 or len(a) != len(tau) or len(b) != len(tau):
            raise ValidationError("schedule needs matching tau/A/B columns")
        if tau[0] != 0.0 or tau[-1] != 1.0 or np.any(np.diff(tau) <= 0):
            raise ValidationError("tau grid must increase from 0 to 1")
        if np.any(a < 0) or np.any(b < 0):
            raise ValidationError("A and B must be nonnegative")
        if np.any(np.diff(a) > 1e-12) or np.any(np.diff(b) < -1e-12):
            raise ValidationError("A must not increase nor B decrease")
        if not (a[0] > b[0] and b[-1] > a[-1]):
            raise ValidationError(
                "schedule must start transverse-dominated and end "
                "problem-dominated")
        if self.t_run_us <= 0:
            raise ValidationError("t_run_us must be positive")

    def a(self, tau: float) -> float:
        return float(np.interp(tau, self.tau, self.a_ghz))

    def b(self, tau: float) -> float:
        return float(np.interp(tau, self.tau, self.b_ghz))

    def t_run_ns(self) -> float:
        return self.t_run_us * 1000.0

    def with_t_run(self, t_run_us: float) -> "AnnealSchedule":
        return AnnealSchedule(self.tau, self.a_ghz, self.b_ghz, t_run_us)

    @classmethod
    def synthetic(cls, a0: float = DEFAULT_A0_GHZ, b0: float = DEFAULT_B0_GHZ,
                  t_run_us: float = DEFAULT_T_RUN_US,
                  points: int = 201) -> "AnnealSchedule":
        """Linear ramp A = a0*(1-tau), B = b0*tau."""
        grid = np.linspace(0.0, 1.0, points)
        return cls(tuple(grid), tuple(a0 * (1 - grid)), tuple(b0 * grid),
                   t_run_us)


def _hp_diagonal(ising: IsingModel) -> np.ndarray:
    n = ising.n
    if n > DENSE_LIMIT:
        raise CapacityError(
            f"dense dynamics limited to {DENSE_LIMIT} qubits, got {n}")
    masks = np.arange(1 << n, dtype=np.int64)
    spins = 1 - 2 * ((masks[:, None] >> np.arange(n)) & 1)
    sc = float(ising.scale)
    diag = spins @ np.array([sc * float(v) for v in ising.h])
    for (i, j), v in ising.J.items():
        diag = diag + (sc * float(v)) * spins[:, i - 1] * spins[:, j - 1]
    return diag + float(ising.offset)


def build_hamiltonian(ising: IsingModel, a: float, b: float) -> np.ndarray:
    """Dense H = a*(-sum sigma_x) + b*H_p in GHz units."""
    diag = _hp_diagonal(ising)
    return _assemble(ising.n, diag, a, b)


def _assemble(n: int, diag: np.ndarray, a: float, b: float,
              out: np.ndarray | None = None) -> np.ndarray:
    dim = 1 << n
    if out is None:
        out = np.zeros((dim, dim))
    else:
        out.fill(0.0)
    idx = np.arange(dim)
    for i in range(n):
        out[idx, idx ^ (1 << i)] = -a
    out[idx, idx] = b * diag
    return out


@dataclass(frozen=True)
class SpectrumResult:
    tau: tuple[float, ...]
    levels: tuple[tuple[float, ...], ...]  # E_k - E_0 per tau, k < k_levels
    tau_star: float
    min_gap_ghz: float

    def first_gap(self) -> tuple[float, ...]:
        return tuple(row[1] for row in self.levels)


def instantaneous_spectrum(ising: IsingModel, schedule: AnnealSchedule,
                           k_levels: int = 8,
                           tau_grid: Sequence[float] | None = None
                           ) -> SpectrumResult:
    """Lowest k_levels eigenvalues above the ground state along the anneal."""
    diag = _hp_diagonal(ising)
    n = ising.n
    k = min(k_levels, 1 << n)
    grid = np.linspace(0.0, 1.0, 201) if tau_grid is None else np.asarray(
        tau_grid, dtype=float)
    buf = np.zeros((1 << n, 1 << n))
    rows = []
    for tau in grid:
        h = _assemble(n, diag, schedule.a(tau), schedule.b(tau), buf)
        vals = np.linalg.eigvalsh(h)
        rows.append(tuple(float(v - vals[0]) for v in vals[:k]))
    gaps = [row[1] for row in rows] if k > 1 else [0.0 for _ in rows]
    star = int(np.argmin(gaps))
    return SpectrumResult(tuple(float(t) for t in grid), tuple(rows),
                          float(grid[star]), float(gaps[star]))


@dataclass(frozen=True)
class EvolutionResult:
    tau: tuple[float, ...]
    levels: tuple[tuple[float, ...], ...]        # E_k - E_0 at each tau
    populations: tuple[tuple[float, ...], ...]   # instantaneous-eigenstate P_k
    final_probs: tuple[float, ...]               # computational basis, tau=1
    norm_drift: float
    steps: int
    converged: bool
    metadata: Mapping[str, object] = field(default_factory=dict)

    def ground_population(self) -> float:
        return self.populations[-1][0]

    def final_probability(self, spins: Sequence[int]) -> float:
        m = 0
        for i, s in enumerate(spins):
            if s == -1:
                m |= 1 << i
        return self.final_probs[m]


def _record_grid(steps: int, limit: int = 256) -> set[int]:
    if steps <= limit:
        return set(range(steps))
    picks = np.linspace(0, steps - 1, limit).astype(int)
    return set(int(p) for p in picks)


# fourth-order commutator-free Magnus weights over the two Gauss nodes
_CF4_NODE = math.sqrt(3.0) / 6.0
_CF4_A = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
_CF4_B = (3.0 + 2.0 * math.sqrt(3.0)) / 12.0


def _closed_run(n, diag, schedule, steps, k, record_limit):
    dim = 1 << n
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    dt = schedule.t_run_ns() / steps
    buf = np.zeros((dim, dim))
    record = _record_grid(steps, record_limit)
    taus, levels, pops = [], [], []
    for step in range(steps):
        tau_mid = (step + 0.5) / steps
        if step in record:
            h = _assemble(n, diag, schedule.a(tau_mid), schedule.b(tau_mid),
                          buf)
            vals, vecs = np.linalg.eigh(h)
            amps = vecs.T @ psi
            taus.append(tau_mid)
            levels.append(tuple(float(v - vals[0]) for v in vals[:k]))
            pops.append(tuple(float(abs(a) ** 2) for a in amps[:k]))
        t1 = tau_mid - _CF4_NODE / steps
        t2 = tau_mid + _CF4_NODE / steps
        a1, b1 = schedule.a(t1), schedule.b(t1)
        a2, b2 = schedule.a(t2), schedule.b(t2)
        for wa, wb in ((_CF4_B, _CF4_A), (_CF4_A, _CF4_B)):
            h = _assemble(n, diag, wa * a1 + wb * a2, wa * b1 + wb * b2, buf)
            vals, vecs = np.linalg.eigh(h)
            psi = vecs @ (np.exp(-2j * math.pi * vals * dt) * (vecs.T @ psi))
    return psi, taus, levels, pops


def _final_rows(ising, schedule, diag, n, k, state_probs):
    # tau = 1 snapshot in the exact problem eigenbasis
    order = np.argsort(diag, kind="stable")
    e0 = diag[order[0]]
    lev = tuple(float(schedule.b(1.0) * (diag[order[j]] - e0))
                for j in range(k))
    pop = tuple(float(state_probs[order[j]]) for j in range(k))
    return lev, pop


def evolve_closed(ising: IsingModel, schedule: AnnealSchedule,
                  k_levels: int = 8, tol: float = 1e-6,
                  max_steps: int = 1 << 17,
                  record_limit: int = 256) -> EvolutionResult:
    """Schrodinger evolution from the uniform superposition.

    Each step applies the exact propagator of the midpoint-frozen
    Hamiltonian (unitary by construction); the step count doubles until
    the final distribution moves by less than tol.
    """
    diag = _hp_diagonal(ising)
    n = ising.n
    dim = 1 << n
    k = min(k_levels, dim)
    steps = 64
    prev = None
    while True:
        psi, taus, levels, pops = _closed_run(
            n, diag, schedule, steps, k, record_limit)
        probs = np.abs(psi) ** 2
        if prev is not None and float(np.max(np.abs(probs - prev))) < tol:
            converged = True
            break
        prev = probs
        if steps >= max_steps:
            raise StageError(
                "evolve", f"no convergence at {steps} steps (tol {tol})")
        steps *= 2
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if drift >= 1e-8:
        raise StageError("evolve", f"norm drift {drift:.3e} exceeds 1e-8")
    lev1, pop1 = _final_rows(ising, schedule, diag, n, k, probs)
    taus.append(1.0)
    levels.append(lev1)
    pops.append(pop1)
    return EvolutionResult(
        tuple(taus), tuple(levels), tuple(pops),
        tuple(float(p) for p in probs), drift, steps, converged,
        {"method": "closed", "k_levels": k, "tol": tol,
         "t_run_us": schedule.t_run_us})


def _rate_generator(vals_ghz: np.ndarray, vecs: np.ndarray, n: int,
                    k: int, bath: BathParams, tau: float) -> np.ndarray:
    """Secular transition-rate generator over the lowest k levels, in 1/ns.

    W[a -> b] = sum_i |<b|sigma_z_i|a>|^2 S(omega_ab) / hbar^2 with
    omega_ab = 2 pi (E_a - E_b) 1e9.  Columns sum to zero.
    """
    vk = vecs[:, :k]
    masks = np.arange(vk.shape[0])
    elems = np.zeros((k, k))
    for i in range(n):
        z = 1.0 - 2.0 * ((masks >> i) & 1)
        m = vk.T @ (z[:, None] * vk)
        elems += m ** 2
    e = np.asarray(vals_ghz[:k], dtype=float)
    omega = 2e9 * math.pi * (e[:, None] - e[None, :])   # omega[a, b]
    rates = transition_rate(omega, bath, tau) * 1e-9
    gen = elems * rates.T          # gen[b, a] = |<b|sz|a>|^2 S(w_ab)
    np.fill_diagonal(gen, 0.0)
    gen[np.diag_indices(k)] = -gen.sum(axis=0)
    return gen


def frozen_rate_matrix(ising: IsingModel, schedule: AnnealSchedule,
                       tau: float, bath: BathParams,
                       k_levels: int = OPEN_LEVELS):
    """(energies_GHz, generator_per_ns, eigenvectors) at a frozen tau."""
    diag = _hp_diagonal(ising)
    n = ising.n
    k = min(k_levels, 1 << n)
    h = _assemble(n, diag, schedule.a(tau), schedule.b(tau))
    vals, vecs = np.linalg.eigh(h)
    gen = _rate_generator(vals, vecs, n, k, bath, tau)
    return vals[:k], gen, vecs[:, :k]


def gibbs_populations(energies_ghz: np.ndarray, t_mk: float) -> np.ndarray:
    kt = t_mk * KB_GHZ_PER_MK
    w = np.exp(-(np.asarray(energies_ghz) - np.min(energies_ghz)) / kt)
    return w / w.sum()


def _open_run(n, diag, schedule, bath, steps, k, record_limit):
    dim = 1 << n
    dt = schedule.t_run_ns() / steps
    p = np.zeros(k)
    p[0] = 1.0
    buf = np.zeros((dim, dim))
    record = _record_grid(steps, record_limit)
    taus, levels, pops = [], [], []
    floor = 0.0

    def generator_at(tau):
        h = _assemble(n, diag, schedule.a(tau), schedule.b(tau), buf)
        vals, vecs = np.linalg.eigh(h)
        return vals, _rate_generator(vals, vecs, n, k, bath, tau)

    for step in range(steps):
        tau_mid = (step + 0.5) / steps
        if step in record:
            vals, _gen = generator_at(tau_mid)
            taus.append(tau_mid)
            levels.append(tuple(float(v - vals[0]) for v in vals[:k]))
            pops.append(tuple(float(x) for x in p))
        v1, g1 = generator_at(tau_mid - _CF4_NODE / steps)
        v2, g2 = generator_at(tau_mid + _CF4_NODE / steps)
        p = expm(dt * _clamp_generator(_CF4_B * g1 + _CF4_A * g2)) @ p
        p = expm(dt * _clamp_generator(_CF4_A * g1 + _CF4_B * g2)) @ p
        floor = min(floor, float(p.min()))
        np.clip(p, 0.0, None, out=p)
    return p, taus, levels, pops, floor


def _clamp_generator(gen: np.ndarray) -> np.ndarray:
    """Restore generator validity (nonnegative off-diagonals, zero column
    sums) after the higher-order node mixing; only bites at coarse steps,
    where its exponential would otherwise overflow."""
    off = gen[~np.eye(len(gen), dtype=bool)]
    if float(off.min()) >= 0.0:
        return gen
    out = np.clip(gen, 0.0, None)
    np.fill_diagonal(out, 0.0)
    out[np.diag_indices(len(out))] = -out.sum(axis=0)
    return out


def evolve_open(ising: IsingModel, schedule: AnnealSchedule,
                bath: BathParams, k_levels: int = OPEN_LEVELS,
                tol: float = 1e-6, max_steps: int = 1 << 15,
                record_limit: int = 256) -> EvolutionResult:
    """Secular adiabatic master equation over the lowest k_levels levels.

    Populations ride the instantaneous eigenbasis; each step applies
    exp(G dt) with the midpoint-frozen rate generator, which conserves
    total population exactly and satisfies detailed balance pointwise.
    """
    diag = _hp_diagonal(ising)
    n = ising.n
    dim = 1 << n
    k = min(k_levels, dim)
    if k < 1:
        raise ValidationError("k_levels must be at least 1")
    steps = 64
    prev = None
    while True:
        p, taus, levels, pops, floor = _open_run(
            n, diag, schedule, bath, steps, k, record_limit)
        if prev is not None and float(np.max(np.abs(p - prev))) < tol:
            converged = True
            break
        prev = p.copy()
        if steps >= max_steps:
            raise StageError(
                "evolve", f"no convergence at {steps} steps (tol {tol})")
        steps *= 2
    drift = abs(float(p.sum()) - 1.0)
    if drift >= 1e-9:
        raise StageError("evolve", f"population drift {drift:.3e}")
    # adiabatic continuation onto the exact tau=1 eigenbasis: level j is
    # the j-th lowest classical state
    order = np.argsort(diag, kind="stable")
    final_probs = np.zeros(dim)
    final_probs[order[:k]] = p
    lev1, pop1 = _final_rows(ising, schedule, diag, n, k, final_probs)
    taus.append(1.0)
    levels.append(lev1)
    pops.append(pop1)
    meta = {"method": "open", "k_levels": k, "tol": tol,
            "t_run_us": schedule.t_run_us, "bath": bath.to_dict()}
    if floor < -1e-12:
        meta["population_floor_violation"] = floor
    return EvolutionResult(
        tuple(taus), tuple(levels), tuple(pops),
        tuple(float(x) for x in final_probs), drift, steps, converged, meta)
