"""Annealing schedules, spectra, and closed/open evolution."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from spinfold import (AnnealSchedule, BathParams, CapacityError, IsingModel,
                      ValidationError, build_hamiltonian, evolve_closed,
                      evolve_open, frozen_rate_matrix, gibbs_populations,
                      instantaneous_spectrum, to_ising)
from spinfold.dynamics import DENSE_LIMIT
from spinfold.fixtures import get_fixture
from spinfold.quadratize import quadratize
from spinfold.solvers import exhaustive_ground_states


def two_qubit_model():
    return IsingModel(2, (Fraction(1), Fraction(1, 2)),
                      {(1, 2): Fraction(1, 4)})


def exp3_logical():
    fx = get_fixture("exp3")
    return to_ising(quadratize(fx.polynomials["sanitized"], fx.plan).polynomial)


class TestSchedule:
    def test_synthetic_ramp(self):
        s = AnnealSchedule.synthetic()
        assert len(s.tau) == 201
        assert s.a(0.0) == 8.0 and s.a(1.0) == 0.0
        assert s.b(0.0) == 0.0 and s.b(1.0) == 8.0
        assert s.a(0.5) == pytest.approx(4.0)
        assert s.t_run_ns() == pytest.approx(148_000.0)

    def test_with_t_run_keeps_shape(self):
        s = AnnealSchedule.synthetic().with_t_run(0.5)
        assert s.t_run_us == 0.5
        assert s.a_ghz == AnnealSchedule.synthetic().a_ghz

    def test_rejects_bad_grids(self):
        with pytest.raises(ValidationError):
            AnnealSchedule((0.0, 0.5), (8.0, 4.0), (0.0, 4.0))  # tau != 1
        with pytest.raises(ValidationError):
            AnnealSchedule((0.0, 0.5, 0.5, 1.0), (8, 6, 4, 0), (0, 2, 4, 8))
        with pytest.raises(ValidationError):
            AnnealSchedule((0.0, 1.0), (8.0, 9.0), (0.0, 10.0))  # A rises
        with pytest.raises(ValidationError):
            AnnealSchedule((0.0, 1.0), (8.0, 0.0), (1.0, 0.5))   # B falls
        with pytest.raises(ValidationError):
            AnnealSchedule((0.0, 1.0), (1.0, 0.0), (2.0, 8.0))   # B(0) > A(0)
        with pytest.raises(ValidationError):
            AnnealSchedule.synthetic(t_run_us=0.0)


class TestHamiltonian:
    def test_single_qubit_matrix(self):
        m = IsingModel(1, (Fraction(3, 4),), {})
        h = build_hamiltonian(m, a=2.0, b=5.0)
        # basis index 0 is spin +1, index 1 is spin -1
        expect = np.array([[5.0 * 0.75, -2.0], [-2.0, -5.0 * 0.75]])
        assert np.allclose(h, expect)

    def test_offset_shifts_all_levels(self):
        m = IsingModel(1, (Fraction(1),), {}, offset=Fraction(2))
        h = build_hamiltonian(m, a=0.0, b=1.0)
        assert np.allclose(np.diag(h), [3.0, 1.0])

    def test_capacity_guard(self):
        m = IsingModel(DENSE_LIMIT + 1, (Fraction(0),) * (DENSE_LIMIT + 1), {})
        with pytest.raises(CapacityError):
            build_hamiltonian(m, 1.0, 1.0)


class TestSpectrum:
    def test_single_qubit_analytic_gap(self):
        m = IsingModel(1, (Fraction(1),), {})
        s = AnnealSchedule.synthetic()
        out = instantaneous_spectrum(m, s, k_levels=2,
                                     tau_grid=np.linspace(0, 1, 11))
        for tau, row in zip(out.tau, out.levels):
            a, b = s.a(tau), s.b(tau)
            assert row[1] == pytest.approx(2 * math.hypot(a, b), rel=1e-12)

    def test_final_levels_match_classical_spectrum(self):
        m = exp3_logical()
        s = AnnealSchedule.synthetic()
        out = instantaneous_spectrum(m, s, k_levels=6, tau_grid=[0.0, 1.0])
        energies = sorted(
            m.energy(tuple(1 - 2 * ((v >> b) & 1) for b in range(m.n)))
            for v in range(1 << m.n))
        expect = [s.b(1.0) * float(e - energies[0]) for e in energies[:6]]
        assert np.allclose(out.levels[-1], expect, atol=1e-9)

    def test_gap_location_invariant_under_uniform_rescale(self):
        m = two_qubit_model()
        lo = instantaneous_spectrum(m, AnnealSchedule.synthetic(8, 8),
                                    k_levels=2)
        hi = instantaneous_spectrum(m, AnnealSchedule.synthetic(16, 16),
                                    k_levels=2)
        assert lo.tau_star == hi.tau_star
        assert hi.min_gap_ghz == pytest.approx(2 * lo.min_gap_ghz, rel=1e-12)

    def test_gap_is_minimum_of_first_gap_track(self):
        m = two_qubit_model()
        out = instantaneous_spectrum(m, AnnealSchedule.synthetic(), k_levels=3)
        track = out.first_gap()
        assert len(track) == len(out.tau)
        assert out.min_gap_ghz == pytest.approx(min(track))
        assert out.tau_star == out.tau[int(np.argmin(track))]


class TestClosedEvolution:
    def test_slow_anneal_lands_in_ground_state(self):
        m = two_qubit_model()
        sched = AnnealSchedule.synthetic(t_run_us=0.01, points=41)
        out = evolve_closed(m, sched, k_levels=4)
        assert out.converged
        assert out.norm_drift < 1e-8
        assert out.ground_population() > 0.99
        assert sum(out.final_probs) == pytest.approx(1.0, abs=1e-9)
        ground = exhaustive_ground_states(m).best().spins
        assert out.final_probability(ground) > 0.99

    def test_sudden_quench_keeps_uniform_distribution(self):
        m = two_qubit_model()
        sched = AnnealSchedule.synthetic(t_run_us=1e-6, points=41)
        out = evolve_closed(m, sched, k_levels=4)
        assert max(abs(p - 0.25) for p in out.final_probs) < 1e-3

    def test_population_rows_are_distributions(self):
        m = two_qubit_model()
        out = evolve_closed(m, AnnealSchedule.synthetic(t_run_us=0.005,
                                                        points=41))
        for row in out.populations:
            assert all(p >= -1e-12 for p in row)
            assert sum(row) <= 1.0 + 1e-9
        assert out.tau[-1] == 1.0
        assert out.levels[-1][0] == 0.0

    def test_metadata(self):
        m = IsingModel(1, (Fraction(1),), {})
        out = evolve_closed(m, AnnealSchedule.synthetic(t_run_us=0.001,
                                                        points=21))
        assert out.metadata["method"] == "closed"
        assert out.metadata["t_run_us"] == 0.001


class TestRateMatrix:
    def test_generator_shape(self):
        m = two_qubit_model()
        bath = BathParams()
        vals, gen, vecs = frozen_rate_matrix(m, AnnealSchedule.synthetic(),
                                             0.5, bath, k_levels=4)
        assert gen.shape == (4, 4)
        assert vecs.shape == (4, 4)
        off = gen[~np.eye(4, dtype=bool)]
        assert (off >= 0).all()
        assert np.allclose(gen.sum(axis=0), 0.0,
                           atol=1e-12 * np.abs(gen).max())

    def test_stationary_state_is_gibbs(self):
        m = two_qubit_model()
        bath = BathParams(t_mk=30.0)
        vals, gen, _ = frozen_rate_matrix(m, AnnealSchedule.synthetic(),
                                          0.45, bath, k_levels=4)
        w, v = np.linalg.eig(gen)
        stat = np.real(v[:, np.argmax(np.real(w))])
        stat = np.abs(stat) / np.abs(stat).sum()
        assert np.allclose(stat, gibbs_populations(vals, bath.t_mk),
                           atol=1e-6)

    def test_detailed_balance_pointwise(self):
        m = two_qubit_model()
        bath = BathParams(t_mk=25.0)
        vals, gen, _ = frozen_rate_matrix(m, AnnealSchedule.synthetic(),
                                          0.5, bath, k_levels=4)
        pi = gibbs_populations(vals, bath.t_mk)
        for a in range(4):
            for b in range(4):
                if a != b and gen[b, a] > 0:
                    lhs = gen[b, a] * pi[a]
                    rhs = gen[a, b] * pi[b]
                    assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_long_time_limit_reaches_gibbs(self):
        m = two_qubit_model()
        bath = BathParams()
        vals, gen, _ = frozen_rate_matrix(m, AnnealSchedule.synthetic(),
                                          0.5, bath, k_levels=4)
        p = np.zeros(4)
        p[0] = 1.0
        p = expm(gen * 1e9) @ p
        assert np.allclose(p, gibbs_populations(vals, bath.t_mk), atol=1e-6)

    def test_gibbs_populations_shape(self):
        pops = gibbs_populations(np.array([0.0, 1.0, 2.0]), 20.0)
        assert pops.sum() == pytest.approx(1.0)
        assert pops[0] > pops[1] > pops[2] > 0


class TestOpenEvolution:
    def test_trace_preserved(self):
        m = two_qubit_model()
        sched = AnnealSchedule.synthetic(t_run_us=0.001, points=21)
        out = evolve_open(m, sched, BathParams(), k_levels=4)
        assert out.converged
        assert out.norm_drift < 1e-9
        assert sum(out.final_probs) == pytest.approx(1.0, abs=1e-9)
        assert all(p >= 0 for row in out.populations for p in row)
        assert "population_floor_violation" not in out.metadata

    def test_metadata_records_bath(self):
        m = IsingModel(1, (Fraction(1),), {})
        sched = AnnealSchedule.synthetic(t_run_us=0.001, points=21)
        bath = BathParams(eta=0.1, t_mk=15.0)
        out = evolve_open(m, sched, bath, k_levels=2)
        assert out.metadata["method"] == "open"
        assert BathParams.from_dict(out.metadata["bath"]) == bath

    def test_truncation_clamps_to_dimension(self):
        m = IsingModel(1, (Fraction(1),), {})
        sched = AnnealSchedule.synthetic(t_run_us=0.001, points=21)
        out = evolve_open(m, sched, BathParams(), k_levels=50)
        assert out.metadata["k_levels"] == 2

    def test_quiet_bath_matches_closed_run(self):
        # with the ohmic channel off only the (negligibly weak)
        # low-frequency part remains; in the adiabatic regime, where the
        # closed run has no diabatic loss either, the two agree
        m = two_qubit_model()
        sched = AnnealSchedule.synthetic(t_run_us=0.1, points=41)
        quiet = BathParams(eta=0.0)
        open_out = evolve_open(m, sched, quiet, k_levels=4, tol=1e-8)
        closed_out = evolve_closed(m, sched, k_levels=4, tol=1e-8)
        assert open_out.ground_population() == pytest.approx(
            closed_out.ground_population(), abs=1e-6)

    def test_hot_bath_thermalizes_slow_anneal(self):
        # strong coupling and a long hold leave a mixed final state
        m = IsingModel(1, (Fraction(1),), {})
        sched = AnnealSchedule.synthetic(t_run_us=10.0, points=41)
        hot = BathParams(eta=0.4, t_mk=400.0)
        out = evolve_open(m, sched, hot, k_levels=2)
        assert out.ground_population() < 0.999
        assert out.ground_population() > 0.5

    def test_rejects_zero_levels(self):
        m = IsingModel(1, (Fraction(1),), {})
        sched = AnnealSchedule.synthetic(t_run_us=0.001, points=21)
        with pytest.raises(ValidationError):
            evolve_open(m, sched, BathParams(), k_levels=0)
