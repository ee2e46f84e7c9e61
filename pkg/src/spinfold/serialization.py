"""File formats for every pipeline artifact.

Compiler-side files (polynomials, plans, models, embeddings, sample sets)
keep rationals as {num, den} integer pairs.  Dynamics files (schedules,
trajectories, probabilities) are decimal floats written with up to 17
significant digits so they round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

from .chimera import ChimeraGraph
from .dynamics import AnnealSchedule, EvolutionResult, SpectrumResult
from .embedding import EmbeddedIsing, Embedding
from .errors import ValidationError
from .ising import IsingModel
from .polynomial import MultilinearPolynomial
from .quadratize import CollapseStep, QuadratizationResult
from .solvers import SampleSet


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def save_json(path, data):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- polynomials and reduction plans -------------------------------------

def write_polynomial(path, poly: MultilinearPolynomial):
    save_json(path, poly.to_dict())


def read_polynomial(path) -> MultilinearPolynomial:
    return MultilinearPolynomial.from_dict(load_json(path))


def write_reduction(path, result: QuadratizationResult):
    save_json(path, {
        "polynomial": result.polynomial.to_dict(),
        "steps": [s.to_dict() for s in result.steps],
        "original_arity": result.original_arity,
    })


def read_reduction(path) -> QuadratizationResult:
    data = load_json(path)
    return QuadratizationResult(
        MultilinearPolynomial.from_dict(data["polynomial"]),
        tuple(CollapseStep.from_dict(s) for s in data["steps"]),
        int(data["original_arity"]))


# -- models, graphs, embeddings -------------------------------------------

def write_ising(path, model: IsingModel):
    save_json(path, model.to_dict())


def read_ising(path) -> IsingModel:
    return IsingModel.from_dict(load_json(path))


def write_graph(path, graph: ChimeraGraph):
    save_json(path, graph.to_dict())


def read_graph(path) -> ChimeraGraph:
    data = load_json(path)
    return ChimeraGraph(int(data["M"]), int(data["N"]), int(data["K"]),
                        frozenset(int(q) for q in data.get("masked", ())))


def write_embedding(path, embedding: Embedding):
    save_json(path, embedding.to_dict())


def read_embedding(path) -> Embedding:
    return Embedding.from_dict(load_json(path))


def write_embedded_ising(path, embedded: EmbeddedIsing):
    save_json(path, embedded.to_dict())


def read_embedded_ising(path) -> EmbeddedIsing:
    return EmbeddedIsing.from_dict(load_json(path))


# -- sample sets -----------------------------------------------------------

def write_sampleset(path, samples: SampleSet):
    save_json(path, samples.to_dict())


def read_sampleset(path) -> SampleSet:
    return SampleSet.from_dict(load_json(path))


def write_samples_csv(path, samples: SampleSet):
    """(assignment, energy, count) rows; assignment is the bit string
    q_i = (1 - s_i)/2 and energy is an exact rational literal."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["assignment", "energy", "count"])
        for s in samples.samples:
            writer.writerow(["".join(str(b) for b in s.bits()),
                             str(s.energy), s.count])


# -- schedules and dynamics outputs ----------------------------------------

def write_schedule_csv(path, schedule: AnnealSchedule):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", "A_GHz", "B_GHz"])
        for t, a, b in zip(schedule.tau, schedule.a_ghz, schedule.b_ghz):
            writer.writerow([_fmt(t), _fmt(a), _fmt(b)])


def read_schedule_csv(path, t_run_us: float | None = None) -> AnnealSchedule:
    rows = []
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rows.append((float(row["tau"]), float(row["A_GHz"]),
                             float(row["B_GHz"])))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed schedule CSV {path}: {exc}") from exc
    if not rows:
        raise ValidationError(f"empty schedule CSV {path}")
    tau, a, b = zip(*rows)
    kwargs = {} if t_run_us is None else {"t_run_us": t_run_us}
    return AnnealSchedule(tau, a, b, **kwargs)


def write_spectrum_csv(path, spectrum: SpectrumResult):
    """Rows (tau, E_k - E_0 for each tracked level)."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    k = len(spectrum.levels[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau"] + [f"E{j}" for j in range(k)])
        for t, row in zip(spectrum.tau, spectrum.levels):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in row])


def write_trajectory_csv(path, result: EvolutionResult):
    """Rows (tau, E_k - E_0 for k < K, P_k for k < K)."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    k = len(result.levels[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau"] + [f"E{j}" for j in range(k)]
                        + [f"P{j}" for j in range(k)])
        for t, lev, pop in zip(result.tau, result.levels,
                               result.populations):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in lev]
                            + [_fmt(p) for p in pop])


def write_final_probabilities(path, result: EvolutionResult):
    save_json(path, {
        "probabilities": [float(p) for p in result.final_probs],
        "ground_population": float(result.ground_population()),
        "norm_drift": float(result.norm_drift),
        "steps": result.steps,
        "converged": result.converged,
        "metadata": dict(result.metadata),
    })


# -- landscape -------------------------------------------------------------

def write_landscape_csv(path, entries):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["assignment", "energy", "fold", "valid", "group"])
        for e in entries:
            writer.writerow([e.assignment, str(e.energy),
                             "" if e.label is None else e.label,
                             "" if e.valid is None else int(e.valid),
                             e.group])
