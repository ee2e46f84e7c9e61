"""End-to-end orchestration: compile through solve/simulate with artifacts.

Every stage writes its output to the run directory before the next stage
consumes it, and the manifest records a SHA-256 per artifact, so reruns
are byte-comparable: a manifest hash moves only when an upstream artifact
or a seed moved.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from . import serialization as ser
from .bath import BathParams
from .chimera import ChimeraGraph, build_chimera
from .dynamics import AnnealSchedule, evolve_closed, evolve_open
from .embedding import Embedding, apply_embedding, embed, unembed
from .errors import SpinfoldError, StageError, ValidationError
from .fixtures import get_fixture
from .ising import to_ising
from .lattice import Instance
from .quadratize import quadratize
from .solvers import exhaustive_ground_states, simulated_anneal


@dataclass
class PipelineConfig:
    """What to run and where to put it.

    Exactly one of fixture/instance_path identifies the problem.  fixings
    implement the divide-and-conquer schemes (variable -> bit).  plan
    entries are ((i, j), delta-or-None) collapse overrides.
    """
    out_dir: Path
    fixture: str | None = None
    variant: str = "sanitized"
    instance_path: str | None = None
    fixings: Mapping[int, int] = field(default_factory=dict)
    plan: Sequence | None = None
    graph_m: int = 4
    graph_n: int = 4
    graph_k: int = 4
    masked: frozenset[int] = frozenset()
    hint: Embedding | None = None
    gamma: Fraction | None = None
    distribution: str = "root"
    solver: str = "exhaustive"            # exhaustive | sa
    seed: int = 0
    n_reads: int = 1000
    sweeps: int | None = None
    simulate: str | None = None           # closed | open
    schedule: AnnealSchedule | None = None
    bath: BathParams | None = None

    def __post_init__(self):
        if (self.fixture is None) == (self.instance_path is None):
            raise ValidationError(
                "config needs exactly one of fixture or instance_path")
        if self.solver not in ("exhaustive", "sa"):
            raise ValidationError(f"unknown solver {self.solver!r}")
        if self.simulate not in (None, "closed", "open"):
            raise ValidationError(f"unknown simulate mode {self.simulate!r}")
        if self.instance_path is not None \
                and not Path(self.instance_path).exists():
            raise ValidationError(
                f"instance file {self.instance_path} does not exist")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_pipeline(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, str] = {}
    stages: list[str] = []
    report: dict = {"out_dir": str(out)}

    def emit(stage, name, writer, value):
        path = out / name
        try:
            writer(path, value)
        except SpinfoldError:
            raise
        except Exception as exc:
            raise StageError(stage, f"writing {name}: {exc}") from exc
        artifacts[name] = _sha256(path)
        if stage not in stages:
            stages.append(stage)
        return path

    def run(stage, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StageError:
            raise
        except SpinfoldError as exc:
            raise StageError(stage, str(exc)) from exc

    # compile
    instance = None
    plan = cfg.plan
    hint = cfg.hint
    gamma = cfg.gamma
    if cfg.fixture is not None:
        # bad names are configuration problems, not stage failures
        fixture = get_fixture(cfg.fixture)
        instance = fixture.instance
        if cfg.variant not in fixture.polynomials:
            raise ValidationError(
                f"fixture {fixture.name} has no {cfg.variant!r} variant")
        poly = fixture.polynomials[cfg.variant]
        if plan is None:
            plan = fixture.plan
        if hint is None:
            hint = fixture.embedding
        report["fixture"] = fixture.name
    else:
        data = run("compile", ser.load_json, cfg.instance_path)
        instance = run("compile", Instance.from_dict, data)
        poly = run("compile", instance.compile)
    if instance is not None:
        emit("compile", "instance.json",
             lambda p, v: ser.save_json(p, v.to_dict()), instance)
    emit("compile", "compiled.json", ser.write_polynomial, poly)

    # fix (divide-and-conquer scheme restriction)
    if cfg.fixings:
        poly = run("fix", poly.fix, dict(cfg.fixings))
        emit("fix", "fixed.json", ser.write_polynomial, poly)

    # a two-residue chain has no free bits: one fold, nothing to anneal
    if poly.arity == 0:
        ground = {"energy": str(poly.evaluate([]))}
        if instance is not None:
            fold = instance.fold_for([])
            ground["turns"] = instance.bits_for([])
            ground["fold_points"] = [list(p) for p in fold.points]
        report["ground"] = ground
        return _finish(report, cfg, out, stages, artifacts)

    # quadratize
    reduction = run("quadratize", quadratize, poly, plan)
    emit("quadratize", "reduced.json", ser.write_reduction, reduction)
    original_arity = reduction.original_arity

    # ising
    ising = run("ising", to_ising, reduction.polynomial)
    emit("ising", "ising.json", ser.write_ising, ising)

    # embed
    graph = run("embed", build_chimera, cfg.graph_m, cfg.graph_n,
                cfg.graph_k, cfg.masked)
    emit("embed", "graph.json", ser.write_graph, graph)
    if hint is not None:
        embedding = hint
    else:
        embedding = run("embed", embed, ising, graph, None, cfg.seed, gamma)
    embedded = run("embed", apply_embedding, ising, embedding, graph,
                   cfg.distribution)
    emit("embed", "embedding.json", ser.write_embedding, embedding)
    emit("embed", "embedded.json", ser.write_embedded_ising, embedded)

    em_model, qubit_order = embedded.to_ising_model()

    # solve
    if cfg.solver == "exhaustive":
        samples = run("solve", exhaustive_ground_states, em_model)
    else:
        schedule = None
        if cfg.sweeps is not None:
            from .solvers import default_beta_schedule
            schedule = default_beta_schedule(cfg.sweeps)
        samples = run("solve", simulated_anneal, em_model, schedule,
                      cfg.seed, cfg.n_reads)
    emit("solve", "samples.json", ser.write_sampleset, samples)
    emit("solve", "samples.csv", ser.write_samples_csv, samples)

    # decode the best read back to a fold
    best = samples.best()
    qspins = {q: s for q, s in zip(qubit_order, best.spins)}
    logical, breaks = run("solve", unembed, qspins, embedding)
    ground: dict = {"energy": str(best.energy), "chain_breaks": breaks}
    if logical is not None:
        bits = [(1 - logical[v]) // 2 for v in sorted(logical)]
        ground["logical_bits"] = "".join(str(b) for b in bits)
        if instance is not None:
            fold_bits = list(bits[:original_arity])
            if cfg.fixings:
                # scheme fixings consumed some of the instance's free bits
                fixed = {int(k): int(v) for k, v in dict(cfg.fixings).items()}
                it = iter(fold_bits)
                fold_bits = [fixed[v] if v in fixed else next(it)
                             for v in range(1, instance.arity + 1)]
            try:
                fold = instance.fold_for(fold_bits)
                ground["turns"] = instance.bits_for(fold_bits)
                ground["fold_points"] = [list(p) for p in fold.points]
            except SpinfoldError:
                pass
    report["ground"] = ground

    # simulate
    if cfg.simulate is not None:
        schedule = cfg.schedule or AnnealSchedule.synthetic()
        if cfg.simulate == "closed":
            result = run("simulate", evolve_closed, em_model, schedule)
        else:
            result = run("simulate", evolve_open, em_model, schedule,
                         cfg.bath or BathParams())
        emit("simulate", "trajectory.csv", ser.write_trajectory_csv, result)
        emit("simulate", "final.json", ser.write_final_probabilities, result)
        report["final_ground_population"] = result.ground_population()

    return _finish(report, cfg, out, stages, artifacts)


def _finish(report, cfg, out, stages, artifacts):
    manifest = {
        "stages": stages,
        "artifacts": artifacts,
        "seed": cfg.seed,
        "solver": cfg.solver,
        "fixture": cfg.fixture,
        "fixture_variant": cfg.variant if cfg.fixture else None,
        "fixings": {str(k): v for k, v in sorted(dict(cfg.fixings).items())},
    }
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    report["manifest"] = str(path)
    report["stages"] = stages
    report["artifacts"] = artifacts
    return report
