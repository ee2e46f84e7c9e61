"""Command-line front end.

Every verb reads/writes the JSON and CSV formats from the serialization
module.  Relative output paths resolve against $SPINFOLD_OUTPUT_DIR when
it is set.  Exit codes: 0 success, 2 validation error, 3 capacity error,
4 stage failure.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import serialization as ser
from .bath import BathParams
from .chimera import build_chimera
from .dynamics import (AnnealSchedule, EvolutionResult, evolve_closed,
                       evolve_open, instantaneous_spectrum)
from .embedding import (apply_embedding, embed, unembed, verify_embedding)
from .errors import CapacityError, StageError, ValidationError
from .fixtures import ALIASES, fixture_names, get_fixture
from .ising import to_ising
from .lattice import Instance, fold_decoder
from .pipeline import PipelineConfig, run_pipeline
from .quadratize import quadratize
from .solvers import (default_beta_schedule, exhaustive_ground_states,
                      landscape_report, simulated_anneal)

EXIT_VALIDATION = 2
EXIT_CAPACITY = 3
EXIT_STAGE = 4


def _out(path) -> Path:
    p = Path(path)
    base = os.environ.get("SPINFOLD_OUTPUT_DIR")
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StageError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_STAGE)
        except CapacityError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CAPACITY)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
    return wrapper


def _load_instance(instance, fixture):
    if (instance is None) == (fixture is None):
        raise ValidationError("give exactly one of --instance/--fixture")
    if fixture is not None:
        return get_fixture(fixture).instance
    return Instance.from_dict(ser.load_json(instance))


def _read_poly_or_reduction(path):
    data = ser.load_json(path)
    if isinstance(data, dict) and "polynomial" in data:
        return ser.read_reduction(path).polynomial
    return ser.read_polynomial(path)


def _read_model(path):
    """An ising.json or embedded.json, as a plain IsingModel."""
    data = ser.load_json(path)
    if isinstance(data, dict) and "qubits" in data:
        model, order = ser.read_embedded_ising(path).to_ising_model()
        return model, tuple(order)
    model = ser.read_ising(path)
    return model, tuple(range(1, model.n + 1))


def _graph_option(fn):
    fn = click.option("--graph", default="4,4,4", show_default=True,
                      help="Chimera size as M,N,K.")(fn)
    fn = click.option("--masked", default="", help="Comma-separated dead "
                      "qubit ids.")(fn)
    return fn


def _build_graph(graph: str, masked: str):
    try:
        m, n, k = (int(x) for x in graph.split(","))
    except ValueError:
        raise ValidationError(f"bad --graph {graph!r}; expected M,N,K")
    dead = frozenset(int(x) for x in masked.split(",") if x.strip())
    return build_chimera(m, n, k, dead)


def _schedule_options(fn):
    fn = click.option("--schedule", type=click.Path(exists=True),
                      default=None, help="Tabulated schedule CSV "
                      "(tau,A_GHz,B_GHz).")(fn)
    fn = click.option("--t-run-us", type=float, default=None,
                      help="Anneal duration in microseconds.")(fn)
    fn = click.option("--a0", type=float, default=8.0, show_default=True,
                      help="Transverse-field scale in GHz.")(fn)
    fn = click.option("--b0", type=float, default=8.0, show_default=True,
                      help="Problem-Hamiltonian scale in GHz.")(fn)
    fn = click.option("--points", type=int, default=201, show_default=True,
                      help="Schedule tabulation points.")(fn)
    return fn


def _build_schedule(schedule, t_run_us, a0, b0, points):
    if schedule is not None:
        sched = ser.read_schedule_csv(schedule, t_run_us)
        return sched
    kwargs = {"a0": a0, "b0": b0, "points": points}
    if t_run_us is not None:
        kwargs["t_run_us"] = t_run_us
    return AnnealSchedule.synthetic(**kwargs)


@click.group()
def main():
    """Lattice protein folding compiled for spin hardware."""


@main.command("compile")
@click.option("--instance", type=click.Path(exists=True), default=None,
              help="Instance JSON file.")
@click.option("--fixture", default=None, help="Bundled fixture name.")
@click.option("-o", "--output", required=True)
@handles_errors
def compile_cmd(instance, fixture, output):
    """Compile an instance to its exact energy polynomial."""
    inst = _load_instance(instance, fixture)
    poly = inst.compile()
    ser.write_polynomial(_out(output), poly)
    click.echo(f"arity {poly.arity}, degree {poly.degree()}, "
               f"{len(poly.terms)} terms -> {_out(output)}")


@main.command("fix")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@click.option("--set", "bindings", multiple=True,
              help="VAR=BIT, repeatable.")
@click.option("--keep-labels", is_flag=True,
              help="Do not renumber surviving variables.")
@click.option("-o", "--output", required=True)
@handles_errors
def fix_cmd(inp, bindings, keep_labels, output):
    """Substitute fixed bits into a polynomial."""
    poly = _read_poly_or_reduction(inp)
    fixings = {}
    for item in bindings:
        var, _, bit = item.partition("=")
        try:
            fixings[int(var)] = int(bit)
        except ValueError:
            raise ValidationError(f"bad --set {item!r}; expected VAR=BIT")
    poly = poly.fix(fixings, relabel=not keep_labels)
    ser.write_polynomial(_out(output), poly)
    click.echo(f"arity {poly.arity}, degree {poly.degree()} -> {_out(output)}")


@main.command("quadratize")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@click.option("--collapse", multiple=True,
              help="I,J or I,J:DELTA, repeatable; omit for the greedy plan.")
@click.option("-o", "--output", required=True)
@handles_errors
def quadratize_cmd(inp, collapse, output):
    """Reduce a polynomial to quadratic with AND ancillas."""
    poly = _read_poly_or_reduction(inp)
    plan = None
    if collapse:
        plan = []
        for item in collapse:
            pair, _, delta = item.partition(":")
            try:
                i, j = (int(x) for x in pair.split(","))
                plan.append(((i, j), Fraction(delta) if delta else None))
            except (ValueError, ZeroDivisionError):
                raise ValidationError(
                    f"bad --collapse {item!r}; expected I,J or I,J:DELTA")
    result = quadratize(poly, plan)
    ser.write_reduction(_out(output), result)
    steps = ", ".join(f"{s.pair}->q{s.ancilla} d={s.delta}"
                      for s in result.steps) or "none"
    click.echo(f"steps: {steps} -> {_out(output)}")


@main.command("ising")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@click.option("--no-normalize", is_flag=True,
              help="Keep raw coefficients instead of max-|coeff| 1.")
@click.option("-o", "--output", required=True)
@handles_errors
def ising_cmd(inp, no_normalize, output):
    """Convert a quadratic polynomial to a spin model."""
    poly = _read_poly_or_reduction(inp)
    model = to_ising(poly, normalize=not no_normalize)
    ser.write_ising(_out(output), model)
    click.echo(f"n={model.n} scale={model.scale} offset={model.offset} "
               f"-> {_out(output)}")


@main.command("embed")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@_graph_option
@click.option("--hint", type=click.Path(exists=True), default=None,
              help="Embedding JSON fixing some or all chains.")
@click.option("--gamma", default=None,
              help="Chain penalty (rational); default: automatic rule.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--distribution", type=click.Choice(["root", "split"]),
              default="root", show_default=True)
@click.option("-o", "--output", required=True,
              help="Embedding JSON output.")
@click.option("--embedded-out", default=None,
              help="Also write the embedded model JSON here.")
@handles_errors
def embed_cmd(inp, graph, masked, hint, gamma, seed, distribution,
              output, embedded_out):
    """Find chains on the hardware graph and assign couplers."""
    model = ser.read_ising(inp)
    g = _build_graph(graph, masked)
    hint_emb = ser.read_embedding(hint) if hint else None
    gamma_val = Fraction(gamma) if gamma is not None else None
    emb = embed(model, g, hint_emb, seed=seed, gamma=gamma_val)
    ser.write_embedding(_out(output), emb)
    click.echo(f"chains: { {v: list(c) for v, c in sorted(emb.chains.items())} }")
    if embedded_out:
        embedded = apply_embedding(model, emb, g, distribution)
        ser.write_embedded_ising(_out(embedded_out), embedded)
        click.echo(f"embedded {len(embedded.qubits)} qubits "
                   f"-> {_out(embedded_out)}")


@main.command("apply-embedding")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@click.option("-e", "--embedding", type=click.Path(exists=True),
              required=True)
@_graph_option
@click.option("--distribution", type=click.Choice(["root", "split"]),
              default="root", show_default=True)
@click.option("-o", "--output", required=True)
@handles_errors
def apply_embedding_cmd(inp, embedding, graph, masked, distribution, output):
    """Place a logical model on hardware via an existing embedding."""
    model = ser.read_ising(inp)
    emb = ser.read_embedding(embedding)
    g = _build_graph(graph, masked)
    embedded = apply_embedding(model, emb, g, distribution)
    ser.write_embedded_ising(_out(output), embedded)
    click.echo(f"{len(embedded.qubits)} qubits, scale {embedded.scale} "
               f"-> {_out(output)}")


@main.command("unembed")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True, help="Physical SampleSet JSON.")
@click.option("-e", "--embedding", type=click.Path(exists=True),
              required=True)
@click.option("--model", "model_path", type=click.Path(exists=True),
              required=True, help="Logical Ising JSON for re-scoring.")
@click.option("--policy", type=click.Choice(["majority", "discard"]),
              default="majority", show_default=True)
@click.option("-o", "--output", required=True)
@handles_errors
def unembed_cmd(inp, embedding, model_path, policy, output):
    """Decode physical samples to logical samples."""
    physical = ser.read_sampleset(inp)
    emb = ser.read_embedding(embedding)
    logical_model = ser.read_ising(model_path)
    qubits = sorted(emb.qubits())
    from .solvers import SampleSet, _sorted_samples
    counts: dict[tuple[int, ...], int] = {}
    dropped = 0
    broken = 0
    for s in physical.samples:
        by_qubit = dict(zip(qubits, s.spins))
        logical, breaks = unembed(by_qubit, emb, policy)
        broken += bool(breaks) * s.count
        if logical is None:
            dropped += s.count
            continue
        spins = tuple(logical[v] for v in sorted(logical))
        counts[spins] = counts.get(spins, 0) + s.count
    out_set = SampleSet(_sorted_samples(counts, logical_model), {
        "method": "unembed", "policy": policy,
        "broken_reads": broken, "dropped_reads": dropped})
    ser.write_sampleset(_out(output), out_set)
    click.echo(f"{out_set.total_reads()} reads kept, {dropped} dropped, "
               f"{broken} with breaks -> {_out(output)}")


@main.command("verify-embedding")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True)
@click.option("-e", "--embedding", type=click.Path(exists=True),
              required=True)
@_graph_option
@handles_errors
def verify_embedding_cmd(inp, embedding, graph, masked):
    """Check chain connectivity, coupler assignment, and spectrum."""
    model = ser.read_ising(inp)
    emb = ser.read_embedding(embedding)
    g = _build_graph(graph, masked)
    report = verify_embedding(model, emb, g)
    for v in report.violations:
        click.echo(f"violation: {v}")
    click.echo(f"spectrum checked: {report.spectrum_checked}, "
               f"matches: {report.spectrum_matches}, "
               f"gamma risk: {report.gamma_risk}")
    if not report.ok:
        raise ValidationError("embedding failed verification")
    click.echo("ok")


@main.command("solve")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True, help="Ising or embedded-model JSON.")
@click.option("--method", type=click.Choice(["exhaustive", "sa"]),
              default="exhaustive", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reads", type=int, default=1000, show_default=True)
@click.option("--sweeps", type=int, default=1000, show_default=True)
@click.option("--beta-min", type=float, default=0.1, show_default=True)
@click.option("--beta-max", type=float, default=10.0, show_default=True)
@click.option("-o", "--output", required=True)
@click.option("--csv", "csv_out", default=None,
              help="Also write a samples CSV here.")
@handles_errors
def solve_cmd(inp, method, seed, reads, sweeps, beta_min, beta_max,
              output, csv_out):
    """Find low-energy states exhaustively or by annealing."""
    model, _ = _read_model(inp)
    if method == "exhaustive":
        result = exhaustive_ground_states(model)
    else:
        schedule = default_beta_schedule(sweeps, beta_min, beta_max)
        result = simulated_anneal(model, schedule, seed=seed, n_reads=reads)
    ser.write_sampleset(_out(output), result)
    if csv_out:
        ser.write_samples_csv(_out(csv_out), result)
    best = result.best()
    click.echo(f"best energy {best.energy} "
               f"({len(result.ground_states())} degenerate, "
               f"{result.total_reads()} reads) -> {_out(output)}")


@main.command("spectrum")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True, help="Ising or embedded-model JSON.")
@_schedule_options
@click.option("--k-levels", type=int, default=8, show_default=True)
@click.option("-o", "--output", required=True, help="Spectrum CSV.")
@handles_errors
def spectrum_cmd(inp, schedule, t_run_us, a0, b0, points, k_levels, output):
    """Instantaneous eigenvalues along the anneal."""
    model, _ = _read_model(inp)
    sched = _build_schedule(schedule, t_run_us, a0, b0, points)
    spec = instantaneous_spectrum(model, sched, k_levels)
    ser.write_spectrum_csv(_out(output), spec)
    click.echo(f"min gap {spec.min_gap_ghz:.6g} GHz at tau*={spec.tau_star:g} "
               f"-> {_out(output)}")


def _plot_trajectory(result: EvolutionResult, png_path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np
    tau = np.asarray(result.tau)
    pops = np.asarray(result.populations)
    levels = np.asarray(result.levels)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 7))
    for k in range(1, levels.shape[1]):
        top.plot(tau, levels[:, k] - levels[:, 0], lw=1)
    top.set_ylabel("E_k - E_0 (GHz)")
    shown = min(pops.shape[1], 4)
    for k in range(shown):
        bottom.plot(tau, pops[:, k], lw=1.5, label=f"P{k}")
    bottom.set_xlabel("tau")
    bottom.set_ylabel("population")
    bottom.legend(loc="best")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


@main.command("anneal-sim")
@click.option("-i", "--input", "inp", type=click.Path(exists=True),
              required=True, help="Ising or embedded-model JSON.")
@click.option("--mode", type=click.Choice(["closed", "open"]),
              default="closed", show_default=True)
@_schedule_options
@click.option("--bath", type=click.Path(exists=True), default=None,
              help="Bath JSON (open mode); defaults apply otherwise.")
@click.option("--k-levels", type=int, default=None,
              help="Levels to track (default 8 closed, 24 open).")
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("-o", "--output", required=True, help="Trajectory CSV.")
@click.option("--final", "final_out", default=None,
              help="Final-probability JSON path.")
@click.option("--plot", "plot_out", default=None,
              help="Also render the trajectory to this PNG.")
@handles_errors
def anneal_sim_cmd(inp, mode, schedule, t_run_us, a0, b0, points, bath,
                   k_levels, tol, output, final_out, plot_out):
    """Integrate the anneal as a closed or open quantum system."""
    model, _ = _read_model(inp)
    sched = _build_schedule(schedule, t_run_us, a0, b0, points)
    if mode == "closed":
        result = evolve_closed(model, sched, k_levels or 8, tol=tol)
    else:
        params = BathParams.from_dict(ser.load_json(bath)) if bath \
            else BathParams()
        result = evolve_open(model, sched, params, k_levels or 24, tol=tol)
    ser.write_trajectory_csv(_out(output), result)
    if final_out:
        ser.write_final_probabilities(_out(final_out), result)
    if plot_out:
        _plot_trajectory(result, _out(plot_out))
    click.echo(f"ground population {result.ground_population():.6f} "
               f"({result.steps} steps, converged={result.converged}) "
               f"-> {_out(output)}")


@main.command("pipeline")
@click.option("--instance", type=click.Path(exists=True), default=None)
@click.option("--fixture", default=None)
@click.option("--variant", default="sanitized", show_default=True)
@click.option("--set", "bindings", multiple=True,
              help="Scheme fixing VAR=BIT, repeatable.")
@click.option("--solver", type=click.Choice(["exhaustive", "sa"]),
              default="exhaustive", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reads", type=int, default=1000, show_default=True)
@_graph_option
@click.option("--gamma", default=None)
@click.option("--simulate", type=click.Choice(["closed", "open"]),
              default=None)
@click.option("--t-run-us", type=float, default=None)
@click.option("--bath", type=click.Path(exists=True), default=None)
@click.option("--out-dir", required=True)
@handles_errors
def pipeline_cmd(instance, fixture, variant, bindings, solver, seed, reads,
                 graph, masked, gamma, simulate, t_run_us, bath, out_dir):
    """Run compile through solve/simulate, writing all artifacts."""
    fixings = {}
    for item in bindings:
        var, _, bit = item.partition("=")
        try:
            fixings[int(var)] = int(bit)
        except ValueError:
            raise ValidationError(f"bad --set {item!r}; expected VAR=BIT")
    try:
        m, n, k = (int(x) for x in graph.split(","))
    except ValueError:
        raise ValidationError(f"bad --graph {graph!r}; expected M,N,K")
    sched = None
    if t_run_us is not None:
        sched = AnnealSchedule.synthetic(t_run_us=t_run_us)
    cfg = PipelineConfig(
        out_dir=_out(out_dir),
        fixture=fixture,
        variant=variant,
        instance_path=instance,
        fixings=fixings,
        graph_m=m, graph_n=n, graph_k=k,
        masked=frozenset(int(x) for x in masked.split(",") if x.strip()),
        gamma=Fraction(gamma) if gamma is not None else None,
        solver=solver,
        seed=seed,
        n_reads=reads,
        simulate=simulate,
        schedule=sched,
        bath=BathParams.from_dict(ser.load_json(bath)) if bath else None,
    )
    report = run_pipeline(cfg)
    click.echo(json.dumps(report, indent=2, sort_keys=True))


def _plot_landscape(entries, png_path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    xs = range(len(entries))
    ys = [float(e.energy) for e in entries]
    colors = ["tab:blue" if e.valid else "tab:red" for e in entries]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(xs, ys, color=colors)
    ax.set_xlabel("assignment (sorted by energy)")
    ax.set_ylabel("energy")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


@main.command("landscape")
@click.option("--instance", type=click.Path(exists=True), default=None)
@click.option("--fixture", default=None)
@click.option("-o", "--output", required=True, help="Landscape CSV.")
@click.option("--plot", "plot_out", default=None,
              help="Also render an energy bar chart to this PNG.")
@handles_errors
def landscape_cmd(instance, fixture, output, plot_out):
    """Enumerate every assignment's fold, validity, and energy."""
    inst = _load_instance(instance, fixture)
    poly = inst.compile()
    entries = landscape_report(poly, fold_decoder(inst))
    ser.write_landscape_csv(_out(output), entries)
    valid = sum(1 for e in entries if e.valid)
    click.echo(f"{len(entries)} assignments, {valid} self-avoiding, "
               f"ground {entries[0].energy} -> {_out(output)}")
    if plot_out:
        _plot_landscape(entries, _out(plot_out))


@main.group("fixtures")
def fixtures_group():
    """Bundled published instances."""


@fixtures_group.command("list")
@handles_errors
def fixtures_list():
    """Names, sizes, and available variants."""
    for name in fixture_names():
        fx = get_fixture(name)
        aliases = [a for a, t in ALIASES.items() if t == name]
        alias_note = f" (alias {', '.join(aliases)})" if aliases else ""
        variants = ",".join(sorted(fx.polynomials))
        click.echo(f"{name}{alias_note}: {fx.summary} "
                   f"[variants: {variants}]")


@fixtures_group.command("dump")
@click.argument("name")
@click.option("--variant", default="sanitized", show_default=True)
@click.option("-o", "--output", default=None,
              help="Write polynomial JSON here instead of stdout.")
@handles_errors
def fixtures_dump(name, variant, output):
    """Print or save one fixture polynomial."""
    fx = get_fixture(name)
    if variant not in fx.polynomials:
        raise ValidationError(
            f"fixture {fx.name} has no {variant!r} variant; available: "
            f"{', '.join(sorted(fx.polynomials))}")
    poly = fx.polynomials[variant]
    if output:
        ser.write_polynomial(_out(output), poly)
        click.echo(f"{fx.name} ({variant}) -> {_out(output)}")
    else:
        click.echo(json.dumps(poly.to_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
