"""Minor embedding of logical Ising models into the hardware graph.

Each logical variable becomes a connected chain of physical qubits held
together by ferromagnetic couplers -gamma_i (from the penalty
gamma_i * (1 - s s') per chain tree edge, whose constant is folded into
the offset).  Logical fields go to a designated chain root, logical
couplers to one designated physical edge each.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .chimera import ChimeraGraph
from .errors import CapacityError, StageError, ValidationError
from .ising import IsingModel

SPECTRUM_CHECK_LIMIT = 12     # exhaustive spectrum comparison cap (qubits)
GAMMA_SEARCH_LIMIT = 16       # exhaustive gamma-rule cap (qubits)


class EmbeddingFailure(StageError):
    """Heuristic exhausted its restart budget."""

    def __init__(self, unplaced: Iterable[int]):
        self.unplaced = tuple(sorted(unplaced))
        super().__init__(
            "embed", f"no embedding found; unplaced variables: "
                     f"{list(self.unplaced)}")


def _frac_dict(x: Fraction):
    return {"num": x.numerator, "den": x.denominator}


def _frac(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


@dataclass(frozen=True, eq=True)
class Embedding:
    chains: dict[int, tuple[int, ...]]
    gamma: dict[int, Fraction]
    edge_assign: dict[tuple[int, int], tuple[int, int]] = field(
        default_factory=dict)

    def chain_of(self, var: int) -> tuple[int, ...]:
        return self.chains[var]

    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted(q for c in self.chains.values() for q in c))

    def to_dict(self):
        return {
            "chains": {str(v): list(c) for v, c in sorted(self.chains.items())},
            "gamma": {str(v): _frac_dict(g)
                      for v, g in sorted(self.gamma.items())},
            "edge_assign": [
                {"edge": list(e), "coupler": list(c)}
                for e, c in sorted(self.edge_assign.items())],
        }

    @classmethod
    def from_dict(cls, data) -> "Embedding":
        chains = {int(v): tuple(sorted(int(q) for q in c))
                  for v, c in data["chains"].items()}
        gamma = {int(v): _frac(g) for v, g in data.get("gamma", {}).items()}
        assign = {}
        for row in data.get("edge_assign", ()):
            i, j = row["edge"]
            a, b = row["coupler"]
            assign[(min(i, j), max(i, j))] = (min(a, b), max(a, b))
        return cls(chains, gamma, assign)


def chain_tree_edges(graph: ChimeraGraph, chain: Sequence[int]
                     ) -> tuple[tuple[int, int], ...]:
    """Deterministic BFS spanning tree of the chain's induced subgraph."""
    members = set(chain)
    root = min(members)
    seen = {root}
    frontier = [root]
    edges = []
    while frontier:
        nxt = []
        for q in frontier:
            for b in graph.neighbors(q):
                if b in members and b not in seen:
                    seen.add(b)
                    edges.append((min(q, b), max(q, b)))
                    nxt.append(b)
        frontier = sorted(nxt)
    if seen != members:
        raise ValidationError(
            f"chain {sorted(members)} is not connected in the graph")
    return tuple(edges)


def validate_embedding(emb: Embedding, graph: ChimeraGraph,
                       ising: IsingModel | None = None) -> list[str]:
    """Structural violations (empty list when the embedding is valid)."""
    violations = []
    owner: dict[int, int] = {}
    for v, chain in sorted(emb.chains.items()):
        if not chain:
            violations.append(f"variable {v} has an empty chain")
            continue
        for q in chain:
            if not graph.is_usable(q):
                violations.append(f"chain {v} uses unusable qubit {q}")
            if q in owner:
                violations.append(
                    f"qubit {q} shared by chains {owner[q]} and {v}")
            owner[q] = v
        try:
            chain_tree_edges(graph, chain)
        except ValidationError:
            violations.append(f"chain {v} is not connected")
        if len(chain) > 1 and v not in emb.gamma:
            violations.append(f"multi-qubit chain {v} has no gamma")
    for v, g in emb.gamma.items():
        if g <= 0:
            violations.append(f"gamma for chain {v} is not positive")
    for (i, j), (a, b) in sorted(emb.edge_assign.items()):
        if i not in emb.chains or j not in emb.chains:
            violations.append(f"edge assignment ({i},{j}) names unknown chains")
            continue
        if not graph.has_edge(a, b):
            violations.append(
                f"assigned coupler ({a},{b}) for edge ({i},{j}) is not a "
                f"graph edge")
        elif not ({a, b} <= set(emb.chains[i]) | set(emb.chains[j])
                  and (a in emb.chains[i]) != (a in emb.chains[j])):
            violations.append(
                f"coupler ({a},{b}) does not join chains {i} and {j}")
    if ising is not None:
        for v in range(1, ising.n + 1):
            if v not in emb.chains:
                violations.append(f"variable {v} has no chain")
        for (i, j), val in sorted(ising.J.items()):
            if val == 0 or i not in emb.chains or j not in emb.chains:
                continue
            linked = any(graph.has_edge(a, b)
                         for a in emb.chains[i] for b in emb.chains[j])
            if not linked:
                violations.append(
                    f"logical edge ({i},{j}) has no physical coupler")
    return violations


# -- heuristic placement ---------------------------------------------------

def _bfs_from_chain(graph: ChimeraGraph, chain: Iterable[int],
                    free: set[int]):
    """Distances/parents over free qubits, distance 1 next to the chain."""
    dist: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    frontier = []
    for q in chain:
        for b in graph.neighbors(q):
            if b in free and b not in dist:
                dist[b] = 1
                parent[b] = None
                frontier.append(b)
    frontier.sort()
    while frontier:
        nxt = []
        for q in frontier:
            for b in graph.neighbors(q):
                if b in free and b not in dist:
                    dist[b] = dist[q] + 1
                    parent[b] = q
                    nxt.append(b)
        frontier = sorted(nxt)
    return dist, parent


def _collect_path(parent: Mapping[int, int | None], end: int) -> list[int]:
    path = [end]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def _place_all(ising: IsingModel, graph: ChimeraGraph,
               fixed: dict[int, tuple[int, ...]], rng: random.Random,
               shuffle: bool) -> dict[int, tuple[int, ...]] | None:
    adj: dict[int, set[int]] = {v: set() for v in range(1, ising.n + 1)}
    for (i, j), val in ising.J.items():
        if val != 0:
            adj[i].add(j)
            adj[j].add(i)
    order = sorted((v for v in adj if v not in fixed),
                   key=lambda v: (-len(adj[v]), v))
    if shuffle:
        rng.shuffle(order)
    chains: dict[int, tuple[int, ...]] = dict(fixed)
    free = set(graph.usable_qubits()) - {q for c in fixed.values() for q in c}
    for v in order:
        placed_nb = sorted(u for u in adj[v] if u in chains)
        if not placed_nb:
            if not free:
                return None
            candidates = sorted(
                free,
                key=lambda q: (-sum(1 for b in graph.neighbors(q) if b in free), q))
            choice = candidates[0] if not shuffle else rng.choice(
                candidates[:min(8, len(candidates))])
            chains[v] = (choice,)
            free.discard(choice)
            continue
        searches = [_bfs_from_chain(graph, chains[u], free) for u in placed_nb]
        best_root, best_cost = None, None
        for q in sorted(free):
            if all(q in dist for dist, _ in searches):
                cost = sum(dist[q] for dist, _ in searches)
                if best_cost is None or cost < best_cost:
                    best_root, best_cost = q, cost
        if best_root is None:
            return None
        members = set()
        for dist, parent in searches:
            members.update(_collect_path(parent, best_root))
        chains[v] = tuple(sorted(members))
        free -= members
    return chains


def _cross_template(n: int, graph: ChimeraGraph
                    ) -> dict[int, tuple[int, ...]] | None:
    """Deterministic all-to-all template: chain v spans one horizontal row
    arm and one vertical column arm that meet in a diagonal cell, so any
    two chains share a cell with opposite partitions."""
    blocks = math.ceil(n / graph.k)
    if blocks > min(graph.m, graph.n):
        return None
    chains = {}
    for v in range(1, n + 1):
        b, a = divmod(v - 1, graph.k)
        qubits = ([graph.qubit_id(b, c, 1, a) for c in range(blocks)]
                  + [graph.qubit_id(r, b, 0, a) for r in range(blocks)])
        if any(not graph.is_usable(q) for q in qubits):
            return None
        chains[v] = tuple(sorted(qubits))
    return chains


def _resolve_edges(ising: IsingModel, graph: ChimeraGraph,
                   chains: Mapping[int, tuple[int, ...]],
                   pinned: Mapping[tuple[int, int], tuple[int, int]]
                   ) -> dict[tuple[int, int], tuple[int, int]] | None:
    assign = {}
    for (i, j), val in sorted(ising.J.items()):
        if val == 0:
            continue
        candidates = sorted(
            (min(a, b), max(a, b))
            for a in chains[i] for b in chains[j] if graph.has_edge(a, b))
        if not candidates:
            return None
        pick = pinned.get((i, j))
        if pick is not None:
            pick = (min(pick), max(pick))
            if pick not in candidates:
                raise ValidationError(
                    f"pinned coupler {pick} cannot carry logical edge ({i},{j})")
        else:
            pick = candidates[0]
        assign[(i, j)] = pick
    return assign


def select_gamma(ising: IsingModel, chains: Mapping[int, tuple[int, ...]],
                 edge_assign: Mapping[tuple[int, int], tuple[int, int]],
                 graph: ChimeraGraph) -> Fraction:
    """Smallest half-integer gamma > 0 such that every broken-chain state
    lies strictly above every consistent state whose logical energy is
    <= 0.  Exhaustive within GAMMA_SEARCH_LIMIT qubits; beyond that, falls
    back to the safe per-chain bound |h_i| + sum |J_ij|."""
    qubits = tuple(sorted(q for c in chains.values() for q in c))
    tree_edges = []
    for v, chain in sorted(chains.items()):
        if len(chain) > 1:
            tree_edges.extend(chain_tree_edges(graph, chain))
    if not tree_edges:
        return Fraction(1, 2)
    if len(qubits) > GAMMA_SEARCH_LIMIT:
        worst = max(
            abs(ising.h[v - 1]) + sum(abs(val) for (i, j), val in ising.J.items()
                                      if v in (i, j))
            for v, chain in chains.items() if len(chain) > 1)
        return Fraction(math.ceil(worst * 2), 2)

    index = {q: p for p, q in enumerate(qubits)}
    h_phys = {q: Fraction(0) for q in qubits}
    for v, chain in chains.items():
        h_phys[min(chain)] += ising.h[v - 1]
    couplers = [(index[a], index[b], val)
                for (i, j), val in ising.J.items() if val != 0
                for (a, b) in [edge_assign[(min(i, j), max(i, j))]]]
    tree_idx = [(index[a], index[b]) for a, b in tree_edges]
    hs = [(index[q], val) for q, val in h_phys.items() if val != 0]
    chain_slots = [tuple(index[q] for q in chain)
                   for _, chain in sorted(chains.items())]

    max_cons_base = None
    worst_ratio = Fraction(0)
    broken_rows = []
    for m in range(1 << len(qubits)):
        spins = [1 - 2 * ((m >> p) & 1) for p in range(len(qubits))]
        base = Fraction(0)
        for p, val in hs:
            base += val * spins[p]
        for a, b, val in couplers:
            base += val * spins[a] * spins[b]
        t = sum(spins[a] * spins[b] for a, b in tree_idx)
        if t == len(tree_idx):   # every tree edge aligned: consistent
            logical = [spins[slots[0]] for slots in chain_slots]
            if ising.energy(logical) <= 0:
                if max_cons_base is None or base > max_cons_base:
                    max_cons_base = base
        else:
            broken_rows.append((base, t))
    if max_cons_base is None:
        return Fraction(1, 2)
    for base, t in broken_rows:
        gap = len(tree_idx) - t   # >= 2 whenever some tree edge is broken
        worst_ratio = max(worst_ratio, (max_cons_base - base) / gap)
    # smallest k/2 strictly above worst_ratio
    k = math.floor(worst_ratio * 2) + 1
    return Fraction(max(k, 1), 2)


def embed(ising: IsingModel, graph: ChimeraGraph,
          hint: "Embedding | Mapping[int, Sequence[int]] | None" = None,
          seed: int = 0, gamma=None, max_attempts: int = 64) -> Embedding:
    """Find chains for every logical variable and assign couplers.

    hint may fix some or all chains (and pin edge assignments when it is
    an Embedding).  gamma: None selects the automatic rule, a scalar
    applies one value to every multi-qubit chain, a mapping is used as-is.
    """
    if ising.n < 1:
        raise ValidationError("model has no variables")
    pinned_edges: dict = {}
    fixed: dict[int, tuple[int, ...]] = {}
    if isinstance(hint, Embedding):
        fixed = {v: tuple(sorted(c)) for v, c in hint.chains.items()}
        pinned_edges = dict(hint.edge_assign)
    elif hint:
        fixed = {int(v): tuple(sorted(int(q) for q in c))
                 for v, c in hint.items()}
    seen = set()
    for v, c in fixed.items():
        if not (1 <= v <= ising.n):
            raise ValidationError(f"hint names unknown variable {v}")
        if seen & set(c):
            raise ValidationError("hint chains overlap")
        seen |= set(c)
        chain_tree_edges(graph, c)   # must be connected and usable

    chains = None
    for attempt in range(max_attempts):
        rng = random.Random(f"embed:{seed}:{attempt}")
        candidate = _place_all(ising, graph, fixed, rng, shuffle=attempt > 0)
        if candidate is None:
            continue
        assign = _resolve_edges(ising, graph, candidate, pinned_edges)
        if assign is not None:
            chains = candidate
            break
    if chains is None:
        template = _cross_template(ising.n, graph)
        if template is not None and not fixed:
            assign = _resolve_edges(ising, graph, template, pinned_edges)
            if assign is not None:
                chains = template
    if chains is None:
        placed = set(fixed)
        raise EmbeddingFailure(set(range(1, ising.n + 1)) - placed)

    multi = [v for v, c in chains.items() if len(c) > 1]
    if gamma is None:
        g = select_gamma(ising, chains, assign, graph)
        gammas = {v: g for v in multi}
    elif isinstance(gamma, Mapping):
        gammas = {int(v): Fraction(x) for v, x in gamma.items()}
    else:
        gammas = {v: Fraction(gamma) for v in multi}
    return Embedding(chains, gammas, assign)


# -- applying an embedding -------------------------------------------------

@dataclass(frozen=True)
class EmbeddedIsing:
    """A logical model laid out on physical qubits.

    Original-unit energy of a physical sample is
    scale * E_spin(sample) + offset; for consistent chains this equals the
    logical model's energy of the decoded state exactly.
    """

    qubits: tuple[int, ...]
    h: dict[int, Fraction]
    J: dict[tuple[int, int], Fraction]
    offset: Fraction
    scale: Fraction
    embedding: Embedding
    chain_edges: dict[int, tuple[tuple[int, int], ...]]

    def spin_energy(self, sample: Mapping[int, int]) -> Fraction:
        e = Fraction(0)
        for q, val in self.h.items():
            e += val * sample[q]
        for (a, b), val in self.J.items():
            e += val * sample[a] * sample[b]
        return e

    def energy(self, sample: Mapping[int, int]) -> Fraction:
        return self.scale * self.spin_energy(sample) + self.offset

    def chain_couplers(self) -> set[tuple[int, int]]:
        return {e for edges in self.chain_edges.values() for e in edges}

    def to_ising_model(self) -> tuple[IsingModel, tuple[int, ...]]:
        """Contiguous 1-based view for the solvers, plus the qubit order."""
        index = {q: p + 1 for p, q in enumerate(self.qubits)}
        h = [Fraction(0)] * len(self.qubits)
        for q, val in self.h.items():
            h[index[q] - 1] = val
        J = {}
        for (a, b), val in self.J.items():
            i, j = index[a], index[b]
            J[(min(i, j), max(i, j))] = val
        model = IsingModel(len(self.qubits), tuple(h), J, self.offset,
                           self.scale)
        return model, self.qubits

    def to_dict(self):
        return {
            "qubits": list(self.qubits),
            "h": {str(q): _frac_dict(v) for q, v in sorted(self.h.items())},
            "J": [{"i": a, "j": b, "v": _frac_dict(v)}
                  for (a, b), v in sorted(self.J.items())],
            "offset": _frac_dict(self.offset),
            "scale": _frac_dict(self.scale),
            "embedding": self.embedding.to_dict(),
            "chain_edges": {str(v): [list(e) for e in edges]
                            for v, edges in sorted(self.chain_edges.items())},
        }

    @classmethod
    def from_dict(cls, data) -> "EmbeddedIsing":
        return cls(
            tuple(int(q) for q in data["qubits"]),
            {int(q): _frac(v) for q, v in data["h"].items()},
            {(int(e["i"]), int(e["j"])): _frac(e["v"]) for e in data["J"]},
            _frac(data["offset"]),
            _frac(data["scale"]),
            Embedding.from_dict(data["embedding"]),
            {int(v): tuple((int(a), int(b)) for a, b in edges)
             for v, edges in data["chain_edges"].items()},
        )


def apply_embedding(ising: IsingModel, emb: Embedding, graph: ChimeraGraph,
                    distribution: str = "root") -> EmbeddedIsing:
    """Place fields and couplers on the hardware and add chain penalties.

    distribution: "root" puts each whole h_i on the chain's lowest qubit
    id; "split" divides it equally over the chain.  The result is
    renormalized so the largest |coefficient| is 1, with the factor folded
    into scale.
    """
    violations = validate_embedding(emb, graph, ising)
    if violations:
        raise ValidationError("invalid embedding: " + "; ".join(violations))
    if distribution not in ("root", "split"):
        raise ValidationError(f"unknown distribution plan {distribution!r}")
    qubits = emb.qubits()
    h: dict[int, Fraction] = {q: Fraction(0) for q in qubits}
    J: dict[tuple[int, int], Fraction] = {}
    for v in range(1, ising.n + 1):
        chain = emb.chains[v]
        hv = ising.h[v - 1]
        if hv == 0:
            continue
        if distribution == "root":
            h[min(chain)] += hv
        else:
            share = hv / len(chain)
            for q in chain:
                h[q] += share
    for (i, j), val in ising.J.items():
        if val == 0:
            continue
        key = (min(i, j), max(i, j))
        if key not in emb.edge_assign:
            raise ValidationError(f"no coupler assigned for logical edge {key}")
        edge = emb.edge_assign[key]
        J[edge] = J.get(edge, Fraction(0)) + val
    offset = ising.offset
    chain_edges: dict[int, tuple[tuple[int, int], ...]] = {}
    for v, chain in sorted(emb.chains.items()):
        if len(chain) < 2:
            chain_edges[v] = ()
            continue
        edges = chain_tree_edges(graph, chain)
        chain_edges[v] = edges
        g = emb.gamma[v]
        for e in edges:
            J[e] = J.get(e, Fraction(0)) - g
        # gamma*(1 - s s') contributes a constant gamma per tree edge
        offset += ising.scale * g * len(edges)
    h = {q: v for q, v in h.items() if v != 0}
    J = {e: v for e, v in J.items() if v != 0}
    scale = ising.scale
    peak = max([abs(v) for v in h.values()]
               + [abs(v) for v in J.values()], default=Fraction(0))
    if peak not in (Fraction(0), Fraction(1)):
        h = {q: v / peak for q, v in h.items()}
        J = {e: v / peak for e, v in J.items()}
        scale = scale * peak
    return EmbeddedIsing(qubits, h, J, offset, scale, emb, chain_edges)


def unembed(sample: Mapping[int, int], emb: Embedding,
            policy: str = "majority") -> tuple[dict[int, int] | None, int]:
    """Decode one physical sample to logical spins.

    Returns (logical spins by variable, broken chain count); under the
    discard policy the spins are None whenever any chain is broken.
    Majority voting resolves ties toward +1.
    """
    if policy not in ("majority", "discard"):
        raise ValidationError(f"unknown unembed policy {policy!r}")
    logical: dict[int, int] = {}
    breaks = 0
    for v, chain in sorted(emb.chains.items()):
        values = [sample[q] for q in chain]
        if any(s not in (1, -1) for s in values):
            raise ValidationError("sample spins must be +/-1")
        if len(set(values)) > 1:
            breaks += 1
        logical[v] = 1 if sum(values) >= 0 else -1
    if breaks and policy == "discard":
        return None, breaks
    return logical, breaks


@dataclass(frozen=True)
class EmbeddingReport:
    violations: tuple[str, ...]
    spectrum_checked: bool
    spectrum_matches: bool | None
    gamma_risk: bool | None

    @property
    def ok(self) -> bool:
        return (not self.violations and self.spectrum_matches is not False
                and self.gamma_risk is not True)


def verify_embedding(ising: IsingModel, emb: Embedding, graph: ChimeraGraph,
                     distribution: str = "root",
                     spectrum_limit: int = SPECTRUM_CHECK_LIMIT
                     ) -> EmbeddingReport:
    """Structural validation plus, within the size cap, an exhaustive
    comparison of the consistent-chain spectrum against the logical one
    and a check that broken chains never undercut low-lying states."""
    violations = validate_embedding(emb, graph, ising)
    if violations:
        return EmbeddingReport(tuple(violations), False, None, None)
    embedded = apply_embedding(ising, emb, graph, distribution)
    nq = len(embedded.qubits)
    if nq > spectrum_limit:
        return EmbeddingReport((), False, None, None)
    order = embedded.qubits
    matches = True
    threshold = None   # highest consistent energy with logical E <= 0
    min_broken = None
    for m in range(1 << nq):
        sample = {q: 1 - 2 * ((m >> p) & 1) for p, q in enumerate(order)}
        logical, breaks = unembed(sample, emb, "majority")
        e_phys = embedded.energy(sample)
        if breaks == 0:
            spins = [logical[v] for v in sorted(logical)]
            e_log = ising.energy(spins)
            if e_phys != e_log:
                matches = False
            if e_log <= 0 and (threshold is None or e_phys > threshold):
                threshold = e_phys
        else:
            if min_broken is None or e_phys < min_broken:
                min_broken = e_phys
    risk = (min_broken is not None and threshold is not None
            and min_broken <= threshold)
    return EmbeddingReport((), True, matches, risk)
