"""2D lattice folds of an amino-acid chain: turn encoding and energy oracle.

A fold of an N-residue chain is a walk on the square lattice, encoded by
two bits per bond: "00" down, "01" right, "10" left, "11" up.  The first
bond is fixed rightward ("01").  In vacuo the first bit of the second bond
is fixed to 0 as well (reflection symmetry about the first-bond axis),
leaving 2N-5 free bits; with an external potential all 2N-4 bits after the
prefix are free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapacityError, ValidationError
from .polynomial import MultilinearPolynomial, interpolate_polynomial

DIRECTION_STEPS = {
    "00": (0, -1),   # down
    "01": (1, 0),    # right
    "10": (-1, 0),   # left
    "11": (0, 1),    # up
}
STEP_CODES = {v: k for k, v in DIRECTION_STEPS.items()}

ENUMERATION_LIMIT = 24


@dataclass(frozen=True)
class Fold:
    """An ordered walk of lattice points, one per residue."""

    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValidationError("a fold needs at least two residues")
        if self.points[0] != (0, 0) or self.points[1] != (1, 0):
            raise ValidationError("folds start (0,0) -> (1,0)")
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if (x1 - x0, y1 - y0) not in STEP_CODES:
                raise ValidationError(
                    f"non-unit step {(x0, y0)} -> {(x1, y1)}")

    def __len__(self):
        return len(self.points)


def decode_turns(bits: str) -> Fold:
    """Decode a full turn string (two bits per bond) into a Fold."""
    if len(bits) % 2 or len(bits) < 2 or set(bits) - {"0", "1"}:
        raise ValidationError(f"malformed turn string {bits!r}")
    x, y = 0, 0
    points = [(0, 0)]
    for k in range(0, len(bits), 2):
        dx, dy = DIRECTION_STEPS[bits[k:k + 2]]
        x, y = x + dx, y + dy
        points.append((x, y))
    return Fold(tuple(points))


def encode_fold(fold: Fold) -> str:
    """Inverse of decode_turns."""
    return "".join(
        STEP_CODES[(x1 - x0, y1 - y0)]
        for (x0, y0), (x1, y1) in zip(fold.points, fold.points[1:]))


def is_self_avoiding(fold: Fold) -> bool:
    return len(set(fold.points)) == len(fold.points)


class InteractionModel:
    """Symmetric pairwise contact-energy lookup over residue labels."""

    def __init__(self, kind: str, pair_energies: Mapping | None = None,
                 alphabet: Iterable[str] = ()):
        self.kind = kind
        table: dict[frozenset, Fraction] = {}
        for key, value in (pair_energies or {}).items():
            a, b = key
            table[frozenset((a, b))] = Fraction(value)
        self._table = table
        letters = set(alphabet)
        for key in table:
            letters.update(key)
        self._alphabet = letters

    @classmethod
    def hp(cls) -> "InteractionModel":
        """Hydrophobic-polar model: H-H contacts cost -1, others 0."""
        return cls("HP", {("H", "H"): Fraction(-1)}, alphabet="HP")

    @classmethod
    def from_pairs(cls, pair_energies: Mapping, kind: str = "custom",
                   alphabet: Iterable[str] = ()) -> "InteractionModel":
        return cls(kind, pair_energies, alphabet)

    def pair_energy(self, a: str, b: str) -> Fraction:
        return self._table.get(frozenset((a, b)), Fraction(0))

    def resolves(self, label: str) -> bool:
        return label in self._alphabet

    def pairs(self) -> dict:
        return {tuple(sorted(k)): v for k, v in self._table.items()}

    def alphabet(self) -> frozenset:
        return frozenset(self._alphabet)


@dataclass(frozen=True)
class AminoSequence:
    residues: tuple[str, ...]

    def __post_init__(self):
        if len(self.residues) < 2:
            raise ValidationError("sequence must have at least two residues")

    @classmethod
    def parse(cls, text: str) -> "AminoSequence":
        return cls(tuple(text))

    @property
    def n(self) -> int:
        return len(self.residues)

    def __str__(self):
        return "".join(self.residues)


@dataclass(frozen=True)
class ExternalPotential:
    """Nonnegative penalty terms as predicates over full turn-string bits.

    Each term is a weight plus a set of (position, value) factors; the
    weight is added when every listed bit position (1-based within the
    full 2(N-1)-bit string) holds the listed value.  Weights must be
    nonnegative so every term contributes a penalty, never a reward.
    """

    terms: tuple[tuple[Fraction, tuple[tuple[int, int], ...]], ...] = ()

    @classmethod
    def from_terms(cls, items) -> "ExternalPotential":
        norm = []
        for weight, factors in items:
            w = Fraction(weight)
            if w < 0:
                raise ValidationError("external-potential weights must be >= 0")
            fs = []
            for pos, val in factors:
                if val not in (0, 1) or pos < 1:
                    raise ValidationError(
                        f"bad external-potential factor ({pos}, {val})")
                fs.append((int(pos), int(val)))
            norm.append((w, tuple(sorted(fs))))
        return cls(tuple(norm))

    def evaluate(self, bits: str) -> Fraction:
        total = Fraction(0)
        for weight, factors in self.terms:
            if all(pos <= len(bits) and int(bits[pos - 1]) == val
                   for pos, val in factors):
                total += weight
        return total

    def __bool__(self):
        return bool(self.terms)


def contact_pairs(n: int) -> list[tuple[int, int]]:
    """0-based residue pairs that can touch: non-bonded and parity-allowed.

    On the square lattice two residues i, j can only occupy adjacent sites
    when j - i is odd; j - i >= 3 excludes bonded neighbors.
    """
    return [(i, j) for i in range(n) for j in range(i + 3, n, 2)]


def fold_energy(fold: Fold, model: InteractionModel,
                sequence: AminoSequence,
                external: ExternalPotential | None = None,
                overlap_penalty=Fraction(2)) -> Fraction:
    """Ground-truth oracle for the energy of a fold.

    Sums pair energies over non-bonded nearest-neighbor contacts, adds
    `overlap_penalty` for every coinciding residue pair, and adds any
    external-potential terms (evaluated on the encoded turn bits).
    """
    pts = fold.points
    if len(pts) != sequence.n:
        raise ValidationError("fold length does not match sequence length")
    for label in sequence.residues:
        if not model.resolves(label):
            raise ValidationError(f"residue {label!r} unknown to the model")
    penalty = Fraction(overlap_penalty)
    energy = Fraction(0)
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if pts[i] == pts[j]:
                energy += penalty
    for i, j in contact_pairs(n):
        dx = abs(pts[i][0] - pts[j][0])
        dy = abs(pts[i][1] - pts[j][1])
        if dx + dy == 1:
            energy += model.pair_energy(sequence.residues[i],
                                        sequence.residues[j])
    if external:
        energy += external.evaluate(encode_fold(fold))
    return energy


def sufficient_overlap_penalty(model: InteractionModel,
                               sequence: AminoSequence) -> Fraction:
    """Smallest integer penalty guaranteed to push overlapping folds to E > 0.

    One unit more than the total attraction available to the chain: even a
    single coincidence then outweighs every possible contact.
    """
    total = Fraction(0)
    for i, j in contact_pairs(sequence.n):
        e = model.pair_energy(sequence.residues[i], sequence.residues[j])
        if e < 0:
            total -= e
    return total + 1


def turn_template(n: int, in_vacuo: bool = True) -> str:
    """Template for the full turn string: fixed bits plus 'x' free slots."""
    if n < 2:
        raise ValidationError("need at least two residues")
    length = 2 * (n - 1)
    if n == 2:
        return "01"
    prefix = "010" if in_vacuo else "01"
    return prefix + "x" * (length - len(prefix))


@dataclass(frozen=True)
class Instance:
    """A complete folding problem: sequence, interactions, constraints."""

    sequence: AminoSequence
    model: InteractionModel
    overlap_penalty: Fraction = Fraction(2)
    external: ExternalPotential = field(default_factory=ExternalPotential)
    fixed_bits: str | None = None   # template over {0,1,x}; None = in vacuo

    def template(self) -> str:
        t = self.fixed_bits
        if t is None:
            t = turn_template(self.sequence.n, in_vacuo=not self.external)
        expected = 2 * (self.sequence.n - 1)
        if len(t) != expected or set(t) - set("01x"):
            raise ValidationError(
                f"fixed_bits template {t!r} is not a {{0,1,x}} string "
                f"of length {expected}")
        return t

    def free_positions(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.template()) if c == "x")

    @property
    def arity(self) -> int:
        return len(self.free_positions())

    def bits_for(self, assignment: Sequence[int]) -> str:
        template = self.template()
        free = self.free_positions()
        if len(assignment) != len(free):
            raise ValidationError(
                f"assignment length {len(assignment)} != arity {len(free)}")
        chars = list(template)
        for pos, val in zip(free, assignment):
            if val not in (0, 1):
                raise ValidationError("assignment entries must be 0/1")
            chars[pos] = str(val)
        return "".join(chars)

    def fold_for(self, assignment: Sequence[int]) -> Fold:
        return decode_turns(self.bits_for(assignment))

    def energy_of(self, assignment: Sequence[int]) -> Fraction:
        return fold_energy(self.fold_for(assignment), self.model,
                           self.sequence, self.external, self.overlap_penalty)

    def to_dict(self) -> dict:
        def frac(v: Fraction):
            return {"num": v.numerator, "den": v.denominator}
        data = {
            "sequence": "".join(self.sequence.residues),
            "model": {
                "kind": self.model.kind,
                "pairs": [{"a": k[0], "b": k[-1], "v": frac(v)}
                          for k, v in sorted(self.model.pairs().items())],
                "alphabet": "".join(sorted(self.model.alphabet())),
            },
            "overlap_penalty": frac(self.overlap_penalty),
        }
        if self.external.terms:
            data["external"] = [
                {"weight": frac(w), "bits": [[p, v] for p, v in factors]}
                for w, factors in self.external.terms]
        if self.fixed_bits is not None:
            data["fixed_bits"] = self.fixed_bits
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "Instance":
        def frac(d):
            return Fraction(int(d["num"]), int(d["den"]))
        try:
            sequence = AminoSequence.parse(data["sequence"])
            model = InteractionModel(
                data["model"].get("kind", "custom"),
                {(p["a"], p["b"]): frac(p["v"])
                 for p in data["model"]["pairs"]},
                alphabet=data["model"].get("alphabet", ""))
            external = ExternalPotential.from_terms(
                (frac(t["weight"]), [tuple(b) for b in t["bits"]])
                for t in data.get("external", ()))
            return cls(sequence, model,
                       overlap_penalty=frac(data["overlap_penalty"])
                       if "overlap_penalty" in data else Fraction(2),
                       external=external,
                       fixed_bits=data.get("fixed_bits"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed instance data: {exc}") from exc

    def compile(self) -> MultilinearPolynomial:
        """Exact multilinear energy polynomial over the free bits."""
        return interpolate_polynomial(self.energy_of, self.arity)


@dataclass(frozen=True)
class LandscapeRow:
    assignment: str          # free bits, q_1 first
    fold: Fold
    valid: bool
    energy: Fraction


def enumerate_landscape(instance: Instance,
                        predicate: Callable[[LandscapeRow], bool] | None = None
                        ) -> list[LandscapeRow]:
    """All 2^arity assignments with fold, validity, and oracle energy.

    Sorted by energy ascending, then by the assignment read as an unsigned
    integer (q_1 = most significant bit).
    """
    arity = instance.arity
    if arity > ENUMERATION_LIMIT:
        raise CapacityError(
            f"landscape of 2^{arity} assignments exceeds the "
            f"2^{ENUMERATION_LIMIT} bound")
    rows = []
    for value in range(1 << arity):
        assignment = tuple((value >> (arity - 1 - k)) & 1 for k in range(arity))
        fold = instance.fold_for(assignment)
        row = LandscapeRow(
            assignment="".join(map(str, assignment)),
            fold=fold,
            valid=is_self_avoiding(fold),
            energy=fold_energy(fold, instance.model, instance.sequence,
                               instance.external, instance.overlap_penalty),
        )
        if predicate is None or predicate(row):
            rows.append(row)
    rows.sort(key=lambda r: (r.energy, int(r.assignment, 2) if r.assignment else 0))
    return rows


def fold_decoder(instance: Instance) -> Callable:
    """Assignment -> (turn string, self-avoiding?), for landscape labels."""
    def decode(assignment):
        fold = instance.fold_for(assignment)
        return instance.bits_for(assignment), is_self_avoiding(fold)
    return decode
