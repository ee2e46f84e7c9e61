"""Bundled reference fixtures: benchmark instances with known tables.

Seven named fixtures cover two chains: "PSVKMA" under a four-pair contact
model (full reduced search space plus four restricted variants exp1-exp4)
and "HPPH" under the hydrophobic-polar model (in vacuo exp5, and exp6 with
an attachment potential on the first two free bonds).  Each fixture ships
its reference coefficient table in two variants: "verbatim" is the table
as originally transcribed, including any known misprints; "sanitized" has
the documented corrections applied.  Tests and the pipeline default to
the sanitized variant and record the choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .embedding import Embedding
from .errors import ValidationError
from .ising import IsingModel
from .lattice import (AminoSequence, ExternalPotential, Instance,
                      InteractionModel)
from .polynomial import MultilinearPolynomial


def _poly(arity: int, *terms) -> MultilinearPolynomial:
    # each term: (coefficient, *variable indices)
    return MultilinearPolynomial.from_terms(
        arity, [(t[1:], Fraction(t[0])) for t in terms])


def _fr(num, den=1) -> Fraction:
    return Fraction(num, den)


# -- interaction models -----------------------------------------------------

PSVKMA_PAIR_ENERGIES = {
    ("P", "K"): Fraction(-1),
    ("S", "M"): Fraction(-3),
    ("V", "A"): Fraction(-4),
    ("P", "A"): Fraction(-2),
}


def psvkma_model() -> InteractionModel:
    return InteractionModel.from_pairs(PSVKMA_PAIR_ENERGIES, kind="MJ",
                                       alphabet="PSVKMA")


# Total available attraction is 1+3+4+2 = 10, so 11 per coincidence pushes
# every overlapping fold above zero regardless of its contacts.
PSVKMA_OVERLAP_PENALTY = Fraction(11)
HPPH_OVERLAP_PENALTY = Fraction(2)


def _psvkma_instance(fixed_bits: str) -> Instance:
    return Instance(AminoSequence.parse("PSVKMA"), psvkma_model(),
                    PSVKMA_OVERLAP_PENALTY, ExternalPotential(),
                    fixed_bits)


def _hpph_instance() -> Instance:
    return Instance(AminoSequence.parse("HPPH"), InteractionModel.hp(),
                    HPPH_OVERLAP_PENALTY, ExternalPotential(), "010xxx")


def _chaperone_instance() -> Instance:
    # Binding penalties on the two free bonds: 4 for the second bond going
    # down or right, plus 4 more for the down-right / right-down pairs,
    # steering the chain away from the occupied half-plane.
    attachment = ExternalPotential.from_terms([
        (Fraction(4), ((3, 0), (4, 0))),
        (Fraction(4), ((3, 0), (4, 1))),
        (Fraction(4), ((3, 0), (4, 0), (5, 0), (6, 1))),
        (Fraction(4), ((3, 0), (4, 1), (5, 0), (6, 0))),
    ])
    return Instance(AminoSequence.parse("HPPH"), InteractionModel.hp(),
                    HPPH_OVERLAP_PENALTY, attachment, "01xxxx")


# -- reference coefficient tables -------------------------------------------

POLY_EXP3 = _poly(
    3,
    (-1,), (-4, 3), (9, 1, 3), (9, 2, 3), (-16, 1, 2, 3))

POLY_EXP2 = _poly(
    5,
    (4, 1, 2), (15, 2, 3), (-15, 1, 2, 3), (-4, 1, 4), (2, 1, 2, 4),
    (7, 3, 4), (4, 1, 3, 4), (-20, 2, 3, 4), (9, 1, 2, 3, 4),
    (7, 2, 5), (4, 1, 2, 5), (-18, 2, 3, 5), (7, 4, 5), (4, 1, 4, 5),
    (-20, 2, 4, 5), (9, 1, 2, 4, 5), (-18, 3, 4, 5), (53, 2, 3, 4, 5),
    (-33, 1, 2, 3, 4, 5))

POLY_EXP1 = _poly(
    5,
    (-3, 2), (7, 1, 2), (18, 2, 3), (-15, 1, 2, 3), (-4, 1, 4),
    (-2, 2, 4), (15, 1, 2, 4), (7, 3, 4), (4, 1, 3, 4), (-7, 2, 3, 4),
    (-24, 1, 2, 3, 4), (7, 2, 5), (4, 1, 2, 5), (-18, 2, 3, 5),
    (7, 4, 5), (4, 1, 4, 5), (-7, 2, 4, 5), (-24, 1, 2, 4, 5),
    (-18, 3, 4, 5), (20, 2, 3, 4, 5), (29, 1, 2, 3, 4, 5))

POLY_EXP4 = _poly(
    6,
    (-1, 1), (15, 1, 2), (4, 2, 3), (-6, 1, 2, 3), (4, 1, 4),
    (-15, 1, 2, 4), (15, 3, 4), (-6, 1, 3, 4), (-15, 2, 3, 4),
    (28, 1, 2, 3, 4), (-4, 2, 5), (2, 1, 2, 5), (2, 2, 3, 5),
    (4, 1, 2, 3, 5), (7, 4, 5), (7, 5, 6), (2, 1, 4, 5), (4, 2, 4, 5),
    (9, 1, 2, 4, 5), (-20, 3, 4, 5), (4, 1, 3, 4, 5), (9, 2, 3, 4, 5),
    (-37, 1, 2, 3, 4, 5), (-4, 1, 6), (4, 1, 2, 6), (7, 3, 6),
    (2, 1, 3, 6), (4, 2, 3, 6), (9, 1, 2, 3, 6), (4, 1, 4, 6),
    (-18, 3, 4, 6), (9, 1, 3, 4, 6), (-33, 1, 2, 3, 4, 6),
    (2, 1, 5, 6), (4, 2, 5, 6), (-20, 3, 5, 6), (9, 1, 2, 5, 6),
    (4, 1, 3, 5, 6), (9, 2, 3, 5, 6), (-37, 1, 2, 3, 5, 6),
    (-18, 4, 5, 6), (9, 1, 4, 5, 6), (-33, 1, 2, 4, 5, 6),
    (53, 3, 4, 5, 6), (-37, 1, 3, 4, 5, 6), (-33, 2, 3, 4, 5, 6),
    (99, 1, 2, 3, 4, 5, 6))

POLY_HPPH_REDUCED = _poly(
    3,
    (-1, 2), (2, 1, 2), (2, 2, 3), (-3, 1, 2, 3))

POLY_HPPH_FULL = _poly(
    4,
    (1, 1), (-1, 3), (1, 1, 3), (2, 2, 3), (-4, 1, 2, 3), (2, 1, 4),
    (-3, 1, 2, 4), (2, 3, 4), (-4, 1, 3, 4), (-3, 2, 3, 4),
    (7, 1, 2, 3, 4))

POLY_CHAPERONE_QUARTIC = _poly(
    4,
    (4,), (-3, 1), (4, 2), (-4, 1, 2), (-1, 3), (1, 1, 3),
    (-2, 2, 3), (4, 4), (-2, 1, 4), (-8, 2, 4), (5, 1, 2, 4),
    (-2, 3, 4), (5, 2, 3, 4), (-1, 1, 2, 3, 4))

POLY_CHAPERONE_QUADRATIC = _poly(
    6,
    (4,), (-3, 1), (4, 2), (6, 1, 2), (-1, 3), (1, 1, 3),
    (-2, 2, 3), (4, 4), (-2, 1, 4), (-8, 2, 4), (4, 3, 4),
    (14, 5), (-12, 1, 5), (-12, 2, 5), (5, 4, 5), (10, 6),
    (5, 2, 6), (-8, 3, 6), (-8, 4, 6), (-1, 5, 6))

# The seven-variable table as transcribed.  Repeated indices inside a
# printed monomial (e.g. a squared variable) collapse by idempotence when
# the table is built, and same-monomial coefficients merge by addition.
POLY_PSVKMA_VERBATIM = _poly(
    7,
    (-1, 2), (8, 1, 2), (15, 2, 3), (-18, 1, 2, 3), (-3, 1, 4),
    (12, 1, 2, 4), (4, 3, 4), (3, 1, 3, 4), (-6, 2, 3, 4), (-12, 1, 2, 3, 4),
    (4, 2, 5), (3, 1, 2, 5), (-15, 2, 3, 5), (15, 4, 5), (3, 1, 4, 5),
    (-6, 2, 4, 5), (-12, 1, 2, 4, 5), (-15, 3, 4, 5), (28, 2, 3, 4, 5),
    (-2, 1, 2, 6), (-4, 3, 6), (2, 2, 3, 6), (13, 1, 2, 3, 6), (-2, 1, 4, 6),
    (4, 1, 2, 4, 6), (2, 3, 4, 6), (13, 1, 3, 4, 6), (4, 2, 3, 4, 6),
    (-37, 1, 2, 3, 4, 6), (7, 5, 6), (2, 2, 5, 6), (13, 1, 2, 5, 6),
    (4, 3, 5, 6), (9, 2, 3, 5, 6), (-33, 1, 2, 3, 5, 6), (-20, 4, 5, 6),
    (13, 1, 4, 5, 6), (4, 2, 4, 5, 6), (-37, 1, 2, 4, 5, 6), (9, 3, 4, 5, 6),
    (-33, 1, 3, 4, 5, 6), (-37, 2, 3, 4, 5, 6), (99, 1, 2, 3, 4, 5, 6),
    (-4, 2, 7), (4, 2, 3, 7), (7, 4, 7), (2, 2, 4, 7), (13, 1, 2, 4, 7),
    (4, 3, 4, 7), (9, 2, 3, 4, 7), (-33, 1, 2, 3, 4, 7), (4, 2, 5, 7),
    (-18, 4, 5, 7), (9, 2, 4, 5, 7), (-33, 1, 2, 4, 5, 7),
    (-33, 2, 3, 4, 5, 7), (62, 1, 2, 3, 4, 5, 7), (7, 6, 7), (2, 2, 6, 7),
    (13, 1, 2, 6, 7), (4, 3, 6, 7), (9, 2, 3, 6, 7), (-33, 1, 2, 3, 6, 7),
    (-20, 4, 6, 7), (13, 1, 4, 6, 7), (4, 2, 4, 6, 7), (-37, 1, 2, 4, 6, 7),
    (9, 3, 4, 6, 7), (-33, 1, 3, 4, 6, 7), (-37, 2, 3, 4, 6, 7),
    (99, 1, 2, 3, 4, 6, 7), (-18, 5, 6, 7), (9, 2, 5, 6, 7),
    (-33, 1, 2, 5, 6, 7), (-33, 2, 3, 5, 6, 7), (62, 1, 2, 3, 5, 6, 7),
    (53, 4, 5, 6, 7),
    (-33, 1, 4, 5, 7),          # transcribed with a squared last index
    (-37, 2, 4, 6, 7),          # transcribed with a squared middle index
    (99, 5, 2, 4, 6, 7),        # transcribed with one index duplicated
    (-33, 3, 1, 5, 6, 7),
    (62, 1, 4, 5, 6, 7),        # transcribed with a squared second index
    (99, 2, 3, 4, 5, 6, 7),
    (-190, 1, 2, 3, 4, 5, 6, 7))

# Corrections to the seven-variable table: each row moves one coefficient
# from the monomial it was transcribed on to the monomial the lattice
# energies actually require (confirmed by exact re-derivation from the
# instance and by consistency with the restricted tables above).
PSVKMA_CORRECTIONS = (
    {"coefficient": _fr(-33), "printed": (1, 4, 5, 7),
     "corrected": (1, 4, 5, 6, 7)},
    {"coefficient": _fr(-37), "printed": (2, 4, 6, 7),
     "corrected": (2, 4, 5, 6, 7)},
    {"coefficient": _fr(99), "printed": (2, 4, 5, 6, 7),
     "corrected": (1, 2, 4, 5, 6, 7)},
    {"coefficient": _fr(-33), "printed": (1, 3, 5, 6, 7),
     "corrected": (3, 4, 5, 6, 7)},
    {"coefficient": _fr(62), "printed": (1, 4, 5, 6, 7),
     "corrected": (1, 3, 4, 5, 6, 7)},
)


def _apply_corrections(poly: MultilinearPolynomial,
                       corrections) -> MultilinearPolynomial:
    delta = []
    for row in corrections:
        c = row["coefficient"]
        delta.append((row["printed"], -c))
        delta.append((row["corrected"], c))
    return poly + MultilinearPolynomial.from_terms(poly.arity, delta)


POLY_PSVKMA_SANITIZED = _apply_corrections(POLY_PSVKMA_VERBATIM,
                                           PSVKMA_CORRECTIONS)


# -- reference reductions and spin forms -------------------------------------

# Reduction plan for the attachment-potential quartic: collapse (1,2) and
# then (3,4) with fixed penalty weights.
CHAPERONE_PLAN = (((1, 2), Fraction(6)), ((3, 4), Fraction(4)))

# Reduction used with the three-variable restricted table: collapse (2,3)
# and let the penalty weight be chosen automatically.
EXP3_PLAN = (((2, 3), None),)

# Exact spin form of the reduced exp3 model (unnormalized: scale 1).
EXP3_SPIN_REFERENCE = IsingModel(
    4,
    (_fr(7, 4), _fr(9, 4), _fr(2), _fr(-5)),
    {(1, 3): _fr(9, 4), (2, 3): _fr(9, 4), (1, 4): _fr(-4),
     (2, 4): _fr(-9, 2), (3, 4): _fr(-9, 2)},
    offset=_fr(13, 2),
    scale=_fr(1),
)

# Five-qubit hardware form of exp3: variable 4 duplicated onto qubits
# 4 and 5 with the maximum ferromagnetic coupling (-1 after the /36
# normalization).  h4 = -20/36 is split (-2, -18)/36 between the copies and
# the couplings to 1, 2 land on qubit 4 while 3 lands on qubit 5.  The
# offset absorbs the chain coupler's contribution on consistent states.
EXP3_FIVE_QUBIT_ISING = IsingModel(
    5,
    (_fr(7, 36), _fr(1, 4), _fr(2, 9), _fr(-1, 18), _fr(-1, 2)),
    {(1, 3): _fr(1, 4), (2, 3): _fr(1, 4), (1, 4): _fr(-4, 9),
     (2, 4): _fr(-1, 2), (3, 5): _fr(-1, 2), (4, 5): _fr(-1)},
    offset=_fr(31, 2),
    scale=_fr(9),
)

# Normalized spin form of the quadratic chaperone model.
CHAPERONE_LOGICAL_ISING = IsingModel(
    6,
    (_fr(1), _fr(3, 13), _fr(7, 13), _fr(1, 13), _fr(-8, 13), _fr(-8, 13)),
    {(1, 2): _fr(6, 13), (1, 3): _fr(1, 13), (2, 3): _fr(-2, 13),
     (1, 4): _fr(-2, 13), (2, 4): _fr(-8, 13), (3, 4): _fr(4, 13),
     (1, 5): _fr(-12, 13), (2, 5): _fr(-12, 13), (4, 5): _fr(5, 13),
     (2, 6): _fr(5, 13), (3, 6): _fr(-8, 13), (4, 6): _fr(-8, 13),
     (5, 6): _fr(-1, 13)},
    offset=_fr(10),
    scale=_fr(13, 4),
)

# Hand-made eight-qubit layout inside one unit cell: variables 2 and 4
# (the two with more than four neighbors once chains are counted) are
# duplicated across the cell's two partitions.  The coupler pinned for
# logical edge (2,4) is the one the reference layout uses; the other
# twelve assignments are forced.
CHAPERONE_EMBEDDING = Embedding(
    chains={1: (0,), 2: (1, 4), 3: (5,), 4: (2, 6), 5: (7,), 6: (3,)},
    gamma={2: Fraction(1), 4: Fraction(1)},
    edge_assign={
        (1, 2): (0, 4), (1, 3): (0, 5), (2, 3): (1, 5), (1, 4): (0, 6),
        (2, 4): (2, 4), (3, 4): (2, 5), (1, 5): (0, 7), (2, 5): (1, 7),
        (4, 5): (2, 7), (2, 6): (3, 4), (3, 6): (3, 5), (4, 6): (3, 6),
        (5, 6): (3, 7)},
)

# Physical coefficients of the embedded chaperone model (fields on chain
# roots, couplers per the layout above, chain couplers -1 at gamma 1).
CHAPERONE_EMBEDDED_H = {
    0: _fr(1), 1: _fr(3, 13), 5: _fr(7, 13), 2: _fr(1, 13),
    7: _fr(-8, 13), 3: _fr(-8, 13),
}
CHAPERONE_EMBEDDED_J = {
    (0, 4): _fr(6, 13), (0, 5): _fr(1, 13), (1, 5): _fr(-2, 13),
    (0, 6): _fr(-2, 13), (2, 4): _fr(-8, 13), (2, 5): _fr(4, 13),
    (0, 7): _fr(-12, 13), (1, 7): _fr(-12, 13), (2, 7): _fr(5, 13),
    (3, 4): _fr(5, 13), (3, 5): _fr(-8, 13), (3, 6): _fr(-8, 13),
    (3, 7): _fr(-1, 13),
    (1, 4): _fr(-1), (2, 6): _fr(-1),
}


# -- registry ----------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    name: str
    summary: str
    instance: Instance
    polynomials: Mapping[str, MultilinearPolynomial]
    plan: tuple | None = None
    embedding: Embedding | None = None
    reference: Mapping[str, object] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def sanitized(self) -> MultilinearPolynomial:
        return self.polynomials["sanitized"]

    @property
    def verbatim(self) -> MultilinearPolynomial:
        return self.polynomials["verbatim"]


def _make_registry() -> dict[str, Fixture]:
    reg = {}

    reg["psvkma"] = Fixture(
        name="psvkma",
        summary="PSVKMA, full reduced search space (7 free bits)",
        instance=_psvkma_instance("010xxxxxxx"),
        polynomials={"verbatim": POLY_PSVKMA_VERBATIM,
                     "sanitized": POLY_PSVKMA_SANITIZED},
        reference={"stated_configuration_count": 40},
        notes=(
            "The verbatim table contains five misprinted monomials "
            "(duplicated indices); PSVKMA_CORRECTIONS lists the moves "
            "that produce the sanitized table.",
            "The stated configuration count (40) differs from the "
            "exhaustive self-avoiding count in this encoding; the "
            "landscape report prints both.",
        ),
    )

    reg["exp1"] = Fixture(
        name="exp1",
        summary="PSVKMA with bonds 1-2 fixed right-right, bond 3 in "
                "{down, right} (5 free bits)",
        instance=_psvkma_instance("01010xxxxx"),
        polynomials={"verbatim": POLY_EXP1, "sanitized": POLY_EXP1},
        reference={"restriction_of": ("psvkma", {1: 1, 2: 0})},
    )

    reg["exp2"] = Fixture(
        name="exp2",
        summary="PSVKMA with bonds 1-2 fixed right-down, bond 3 in "
                "{down, right} (5 free bits)",
        instance=_psvkma_instance("01000xxxxx"),
        polynomials={"verbatim": POLY_EXP2, "sanitized": POLY_EXP2},
        reference={"restriction_of": ("exp4", {1: 0})},
    )

    reg["exp3"] = Fixture(
        name="exp3",
        summary="PSVKMA with bonds 1-3 fixed right-down-left, bond 4 in "
                "{down, left} (3 free bits)",
        instance=_psvkma_instance("010010x0xx"),
        polynomials={"verbatim": POLY_EXP3, "sanitized": POLY_EXP3},
        plan=EXP3_PLAN,
        reference={"restriction_of": ("exp4", {1: 1, 2: 0, 4: 0}),
                   "spin_reference": EXP3_SPIN_REFERENCE,
                   "five_qubit_ising": EXP3_FIVE_QUBIT_ISING,
                   "auto_delta": 9},
    )

    reg["exp4"] = Fixture(
        name="exp4",
        summary="PSVKMA with bonds 1-2 fixed right-down (6 free bits)",
        instance=_psvkma_instance("0100xxxxxx"),
        polynomials={"verbatim": POLY_EXP4, "sanitized": POLY_EXP4},
        reference={"restriction_of": ("psvkma", {1: 0})},
    )

    reg["exp5"] = Fixture(
        name="exp5",
        summary="HPPH in vacuo, reduced space (3 free bits)",
        instance=_hpph_instance(),
        polynomials={"verbatim": POLY_HPPH_REDUCED,
                     "sanitized": POLY_HPPH_REDUCED,
                     "full_space": POLY_HPPH_FULL},
        reference={"ground_energy": Fraction(-1)},
    )

    reg["exp6"] = Fixture(
        name="exp6",
        summary="HPPH next to an attachment potential (4 free bits, "
                "quartic)",
        instance=_chaperone_instance(),
        polynomials={"verbatim": POLY_CHAPERONE_QUARTIC,
                     "sanitized": POLY_CHAPERONE_QUARTIC,
                     "quadratic": POLY_CHAPERONE_QUADRATIC},
        plan=CHAPERONE_PLAN,
        embedding=CHAPERONE_EMBEDDING,
        reference={"logical_ising": CHAPERONE_LOGICAL_ISING,
                   "embedded_h": CHAPERONE_EMBEDDED_H,
                   "embedded_J": CHAPERONE_EMBEDDED_J,
                   "ground_energy": Fraction(-1)},
        notes=(
            "The layout duplicates variables 2 and 4 across the unit "
            "cell's partitions; only logical edge (2,4) has two possible "
            "couplers, and the bundled assignment pins the one the "
            "reference layout uses (the automatic rule would pick the "
            "other).",
        ),
    )

    return reg


_REGISTRY = _make_registry()

ALIASES = {"hpph": "exp5", "chaperone": "exp6"}


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_fixture(name: str) -> Fixture:
    key = ALIASES.get(name, name)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise ValidationError(
            f"unknown fixture {name!r}; available: {', '.join(fixture_names())}"
        ) from None


def load_fixture(name: str, variant: str = "sanitized"):
    """Bundled artifact by name: a polynomial variant or a reference model.

    variant is "verbatim"/"sanitized" for the printed polynomial, or the
    name of a reference entry (e.g. "five_qubit_ising", "logical_ising")
    for the published spin models.
    """
    fx = get_fixture(name)
    if variant in fx.polynomials:
        return fx.polynomials[variant]
    if variant in fx.reference:
        return fx.reference[variant]
    options = sorted(set(fx.polynomials) | set(fx.reference))
    raise ValidationError(
        f"fixture {fx.name} has no {variant!r}; available: {', '.join(options)}")
