"""Lattice protein folding compiled for quantum annealing hardware.

The toolchain mirrors the experimental workflow: encode a fold as turn
bits, compile the exact energy polynomial, quadratize with AND ancillas,
convert to an Ising model, embed onto a Chimera graph, then solve
classically or integrate the anneal as a closed/open quantum system.
"""

from .errors import (CapacityError, SpinfoldError, StageError,
                     ValidationError)
from .polynomial import MultilinearPolynomial, interpolate_polynomial
from .lattice import (AminoSequence, ExternalPotential, Fold, Instance,
                      InteractionModel, LandscapeRow, contact_pairs,
                      decode_turns, encode_fold, enumerate_landscape,
                      fold_decoder, fold_energy, is_self_avoiding,
                      sufficient_overlap_penalty, turn_template)
from .quadratize import (CollapseStep, QuadratizationResult, and_penalty,
                         collapse_pair, minimum_delta, next_collapse_pair,
                         quadratize, verify_quadratization)
from .ising import (IsingModel, bits_from_spins, spins_from_bits, to_ising)
from .chimera import ChimeraGraph, build_chimera
from .embedding import (EmbeddedIsing, Embedding, EmbeddingFailure,
                        apply_embedding, embed, select_gamma, unembed,
                        validate_embedding, verify_embedding)
from .solvers import (LandscapeEntry, Sample, SampleSet,
                      default_beta_schedule, exhaustive_ground_states,
                      landscape_report, simulated_anneal)
from .units import KB_GHZ_PER_MK
from .bath import (BathParams, flux_spectral_density, spectral_density,
                   transition_rate)
from .dynamics import (AnnealSchedule, EvolutionResult, SpectrumResult,
                       build_hamiltonian, evolve_closed, evolve_open,
                       frozen_rate_matrix, gibbs_populations,
                       instantaneous_spectrum)
from .fixtures import (ALIASES, Fixture, fixture_names, get_fixture,
                       load_fixture)
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ALIASES", "AminoSequence", "AnnealSchedule", "BathParams",
    "CapacityError", "ChimeraGraph", "CollapseStep", "EmbeddedIsing",
    "EmbeddingFailure",
    "Embedding", "EvolutionResult", "ExternalPotential", "Fixture", "Fold",
    "Instance", "InteractionModel", "IsingModel", "KB_GHZ_PER_MK",
    "LandscapeEntry", "LandscapeRow", "MultilinearPolynomial",
    "PipelineConfig", "QuadratizationResult", "Sample", "SampleSet",
    "SpectrumResult", "SpinfoldError", "StageError", "ValidationError",
    "and_penalty", "apply_embedding", "bits_from_spins", "build_chimera",
    "build_hamiltonian", "collapse_pair", "contact_pairs", "decode_turns",
    "default_beta_schedule", "embed", "encode_fold", "enumerate_landscape",
    "evolve_closed", "evolve_open", "exhaustive_ground_states",
    "fixture_names", "flux_spectral_density", "fold_decoder", "fold_energy",
    "frozen_rate_matrix", "get_fixture", "gibbs_populations",
    "instantaneous_spectrum", "interpolate_polynomial", "is_self_avoiding",
    "landscape_report", "load_fixture", "minimum_delta",
    "next_collapse_pair", "quadratize", "run_pipeline", "select_gamma",
    "simulated_anneal", "spectral_density", "spins_from_bits",
    "sufficient_overlap_penalty", "to_ising", "transition_rate",
    "turn_template", "unembed", "validate_embedding", "verify_embedding",
    "verify_quadratization",
]
