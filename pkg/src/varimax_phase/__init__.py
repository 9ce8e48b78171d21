"""Centered Varimax rotation recovery and its sample-size phase transition."""

from .adversarial import AdversarialWitness, build_witness, expected_objective, witness_beats_truth
from .datagen import Instance, KurtosisLaw, make_instance, sample_law, sample_moments
from .errors import (DegenerateInputError, DimensionError, LayoutError, ParameterError,
                     SingularityError, SizeError, VarimaxPhaseError)
from .harness import SweepConfig, TrialRecord, run_sweep, run_trial, summarize
from .linalg import Rotation, SignedPermutation, dense, haar_rotation, polar_project, qr_decompose
from .metrics import (DistanceResult, best_signed_permutation, brute_force_signed_permutation,
                      signed_permutation_gap, rotation_distance)
from .varimax import VarimaxSolution, directional_objective, objective, optimize

__version__ = "0.1.0"

__all__ = [
    "AdversarialWitness", "DegenerateInputError", "DimensionError", "DistanceResult", "Instance",
    "KurtosisLaw", "LayoutError", "ParameterError", "Rotation", "SignedPermutation",
    "SingularityError", "SizeError", "SweepConfig", "TrialRecord", "VarimaxPhaseError",
    "VarimaxSolution", "best_signed_permutation", "brute_force_signed_permutation",
    "build_witness", "dense", "directional_objective", "expected_objective", "haar_rotation",
    "signed_permutation_gap", "make_instance", "objective", "optimize", "polar_project", "qr_decompose",
    "rotation_distance", "run_sweep", "run_trial", "sample_law", "sample_moments", "summarize",
    "witness_beats_truth",
]
