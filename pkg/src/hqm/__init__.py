"""Quaternionic quantum mechanics over a real Hilbert space."""

from .quat import I, J, K, ONE, ImaginaryUnit, Quaternion, as_matrix4, conj, exp_pure, mul
from .rhilbert import BarredOp, QMatrix, QSpinor, apply_barred, barred_commutator, expectation, real_inner
from .spin import Case1State, Case2State, LarmorConfig
from .waves import GridFunction1D, LambdaSpec, SphereGrid, SphericalHarmonicSpec

__version__ = "0.1.0"

__all__ = [
    "I",
    "J",
    "K",
    "ONE",
    "BarredOp",
    "Case1State",
    "Case2State",
    "GridFunction1D",
    "ImaginaryUnit",
    "LambdaSpec",
    "LarmorConfig",
    "QMatrix",
    "QSpinor",
    "Quaternion",
    "SphereGrid",
    "SphericalHarmonicSpec",
    "apply_barred",
    "as_matrix4",
    "barred_commutator",
    "conj",
    "exp_pure",
    "expectation",
    "mul",
    "real_inner",
]
