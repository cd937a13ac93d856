"""Exact-arithmetic toolkit for evolution algebras."""
from .canonical import CanonicalForm, NotMaximalIndexError, canonicalize, isomorphic_max_index, verify_isomorphism
from .core import DimensionMismatchError, EvolutionAlgebra, Vector, multiply, plus_power
from .dibaric import BqPair, DibaricityVerdict, SexDiffAlgebra, decide_dibaricity, dibaric_2d, is_bq_homomorphism
from .families import FamilySpec, expected_index, generate
from .powers import (
    NilpotencyVerdict,
    PowerChainReport,
    derived_powers,
    nil_check,
    nilpotent_index,
    principal_powers,
    right_powers,
)
from .scalars import GAUSSIAN, RATIONAL, BackendMismatchError, GaussianRational, complex_float
from .subspace import Subspace, span

__version__ = "0.1.0"
