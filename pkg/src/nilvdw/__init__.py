"""Shift/offset nilpotent groups on Z[x]^m, nilprogressions, and
restricted van der Waerden certification at desk scale."""

from .nilgroup import (
    CoordAffine,
    GroupConfig,
    GroupElement,
    apply,
    commutator,
    compose,
    generator,
    generators,
    identity,
    inverse,
    nilpotency_class,
    verify_class_at_most,
)
from .nilprogression import ProgressionSpec, build, find_in, is_nondegenerate, verify_absence
from .poly import Polynomial, monomial, poly_add, poly_eval_int, poly_shift
from .ramsey import GroundSet, PatternFamily, ap_patterns, certify, certify_restricted
from .words import Word, WordConvention, count_words, enumerate_words, evaluate_word

__version__ = "0.1.0"
