"""
Exact derived p-completion engine
"""
from .abelian import Atom, TameGroup, derived_completion, parse_group
from .complexes import ChainMap, FreeComplex, GradedTame, complete, tower_oracle
from .errors import (
    CompletionError, InvalidComparison, InvalidComplex, NoStabilization, NotTame,
    ParseError, UnresolvedExtension, VerificationFailure,
)
from .intlinalg import IntMatrix, smith_normal_form
from .presheaf import FinitePoset, SpectralPresheaf
from .tstructure import Comparison, FormalSpectrum, pi_p
from .unstable import FormalSpace, complete_space

__all__ = [
    'Atom', 'TameGroup', 'derived_completion', 'parse_group',
    'ChainMap', 'FreeComplex', 'GradedTame', 'complete', 'tower_oracle',
    'CompletionError', 'InvalidComparison', 'InvalidComplex', 'NoStabilization', 'NotTame',
    'ParseError', 'UnresolvedExtension', 'VerificationFailure',
    'IntMatrix', 'smith_normal_form',
    'FinitePoset', 'SpectralPresheaf',
    'Comparison', 'FormalSpectrum', 'pi_p',
    'FormalSpace', 'complete_space',
]
