"""Concordant (zero-discord) quantum states: correlations, degeneracy, local
basis recovery, Monte-Carlo simulation and a hidden-basis encryption protocol."""
from .errors import ConcordiaError, MalformedInput, NonUnitary, NotDiagonalInBasis, TooLarge, TranscriptMismatch
from .states import ConcordantState, DensityMatrix, LocalBasis, from_density, to_density

__version__ = "0.1.0"
