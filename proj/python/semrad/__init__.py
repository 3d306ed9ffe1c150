"""Spectral element solver for the pseudo-impulsive radiation problem."""

from ._semrad import *  # noqa: F401,F403
from ._semrad import __doc__  # noqa: F401
