"""Causality diagnostics for the two-qubit Fermi problem in a disordered medium."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
