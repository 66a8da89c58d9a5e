"""Invariant Hermitian and hypercomplex geometry on nilpotent Lie algebras."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
