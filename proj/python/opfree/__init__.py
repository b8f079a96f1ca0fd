"""Adjoint-free operator recovery experiments (C++ core)."""

from ._opfree import *  # noqa: F401,F403
from ._opfree import Error

__all__ = [name for name in dir() if not name.startswith("_")]
