"""Bayesian variable selection with the generalized g-prior."""

from ._gbf import GbfError, __version__, estimate, scores, select, simulate

__all__ = ["select", "scores", "estimate", "simulate", "GbfError", "__version__"]
