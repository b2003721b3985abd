"""Numerical construction and audit of compact-control representations of
convex Hamiltonians via epigraph selections."""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]
