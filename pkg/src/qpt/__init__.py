"""Quivers with potential, their mutations, and the exchange graphs of
hearts and silting objects in the associated 3-Calabi-Yau categories."""

from .errors import QPTError
from .qp import QP, Arrow, Potential, Quiver, VertexSubset, mutate, premutate, reduce, restrict

__all__ = [
    "QPTError",
    "QP",
    "Arrow",
    "Potential",
    "Quiver",
    "VertexSubset",
    "mutate",
    "premutate",
    "reduce",
    "restrict",
]

__version__ = "0.1.0"
