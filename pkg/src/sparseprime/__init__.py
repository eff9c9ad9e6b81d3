"""Finite computations around primes of the forms a^2+(b^2+1)^2 and a^2+(c^3+d^3)^2."""

from . import curves, gauss, harmonic, ntheory, sequences, sieve
from .errors import (
    BoundViolation,
    BudgetExceeded,
    DenominatorTooSmall,
    DomainError,
    GridTooCoarse,
    NotInvertible,
    SparsePrimeError,
    WindowTooLarge,
)

__all__ = [
    "curves",
    "gauss",
    "harmonic",
    "ntheory",
    "sequences",
    "sieve",
    "BoundViolation",
    "BudgetExceeded",
    "DenominatorTooSmall",
    "DomainError",
    "GridTooCoarse",
    "NotInvertible",
    "SparsePrimeError",
    "WindowTooLarge",
]

__version__ = "0.1.0"
