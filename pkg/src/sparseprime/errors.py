"""Exception types shared across the package."""


class SparsePrimeError(Exception):
    """Base class for all package errors."""


class DenominatorTooSmall(SparsePrimeError):
    pass


class NotInvertible(SparsePrimeError, ValueError):
    pass


class WindowTooLarge(SparsePrimeError, ValueError):
    pass


class BudgetExceeded(SparsePrimeError):
    pass


class DomainError(SparsePrimeError, ValueError):
    pass


class GridTooCoarse(SparsePrimeError, ValueError):
    pass


class BoundViolation(SparsePrimeError):
    """An explicit-constant bound check failed.

    Carries the lemma label and the inputs that broke it so reports
    can point at the offending case.
    """

    def __init__(self, lemma, p, a, h, observed, bound):
        self.lemma = lemma
        self.p = p
        self.a = a
        self.h = h
        self.observed = observed
        self.bound = bound
        super().__init__(
            f"{lemma}: p={p} a={a} h={h} observed={observed:.6g} > bound={bound:.6g}"
        )
