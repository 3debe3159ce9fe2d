"""Exception types raised across the package.

All package errors derive from :class:`PkitError` so callers can catch the
whole family at once.  The CLI maps these onto stable exit codes: parse
problems exit 1, evaluation-domain errors exit 2, violated preconditions
exit 3.
"""

from __future__ import annotations


class PkitError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(PkitError):
    """Operands have incompatible shapes."""


class NotHermitian(PkitError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class DegenerateSubspace(PkitError):
    """The Gram matrix of a subspace is singular to tolerance."""


class NotInResolventSet(PkitError):
    """The requested point is not in the resolvent set of the relation."""


class SingularValue(PkitError):
    """A function value is singular at the requested point."""


class GramProductSingular(PkitError):
    """gamma0+ gamma0 is not invertible to tolerance.

    Carries ``smallest_sv``, the offending smallest singular value.
    """

    def __init__(self, message: str, smallest_sv: float = 0.0):
        super().__init__(message)
        self.smallest_sv = smallest_sv


class SchurSingular(PkitError):
    """The inner Schur complement is singular at the requested point."""


class DegenerateMinimalSubspace(PkitError):
    """The Gram restricted to the minimal subspace is singular.

    Callers should fall back to the sampled negative-squares count.
    """


class NotEigenvalue(PkitError):
    """The requested point is not an eigenvalue of the operator."""


class NotInvariant(PkitError):
    """The subspace is not invariant under the operator, beyond tolerance."""


class NotMinimal(PkitError):
    """The operation requires a minimal realization."""


class NoGenerator(PkitError):
    """No coefficient vector regenerates the chain; flags numerical trouble."""


class ProjectorNotJSymmetric(PkitError):
    """A computed spectral projector is not symmetric in the Gram metric."""


class ProblemFormatError(PkitError):
    """A problem file failed to parse or validate; message carries context."""
