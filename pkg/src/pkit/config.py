"""Tolerance configuration shared by every numeric routine.

All rank, degeneracy and inertia decisions in the package are made with a
single relative tolerance.  The library default is ``1e-9``; it can be
overridden per call (every public function takes a ``tol`` keyword) or
globally through the ``PKIT_TOL`` environment variable, which the CLI and
the library read on each call.
"""

from __future__ import annotations

import os

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "PKIT_TOL"


def default_tol() -> float:
    """Return the default relative tolerance, honoring ``PKIT_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"{TOL_ENV_VAR} must be a number, got {raw!r}") from exc
    if not value > 0.0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {value}")
    return value


def resolve_tol(tol: float | None) -> float:
    """Return ``tol`` if given, else the configured default."""
    return default_tol() if tol is None else float(tol)
