"""Complex-matrix helpers, projector algebra and Haar-random sampling.

All functions are pure; validated arrays are returned read-only so they can
be shared freely across threads. Random sampling always takes an explicit
seed or Generator, never global state.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from . import tolerances as tol


def freeze(a: np.ndarray) -> np.ndarray:
    """Return `a` as a read-only float/complex array (copies if needed)."""
    out = np.array(a)
    out.setflags(write=False)
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def max_abs(m: np.ndarray) -> float:
    """Entrywise max-norm."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def require_square(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"{what} must be square and non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{what} contains NaN or Inf entries")
    return m


def unitarity_deviation(m: np.ndarray) -> float:
    """Max-norm of M†M - I."""
    n = m.shape[0]
    return max_abs(dagger(m) @ m - np.eye(n))


def require_unitary(m: np.ndarray, atol: float = tol.UNITARITY_TOL) -> np.ndarray:
    """Validate unitarity in max-norm and return the matrix read-only."""
    m = require_square(np.asarray(m, dtype=complex), "unitary")
    dev = unitarity_deviation(m)
    if dev > atol:
        raise ValidationError(f"matrix is not unitary: max|M†M - I| = {dev:.3e} > {atol:.0e}")
    return freeze(m)


def require_projector(p: np.ndarray) -> np.ndarray:
    """Validate a rank-one Hermitian projector: P = P†, P² = P, tr P = 1."""
    p = require_square(np.asarray(p, dtype=complex), "projector")
    problems = []
    herm = max_abs(p - dagger(p))
    if herm > tol.HERMITICITY_TOL:
        problems.append(f"not Hermitian: max|P - P†| = {herm:.3e}")
    idem = max_abs(p @ p - p)
    if idem > tol.IDEMPOTENCE_TOL:
        problems.append(f"not idempotent: max|P² - P| = {idem:.3e}")
    tr = complex(np.trace(p))
    if abs(tr - 1.0) > tol.TRACE_ONE_TOL:
        problems.append(f"not rank one: trace = {tr:.12g}")
    if problems:
        raise ValidationError("invalid projector: " + "; ".join(problems), problems)
    return freeze(p)


def require_nonneg_diag(values: np.ndarray) -> np.ndarray:
    """Validate a vector of nonnegative reals (diagonal of R)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or not np.all(np.isfinite(values)):
        raise ValidationError("diagonal values must be a finite 1-d real array")
    if np.any(values < 0):
        raise ValidationError(f"diagonal values must be nonnegative, min = {values.min():.3e}")
    return freeze(values)


def basis_projector(n: int, i: int) -> np.ndarray:
    """Diagonal projector with a single 1 at position (i, i)."""
    if not 0 <= i < n:
        raise ValidationError(f"projector index {i} out of range for dimension {n}")
    p = np.zeros((n, n), dtype=complex)
    p[i, i] = 1.0
    return freeze(p)


def haar_random_unitary(n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Draw an n x n unitary from the Haar measure.

    Complex Ginibre matrix, QR decomposition, then each column of Q is
    rescaled by the unit phase of the matching R diagonal entry; this makes
    the distribution exactly Haar rather than QR-convention dependent.
    Deterministic for a fixed integer seed.
    """
    if n < 1:
        raise ValidationError(f"dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return freeze(q)


def conjugate_by(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Conjugate a projector by a unitary: U† P U."""
    p = np.asarray(p, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if p.shape != u.shape:
        raise ValidationError(f"dimension mismatch: projector {p.shape} vs unitary {u.shape}")
    out = dagger(u) @ p @ u
    # re-symmetrize to kill round-off drift before re-validation
    out = 0.5 * (out + dagger(out))
    return require_projector(out)
