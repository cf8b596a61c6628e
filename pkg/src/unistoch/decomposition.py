"""Phased square-root parametrization of stochastic matrices.

Any stochastic matrix P admits Sigma_ij = exp(i*phi_ij) * sqrt(P_ij) and a
singular value decomposition Sigma = U R V†, from which P is recovered as
P_ij = tr(P_i' R P_j'' R) with P_i' = U† E_i U and P_j'' = V† E_j V the
conjugated basis projectors. The diagonal R carries the deviation from
unitarity: tr(R²) = n always, and R = 1 exactly when some phase choice
makes Sigma unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .linalg import basis_projector, conjugate_by, dagger, freeze, max_abs, require_nonneg_diag, require_unitary
from .stochastic import validate_stochastic
from . import tolerances as tol

TWO_PI = 2.0 * np.pi


def reduce_phases(phi) -> np.ndarray:
    """Validate a square matrix of angles, reduced into [0, 2*pi)."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValidationError(f"phase matrix must be square, got shape {phi.shape}")
    if not np.all(np.isfinite(phi)):
        raise ValidationError("phase matrix contains NaN or Inf entries")
    return freeze(np.mod(phi, TWO_PI))


def zero_phases(n: int) -> np.ndarray:
    """The all-zero phase matrix: the classical (phase-free) baseline."""
    return freeze(np.zeros((n, n)))


@dataclass(frozen=True)
class SigmaMatrix:
    """Complex matrix of phased square roots of probabilities."""

    matrix: np.ndarray
    probabilities: np.ndarray
    phases: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SvdTriple:
    """Sigma = u @ diag(r) @ v†, singular values descending."""

    u: np.ndarray
    r: np.ndarray
    v: np.ndarray

    @property
    def n(self) -> int:
        return self.r.shape[0]

    def compose(self) -> np.ndarray:
        return self.u @ np.diag(self.r) @ dagger(self.v)


@dataclass(frozen=True)
class ProjectorFrame:
    """Basis projectors conjugated by the two SVD unitaries."""

    primed: tuple[np.ndarray, ...]
    double_primed: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.primed)


def build_sigma(p, phi=None) -> SigmaMatrix:
    """Assemble Sigma_ij = exp(i*phi_ij) * sqrt(p_ij).

    With phi omitted the phases default to zero; a phase-free Sigma built
    from a genuinely quantum probability matrix can never be unitary, so
    the default is a deliberate classical baseline, not a neutral choice.
    """
    p = validate_stochastic(p)
    phi = zero_phases(p.shape[0]) if phi is None else reduce_phases(phi)
    if phi.shape != p.shape:
        raise ValidationError(f"dimension mismatch: probabilities {p.shape} vs phases {phi.shape}")
    sigma = np.sqrt(p) * np.exp(1j * phi)
    return SigmaMatrix(freeze(sigma), p, phi)


def _sigma_array(sigma) -> np.ndarray:
    if isinstance(sigma, SigmaMatrix):
        return sigma.matrix
    m = np.asarray(sigma, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def svd(sigma) -> SvdTriple:
    """Singular value decomposition with the library's ordering contract.

    Singular values come out descending; tr(R²) equals the dimension for
    any Sigma built from a stochastic matrix (it is the sum of all
    squared moduli, i.e. of all probabilities).
    """
    m = _sigma_array(sigma)
    try:
        u, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    triple = SvdTriple(require_unitary(u), require_nonneg_diag(s), require_unitary(dagger(vh)))
    recon = max_abs(triple.compose() - m)
    if recon > tol.SVD_RECONSTRUCTION_TOL:
        raise NumericalError(f"SVD reconstruction residual {recon:.3e} out of tolerance")
    return triple


def projector_frame(triple: SvdTriple) -> ProjectorFrame:
    """Conjugate the basis projectors by the two SVD unitaries."""
    n = triple.n
    primed = tuple(conjugate_by(basis_projector(n, i), triple.u) for i in range(n))
    double_primed = tuple(conjugate_by(basis_projector(n, j), triple.v) for j in range(n))
    return ProjectorFrame(primed, double_primed)


def reconstruct(frame: ProjectorFrame, r: np.ndarray, i: int, j: int) -> float:
    """Recover probability (i, j) as tr(P_i' R P_j'' R)."""
    n = frame.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"indices ({i},{j}) out of range for dimension {n}")
    rd = np.diag(np.asarray(r, dtype=float))
    value = complex(np.trace(frame.primed[i] @ rd @ frame.double_primed[j] @ rd))
    if abs(value.imag) > 1e-10:
        raise NumericalError(f"reconstructed probability has imaginary residue {value.imag:.3e}")
    return float(value.real)


def reconstruct_matrix(frame: ProjectorFrame, r: np.ndarray) -> np.ndarray:
    """Recover the full probability matrix entry by entry."""
    n = frame.n
    return np.array([[reconstruct(frame, r, i, j) for j in range(n)] for i in range(n)])


def frame_normalization_residuals(frame: ProjectorFrame, r: np.ndarray) -> np.ndarray:
    """Per-projector |tr(P_i' R²) - 1|; zero for any stochastic source."""
    r2 = np.diag(np.asarray(r, dtype=float) ** 2)
    return np.array([abs(complex(np.trace(p @ r2)).real - 1.0) for p in frame.primed])


def gleason_determinant(u: np.ndarray) -> float:
    """Determinant of the bistochastic matrix of squared moduli of U.

    Vanishes whenever the SVD that produced U has R != 1: the diagonal of
    R² - 1 is then a nontrivial kernel vector of that squared-moduli
    matrix, which forces it to be singular.
    """
    u = require_unitary(u)
    return float(np.linalg.det(np.abs(u) ** 2))
