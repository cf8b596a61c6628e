"""Stochastic probability matrices and their taxonomy.

Row convention: entry (i, j) is the conditional probability of landing on
final outcome j when starting from initial outcome i, so every row sums
to 1. Bistochastic matrices additionally have unit column sums; the
unistochastic (squared moduli of a unitary) and orthostochastic (squared
entries of a real orthogonal matrix) classes nest strictly inside the
bistochastic set for dimension >= 3.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import freeze, require_unitary
from . import tolerances as tol


def validate_stochastic(raw) -> np.ndarray:
    """Validate a square row-stochastic matrix of probabilities.

    Returns the validated matrix as a read-only float array. Raises
    ValidationError carrying the full list of violated constraints.
    Inputs are never renormalized silently.
    """
    m = np.asarray(raw, dtype=float)
    violations: list[str] = []
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or Inf entries")
    n = m.shape[0]
    for i in range(n):
        for j in range(n):
            if m[i, j] < -tol.ENTRY_RANGE_TOL:
                violations.append(f"entry ({i},{j}) = {m[i, j]:.12g} is negative")
            elif m[i, j] > 1.0 + tol.ENTRY_RANGE_TOL:
                violations.append(f"entry ({i},{j}) = {m[i, j]:.12g} exceeds 1")
    row_sums = m.sum(axis=1)
    for i in range(n):
        if abs(row_sums[i] - 1.0) > tol.ROW_SUM_TOL:
            violations.append(f"row {i} sums to {row_sums[i]:.12g}")
    if violations:
        raise ValidationError(
            f"not a stochastic matrix ({len(violations)} violation(s)): " + "; ".join(violations),
            violations,
        )
    return freeze(np.clip(m, 0.0, 1.0))


def is_bistochastic(p: np.ndarray, atol: float = tol.ROW_SUM_TOL) -> bool:
    """True iff every column of a stochastic matrix also sums to 1."""
    p = np.asarray(p, dtype=float)
    return bool(np.all(np.abs(p.sum(axis=0) - 1.0) <= atol))


def squared_moduli(u: np.ndarray) -> np.ndarray:
    """Entrywise |U_ij|^2 of a unitary; bistochastic by construction."""
    u = require_unitary(u)
    return validate_stochastic(np.abs(u) ** 2)


def random_stochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a stochastic matrix with independent flat-Dirichlet rows."""
    return validate_stochastic(rng.dirichlet(np.ones(n), size=n))


def random_bistochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a bistochastic matrix as a Dirichlet-weighted average of 2n
    random permutation matrices; covers the interior of the polytope of
    doubly stochastic matrices."""
    k = 2 * n
    weights = rng.dirichlet(np.ones(k))
    b = np.zeros((n, n))
    rows = np.arange(n)
    for w in weights:
        b[rows, rng.permutation(n)] += w
    return validate_stochastic(b)


class MatrixClass(enum.Enum):
    """Nested taxonomy; each label implies all the ones above it."""

    STOCHASTIC = "stochastic"
    BISTOCHASTIC = "bistochastic"
    UNISTOCHASTIC = "unistochastic"
    ORTHOSTOCHASTIC = "orthostochastic"

    @property
    def chain(self) -> tuple["MatrixClass", ...]:
        order = (
            MatrixClass.STOCHASTIC,
            MatrixClass.BISTOCHASTIC,
            MatrixClass.UNISTOCHASTIC,
            MatrixClass.ORTHOSTOCHASTIC,
        )
        return order[: order.index(self) + 1]


@dataclass(frozen=True)
class Classification:
    """Deepest certifiable class with the certificate that decided it.

    `inconclusive` is set when a deeper class could neither be certified
    nor refuted within the search budget, so `label` is a lower bound.
    """

    label: MatrixClass
    certificate: "Certificate | None" = None
    inconclusive: bool = False


def classify(p, opts=None) -> Classification:
    """Walk the taxonomy chain as deep as certification allows.

    The certificate attached is the one justifying the final label: a
    constructive phase matrix for (ortho/uni)stochastic labels, or the
    refutation that blocked the next level down the chain.
    """
    from .certification import CertOptions, Verdict, certify_orthostochastic, certify_unistochastic

    p = validate_stochastic(p)
    opts = opts if opts is not None else CertOptions()
    if not is_bistochastic(p):
        return Classification(MatrixClass.STOCHASTIC)
    uni = certify_unistochastic(p, opts)
    if uni.verdict is not Verdict.CERTIFIED:
        return Classification(
            MatrixClass.BISTOCHASTIC, uni, inconclusive=uni.verdict is Verdict.INCONCLUSIVE
        )
    ortho = certify_orthostochastic(p, opts)
    if ortho.verdict is Verdict.CERTIFIED:
        return Classification(MatrixClass.ORTHOSTOCHASTIC, ortho)
    return Classification(
        MatrixClass.UNISTOCHASTIC, uni, inconclusive=ortho.verdict is Verdict.INCONCLUSIVE
    )
