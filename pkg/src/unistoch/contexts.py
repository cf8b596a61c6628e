"""Measurement contexts, modalities, and the trace probability rule.

A context is an ordered family of N mutually orthogonal rank-one
projectors resolving the identity; a modality is one slot of one context.
The conditional probability between two modalities is tr(P Q), which
depends only on the two projectors, never on the rest of either context.
Contexts built here are value objects: identity of a modality across
contexts is decided by projector proximity, not by labels.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import dagger, freeze, max_abs, require_projector, haar_random_unitary
from .stochastic import validate_stochastic
from . import tolerances as tol


@dataclass(frozen=True)
class Context:
    """Ordered orthogonal rank-one projector family summing to identity."""

    id: str
    projectors: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.projectors)


@dataclass(frozen=True)
class Modality:
    """One outcome slot of a context, carrying its projector."""

    context_id: str
    index: int
    projector: np.ndarray


@dataclass(frozen=True)
class ContextTransform:
    """Unitary overlap matrix between the rays of two contexts.

    Gauge: both index sets are re-phased by half the phase of the raw
    diagonal overlaps, which makes every diagonal entry real nonnegative
    and keeps the reverse transform exactly the conjugate transpose.
    """

    s: np.ndarray
    from_context: str
    to_context: str


def _content_id(projectors) -> str:
    digest = hashlib.sha256()
    for p in projectors:
        digest.update(np.ascontiguousarray(p).tobytes())
    return digest.hexdigest()[:12]


def ray_of(projector: np.ndarray) -> np.ndarray:
    """Unit eigenvector of a rank-one projector.

    Taken as the projector column of maximal norm (cheap and exact for
    rank one), with the phase gauged so the first component of nonneg-
    ligible magnitude is real positive.
    """
    p = np.asarray(projector, dtype=complex)
    norms = np.linalg.norm(p, axis=0)
    v = p[:, int(np.argmax(norms))]
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ValidationError("projector has no nonzero column; not rank one")
    v = v / nv
    anchors = np.where(np.abs(v) > 1e-9)[0]
    v = v * np.exp(-1j * np.angle(v[anchors[0]]))
    return freeze(v)


def make_context(source, labels=None, context_id: str | None = None) -> Context:
    """Build and validate a context.

    `source` is either an explicit sequence of N rank-one projectors or a
    unitary matrix whose columns define the rays (projector i is the
    outer product of column i with itself).
    """
    if isinstance(source, np.ndarray) and source.ndim == 2:
        u = np.asarray(source, dtype=complex)
        projectors = [np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])]
    else:
        projectors = [np.asarray(p, dtype=complex) for p in source]
    if not projectors:
        raise ValidationError("a context needs at least one projector")
    n = projectors[0].shape[0]
    if len(projectors) != n:
        raise ValidationError(
            f"a dimension-{n} context needs exactly {n} projectors, got {len(projectors)}"
        )
    projectors = tuple(require_projector(p) for p in projectors)
    for i in range(n):
        for j in range(i + 1, n):
            cross = max_abs(projectors[i] @ projectors[j])
            if cross > tol.ORTHOGONALITY_TOL:
                raise ValidationError(
                    f"projectors {i} and {j} are not orthogonal: max|P_i P_j| = {cross:.3e}"
                )
    total = sum(projectors)
    if max_abs(total - np.eye(n)) > tol.ORTHOGONALITY_TOL:
        raise ValidationError("projectors do not sum to the identity")
    if labels is None:
        labels = tuple(f"m{i}" for i in range(n))
    else:
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise ValidationError(f"expected {n} labels, got {len(labels)}")
    cid = context_id if context_id is not None else _content_id(projectors)
    return Context(cid, projectors, labels)


def random_context(n: int, seed: int | np.random.Generator, context_id: str | None = None) -> Context:
    """Context from the columns of a Haar-random unitary."""
    return make_context(np.asarray(haar_random_unitary(n, seed)), context_id=context_id)


def computational_context(n: int, context_id: str = "computational") -> Context:
    return make_context(np.eye(n, dtype=complex), context_id=context_id)


def modality(context: Context, index: int) -> Modality:
    if not 0 <= index < context.n:
        raise ValidationError(f"modality index {index} out of range for dimension {context.n}")
    return Modality(context.id, index, context.projectors[index])


def born_probability(pu: np.ndarray, pv: np.ndarray) -> float:
    """Conditional probability tr(Pu Pv) between two rank-one projectors."""
    pu = np.asarray(pu, dtype=complex)
    pv = np.asarray(pv, dtype=complex)
    if pu.shape != pv.shape:
        raise ValidationError(f"dimension mismatch: {pu.shape} vs {pv.shape}")
    value = complex(np.sum(pu * pv.T))
    if abs(value.imag) > 1e-12:
        raise ValidationError(f"trace has imaginary residue {value.imag:.3e}; inputs not Hermitian?")
    return float(min(1.0, max(0.0, value.real)))


def probability_matrix(cu: Context, cv: Context) -> np.ndarray:
    """Matrix of tr(P_i Q_j) over all modality pairs; bistochastic."""
    if cu.n != cv.n:
        raise ValidationError(f"dimension mismatch: {cu.n} vs {cv.n}")
    m = np.array(
        [[born_probability(cu.projectors[i], cv.projectors[j]) for j in range(cv.n)] for i in range(cu.n)]
    )
    return validate_stochastic(m)


def reverse_matrix(cu: Context, cv: Context) -> np.ndarray:
    """Probability matrix for the reversed direction; equals the transpose
    of the forward matrix because the trace is symmetric."""
    return probability_matrix(cv, cu)


def context_transform(cu: Context, cv: Context) -> ContextTransform:
    """Unitary S with S_ij = <ray_i(cu), ray_j(cv)>, symmetric half-phase
    gauge on the diagonal.

    The squared moduli of S reproduce probability_matrix(cu, cv), and
    context_transform(cv, cu).s is exactly dagger(s) in this gauge.
    """
    if cu.n != cv.n:
        raise ValidationError(f"dimension mismatch: {cu.n} vs {cv.n}")
    a = np.column_stack([ray_of(p) for p in cu.projectors])
    b = np.column_stack([ray_of(p) for p in cv.projectors])
    raw = dagger(a) @ b
    half = 0.5 * np.angle(np.diagonal(raw))
    phase = np.exp(-1j * half)
    s = phase[:, None] * raw * phase[None, :]
    return ContextTransform(freeze(s), cu.id, cv.id)


def raw_overlaps(cu: Context, cv: Context) -> np.ndarray:
    """Ungauged ray-overlap matrix; composes exactly along context chains:
    raw_overlaps(a, c) = raw_overlaps(a, b) @ raw_overlaps(b, c)."""
    a = np.column_stack([ray_of(p) for p in cu.projectors])
    b = np.column_stack([ray_of(p) for p in cv.projectors])
    return freeze(dagger(a) @ b)


def shared_modalities(cu: Context, cv: Context, tol_p: float = 1e-9) -> list[tuple[int, int]]:
    """Modality pairs carried unchanged from one context to the other.

    A pair qualifies when its conditional probability is >= 1 - tol_p;
    the two projectors then agree entrywise within sqrt(2 * tol_p).
    """
    pairs = []
    for i in range(cu.n):
        for j in range(cv.n):
            if born_probability(cu.projectors[i], cv.projectors[j]) >= 1.0 - tol_p:
                pairs.append((i, j))
    return pairs


def build_observable(context: Context, values) -> np.ndarray:
    """Hermitian operator sum_i a_i P_i with the context's projectors as
    eigenvectors and `values` as the spectrum."""
    values = np.asarray(values, dtype=float)
    if values.shape != (context.n,):
        raise ValidationError(f"expected {context.n} values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValidationError("observable values must be finite")
    out = sum(a * p for a, p in zip(values, context.projectors))
    out = 0.5 * (out + dagger(out))
    return freeze(out)
