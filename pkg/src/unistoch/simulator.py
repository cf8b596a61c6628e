"""Monte-Carlo realization of sequential context changes.

A measurement samples the next modality from the trace-rule row of the
current one and collapses the state onto the sampled modality, so an
immediate re-measurement in the same context reproduces the outcome
exactly. Chains of contexts are simulated for many independent trials
with a counter-based random source, so any (trial, step) draw is
addressable directly and parallel execution cannot change the report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .contexts import Context, Modality, born_probability, make_context, modality, probability_matrix
from . import tolerances as tol


@dataclass(frozen=True)
class SystemState:
    """The realized modality; all other modalities of its context are wrong."""

    current: Modality


@dataclass(frozen=True)
class RunReport:
    """Frequencies of a repeated context chain against the trace-rule chain
    prediction (the product of per-step probability matrices).

    counts[k] holds per-modality outcome tallies for step k; rows of
    `frequencies` are counts/trials and sum to 1 exactly. A repeat
    violation is a trial where a step repeats the previous step's context
    but not its outcome; the collapse semantics make this impossible.
    """

    trials: int
    context_ids: tuple[str, ...]
    counts: np.ndarray
    frequencies: np.ndarray
    predicted: np.ndarray
    max_deviation: float
    repeat_violations: int

    def counts_map(self) -> dict[tuple[int, str, int], int]:
        """Counts keyed by (step, context id, modality index)."""
        out = {}
        for k, cid in enumerate(self.context_ids):
            for j in range(self.counts.shape[1]):
                out[(k, cid, j)] = int(self.counts[k, j])
        return out


def born_row(projector: np.ndarray, context: Context) -> np.ndarray:
    """Conditional probabilities from one projector to each modality of a
    context, cleaned for sampling: sub-dust entries are zeroed (so
    probability-zero outcomes can never fire) and the row is renormalized
    when off by at most float noise."""
    row = np.array([born_probability(projector, q) for q in context.projectors])
    row[row < tol.PROBABILITY_DUST] = 0.0
    total = row.sum()
    if abs(total - 1.0) > tol.ROW_RENORM_LIMIT:
        raise NumericalError(f"sampling row sums to {total:.12g}; projector/context inconsistent")
    return row / total


def _sample_indices(rows: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling, one row per draw.

    Zero-probability outcomes occupy empty cumulative intervals and can
    never fire; the top-end clip targets the last nonzero entry so that
    holds even when round-off leaves the row sum one ulp short of 1.
    """
    cum = np.cumsum(rows, axis=1)
    idx = (cum <= uniforms[:, None]).sum(axis=1)
    last_nonzero = rows.shape[1] - 1 - np.argmax((rows > 0.0)[:, ::-1], axis=1)
    return np.minimum(idx, last_nonzero)


def step_uniforms(seed: int, step: int, trials: int) -> np.ndarray:
    """Counter-based uniforms for one chain step across all trials.

    Stream keyed by (seed, step); the word at position t belongs to trial
    t, so every (seed, trial, step) value is reachable independently of
    execution order.
    """
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, step], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random(trials)


def measure(state: SystemState, context: Context, rng: np.random.Generator) -> tuple[SystemState, int]:
    """Sample one outcome and collapse onto the measured modality."""
    if state.current.projector.shape[0] != context.projectors[0].shape[0]:
        raise ValidationError(
            f"dimension mismatch: state {state.current.projector.shape[0]} vs context "
            f"{context.projectors[0].shape[0]}"
        )
    row = born_row(state.current.projector, context)
    j = int(_sample_indices(row[None, :], np.array([rng.random()]))[0])
    return SystemState(modality(context, j)), j


def run_sequence(initial: Modality, contexts, trials: int, seed: int = 0) -> RunReport:
    """Run a context chain `trials` times from the same initial modality.

    Each trial walks the full chain; outcomes are tallied per step and
    compared against the chain prediction obtained by multiplying the
    per-step probability matrices into the initial distribution.
    """
    contexts = list(contexts)
    if not contexts:
        raise ValidationError("context chain must contain at least one context")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    n = contexts[0].n
    for c in contexts:
        if c.n != n:
            raise ValidationError("all contexts in a chain must share one dimension")

    # chain prediction
    preds = []
    dist = born_row(initial.projector, contexts[0])
    preds.append(dist)
    for k in range(1, len(contexts)):
        dist = dist @ probability_matrix(contexts[k - 1], contexts[k])
        preds.append(dist)
    predicted = np.vstack(preds)

    counts = np.zeros((len(contexts), n), dtype=np.int64)
    repeat_violations = 0
    first_rows = np.broadcast_to(born_row(initial.projector, contexts[0]), (trials, n))
    states = _sample_indices(first_rows, step_uniforms(seed, 0, trials))
    np.add.at(counts[0], states, 1)
    prev = states
    for k in range(1, len(contexts)):
        transition = np.vstack(
            [born_row(contexts[k - 1].projectors[i], contexts[k]) for i in range(n)]
        )
        states = _sample_indices(transition[prev], step_uniforms(seed, k, trials))
        if contexts[k].id == contexts[k - 1].id:
            repeat_violations += int(np.count_nonzero(states != prev))
        np.add.at(counts[k], states, 1)
        prev = states

    frequencies = counts / float(trials)
    max_dev = float(np.max(np.abs(frequencies - predicted)))
    return RunReport(
        trials=trials,
        context_ids=tuple(c.id for c in contexts),
        counts=counts,
        frequencies=frequencies,
        predicted=predicted,
        max_deviation=max_dev,
        repeat_violations=repeat_violations,
    )


def spin_coupling_contexts() -> tuple[Context, Context]:
    """The two-spin demonstration pair in dimension 4.

    Uncoupled product basis {++, +-, -+, --} and the total-spin basis
    {(1,1), (1,0), (0,0), (1,-1)} with (1,0) = (+- plus -+)/sqrt(2) and
    (0,0) = (+- minus -+)/sqrt(2). The extreme modalities coincide across
    the two contexts; the middle ones do not.
    """
    uncoupled = make_context(
        np.eye(4, dtype=complex), labels=("++", "+-", "-+", "--"), context_id="uncoupled"
    )
    s = 1.0 / np.sqrt(2.0)
    coupled_rays = np.array(
        [
            [1, 0, 0, 0],
            [0, s, s, 0],
            [0, s, -s, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    ).T
    coupled = make_context(
        coupled_rays, labels=("S=1,m=1", "S=1,m=0", "S=0,m=0", "S=1,m=-1"), context_id="coupled"
    )
    return uncoupled, coupled
