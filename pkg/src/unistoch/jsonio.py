"""JSON schemas shared by the command-line interface.

Real matrices travel as {"n": int, "rows": [[...]]}, complex ones with
each entry as a two-element [re, im] array, and contexts as {"n", "rays",
"labels"}. Everything the CLI emits parses back through these functions
without loss; floats use Python's shortest round-trip representation.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .certification import Certificate
from .contexts import Context, make_context, ray_of
from .simulator import RunReport
from .stochastic import Classification


def encode_real_matrix(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=float)
    return {"n": int(m.shape[0]), "rows": [[float(x) for x in row] for row in m]}


def decode_real_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise ValidationError('expected a matrix object {"n": ..., "rows": [[...]]}')
    rows = obj["rows"]
    try:
        m = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix rows are not numeric: {exc}") from exc
    if m.ndim != 2:
        raise ValidationError(f"matrix rows must form a 2-d array, got shape {m.shape}")
    if "n" in obj and int(obj["n"]) != m.shape[0]:
        raise ValidationError(f'declared n = {obj["n"]} does not match {m.shape[0]} rows')
    return m


def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _decode_entry(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise ValidationError(f"expected a number or [re, im] pair, got {x!r}")


def encode_complex_matrix(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"n": int(m.shape[0]), "rows": [[encode_complex(z) for z in row] for row in m]}


def decode_complex_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise ValidationError('expected a matrix object {"n": ..., "rows": [[...]]}')
    try:
        m = np.array([[_decode_entry(x) for x in row] for row in obj["rows"]], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad complex matrix: {exc}") from exc
    if m.ndim != 2:
        raise ValidationError("complex matrix rows must form a 2-d array")
    if "n" in obj and int(obj["n"]) != m.shape[0]:
        raise ValidationError(f'declared n = {obj["n"]} does not match {m.shape[0]} rows')
    return m


def encode_context(c: Context) -> dict:
    return {
        "n": c.n,
        "rays": [[encode_complex(z) for z in ray_of(p)] for p in c.projectors],
        "labels": list(c.labels),
    }


def decode_context(obj, context_id: str | None = None) -> Context:
    if not isinstance(obj, dict):
        raise ValidationError("expected a context object")
    labels = obj.get("labels")
    if "rays" in obj:
        rays = [np.array([_decode_entry(x) for x in ray], dtype=complex) for ray in obj["rays"]]
        u = np.column_stack(rays)
    elif "rows" in obj:
        # a complex matrix doubles as a context: its columns are the rays
        u = decode_complex_matrix(obj)
    else:
        raise ValidationError('expected a context object with "rays" (or a unitary with "rows")')
    return make_context(u, labels=labels, context_id=context_id)


def encode_certificate(cert: Certificate) -> dict:
    return {
        "verdict": cert.verdict.value,
        "defect": float(cert.defect),
        "phases": None if cert.phases is None else encode_real_matrix(cert.phases),
        "witness": cert.witness,
        "restarts_used": cert.restarts_used,
    }


def encode_classification(c: Classification) -> dict:
    return {
        "label": c.label.value,
        "chain": [x.value for x in c.label.chain],
        "inconclusive": c.inconclusive,
        "certificate": None if c.certificate is None else encode_certificate(c.certificate),
    }


def encode_run_report(r: RunReport) -> dict:
    steps = []
    for k, cid in enumerate(r.context_ids):
        steps.append(
            {
                "context": cid,
                "counts": [int(x) for x in r.counts[k]],
                "frequencies": [float(x) for x in r.frequencies[k]],
                "predicted": [float(x) for x in r.predicted[k]],
            }
        )
    return {
        "trials": r.trials,
        "steps": steps,
        "max_deviation": r.max_deviation,
        "repeat_violations": r.repeat_violations,
    }
