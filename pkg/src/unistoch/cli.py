"""Batch command-line front end with stable JSON input and output.

Exit codes: 0 for any successfully computed result (including negative
verdicts like a refuted certification), 1 for input validation problems,
2 for internal numerical failures. Diagnostics go to stderr as a
structured error object; results go to the output stream.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import jsonio
from .certification import CertOptions, certify_orthostochastic, certify_unistochastic
from .contexts import context_transform, modality, probability_matrix, random_context, shared_modalities
from .decomposition import build_sigma, frame_normalization_residuals, gleason_determinant, projector_frame, reconstruct_matrix, svd
from .errors import NumericalError, ValidationError
from .linalg import haar_random_unitary, unitarity_deviation
from .simulator import run_sequence, spin_coupling_contexts
from .stochastic import classify, random_bistochastic, validate_stochastic


class CliError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); route through exit 1
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="unistoch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        if needs_input:
            p.add_argument("--input", required=True, help="input JSON file, or - for stdin")
        p.add_argument("--output", default=None, help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "text"), default="json")
        return p

    p = add("classify", "deepest certifiable class of a probability matrix")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tolerance", type=float, default=1e-9)

    p = add("decompose", "singular-value report for a probability matrix")
    p.add_argument("--phases", default=None, help="optional phase matrix JSON file")

    p = add("certify", "unistochasticity certificate for a probability matrix")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--ortho", action="store_true", help="certify orthostochasticity instead")

    add("born", "probability matrix and transform between two contexts")

    p = add("simulate", "Monte-Carlo run of a context chain")
    p.add_argument("--trials", type=int, default=100_000)

    p = add("spin-demo", "two-spin coupled/uncoupled demonstration", needs_input=False)
    p.add_argument("--trials", type=int, default=100_000)

    p = add("random", "sample a random object", needs_input=False)
    p.add_argument("kind", choices=("unitary", "bistochastic", "context-pair"))
    p.add_argument("--n", type=int, default=3)
    return parser


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}") from exc


def _emit(obj, args, text_summary: str):
    if args.format == "text":
        payload = text_summary if text_summary.endswith("\n") else text_summary + "\n"
    else:
        payload = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _cert_options(args) -> CertOptions:
    return CertOptions(restarts=args.restarts, certify_tolerance=args.tolerance, seed=args.seed)


def _cmd_classify(args):
    p = validate_stochastic(jsonio.decode_real_matrix(_read_json(args.input)))
    result = classify(p, _cert_options(args))
    obj = jsonio.encode_classification(result)
    flag = " (inconclusive)" if result.inconclusive else ""
    return obj, f"label: {result.label.value}{flag}"


def _cmd_decompose(args):
    p = validate_stochastic(jsonio.decode_real_matrix(_read_json(args.input)))
    phi = jsonio.decode_real_matrix(_read_json(args.phases)) if args.phases else None
    sigma = build_sigma(p, phi)
    triple = svd(sigma)
    frame = projector_frame(triple)
    report = {
        "n": triple.n,
        "singular_values": [float(x) for x in triple.r],
        "trace_r_squared": float(np.sum(triple.r**2)),
        "normalization_residuals": [float(x) for x in frame_normalization_residuals(frame, triple.r)],
        "gleason_determinant": gleason_determinant(triple.u),
        "reconstruction_max_error": float(
            np.max(np.abs(reconstruct_matrix(frame, triple.r) - p))
        ),
    }
    summary = (
        f"singular values: {report['singular_values']}\n"
        f"trace(R^2) = {report['trace_r_squared']:.12g}\n"
        f"gleason determinant = {report['gleason_determinant']:.6g}"
    )
    return report, summary


def _cmd_certify(args):
    p = validate_stochastic(jsonio.decode_real_matrix(_read_json(args.input)))
    opts = _cert_options(args)
    cert = certify_orthostochastic(p, opts) if args.ortho else certify_unistochastic(p, opts)
    obj = jsonio.encode_certificate(cert)
    summary = f"verdict: {cert.verdict.value} (defect {cert.defect:.6g})"
    if cert.witness:
        summary += f"\nwitness: {cert.witness}"
    return obj, summary


def _cmd_born(args):
    data = _read_json(args.input)
    if not isinstance(data, dict) or "from" not in data or "to" not in data:
        raise CliError('born input must be {"from": CONTEXT, "to": CONTEXT}')
    cu = jsonio.decode_context(data["from"], context_id="from")
    cv = jsonio.decode_context(data["to"], context_id="to")
    pm = probability_matrix(cu, cv)
    transform = context_transform(cu, cv)
    residual = float(np.max(np.abs(probability_matrix(cv, cu) - pm.T)))
    cert = certify_unistochastic(pm, CertOptions(seed=args.seed))
    obj = {
        "n": cu.n,
        "probability_matrix": jsonio.encode_real_matrix(pm),
        "transpose_residual": residual,
        "transform": jsonio.encode_complex_matrix(transform.s),
        "certificate": jsonio.encode_certificate(cert),
    }
    summary = (
        f"probability matrix ({cu.n}x{cu.n}), transpose residual {residual:.3g}, "
        f"certification: {cert.verdict.value}"
    )
    return obj, summary


def _cmd_simulate(args):
    data = _read_json(args.input)
    if not isinstance(data, dict) or "contexts" not in data:
        raise CliError(
            'simulate input must be {"initial_context": CONTEXT, "initial_index": int, '
            '"contexts": [CONTEXT, ...]}'
        )
    initial_ctx = jsonio.decode_context(data.get("initial_context"), context_id="initial")
    try:
        initial_index = int(data.get("initial_index", 0))
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad initial_index: {exc}") from exc
    chain = [
        jsonio.decode_context(c, context_id=f"step{k}") for k, c in enumerate(data["contexts"])
    ]
    report = run_sequence(modality(initial_ctx, initial_index), chain, args.trials, seed=args.seed)
    obj = jsonio.encode_run_report(report)
    return obj, f"max deviation {report.max_deviation:.3g} over {report.trials} trials"


def _cmd_spin_demo(args):
    uncoupled, coupled = spin_coupling_contexts()
    pm = probability_matrix(uncoupled, coupled)
    shared = shared_modalities(uncoupled, coupled)
    report = run_sequence(modality(uncoupled, 1), [coupled], args.trials, seed=args.seed)
    p = float(pm[1, 1])
    bound = 4.0 * np.sqrt(p * (1.0 - p) / args.trials) + 1e-3
    obj = {
        "matrix": jsonio.encode_real_matrix(pm),
        "shared_modalities": [list(pair) for pair in shared],
        "symmetric": bool(np.allclose(pm, pm.T, atol=1e-12)),
        "frequency_check": {
            "initial": "+-",
            "trials": args.trials,
            "max_deviation": report.max_deviation,
            "bound": float(bound),
            "passed": bool(report.max_deviation <= bound),
        },
    }
    summary = (
        f"shared modalities: {shared}\n"
        f"frequency check: max deviation {report.max_deviation:.4g} (bound {bound:.4g})"
    )
    return obj, summary


def _cmd_random(args):
    if args.n < 1:
        raise CliError(f"dimension must be >= 1, got {args.n}")
    if args.kind == "unitary":
        u = haar_random_unitary(args.n, args.seed)
        obj = jsonio.encode_complex_matrix(u)
        summary = f"unitary {args.n}x{args.n}, defect {unitarity_deviation(np.asarray(u)):.3g}"
    elif args.kind == "bistochastic":
        b = random_bistochastic(args.n, np.random.default_rng(args.seed))
        obj = jsonio.encode_real_matrix(b)
        summary = f"bistochastic {args.n}x{args.n}"
    else:
        cu = random_context(args.n, np.random.default_rng(args.seed), context_id="from")
        cv = random_context(args.n, np.random.default_rng(args.seed + 1), context_id="to")
        obj = {"from": jsonio.encode_context(cu), "to": jsonio.encode_context(cv)}
        summary = f"context pair of dimension {args.n}"
    return obj, summary


_COMMANDS = {
    "classify": _cmd_classify,
    "decompose": _cmd_decompose,
    "certify": _cmd_certify,
    "born": _cmd_born,
    "simulate": _cmd_simulate,
    "spin-demo": _cmd_spin_demo,
    "random": _cmd_random,
}


def _error_object(kind: str, exc: Exception) -> str:
    details = getattr(exc, "violations", None)
    obj = {"error": {"type": kind, "message": str(exc)}}
    if details and details != [str(exc)]:
        obj["error"]["details"] = details
    return json.dumps(obj, indent=2) + "\n"


def run(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        obj, summary = _COMMANDS[args.command](args)
        _emit(obj, args, summary)
        return 0
    except (CliError, ValidationError) as exc:
        sys.stderr.write(_error_object("validation", exc))
        return 1
    except NumericalError as exc:
        sys.stderr.write(_error_object("numerical", exc))
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
