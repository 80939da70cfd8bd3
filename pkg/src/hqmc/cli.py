"""Command line front end.

Exit codes: 0 for success (model valid, machines equivalent, and every
query that just computes a value), 1 for a negative verdict (invalid model
or inequivalent machines), 2 for usage, format, and I/O errors.

The default tolerance is 1e-9; the HQMC_TOL environment variable overrides
it and the --tol flag overrides both. Global flags go before the
subcommand:

    hqmc --tol 1e-8 equiv a.json b.json
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import equivalence, formats, linalg, model_check, models, report, transforms
from .errors import FormatError, HqmcError
from .models import BLM, Dfa, HQA, HqMC, QA, QMC, SLHqMC


@dataclass
class CliConfig:
    tolerance: float = linalg.DEFAULT_TOL
    max_word_len: int = 8
    max_iter: int = model_check.DEFAULT_MAX_ITER
    output: str | None = None
    format: str = "json"


def _resolve_config(args) -> CliConfig:
    tol = args.tol
    if tol is None:
        env = os.environ.get("HQMC_TOL")
        if env:
            try:
                tol = float(env)
            except ValueError:
                raise HqmcError(f"HQMC_TOL must be a number, got {env!r}")
    if tol is None:
        tol = linalg.DEFAULT_TOL
    if not tol > 0:
        raise HqmcError(f"tolerance must be positive, got {tol}")
    if args.max_word_len < 1:
        raise HqmcError(f"--max-word-len must be >= 1, got {args.max_word_len}")
    if args.max_iter < 1:
        raise HqmcError(f"--max-iter must be >= 1, got {args.max_iter}")
    linalg.set_default_tol(tol)
    return CliConfig(
        tolerance=tol,
        max_word_len=args.max_word_len,
        max_iter=args.max_iter,
        output=args.output,
        format=args.format,
    )


def _emit(cfg: CliConfig, payload: dict, text: str) -> None:
    body = json.dumps(payload, indent=2) + "\n" if cfg.format == "json" else text
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _write_text(cfg: CliConfig, body: str) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _fmt_matrix(m) -> str:
    return np.array2string(np.asarray(m), precision=6, suppress_small=True)


# ---------------------------------------------------------------------------
# commands


def _cmd_validate(cfg: CliConfig, args) -> int:
    model = formats.load_model(args.file)
    rep = model.validate(cfg.tolerance)
    lines = [f"{model.kind}: {'valid' if rep.ok else 'INVALID'}"]
    for v in rep.violations:
        lines.append(f"  {v.where}: {v.constraint} (violation {v.magnitude:.3e})")
    _emit(cfg, rep.to_json(), "\n".join(lines) + "\n")
    return 0 if rep.ok else 1


_CONVERSIONS = {
    ("hqmc", "qmc"): lambda m, dfa: transforms.hqmc_to_qmc(m),
    ("hqa", "qa"): lambda m, dfa: transforms.hqa_to_qa(m),
    ("hqa", "blm"): lambda m, dfa: transforms.qa_to_blm(transforms.hqa_to_qa(m)),
    ("qa", "blm"): lambda m, dfa: transforms.qa_to_blm(m),
    ("slhqmc", "chqa"): lambda m, dfa: transforms.sl_to_chqa(m),
    ("slhqmc", "product"): lambda m, dfa: transforms.product(m, dfa),
}


def _cmd_convert(cfg: CliConfig, args) -> int:
    model = formats.load_model(args.file)
    key = (model.kind, args.to)
    fn = _CONVERSIONS.get(key)
    if fn is None:
        raise HqmcError(f"no conversion from {model.kind!r} to {args.to!r}")
    dfa = None
    if args.to == "product":
        if not args.dfa:
            raise HqmcError("--dfa is required for the product conversion")
        dfa = formats.load_model(args.dfa)
        if not isinstance(dfa, Dfa):
            raise HqmcError(f"--dfa file holds a {dfa.kind!r}, expected a dfa")
    out = fn(model, dfa)
    _write_text(cfg, formats.dump_model(out))
    return 0


def _reverify_witness(model1, model2, witness, cfg: CliConfig):
    """Recompute the two weights on the witness straight from the
    definitions; the exponential labeled-chain oracle is skipped for
    witnesses longer than --max-word-len."""
    if isinstance(model1, BLM):
        w1, w2 = models.blm_weight(model1, witness), models.blm_weight(model2, witness)
    elif isinstance(model1, QA):
        w1, w2 = models.qa_accept_prob(model1, witness), models.qa_accept_prob(model2, witness)
    elif isinstance(model1, HQA):
        w1, w2 = models.hqa_accept_prob(model1, witness), models.hqa_accept_prob(model2, witness)
    elif isinstance(model1, SLHqMC):
        if len(witness) > cfg.max_word_len:
            return None
        w1, w2 = models.sl_trace_prob(model1, witness), models.sl_trace_prob(model2, witness)
    else:
        return None
    return abs(complex(w1) - complex(w2))


def _cmd_equiv(cfg: CliConfig, args, force_plus: bool = False) -> int:
    m1 = formats.load_model(args.file1)
    m2 = formats.load_model(args.file2)
    if m1.kind != m2.kind:
        raise HqmcError(f"model kinds differ: {m1.kind!r} vs {m2.kind!r}")
    mode = getattr(args, "mode", None)
    if m1.kind == "slhqmc" or force_plus:
        if mode == "eps":
            print("note: trace equivalence compares non-empty words; using plus mode",
                  file=sys.stderr)
        mode = "plus"
    elif mode is None:
        mode = "eps"

    if isinstance(m1, BLM):
        verdict = equivalence.blm_equivalent(m1, m2, tol=cfg.tolerance, mode=mode)
    elif isinstance(m1, QA):
        b1, b2 = transforms.qa_to_blm(m1), transforms.qa_to_blm(m2)
        verdict = equivalence.blm_equivalent(b1, b2, tol=cfg.tolerance, mode=mode)
    elif isinstance(m1, HQA):
        verdict = equivalence.hqa_equivalent(m1, m2, tol=cfg.tolerance, mode=mode)
    elif isinstance(m1, SLHqMC):
        verdict = equivalence.sl_trace_equivalent(m1, m2, tol=cfg.tolerance)
    else:
        raise HqmcError(f"equivalence checking is not defined for kind {m1.kind!r}")

    payload = verdict.to_json()
    if not verdict.equivalent and verdict.witness is not None:
        margin = _reverify_witness(m1, m2, verdict.witness, cfg)
        payload["witness_checked"] = margin is not None
        if margin is not None:
            payload["witness_margin"] = margin

    if verdict.equivalent:
        text = f"equivalent (basis {verdict.basis_size}, margin {verdict.margin:.3e})\n"
    else:
        shown = [models.symbol_str(s) if isinstance(s, tuple) else s for s in verdict.witness]
        text = f"NOT equivalent, witness {shown!r} (margin {verdict.margin:.3e})\n"
    _emit(cfg, payload, text)
    return 0 if verdict.equivalent else 1


def _default_rho(chain: HqMC, s: str) -> np.ndarray:
    return report.default_rho(chain, s)


def _cmd_check_safety(cfg: CliConfig, args) -> int:
    m = formats.load_model(args.model)
    if not isinstance(m, SLHqMC):
        raise HqmcError(f"check-safety needs a labeled chain, got {m.kind!r}")
    dfa = formats.load_model(args.dfa)
    if not isinstance(dfa, Dfa):
        raise HqmcError(f"check-safety needs a dfa, got {dfa.kind!r}")
    if args.rho:
        rho = formats.load_matrix(args.rho)
    else:
        rho = _default_rho(m.chain, args.state)
    result = model_check.check_safety(
        m, dfa, args.state, rho, tol=cfg.tolerance, max_iter=cfg.max_iter
    )
    text = (
        f"P(runs from {result.state} stay safe) = {result.probability_satisfy:.12f}\n"
        f"method {result.method}, iterations {result.iterations}, "
        f"residual {result.residual:.3e}\n"
    )
    _emit(cfg, result.to_json(), text)
    return 0


def _cmd_run(cfg: CliConfig, args) -> int:
    model = formats.load_model(args.model)
    if args.steps < 0:
        raise HqmcError(f"--steps must be >= 0, got {args.steps}")
    if isinstance(model, SLHqMC):
        model = model.chain
    if isinstance(model, HqMC):
        mu = model.initial_distribution()
        for _ in range(args.steps):
            mu = models.hqmc_step(model, mu)
        traces = {s: float(np.trace(mu[s]).real) for s in model.states}
        payload = {
            "kind": "hqmc",
            "steps": args.steps,
            "distribution": {s: formats.matrix_to_json(mu[s]) for s in model.states},
            "traces": traces,
            "total_trace": float(sum(traces.values())),
        }
        lines = [f"after {args.steps} steps (total trace {payload['total_trace']:.9f}):"]
        for s in model.states:
            lines.append(f"state {s}: trace {traces[s]:.9f}")
            lines.append(_fmt_matrix(mu[s]))
        _emit(cfg, payload, "\n".join(lines) + "\n")
        return 0
    if isinstance(model, QMC):
        rho = np.array(model.init)
        for _ in range(args.steps):
            rho = models.qmc_step(model, rho)
        payload = {
            "kind": "qmc",
            "steps": args.steps,
            "state": formats.matrix_to_json(rho),
            "trace": float(np.trace(rho).real),
        }
        text = (
            f"after {args.steps} steps (trace {payload['trace']:.9f}):\n"
            + _fmt_matrix(rho) + "\n"
        )
        _emit(cfg, payload, text)
        return 0
    raise HqmcError(f"run needs a chain model, got {model.kind!r}")


def _cmd_measure(cfg: CliConfig, args) -> int:
    model = formats.load_model(args.model)
    if isinstance(model, SLHqMC):
        chain = model.chain
    elif isinstance(model, HqMC):
        chain = model
    else:
        raise HqmcError(f"measure needs a hybrid chain, got {model.kind!r}")
    path = [s for s in args.path.split(",") if s]
    if not path:
        raise HqmcError("--path must name at least one state")
    if args.rho:
        rho = formats.load_matrix(args.rho)
    else:
        rho = _default_rho(chain, path[0])
    value = model_check.cylinder_measure(chain, path[0], path, rho)
    payload = {"path": path, "trace": value}
    _emit(cfg, payload, f"measure of cylinder {'->'.join(path)}: {value:.12f}\n")
    return 0


def _cmd_report(cfg: CliConfig, args) -> int:
    model = formats.load_model(args.model)
    written = []
    if isinstance(model, (HqMC, QMC, SLHqMC)):
        written += report.simulation_report(model, args.steps, args.outdir)
    else:
        raise HqmcError(f"report needs a chain model, got {model.kind!r}")
    if args.dfa:
        if not isinstance(model, SLHqMC):
            raise HqmcError("--dfa reports need a labeled chain")
        dfa = formats.load_model(args.dfa)
        if not isinstance(dfa, Dfa):
            raise HqmcError(f"--dfa file holds a {dfa.kind!r}, expected a dfa")
        written += report.safety_report(model, dfa, args.outdir,
                                        tol=cfg.tolerance, max_iter=cfg.max_iter)
    payload = {"written": [str(p) for p in written]}
    _emit(cfg, payload, "".join(f"wrote {p}\n" for p in written))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # on subparsers the defaults are SUPPRESS so a flag given before the
    # subcommand is not clobbered by the subparser's defaults
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--tol", type=float, default=d(None),
                        help="comparison tolerance (default 1e-9, env HQMC_TOL)")
    parser.add_argument("--max-iter", type=int, default=d(model_check.DEFAULT_MAX_ITER),
                        help="iteration cap for fixpoint solvers")
    parser.add_argument("--max-word-len", type=int, default=d(8),
                        help="word-length cap for exponential oracle paths")
    parser.add_argument("--format", choices=("json", "text"), default=d("json"),
                        help="output format")
    parser.add_argument("--output", default=d(None), help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hqmc",
        description="Verification toolkit for hybrid quantum Markov chains.",
    )
    _add_global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=lambda **kw:
                                argparse.ArgumentParser(parents=[common], **kw))

    p = sub.add_parser("validate", help="check a model file against its invariants")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("convert", help="convert a model to another kind")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=("qmc", "qa", "blm", "chqa", "product"))
    p.add_argument("--dfa", default=None, help="DFA file for the product conversion")
    p.set_defaults(fn=_cmd_convert)

    p = sub.add_parser("equiv", help="decide equivalence of two models of one kind")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--mode", choices=("eps", "plus"), default=None,
                   help="compare all words (eps) or non-empty words only (plus)")
    p.set_defaults(fn=_cmd_equiv)

    p = sub.add_parser("trace-equiv", help="trace equivalence of two labeled chains")
    p.add_argument("file1")
    p.add_argument("file2")
    p.set_defaults(fn=lambda cfg, a: _cmd_equiv(cfg, a, force_plus=True))

    p = sub.add_parser("check-safety", help="probability of staying safe under a bad-prefix DFA")
    p.add_argument("model")
    p.add_argument("dfa")
    p.add_argument("--state", required=True, help="start state of the chain")
    p.add_argument("--rho", default=None,
                   help="initial density matrix file (default: normalized initial mass)")
    p.set_defaults(fn=_cmd_check_safety)

    p = sub.add_parser("run", help="simulate a chain for a number of steps")
    p.add_argument("model")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("measure", help="measure the cylinder of an explicit state path")
    p.add_argument("model")
    p.add_argument("--path", required=True, help="comma-separated state path, e.g. s0,s1,s2")
    p.add_argument("--rho", default=None,
                   help="initial density matrix file (default: normalized initial mass)")
    p.set_defaults(fn=_cmd_measure)

    p = sub.add_parser("report", help="render CSV tables and figures for a model")
    p.add_argument("model")
    p.add_argument("--steps", type=int, default=10, help="simulation horizon")
    p.add_argument("--dfa", default=None, help="also render a safety report against this DFA")
    p.add_argument("--outdir", default=".", help="directory for the rendered files")
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return args.fn(cfg, args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except HqmcError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
