"""Command-line interface.

Exit codes: 0 success, 1 input or validation error, 2 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .correlations import analyze
from .errors import InvariantViolation, KolmoError, TableError, ValidationError
from .io import (
    fmt,
    load_family,
    read_records,
    write_records,
    write_space_dump,
)
from .simulation import SimulationConfig, convergence_check, estimate, simulate
from .space import ContextWeights, build_space, dump_space, independence_check_eta
from .tables import OUTCOMES, no_signaling_report

OUTCOME_LABELS = ["++", "+-", "-+", "--"]


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _u64(text):
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text!r}")
    return val


def _positive_int(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return val


def _weights(args, family):
    u, v = args.weights_a, args.weights_b
    default = ContextWeights.uniform(family.m, family.n)
    return ContextWeights(u if u is not None else default.u, v if v is not None else default.v)


# ---------------------------------------------------------------- reports

def _empirical_sections(est):
    """JSON sections shared by ``simulate`` and ``ingest``."""
    doc = {"estimate": est.to_dict(), "warnings": [
        f"EmptyContext: context ({i},{j}) has no trials" for i, j in est.empty_contexts
    ]}
    if (est.m, est.n) == (2, 2) and not est.empty_contexts:
        best = est.max_chsh()
        se_c, se_a = est.chsh_stderr()
        doc["chsh"] = dict(best.to_dict(), conditional_stderr=se_c, absolute_stderr=se_a)
        doc["bounds"] = est.bounds().to_dict()
    else:
        doc["chsh"] = None
        doc["bounds"] = None
    return doc


def _text_bounds(bounds, out):
    for name in ("b2", "b1", "b4", "b8"):
        b = bounds[name]
        verdict = "pass" if b["pass"] else "FAIL"
        if not b["applicable"]:
            verdict += " (not applicable: non-uniform weights)"
        out.append(f"  {name}: {fmt(b['value'])} <= {fmt(b['limit'])}  {verdict}")


def _text_analysis(doc):
    out = ["correlations (i, j, conditional, absolute):"]
    for p in doc["pairs"]:
        out.append(f"  {p['i']} {p['j']}  C={fmt(p['conditional'])}  E={fmt(p['absolute'])}")
    if doc["chsh"] is None:
        out.append("CHSH: not applicable (family is not 2x2)")
    else:
        c = doc["chsh"]
        out.append(f"CHSH pattern {c['pattern']}: conditional={fmt(c['conditional'])}"
                   f" absolute={fmt(c['absolute'])}")
        out.append("bounds:")
        _text_bounds(doc["bounds"], out)
    return out


def _text_empirical(doc):
    est = doc["estimate"]
    out = [f"trials: {est['trials']}", "contexts (i, j, count, p_hat ++ +- -+ --, C_hat, E_hat):"]
    for c in est["contexts"]:
        ps = " ".join(fmt(p) for p in c["p_hat"])
        out.append(
            f"  {c['i']} {c['j']}  n={c['count']}  p=[{ps}]"
            f"  C={fmt(c['conditional'])} +- {fmt(c['conditional_stderr'])}"
            f"  E={fmt(c['absolute'])} +- {fmt(c['absolute_stderr'])}"
        )
    for w in doc["warnings"]:
        out.append(f"warning: {w}")
    if doc["chsh"] is None:
        out.append("CHSH: not applicable")
    else:
        c = doc["chsh"]
        out.append(f"CHSH pattern {c['pattern']}: conditional={fmt(c['conditional'])}"
                   f" +- {fmt(c['conditional_stderr'])}"
                   f" absolute={fmt(c['absolute'])} +- {fmt(c['absolute_stderr'])}")
        out.append("bounds:")
        _text_bounds(doc["bounds"], out)
    return out


def _emit(args, doc, lines):
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))


# --------------------------------------------------------------- commands

def cmd_build(args):
    family = load_family(args.family)
    space = build_space(family, _weights(args, family))
    if args.out:
        write_space_dump(space, args.out)
    doc = {"atoms": len(space.atoms), "total_mass": space.total_mass(), "out": args.out}
    if args.json:
        if not args.out:
            doc["dump"] = dump_space(space)
        print(json.dumps(doc, indent=2))
    elif args.out:
        print(f"wrote {doc['atoms']} atoms (total mass {fmt(doc['total_mass'])}) to {args.out}")
    else:
        print(json.dumps(dump_space(space), indent=1))
    return 0


def cmd_analyze(args):
    family = load_family(args.family)
    space = build_space(family, _weights(args, family))
    doc = analyze(space).to_dict()
    _emit(args, doc, _text_analysis(doc))
    return 0


def cmd_simulate(args):
    family = load_family(args.family)
    weights = _weights(args, family)
    config = SimulationConfig(family, args.trials, args.seed, weights)
    batch = simulate(config)
    if args.out:
        write_records(batch, args.out)
    space = build_space(family, weights)
    est = estimate(batch, family.m, family.n, allow_empty=True)
    doc = {"trials": args.trials, "seed": args.seed, "out": args.out}
    doc.update(_empirical_sections(est))
    if (family.m, family.n) == (2, 2):
        exact = analyze(space)
        doc["exact_chsh"] = {"pattern": list(exact.chsh.sign_pattern),
                             "conditional": exact.chsh.value_conditional,
                             "absolute": exact.chsh.value_absolute}
    else:
        doc["exact_chsh"] = None
    conv = convergence_check(est, space, args.tolerance)
    doc["convergence"] = conv.to_dict()

    lines = [f"seed: {args.seed}"] + _text_empirical(doc)
    if doc["exact_chsh"] is not None:
        e = doc["exact_chsh"]
        lines.append(f"exact CHSH pattern {e['pattern']}: conditional={fmt(e['conditional'])}"
                     f" absolute={fmt(e['absolute'])}")
    lines.append(f"convergence (tolerance {fmt(args.tolerance)}, 5 sigma):"
                 f" {'pass' if conv.passed else 'FAIL'}")
    for it in conv.items:
        what = it.quantity if it.outcome is None else \
            f"p[{OUTCOME_LABELS[OUTCOMES.index(it.outcome)]}]"
        lines.append(f"  {it.i} {it.j} {what}: est={fmt(it.estimate)} exact={fmt(it.exact)}"
                     f" thr={fmt(it.threshold)} {'pass' if it.passed else 'FAIL'}")
    _emit(args, doc, lines)
    return 0


def cmd_ingest(args):
    batch = read_records(args.records)
    est = estimate(batch, args.m, args.n, allow_empty=True)
    doc = _empirical_sections(est)
    for w in doc["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, doc, _text_empirical(doc))
    return 0


def cmd_check(args):
    doc = {"valid": True}
    try:
        family = load_family(args.family)
    except TableError as exc:
        doc = {"valid": False, "error": type(exc).__name__, "message": str(exc)}
        _emit(args, doc, [f"invalid: {type(exc).__name__}: {exc}"])
        return 1
    space = build_space(family, _weights(args, family))
    sig = no_signaling_report(family)
    ind = independence_check_eta(space)
    doc["no_signaling"] = sig.to_dict()
    doc["eta_independence"] = ind.to_dict()
    lines = [
        f"valid: {family.m}x{family.n} {family.model} family",
        ("signaling" if sig.signaling else "no-signaling")
        + f" (max marginal deviation {fmt(sig.max_deviation)})",
        f"  A-side deviations: {' '.join(fmt(x) for x in sig.deviation_a)}",
        f"  B-side deviations: {' '.join(fmt(x) for x in sig.deviation_b)}",
        ("eta_a, eta_b independent" if ind.independent else "eta_a, eta_b DEPENDENT")
        + f" (max deviation {fmt(ind.max_deviation)})",
    ]
    _emit(args, doc, lines)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kolmobell",
        description="Unified classical probability space for incompatible Bell-test contexts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weights=True):
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        if weights:
            p.add_argument("--weights-a", type=_float_list, help="A-side gate probabilities")
            p.add_argument("--weights-b", type=_float_list, help="B-side gate probabilities")

    p = sub.add_parser("build", help="build the unified space and dump its atoms")
    p.add_argument("family")
    p.add_argument("--out", help="write the atom dump here")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="correlations, CHSH and bound checks")
    p.add_argument("family")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run gated trials and compare with the exact space")
    p.add_argument("family")
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--out", help="trial-record CSV path")
    p.add_argument("--tolerance", type=float, default=0.01)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="estimate from a trial-record CSV")
    p.add_argument("records")
    p.add_argument("--m", type=_positive_int, default=2)
    p.add_argument("--n", type=_positive_int, default=2)
    common(p, weights=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("check", help="validate a family; no-signaling and gate independence")
    p.add_argument("family")
    common(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, KolmoError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
