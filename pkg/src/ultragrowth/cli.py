"""Command-line front-end.

One subcommand per decision surface: condition checks on sequences,
weights and matrices, growth relations, conjugate tables, the oscillator
construction, sequence-space norms, the triviality classifier, and the
named report suites.  Machine-readable JSON goes to stdout (canonical
form, byte-identical for identical inputs and configuration); a short
human summary goes to stderr.

Exit codes: 0 when every verdict holds, 1 when any fails, 2 when any is
inconclusive and none failed, 64 for usage errors including malformed
input files.  The environment variable ULTRAGROWTH_CONFIG may name a
JSON file overriding the run configuration.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .assocfn import (
    WEIGHT_CONDITIONS,
    check_weight_condition,
    classify_triviality,
)
from .config import ENV_CONFIG_VAR, RunConfig
from .conjugate import conjugate_table, matrix_of_weight
from .lambdanorms import lambda_norm
from .matrices import (
    MATRIX_CONDITIONS,
    check_matrix_condition,
    constant_matrix,
    relate_matrices,
)
from .oscillator import build, plan, validate_target, verify
from .relations import seq_relate
from .seqcore import (
    SEQUENCE_CONDITIONS,
    check_LC,
    check_sequence_condition,
    quotients,
)
from .specio import (
    SpecError,
    canonical_json,
    conjugate_table_rows,
    load_matrix,
    load_sequence,
    parse_family_arg,
    parse_sequence_arg,
    parse_weight,
    render_weight,
    tsv_text,
)
from .suites import SUITES, run_suite
from .verdicts import Status, Verdict

EX_OK = 0
EX_FAILS = 1
EX_INCONCLUSIVE = 2
EX_USAGE = 64

_SEQ_RELS = ("preceq", "triangleleft", "equiv")
_MAT_RELS = ("roumieu", "beurling", "strong")

_GRAMMAR = """\
weight specs:       t^<a> | log1p | logtrunc | assoc:<sequence.json> | gevrey:<s>
sequence args:      gevrey:<s> | <sequence.json>
matrix args:        weight:<weight-spec> | constant:<sequence-arg> | <matrix.json>
coefficient args:   kronecker:<i> | witness:<weight-spec> | <coefficients.json>
"""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _exit_code(verdicts) -> int:
    statuses = [v.status for v in verdicts]
    if any(s is Status.FAILS for s in statuses):
        return EX_FAILS
    if any(s is Status.INCONCLUSIVE for s in statuses):
        return EX_INCONCLUSIVE
    return EX_OK


def _emit(doc) -> None:
    sys.stdout.write(canonical_json(doc) + "\n")


def _note(*lines) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def _parse_matrix_arg(arg: str, config: RunConfig):
    arg = arg.strip()
    if arg.startswith("weight:"):
        w = parse_weight(arg[len("weight:"):], config=config)
        return matrix_of_weight(w, config=config)
    if arg.startswith("constant:"):
        S = parse_sequence_arg(arg[len("constant:"):], config=config)
        return constant_matrix(S, config.lambdas)
    return load_matrix(arg)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (document, exit code)
# ---------------------------------------------------------------------------


def _cmd_check_seq(args, config: RunConfig):
    M = load_sequence(args.file)
    if args.cond == "LC":
        v = check_LC(M)
    else:
        v = check_sequence_condition(M, args.cond,
                                     stability=config.stability,
                                     abs_tol=config.log_tol)
    doc = {"command": "check-seq", "input": args.file,
           "name": M.name, "condition": args.cond, "verdict": v}
    _note(f"{args.cond} on {M.name or args.file}: {v.status.value}")
    return doc, _exit_code([v])


def _cmd_check_weight(args, config: RunConfig):
    w = parse_weight(args.spec, config=config)
    v = check_weight_condition(w, args.cond, config=config)
    doc = {"command": "check-weight", "weight": render_weight(w),
           "condition": args.cond, "verdict": v}
    _note(f"{args.cond} on {render_weight(w)}: {v.status.value}")
    return doc, _exit_code([v])


def _cmd_relate(args, config: RunConfig):
    if args.matrix:
        if args.rel not in _MAT_RELS:
            raise _UsageError(
                f"matrix relations are {_MAT_RELS}, got {args.rel!r}")
        A = _parse_matrix_arg(args.a, config)
        B = _parse_matrix_arg(args.b, config)
        v = relate_matrices(A, B, args.rel)
        doc = {"command": "relate", "matrix": True, "a": args.a, "b": args.b,
               "relation": args.rel, "verdict": v}
        _note(f"{args.a} {args.rel} {args.b}: {v.status.value}")
        return doc, _exit_code([v])
    if args.rel not in _SEQ_RELS:
        raise _UsageError(
            f"sequence relations are {_SEQ_RELS}, got {args.rel!r}")
    M = parse_sequence_arg(args.a, config=config)
    N = parse_sequence_arg(args.b, config=config)
    rep = seq_relate(M, N, args.rel)
    doc = {"command": "relate", "matrix": False, "a": args.a, "b": args.b,
           "relation": args.rel, "report": rep}
    _note(f"{args.a} {args.rel} {args.b}: {rep.verdict.status.value}")
    return doc, _exit_code([rep.verdict])


def _cmd_conjugate(args, config: RunConfig):
    w = parse_weight(args.spec, config=config)
    table = conjugate_table(w, config=config)
    if args.emit:
        sys.stdout.write(tsv_text(conjugate_table_rows(table)))
        _note(f"conjugate table of {render_weight(w)}: {len(table)} rows (TSV)")
        return None, EX_OK
    doc = {"command": "conjugate", "weight": render_weight(w),
           "s_grid": table.s_grid, "values": table.values,
           "finite_threshold": table.finite_threshold}
    _note(f"conjugate table of {render_weight(w)}: {len(table)} rows, "
          f"finite through s = {table.finite_threshold:g}")
    return doc, EX_OK


def _cmd_matrix(args, config: RunConfig):
    W = _parse_matrix_arg(args.spec, config)
    v = check_matrix_condition(W, args.check, config=config)
    doc = {"command": "matrix", "input": args.spec, "condition": args.check,
           "levels": list(W.lambdas), "verdict": v}
    _note(f"{args.check} on {args.spec}: {v.status.value}")
    return doc, _exit_code([v])


def _cmd_oscillate(args, config: RunConfig):
    N = parse_sequence_arg(args.target, config=config)
    eligibility = validate_target(N, config=config)
    verdicts = [eligibility]
    doc = {"command": "oscillate", "target": args.target,
           "Q": args.Q, "stages": args.stages, "eligibility": eligibility}
    if eligibility.fails:
        _note(f"target {args.target} rejected: {eligibility.detail}")
        return doc, _exit_code(verdicts)

    pl = plan(N, args.Q, args.stages, config=config)
    res = build(pl, N, config=config)
    checks = verify(res, config=config)

    anchor_table = []
    for row in res.trace:
        gap = row["log_mu"] - row["log_nu"]
        anchor_table.append(dict(row, gap=gap, ratio=math.exp(gap)))
    doc["plan"] = {
        "Q": pl.Q, "stages": pl.J, "eps_hat": pl.eps_hat, "B": pl.B,
        "log_step": pl.log_step, "A_cap": pl.A_cap,
        "anchors": list(pl.anchors),
        "stage_exponents": list(pl.stage_exponents),
        "alpha_blocks": list(pl.alpha_blocks),
    }
    doc["anchor_table"] = anchor_table
    doc["checks"] = checks
    verdicts += list(checks.values())

    if args.emit:
        head = res.M.head
        hi = min(head.truncation, N.truncation)
        p = np.arange(1, hi + 1)
        mu = quotients(head).logmu[1:hi + 1]
        nu = quotients(N).logmu[1:hi + 1]
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(tsv_text(zip(p, mu, nu),
                              header=("p", "log_mu", "log_nu")))
        _note(f"head TSV written to {args.emit}")

    worst = max((row["gap_err"] for row in _gap_errors(anchor_table)),
                default=0.0)
    _note(f"{pl.J} stages planned over Q = {pl.Q}; "
          f"worst anchor error {worst:.2e}",
          *(f"  {c}: {v.status.value}" for c, v in checks.items()))
    return doc, _exit_code(verdicts)


def _gap_errors(anchor_table):
    for row in anchor_table:
        j = row["j"]
        if j == 2:
            want = -math.log(4.0)
        elif j % 2 == 1 and j >= 3:
            want = j * math.log(2.0)
        elif j % 2 == 0 and j >= 4:
            want = -math.log(j)
        else:
            continue
        yield {"j": j, "gap_err": abs(row["gap"] - want)}


def _cmd_norms(args, config: RunConfig):
    c = parse_family_arg(args.coeff, config=config)
    w = parse_weight(args.weight, config=config)
    nv = lambda_norm(c, w, args.mode, args.j, config=config)
    doc = {"command": "norms", "coefficients": args.coeff,
           "weight": render_weight(w), "mode": args.mode, "j": args.j,
           "log_value": nv.log_value, "value": nv.value,
           "at": nv.at, "tail": nv.tail}
    if args.mode == "beurling":
        # the universal-regime norm is classically read under quadratic
        # smallness of the weight; record the classifier's view of that
        label = {"nontrivial": "satisfied", "trivial": "violated"}
        got = classify_triviality(w, "Beurling", config=config)
        doc["quadratic_smallness"] = label.get(got, "unknown")
    _note(f"{args.mode} norm at level {args.j}: log = {nv.log_value:g}"
          + (" (window-edge tail)" if nv.tail else ""))
    return doc, EX_OK


def _cmd_classify(args, config: RunConfig):
    w = parse_weight(args.spec, config=config)
    got = classify_triviality(w, args.case.capitalize(), config=config)
    doc = {"command": "classify", "weight": render_weight(w),
           "case": args.case, "verdict": got}
    _note(f"{args.case} class of {render_weight(w)}: {got}")
    code = EX_INCONCLUSIVE if got == "unknown" else EX_OK
    return doc, code


def _cmd_report(args, config: RunConfig):
    doc = run_suite(args.suite, config=config)
    summary = doc["summary"]
    for entry in doc["entries"]:
        _note(f"  [{entry['grade']:>4}] {entry['id']}: {entry['observed']}")
    _note(f"suite {args.suite}: {summary['pass']}/{summary['total']} pass, "
          f"{summary['fail']} fail, {summary['open']} open")
    if args.outdir:
        import os

        from .figures import render_report

        os.makedirs(args.outdir, exist_ok=True)
        json_path = os.path.join(args.outdir, "report.json")
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(doc) + "\n")
        tsv_path = os.path.join(args.outdir, "report.tsv")
        rows = [(e["id"], e["grade"], e["observed"]) for e in doc["entries"]]
        with open(tsv_path, "w", encoding="utf-8") as fh:
            fh.write(tsv_text(rows, header=("id", "grade", "observed")))
        paths = render_report(doc, args.outdir, config=config)
        _note(f"wrote {json_path}, {tsv_path} and "
              f"{len(paths)} figure/data files")
    if summary["fail"]:
        code = EX_FAILS
    elif summary["open"]:
        code = EX_INCONCLUSIVE
    else:
        code = EX_OK
    return doc, code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ultragrowth",
        description="Growth analysis of weight sequences, weight functions "
                    "and weight matrices, with witnessed verdicts.",
        epilog=_GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-seq", help="decide a sequence condition")
    p.add_argument("file", help="sequence JSON file")
    p.add_argument("--cond", required=True,
                   choices=("LC",) + SEQUENCE_CONDITIONS)
    p.set_defaults(handler=_cmd_check_seq)

    p = sub.add_parser("check-weight", help="decide a weight-function condition")
    p.add_argument("spec", help="weight spec (see grammar below --help)")
    p.add_argument("--cond", required=True, choices=WEIGHT_CONDITIONS)
    p.set_defaults(handler=_cmd_check_weight)

    p = sub.add_parser("relate", help="growth relation between two objects")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--rel", required=True, choices=_SEQ_RELS + _MAT_RELS,
                   help="sequence relations preceq/triangleleft/equiv; "
                        "matrix relations roumieu/beurling/strong")
    p.add_argument("--matrix", action="store_true",
                   help="treat a and b as matrix args")
    p.set_defaults(handler=_cmd_relate)

    p = sub.add_parser("conjugate", help="tabulate a Young conjugate")
    p.add_argument("spec", help="weight spec")
    p.add_argument("--emit", action="store_true",
                   help="write the table as TSV to stdout instead of JSON")
    p.set_defaults(handler=_cmd_conjugate)

    p = sub.add_parser("matrix", help="decide a weight-matrix condition")
    p.add_argument("spec", help="matrix arg (see grammar below --help)")
    p.add_argument("--check", required=True, choices=MATRIX_CONDITIONS)
    p.set_defaults(handler=_cmd_matrix)

    p = sub.add_parser("oscillate",
                       help="build and verify an oscillating comparison")
    p.add_argument("--target", required=True, help="sequence arg")
    p.add_argument("--Q", type=int, required=True, help="anchor base >= 3")
    p.add_argument("--stages", type=int, required=True,
                   help="number of anchor stages J")
    p.add_argument("--emit", metavar="PATH",
                   help="also write (p, log_mu, log_nu) TSV over the head")
    p.set_defaults(handler=_cmd_oscillate)

    p = sub.add_parser("norms", help="sequence-space sup norm of coefficients")
    p.add_argument("coeff", help="coefficient arg (see grammar below --help)")
    p.add_argument("weight", help="weight spec")
    p.add_argument("--mode", required=True, choices=("roumieu", "beurling"))
    p.add_argument("--j", type=int, required=True, help="norm level >= 1")
    p.set_defaults(handler=_cmd_norms)

    p = sub.add_parser("classify",
                       help="triviality of the induced class at a weight")
    p.add_argument("spec", help="weight spec")
    p.add_argument("--case", required=True, choices=("beurling", "roumieu"))
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("report", help="run a named verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--outdir", metavar="DIR",
                   help="also write report.json, report.tsv and figures")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        _note(f"usage error: {e}")
        return EX_USAGE
    try:
        config = RunConfig.from_env()
    except (OSError, ValueError) as e:
        _note(f"bad {ENV_CONFIG_VAR} config: {e}")
        return EX_USAGE
    try:
        doc, code = args.handler(args, config)
    except _UsageError as e:
        _note(f"usage error: {e}")
        return EX_USAGE
    except SpecError as e:
        _note(f"error: {e}")
        return EX_USAGE
    except (OSError, ValueError) as e:
        _note(f"error: {e}")
        return EX_USAGE
    if doc is not None:
        _emit(doc)
    return code


if __name__ == "__main__":
    sys.exit(main())
