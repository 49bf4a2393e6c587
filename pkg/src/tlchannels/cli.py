"""Command-line front end: ``tlchannels <command> [options]``.

Exit codes: 0 success, 1 invalid arguments, 2 numerical failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .channels import LEFT, RIGHT, build_channel, choi_theorem_deviation
from .infoquant import (
    Descent,
    PaperWitness,
    RandomPure,
    capacity_bounds,
    min_output_entropy,
    theory_lower_bound,
)
from .qalg import AdmissibleTriple, GroupSpec, dim_irrep, theta_net
from .recoupling import (
    compare_spectra,
    tensor_output_spectrum_bruteforce,
    tensor_output_spectrum_formula,
)
from .structure import (
    ebt_submatrix_witness,
    haar_average_state,
    witness_vectors,
    ppt_check,
    verify_degrading_identity,
)
from .tlrep import DEFAULT_MAX_AMBIENT, NumericalError, ResourceCapError
from .verify import SUITES, default_groups, run_suite

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_CAP = 0, 1, 2, 3

DEFAULT_TOL = 1e-8


class UsageError(Exception):
    """Bad command-line input; maps to exit code 1."""


class CheckFailed(Exception):
    """A numerical check ran but missed its tolerance; maps to exit code 2."""

    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_triple(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"triple must be k,l,m integers, got {text!r}") from exc
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"triple must have three entries, got {text!r}")
    return parts


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", default="su2", help="'su2' or 'onplus:<N>' (verify also accepts 'all')")
    p.add_argument("--triple", type=_parse_triple, default=(0, 0, 0), help="k,l,m")
    p.add_argument("--traced", choices=(LEFT, RIGHT), default=LEFT,
                   help="left traces H_l (output H_m); right traces H_m (output H_l)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--tol", type=float, default=None, help=f"check tolerance (default {DEFAULT_TOL:g})")
    p.add_argument("--max-ambient", type=int, default=DEFAULT_MAX_AMBIENT)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write here (atomically) instead of stdout")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tlchannels", description="Temperley-Lieb quantum channels for O_N^+ and SU(2).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "info": "dimensions, theta net, capacity sandwich and MOE lower bound",
        "choi": "compare the Choi matrix with the covariant projector",
        "ppt": "PPT test of the Choi matrix (plus the SU(2) 2x2 witness)",
        "moe": "minimum output entropy search",
        "capacity": "capacity sandwich for the bistochastic channel",
        "tensor-spectrum": "spectrum of (Phi_1 (x) Phi_2)(rho_i): formula vs brute force",
        "haar-sep": "Monte Carlo Haar average of rotated product states",
        "degrade-check": "SU(2) degrading identity for (l, m) taken from --triple l+m,l,m",
        "verify": "run invariant suites, one JSON line per check",
    }
    subs = {}
    for name, text in helps.items():
        subs[name] = sub.add_parser(name, help=text, description=text)
        _common(subs[name])
    subs["moe"].add_argument("--strategy", choices=("witness", "random", "descent"), default="witness")
    subs["tensor-spectrum"].add_argument("--triple2", type=_parse_triple, required=True,
                                         help="k,l,m of the second (right-traced) channel")
    subs["tensor-spectrum"].add_argument("--i", dest="label", type=int, required=True,
                                         help="label i of the covariant input state")
    subs["tensor-spectrum"].add_argument("--source", choices=("formula", "bruteforce"), default="formula",
                                         help="which block CSV output shows")
    subs["verify"].set_defaults(group="all")
    subs["verify"].add_argument("--suite", default="all",
                                help=f"all, categorical or one of: {', '.join(SUITES)}")
    return parser


def _tol(args) -> float:
    return DEFAULT_TOL if args.tol is None else args.tol


def _entropy_scale(args) -> float:
    return 1.0 / math.log(2) if args.bits else 1.0


def _group(args) -> GroupSpec:
    try:
        return GroupSpec.parse(args.group)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _channel(args, group, triple=None, traced=None):
    return build_channel(group, triple or args.triple, traced or args.traced, args.max_ambient)


def _envelope(args, group, operation, result, tolerances=None) -> dict:
    return {
        "group": str(group),
        "N": group.N,
        "triple": list(args.triple),
        "traced": args.traced,
        "operation": operation,
        "result": result,
        "tolerances": tolerances or {"tol": _tol(args)},
        "seed": args.seed,
        "version": __version__,
    }


def cmd_info(args, group):
    k, l, m = AdmissibleTriple.coerce(args.triple)
    ch = _channel(args, group)
    s = _entropy_scale(args)
    bounds = capacity_bounds(ch)
    result = {
        "d_A": ch.d_A_, "d_B": ch.d_B_, "d_E": ch.d_E_,
        "q": group.q,
        "theta": theta_net((k, l, m), group.q),
        "capacity": {"q1_lower": bounds.q1_lower * s, "c_upper": bounds.c_upper * s,
                     "c_upper_list": [c * s for c in bounds.c_upper_list]},
        "moe_lower_bound": theory_lower_bound(ch) * s,
        "units": "bits" if args.bits else "nats",
    }
    return _envelope(args, group, "info", result)


def cmd_choi(args, group):
    ch = _channel(args, group)
    dist, rank = choi_theorem_deviation(ch)
    # the Choi range is the copy of the traced label inside output (x) reference
    label = args.triple[1] if ch.traced_ == LEFT else args.triple[2]
    expected = dim_irrep(label, group)
    result = {"frobenius_distance": dist, "rank": rank, "expected_rank": expected,
              "frame": "covariant", "normalized": True}
    payload = _envelope(args, group, "choi", result)
    if dist > _tol(args) or rank != expected:
        raise CheckFailed(f"Choi matrix deviates from the covariant projector (distance {dist:.3e})", payload)
    return payload


def cmd_ppt(args, group):
    ch = _channel(args, group)
    report = ppt_check(ch) if args.tol is None else ppt_check(ch, tol=args.tol, reject_tol=max(args.tol, 1e-8))
    result = report.as_dict()
    if group.kind == "su2":
        pair = witness_vectors(ch)
        result["witness_det"] = None if pair is None else ebt_submatrix_witness(ch, *pair)
    return _envelope(args, group, "ppt", result,
                     {"accept": report.tol, "reject": report.reject_tol})


def cmd_moe(args, group):
    ch = _channel(args, group)
    strategy = {
        "witness": PaperWitness(fallback=RandomPure(args.samples, args.seed)),
        "random": RandomPure(args.samples, args.seed),
        "descent": Descent(seed=args.seed, samples=min(args.samples, 200)),
    }[args.strategy]
    report = min_output_entropy(ch, strategy)
    s = _entropy_scale(args)
    result = report.as_dict()
    for key in ("best_entropy", "theory_lower", "theory_upper_hint"):
        result[key] *= s
    result["units"] = "bits" if args.bits else "nats"
    return _envelope(args, group, "moe", result)


def cmd_capacity(args, group):
    ch = _channel(args, group)
    bounds = capacity_bounds(ch)
    s = _entropy_scale(args)
    result = {"q1_lower": bounds.q1_lower * s, "c_upper": bounds.c_upper * s,
              "c_upper_list": [c * s for c in bounds.c_upper_list],
              "units": "bits" if args.bits else "nats"}
    return _envelope(args, group, "capacity", result)


def cmd_tensor_spectrum(args, group):
    triples = (tuple(args.triple), tuple(args.triple2))
    formula = tensor_output_spectrum_formula(args.label, triples, group, args.max_ambient)
    brute = tensor_output_spectrum_bruteforce(args.label, triples, group, args.max_ambient)
    ok, err = compare_spectra(formula, brute, _tol(args))
    result = {
        "i": args.label,
        "triple2": list(args.triple2),
        "Formula": formula.as_rows(),
        "BruteForce": brute.as_rows(),
        "match": bool(ok),
        "max_eigenvalue_error": err,
        "flagged": brute.flagged,
        "notes": list(brute.notes),
        "entropy": formula.entropy() * _entropy_scale(args),
    }
    payload = _envelope(args, group, "tensor-spectrum", result)
    payload["_csv_rows"] = (formula if args.source == "formula" else brute).as_rows()
    if not ok:
        raise CheckFailed(f"formula and brute-force spectra differ (max error {err:.3e})", payload)
    return payload


def cmd_haar_sep(args, group):
    if group.kind != "su2":
        raise UsageError("haar-sep needs --group su2")
    k, l, m = AdmissibleTriple.coerce(args.triple)
    if k != l - m:
        raise UsageError("haar-sep expects --triple l-m,l,m")
    _, dist = haar_average_state(l, m, args.samples, args.seed)
    bound = 5 / math.sqrt(args.samples)
    result = {"l": l, "m": m, "samples": args.samples, "distance": dist, "bound": bound}
    return _envelope(args, group, "haar-sep", result, {"statistical_bound": bound})


def cmd_degrade_check(args, group):
    if group.kind != "su2":
        raise UsageError("degrade-check needs --group su2")
    k, l, m = AdmissibleTriple.coerce(args.triple)
    if k != l + m or m > l:
        raise UsageError("degrade-check expects --triple l+m,l,m with m <= l")
    dev = verify_degrading_identity(l, m, args.max_ambient)
    payload = _envelope(args, group, "degrade-check", {"l": l, "m": m, "deviation": dev})
    if dev > _tol(args):
        raise CheckFailed(f"degrading identity off by {dev:.3e}", payload)
    return payload


COMMANDS = {
    "info": cmd_info,
    "choi": cmd_choi,
    "ppt": cmd_ppt,
    "moe": cmd_moe,
    "capacity": cmd_capacity,
    "tensor-spectrum": cmd_tensor_spectrum,
    "haar-sep": cmd_haar_sep,
    "degrade-check": cmd_degrade_check,
}


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def render(payload: dict, fmt: str) -> str:
    rows = payload.pop("_csv_rows", None)
    if fmt == "csv":
        if rows is None:
            raise UsageError("CSV output is available for tensor-spectrum only")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["l", "eigenvalue", "multiplicity"], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(float(v)) if k == "eigenvalue" else v for k, v in row.items()})
        return buf.getvalue()
    return json.dumps(_to_jsonable(payload), indent=2) + "\n"


def write_output(text: str, out: str | None) -> None:
    """Print, or write to ``out`` through a temporary file and an atomic rename."""
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tlchannels-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _verify(args) -> int:
    groups = None
    if args.group != "all":
        group = _group(args)
        budget = dict((str(g), k) for g, k in default_groups())
        groups = [(group, budget.get(str(group), 4))]
    failed = False
    lines = []
    for res in run_suite(args.suite, groups=groups, max_ambient=args.max_ambient):
        failed |= res.status == "fail"
        lines.append(json.dumps(_to_jsonable(res.as_dict())))
    summary = {"operation": "verify", "suite": args.suite, "failed": failed,
               "checks": len(lines), "version": __version__}
    lines.append(json.dumps(summary))
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_NUMERICAL if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.samples < 1 or args.threads < 1 or args.max_ambient < 1 or (args.tol is not None and args.tol <= 0):
            raise UsageError("--samples, --threads and --max-ambient must be positive and --tol > 0")
        with threadpool_limits(limits=args.threads):
            if args.command == "verify":
                return _verify(args)
            group = _group(args)
            payload = COMMANDS[args.command](args, group)
            write_output(render(payload, args.format), args.out)
            return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CheckFailed as exc:
        try:
            write_output(render(exc.payload, "json"), args.out)
        finally:
            print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MemoryError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
