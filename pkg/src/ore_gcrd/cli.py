"""Command-line front end.

Exit codes: 0 success, 1 algorithmic failure (structured JSON on stderr),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Callable, Sequence, TextIO

import numpy as np

from .division import right_divide_ls, right_divide_naive
from .embed import embed
from .errors import AlgorithmError
from .experiment import PROFILES, ExperimentConfig, run_experiment, write_csv
from .gcrd import gcrd_via_ls, nearby_with_gcrd, numeric_gcrd
from .oracle import exact_gcrd, from_rational_json, primitive_form, to_rational_json
from .ore import DiffPoly
from .pipeline import METHODS, PipelineConfig, approximate_gcrd
from .rank import deflated_rank


class UsageError(Exception):
    """Bad arguments or unreadable input (exit code 2)."""


def _read_json(path: str, label: str) -> object:
    try:
        with (sys.stdin if path == "-" else open(path)) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{label}: cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{label}: malformed JSON in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _operator(path: str | None, label: str) -> DiffPoly:
    if path is None:
        raise UsageError(f"missing operator {label}")
    data = _read_json(path, label)
    try:
        return DiffPoly.from_json(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{label}: invalid operator in {path}: {exc}") from None


def _emit(obj: object, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_trace(steps, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["iteration", "phi", "step_norm", "kind"])
    for s in steps:
        w.writerow([s.iteration, repr(s.phi), repr(s.step_norm), s.kind])


def cmd_gcrd(a: argparse.Namespace) -> int:
    f, g = _operator(a.f, "-f"), _operator(a.g, "-g")
    if not a.refine:
        f, g = f.normalized(), g.normalized()
        if a.method == "nearby":
            res = nearby_with_gcrd(f, g, a.epsilon_rank, degree=a.degree).gcrd
        elif a.method == "ls":
            res = gcrd_via_ls(f, g, a.epsilon_rank, degree=a.degree)
        else:
            res = numeric_gcrd(f, g, a.epsilon_rank, degree=a.degree)
        if res.coprime:
            raise AlgorithmError("coprime", "coprime within search radius", rank_report=res.rank_report)
        _emit(res.to_json(), a.out)
        return 0
    cfg = PipelineConfig(
        epsilon_rank=a.epsilon_rank,
        method=a.method,
        newton_iters=a.newton_iters,
        tol=a.tol,
        degree=a.degree,
        search=not a.no_search,
    )
    res = approximate_gcrd(f, g, cfg)
    _emit(res.to_json(), a.out)
    if a.trace is not None:
        if a.trace == "-":
            _write_trace(res.refined.trace, sys.stderr)
        else:
            with open(a.trace, "w", newline="") as fh:
                _write_trace(res.refined.trace, fh)
    return 0


def cmd_nearby(a: argparse.Namespace) -> int:
    f, g = _operator(a.f, "-f").normalized(), _operator(a.g, "-g").normalized()
    res = nearby_with_gcrd(f, g, a.epsilon_rank, degree=a.degree)
    if res.gcrd.coprime:
        raise AlgorithmError("coprime", "coprime within search radius", rank_report=res.rank_report)
    _emit(res.to_json(), a.out)
    return 0


def cmd_divide(a: argparse.Namespace) -> int:
    f, h = _operator(a.f, "-f"), _operator(a.h, "-h")
    if a.naive:
        res = right_divide_naive(f, h)
    else:
        res = right_divide_ls(f, h, den_degree=a.den_degree)
    _emit(res.to_json(), a.out)
    return 0


def cmd_rank(a: argparse.Namespace) -> int:
    f, g = _operator(a.f, "-f").normalized(), _operator(a.g, "-g").normalized()
    rep = deflated_rank(embed(f, g), a.epsilon_rank)
    _emit(rep.to_json(), a.out)
    if rep.failed:
        raise AlgorithmError("rank_gap", "no singular value gap found at the given epsilon_rank")
    return 0


def cmd_sylvester(a: argparse.Namespace) -> int:
    f, g = _operator(a.f, "-f"), _operator(a.g, "-g")
    S = embed(f, g).S_hat
    if a.out:
        np.savetxt(a.out, S, delimiter=",", fmt="%.17g")
    else:
        np.savetxt(sys.stdout, S, delimiter=",", fmt="%.17g")
    return 0


def cmd_verify(a: argparse.Namespace) -> int:
    ops = []
    for path, label in ((a.f, "-f"), (a.g, "-g")):
        if path is None:
            raise UsageError(f"missing operator {label}")
        try:
            ops.append(from_rational_json(_read_json(path, label)))
        except ValueError as exc:
            raise UsageError(f"{label}: invalid exact operator in {path}: {exc}") from None
    h = exact_gcrd(*ops)
    _emit({"gcrd": to_rational_json(primitive_form(h)), "order": int(h.order)}, a.out)
    return 0


def cmd_experiment(a: argparse.Namespace) -> int:
    rows = PROFILES[a.profile]
    if a.input is not None:
        inp, gc = _pair(a.input, "--input"), _pair(a.gcrd, "--gcrd")
    else:
        if not 0 <= a.row < len(rows):
            raise UsageError(f"--row must lie in [0, {len(rows) - 1}] for profile {a.profile}")
        inp, gc = rows[a.row]
    try:
        cfg = ExperimentConfig(
            profile=a.profile,
            input_degrees=inp,
            gcrd_degrees=gc,
            noise=a.noise,
            trials=a.trials,
            seed=a.seed,
            epsilon_rank=a.epsilon_rank,
            newton_iters=a.newton_iters,
            method=a.method,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = run_experiment(cfg)
    if a.out:
        write_csv(res.records, a.out)
    else:
        sys.stdout.write(res.to_csv())
    print(json.dumps(res.summary()), file=sys.stderr if not a.out else sys.stdout)
    return 0


def _pair(text: str | None, flag: str) -> tuple[int, int]:
    if text is None:
        raise UsageError(f"{flag} is required together with --input")
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects two integers like 2,3") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ore-gcrd", description="Approximate GCRD of differential operators.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("-f", help="operator JSON file")
    pair.add_argument("-g", help="operator JSON file")

    eps = argparse.ArgumentParser(add_help=False)
    eps.add_argument("--epsilon-rank", type=float, default=1e-9)

    newton = argparse.ArgumentParser(add_help=False)
    newton.add_argument("--newton-iters", type=int, default=50)
    newton.add_argument("--tol", type=float, default=1e-14)

    s = sub.add_parser("gcrd", parents=[common, pair, eps, newton], help="initial GCRD, optionally refined")
    s.add_argument("--method", choices=METHODS, default="nearby")
    s.add_argument("--degree", type=int, help="prescribe the GCRD degree")
    s.add_argument("--refine", action="store_true", help="run Newton refinement of the co-factors and GCRD")
    s.add_argument("--no-search", action="store_true", help="keep the initial degree structure of h")
    s.add_argument(
        "--trace", nargs="?", const="-", help="write the Newton trace as CSV (to stderr, or to the given path)"
    )
    s.set_defaults(func=cmd_gcrd)

    s = sub.add_parser("nearby", parents=[common, pair, eps], help="nearby pair with a nontrivial GCRD")
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_nearby)

    # -h names the divisor here, so help is only reachable as --help
    s = sub.add_parser("divide", parents=[common], add_help=False, help="right division f / h without remainder")
    s.add_argument("--help", action="help", help="show this help message and exit")
    s.add_argument("-f", help="dividend JSON file")
    s.add_argument("-h", help="divisor JSON file")
    s.add_argument("--den-degree", type=int, help="degree of the co-factor denominator")
    s.add_argument("--naive", action="store_true", help="back-substitution instead of least squares")
    s.set_defaults(func=cmd_divide)

    s = sub.add_parser("rank", parents=[common, pair, eps], help="singular spectrum and deflated rank")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("sylvester", parents=[common, pair], help="inflated Sylvester matrix as CSV")
    s.set_defaults(func=cmd_sylvester)

    s = sub.add_parser("verify", parents=[common, pair], help="exact GCRD of rational operators")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("experiment", parents=[common, newton], help="noise experiment on planted instances")
    s.add_argument("--profile", choices=sorted(PROFILES), default="balanced")
    s.add_argument("--row", type=int, default=0, help="row of the profile table")
    s.add_argument("--input", help="input degrees D,t (overrides --row)")
    s.add_argument("--gcrd", help="GCRD degrees D,t (with --input)")
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--epsilon-rank", type=float, default=None, help="default: 30 * noise, or 1e-9 without noise")
    s.add_argument("--method", choices=METHODS, default="nearby")
    s.set_defaults(func=cmd_experiment)
    return p


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return 2
    except AlgorithmError as exc:
        print(json.dumps(exc.to_json()), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(json.dumps({"error": "invalid_input", "message": str(exc)}), file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError) as exc:
        print(json.dumps({"error": "numerical", "message": str(exc)}), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
