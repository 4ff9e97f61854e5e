"""Command line front end.

Exit codes: 0 success, 1 a certification assertion failed, 2 bad input or
usage, 3 numerical failure, 4 undecided results under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import ConeSpecError, InsufficientData, NotInCone
from .families import FAMILIES, generate
from .krt import search_counterexample
from .reports import CHECKS, analyze_instance, certify_instance, exit_status
from .serialize import InstanceError, canonical_dumps, dump_instance, load_instance
from .tolerances import from_environment

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_UNDECIDED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".conespec-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def warn(message: str) -> None:
    sys.stderr.write(f"conespec: {message}\n")


def emit(text: str, out) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def read_instance(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return load_instance(text)


def parse_range(text: str) -> list:
    """``"2..6"``, ``"2-6"`` or ``"4"`` as an inclusive list of integers."""
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            lo, hi = int(lo), int(hi)
            break
    else:
        lo = hi = int(text)
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_seeds(text: str) -> list:
    """A count ``N`` means seeds ``0..N-1``; ranges are taken literally."""
    if any(sep in text for sep in ("..", "-", ":")):
        return parse_range(text)
    count = int(text)
    if count < 1:
        raise argparse.ArgumentTypeError("need at least one seed")
    return list(range(count))


def parse_vector(text: str) -> np.ndarray:
    """JSON list of reals or of ``[re, im]`` pairs."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--x0: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, list) or not data:
        raise UsageError("--x0 must be a non-empty JSON list")
    try:
        return np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(float(v)) for v in data])
    except (TypeError, ValueError, IndexError) as exc:
        raise UsageError("--x0 entries must be numbers or [re, im] pairs") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    inst = read_instance(args.path)
    report = analyze_instance(inst, args.tolerances)
    emit(canonical_dumps(report), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    inst = read_instance(args.path)
    if args.check == "split" and args.rho is None:
        raise UsageError("--rho is required with --check split")
    report, rep = certify_instance(inst, args.check, args.rho, args.tolerances)
    emit(canonical_dumps(report), args.out)
    return exit_status(rep, args.strict)


def cmd_flow(args) -> int:
    from .dynamics import default_grid, estimate_growth, evolve, monitor_cone_invariance

    inst = read_instance(args.path)
    tol = inst.tolerance_profile(args.tolerances)
    K = inst.cone
    x0 = K.interior_point() if args.x0 is None else parse_vector(args.x0)
    if x0.shape[0] != K.dim:
        raise UsageError(f"--x0 has {x0.shape[0]} entries, the instance has dimension {K.dim}")
    if not args.unchecked and not K.member(x0, tol.tol_cone):
        raise NotInCone("initial state is not in the cone; pass --unchecked to allow it")
    if args.points < 2 or not args.tmax > 0:
        raise UsageError("need --points >= 2 and --tmax > 0")
    times = default_grid(args.points, min(0.01, args.tmax / args.points), args.tmax)
    traj = evolve(inst.matrix, args.alpha, x0, times, normalized=True)
    viol = [K.violation(s) for s in traj.states]
    threshold = 10 * tol.tol_cone
    counts = np.cumsum(np.array(viol) > threshold)
    from .dynamics import trajectory_csv

    text = trajectory_csv(traj, {"cone_violation": [format(v, ".17g") for v in viol],
                                 "violation_count": [int(c) for c in counts]})
    report = monitor_cone_invariance(traj, K, tol)
    try:
        a_hat, nu_hat = estimate_growth(traj)
        growth = f"alpha_hat={a_hat:.17g} nu_hat={nu_hat}"
    except InsufficientData as exc:
        growth = f"alpha_hat=nan nu_hat=nan ({exc})"
    summary = (f"# {growth} max_violation={report.max_violation:.3g} "
               f"violations={report.count_above} points={len(traj)}\n")
    if args.csv:
        write_atomic(args.csv, text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = generate(args.family, args.n, args.seed)
    emit(dump_instance(inst), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    previous = None
    if args.resume:
        if not args.out:
            raise UsageError("--resume needs --out")
        if os.path.exists(args.out):
            with open(args.out, encoding="utf-8") as fh:
                previous = json.load(fh)
    sizes = args.n_range
    result = previous
    # checkpoint after every size so an interrupted campaign can resume
    for k in range(len(sizes)):
        result = search_counterexample(args.family, sizes[: k + 1], args.seeds, args.tolerances,
                                       resume=result, strict=args.strict, workers=args.workers)
        if args.out and k + 1 < len(sizes):
            partial = dict(result, complete=False)
            write_atomic(args.out, canonical_dumps(partial))
    result = dict(result, complete=True)
    emit(canonical_dumps(result), args.out)
    for rec in result["skipped"]:
        warn(f"skipped n={rec['n']} seed={rec['seed']}: {rec['error']}")
    return EXIT_NUMERIC if result["skipped"] else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conespec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, path=True):
        if path:
            sp.add_argument("path", help="instance JSON file, or - for stdin")
        sp.add_argument("--out", help="write the result here (atomically) instead of stdout")
        sp.add_argument("--strict", action="store_true")

    sp = sub.add_parser("analyze", help="spectrum, positivity and dominant pair")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("certify", help="certify the dominant spectral picture")
    common(sp)
    sp.add_argument("--check", choices=CHECKS, default="dominant",
                    help="dominant: full space; split: outer invariant subspace; real: real matrix on a real cone")
    sp.add_argument("--rho", type=float, help="split radius as a fraction of the spectral radius")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("flow", help="trajectory CSV of the shifted flow")
    common(sp)
    sp.add_argument("--x0", help="initial state as a JSON list (default: an interior point of the cone)")
    sp.add_argument("--alpha", type=float, default=0.0, help="shift added to the generator")
    sp.add_argument("--tmax", type=float, default=40.0)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--csv", help="write the CSV here; the summary line then goes to stdout")
    sp.add_argument("--unchecked", action="store_true", help="allow an initial state outside the cone")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("gen", help="generate a deterministic instance")
    common(sp, path=False)
    sp.add_argument("--family", required=True, help=", ".join(FAMILIES))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("search", help="look for a multiple dominant eigenvalue")
    common(sp, path=False)
    sp.add_argument("--family", required=True, help=", ".join(FAMILIES))
    sp.add_argument("--n-range", type=parse_range, default=parse_range("2..8"))
    sp.add_argument("--seeds", type=parse_seeds, default=parse_seeds("100"))
    sp.add_argument("--resume", action="store_true", help="reuse records already in --out")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.tolerances = from_environment()
        return args.func(args)
    except InstanceError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line is not None else ""
        warn(f"invalid instance{where}: {exc}")
        return EXIT_INPUT
    except (UsageError, NotInCone, ValueError) as exc:
        warn(str(exc))
        return EXIT_INPUT
    except (ConeSpecError, OverflowError, np.linalg.LinAlgError) as exc:
        warn(f"numerical failure: {type(exc).__name__}: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
