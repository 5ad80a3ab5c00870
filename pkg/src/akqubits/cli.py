"""Command-line front end: verification, angle sweeps, protocol sampling.

Four subcommands share one output convention: "#"-prefixed comment lines
record the package version, the seed and the run parameters, then a
header row names the columns.  Floats are printed in scientific notation
with 17 significant digits so values round-trip exactly; rerunning any
command with the same flags and seed reproduces the output byte for
byte.  Cells that are undefined at an angle (the noise columns where
sin(2 theta) vanishes, fidelities of truncated trials) are left empty.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O
error.
"""

import argparse
import csv
import math
import re
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .backend import run_teleport_trials
from .core import (
    StateVector,
    partial_trace,
    random_qubit_batch,
    von_neumann_entropy,
)
from .entanglement import entanglement_entropy, schmidt_orthogonality_defect
from .interaction import SINGULAR_ATOL, uncertainty_report
from .swap import joint_input_state, random_swap_input, run_swap
from .teleport import branch_probabilities_closed_form, imperfection_measure
from .verify import DEFAULT_SEED, format_report, run_all_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

#: 97 interior points of (0, pi): covers both maximal-entanglement angles
#: and the noise minimum, and exercises the singular pi/2 column blanking.
DEFAULT_GRID_COUNT = 97


def parse_theta(text):
    """Angle literal: a plain float or a pi expression such as pi/3 or -2pi/5."""
    s = text.strip().lower().replace(" ", "")
    if "pi" in s:
        m = re.fullmatch(r"(-?)(\d*\.?\d*)\*?pi(?:/(-?\d+\.?\d*))?", s)
        if m is None:
            raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
        sign = -1.0 if m.group(1) else 1.0
        coeff = float(m.group(2)) if m.group(2) else 1.0
        divisor = float(m.group(3)) if m.group(3) else 1.0
        if divisor == 0.0:
            raise argparse.ArgumentTypeError(f"zero divisor in angle {text!r}")
        return sign * coeff * math.pi / divisor
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


class GridSpec:
    """A closed angle grid plus the literal spec it was parsed from."""

    def __init__(self, spec, thetas):
        self.spec = spec
        self.thetas = thetas


def parse_grid(text):
    """Closed grid spec start:stop:count with angle literals for the ends."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid {text!r} is not start:stop:count")
    start, stop = parse_theta(parts[0]), parse_theta(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid count {parts[2]!r} is not an integer") from None
    if count < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return GridSpec(text, np.linspace(start, stop, count))


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def parse_sign(text):
    if text not in ("+", "-"):
        raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")
    return +1 if text == "+" else -1


def _fmt(x):
    """17 significant digits: float64 round-trips exactly."""
    return f"{x:.16e}"


@contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            yield fh


def _writer(fh, fmt):
    return csv.writer(fh, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")


def _preamble(fh, command, seed, extra=()):
    fh.write(f"# akqubits {__version__}\n")
    fh.write(f"# command: {command}\n")
    fh.write(f"# seed: {seed}\n")
    for line in extra:
        fh.write(f"# {line}\n")


# ---------- subcommands ----------


def cmd_verify(args):
    results = run_all_checks(seed=args.seed)
    with _open_out(args.out) as fh:
        fh.write(format_report(results))
        fh.write("\n")
        failed = [r.name for r in results if not r.passed]
        if failed:
            fh.write(f"FAILED: {', '.join(failed)}\n")
            return EXIT_VERIFY
        fh.write(f"all {len(results)} checks passed\n")
        return EXIT_OK


def _sweep_thetas(args):
    if args.theta_grid is not None:
        return args.theta_grid.thetas, f"grid: {args.theta_grid.spec}"
    if args.theta is not None:
        return np.array([args.theta]), f"theta: {_fmt(args.theta)}"
    grid = np.linspace(0.0, math.pi, DEFAULT_GRID_COUNT + 2)[1:-1]
    return grid, f"grid: default, {DEFAULT_GRID_COUNT} interior points of (0, pi)"


def cmd_sweep(args):
    thetas, grid_note = _sweep_thetas(args)
    rng = np.random.default_rng(args.seed)
    psi = StateVector(random_qubit_batch(rng, 1)[0])
    with _open_out(args.out) as fh:
        _preamble(fh, "sweep", args.seed, (grid_note,))
        w = _writer(fh, args.format)
        w.writerow(
            [
                "theta",
                "entropy_nats",
                "lambda",
                "noise_sum",
                "tracking_noise_diff",
                "p1",
                "p2",
                "p3",
                "schmidt_defect",
                "imperfection",
            ]
        )
        for t in thetas:
            t = float(t)
            point = entanglement_entropy(psi, t)
            if abs(math.sin(2 * t)) <= SINGULAR_ATOL:
                noise_sum = diff = ""
            else:
                rep = uncertainty_report(psi, t)
                noise_sum = _fmt(rep.tracking_sum)
                diff = _fmt(rep.differences[0])
            p1, p2, p3 = branch_probabilities_closed_form(t)
            w.writerow(
                [
                    _fmt(t),
                    _fmt(point.entropy_nats),
                    _fmt(point.lam),
                    noise_sum,
                    diff,
                    _fmt(p1),
                    _fmt(p2),
                    _fmt(p3),
                    _fmt(schmidt_orthogonality_defect(psi, t).value),
                    _fmt(imperfection_measure(t)),
                ]
            )
    return EXIT_OK


def cmd_teleport(args):
    batch = run_teleport_trials(
        args.trials, args.sign, seed=args.seed, theta=args.theta
    )
    extra = [
        f"sign: {'+' if args.sign == +1 else '-'}",
        f"trials: {args.trials}",
        f"backend: {batch.backend}",
    ]
    if args.theta is not None:
        extra.insert(0, f"theta: {_fmt(args.theta)}")
    with _open_out(args.out) as fh:
        _preamble(fh, "teleport", args.seed, extra)
        w = _writer(fh, args.format)
        w.writerow(["trial", "rounds_used", "path", "fidelity"])
        for t in range(batch.trials):
            fid = "" if batch.truncated[t] else _fmt(batch.fidelities[t])
            w.writerow(
                [str(t), str(int(batch.rounds[t])), ",".join(map(str, batch.path(t))), fid]
            )
        ok = ~batch.truncated
        for r in range(1, int(batch.rounds.max()) + 1):
            p_hat = float((batch.rounds[ok] == r).sum()) / batch.trials
            fh.write(f"# rounds={r}: observed {_fmt(p_hat)} expected {_fmt(2.0 ** -r)}\n")
        fh.write(f"# mean_rounds: {_fmt(float(batch.rounds[ok].mean()))}\n")
        fh.write(f"# min_fidelity: {_fmt(float(np.nanmin(batch.fidelities)))}\n")
        fh.write(f"# truncated_trials: {int(batch.truncated.sum())}\n")
    return EXIT_OK


def cmd_swap(args):
    rng = np.random.default_rng(args.seed)
    rows = []
    fids = []
    deviations = []
    rounds = []
    for trial in range(args.trials):
        swap_input = random_swap_input(rng)
        before = von_neumann_entropy(partial_trace(joint_input_state(swap_input), [0]))
        out = run_swap(swap_input, args.sign, rng)
        if out.truncated:
            rows.append([str(trial), str(out.rounds_used),
                         ",".join(str(b) for b in out.path), _fmt(before), "", ""])
            continue
        after = von_neumann_entropy(partial_trace(out.final_state, [0]))
        rows.append(
            [
                str(trial),
                str(out.rounds_used),
                ",".join(str(b) for b in out.path),
                _fmt(before),
                _fmt(after),
                _fmt(out.fidelity_vs_target),
            ]
        )
        fids.append(out.fidelity_vs_target)
        deviations.append(abs(after - before))
        rounds.append(out.rounds_used)
    extra = (f"sign: {'+' if args.sign == +1 else '-'}", f"trials: {args.trials}")
    with _open_out(args.out) as fh:
        _preamble(fh, "swap", args.seed, extra)
        w = _writer(fh, args.format)
        w.writerow(
            ["trial", "rounds_used", "path", "input_r_entropy", "output_r_entropy", "fidelity"]
        )
        w.writerows(rows)
        if fids:
            fh.write(f"# min_fidelity: {_fmt(min(fids))}\n")
            fh.write(f"# max_entropy_deviation: {_fmt(max(deviations))}\n")
            fh.write(f"# mean_rounds: {_fmt(sum(rounds) / len(rounds))}\n")
    return EXIT_OK


# ---------- wiring ----------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="akqubits",
        description="Exact simulator of the four-qubit joint-measurement interaction.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (default 0)")
        p.add_argument("--out", default="-", help="output path, - for stdout")
        if fmt:
            p.add_argument(
                "--format", choices=("csv", "tsv"), default="csv", help="cell delimiter"
            )

    p = sub.add_parser("verify", help="run every closed-form check and report errors")
    common(p, fmt=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tabulate entropy, noise and beam weights vs angle")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--theta", type=parse_theta, help="single angle (e.g. pi/3)")
    group.add_argument(
        "--theta-grid",
        type=parse_grid,
        metavar="START:STOP:COUNT",
        help="closed grid of angles (e.g. 0.01:pi/2:50)",
    )
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("teleport", help="sample recycling teleportation trials")
    p.add_argument("--trials", type=positive_int, default=1000)
    p.add_argument("--sign", type=parse_sign, default=+1, help="protocol angle sign")
    p.add_argument(
        "--theta",
        type=parse_theta,
        default=None,
        help="override the interaction angle (first beam then imperfect)",
    )
    common(p)
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("swap", help="sample entanglement-swapping trials")
    p.add_argument("--trials", type=positive_int, default=200)
    p.add_argument("--sign", type=parse_sign, default=+1, help="protocol angle sign")
    common(p)
    p.set_defaults(func=cmd_swap)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"akqubits: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
