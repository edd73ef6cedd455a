"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 state file that
parses but is not a valid density matrix, 3 state file that cannot be parsed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .criteria import (
    DETECTION_THRESHOLD,
    Basis,
    Criterion,
    DetectorConfig,
    eval_criterion,
    required_elements,
)
from .estimator import DEFAULT_SAMPLES, ProbabilityEstimate, estimate_probability, sweep_noise
from .exceptions import StateParseError, StateValidationError
from .haar import UnitaryGroup
from .reference import reference_targets
from .states import (
    NoiseFamily,
    apply_local_unitary,
    check_noise,
    density_matrix_to_dict,
    load_density_matrix,
    make_dicke,
    make_ghz,
    make_w,
    num_qubits,
    realize,
    validate_density_matrix,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_PARSE = 3

SAMPLES_ENV = "GMEPROB_SAMPLES"
CSV_HEADER = ["q", "p_hat", "ci_low", "ci_high", "n_samples", "n_hits", "seed"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:  # pragma: no cover - source checkout without install
        return "0+unknown"


def fmt(x: float) -> str:
    return format(float(x), ".10g")


def default_samples() -> int:
    raw = os.environ.get(SAMPLES_ENV)
    if raw is None:
        return DEFAULT_SAMPLES
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{SAMPLES_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{SAMPLES_ENV} must be positive, got {value}")
    return value


# -- state selection ----------------------------------------------------------

def state_config(args) -> dict:
    if args.state == "file":
        if not args.file:
            raise UsageError("--state file needs --file PATH")
        rho = load_density_matrix(args.file)
        return {"state": "file", "matrix": density_matrix_to_dict(rho)}
    if args.n is None:
        raise UsageError(f"--state {args.state} needs --n")
    cfg = {"state": args.state, "n": args.n}
    if args.state == "dicke":
        if args.m is None:
            raise UsageError("--state dicke needs --m")
        cfg["m"] = args.m
    return cfg


def build_state(cfg: dict):
    """Pure base vector, or a density matrix for file states."""
    kind = cfg["state"]
    try:
        if kind == "ghz":
            return make_ghz(cfg["n"])
        if kind == "w":
            return make_w(cfg["n"])
        if kind == "dicke":
            return make_dicke(cfg["n"], cfg["m"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if kind == "file":
        m = cfg["matrix"]
        pairs = np.asarray(m["entries"], dtype=float)
        dim = 1 << m["n"]
        return validate_density_matrix((pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim), tol=1e-8)
    raise UsageError(f"unknown state {kind!r}")


def noisy(state, q: float):
    """NoiseFamily for pure bases, mixed density matrix for file states."""
    if state.ndim == 1:
        return NoiseFamily(state, q)
    return (1 - q) * state + q * np.eye(state.shape[0]) / state.shape[0]


# -- argument groups ----------------------------------------------------------

def _add_state_args(p):
    p.add_argument("--state", choices=["ghz", "w", "dicke", "file"], required=True)
    p.add_argument("--n", type=int, help="number of qubits for built-in states")
    p.add_argument("--m", type=int, help="excitations for --state dicke")
    p.add_argument("--file", help="density-matrix JSON file for --state file")


def _add_mc_args(p):
    p.add_argument("--group", default="product", choices=["product", "symmetric"])
    p.add_argument("--criteria", default="q0", help="comma list, e.g. q0,q1")
    p.add_argument("--bases", default="comp", help="comma list of comp, hadamard")
    p.add_argument("--samples", type=int, default=None,
                   help=f"Monte Carlo samples (default ${SAMPLES_ENV} or {DEFAULT_SAMPLES})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=DETECTION_THRESHOLD)
    p.add_argument("--workers", type=int, default=1,
                   help="threads; 0 means one per CPU (results do not depend on it)")
    p.add_argument("--record", help="write a replayable run record (JSON) to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmeprob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one criterion on a state")
    _add_state_args(p)
    p.add_argument("--q", type=float, default=0.0, help="white-noise weight")
    p.add_argument("--criterion", default="q0")
    p.add_argument("--basis", default="comp")
    p.add_argument("--threshold", type=float, default=DETECTION_THRESHOLD)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("-v", "--verbose", action="store_true", help="list the matrix elements read")

    p = sub.add_parser("prob", help="estimate a detection probability")
    _add_state_args(p)
    p.add_argument("--q", type=float, default=0.0)
    _add_mc_args(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("sweep", help="detection probability along the white-noise family")
    _add_state_args(p)
    _add_mc_args(p)
    p.add_argument("--q-start", type=float, default=0.0)
    p.add_argument("--q-stop", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=11, help="grid points including both ends")
    p.add_argument("--grid", help="explicit comma list of q values (overrides start/stop/steps)")

    sub.add_parser("reference", help="print closed-form target probabilities")

    p = sub.add_parser("replay", help="re-run a recorded prob/sweep run and compare")
    p.add_argument("record")
    return parser


# -- commands -----------------------------------------------------------------

def _mc_config(args, state_cfg: dict, grid: list[float]) -> dict:
    samples = args.samples if args.samples is not None else default_samples()
    return {
        **state_cfg,
        "q_grid": grid,
        "group": args.group,
        "criteria": args.criteria,
        "bases": args.bases,
        "samples": samples,
        "seed": args.seed,
        "threshold": args.threshold,
    }


def execute(config: dict, workers: int | None = 1) -> list[tuple[float, ProbabilityEstimate]]:
    """Run the Monte Carlo described by a run-record config."""
    try:
        det = DetectorConfig.parse(config["criteria"], config["bases"])
        group = UnitaryGroup.parse(config["group"])
        grid = [check_noise(q) for q in config["q_grid"]]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    state = build_state(config)
    kwargs = dict(threshold=config["threshold"], workers=workers)
    try:
        if state.ndim == 1:
            result = sweep_noise(state, grid, group, det, config["samples"], config["seed"], **kwargs)
            return list(result.points)
        return [
            (q, estimate_probability(noisy(state, q), group, det, config["samples"], config["seed"], **kwargs))
            for q in grid
        ]
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _csv_rows(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for q, est in points:
        writer.writerow([fmt(q), fmt(est.p_hat), fmt(est.ci_low), fmt(est.ci_high),
                         est.n_samples, est.n_hits, est.seed])
    return buf.getvalue()


def run_record(command: str, config: dict, points) -> dict:
    return {
        "tool": "gmeprob",
        "version": tool_version(),
        "command": command,
        "config": config,
        "results": [{"q": q, **est.to_dict()} for q, est in points],
    }


def _workers(args) -> int | None:
    if args.workers < 0:
        raise UsageError("--workers must be >= 0")
    return None if args.workers == 0 else args.workers


def cmd_eval(args, out) -> int:
    cfg = state_config(args)
    state = build_state(cfg)
    try:
        q = check_noise(args.q)
        criterion = Criterion.parse(args.criterion)
        basis = Basis.parse(args.basis)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rho = realize(NoiseFamily(state, q)) if state.ndim == 1 else noisy(state, q)
    n = num_qubits(rho)
    try:
        criterion.check(n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    blocks = basis.local_unitary(n)
    if blocks is not None:
        rho = apply_local_unitary(rho, blocks)
    result = eval_criterion(rho, criterion, args.threshold)
    elements = required_elements(criterion, n)
    if args.format == "json":
        doc = {"criterion": str(criterion), "basis": str(basis), "n": n, "q": q,
               "value": result.value, "detected": result.detected, "threshold": args.threshold}
        if args.verbose:
            doc["required_elements"] = [list(e) for e in elements]
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    out.write(f"criterion: {criterion}\nbasis: {basis}\nvalue: {fmt(result.value)}\n")
    out.write(f"detected: {'yes' if result.detected else 'no'}\n")
    if args.verbose:
        out.write(f"required_elements ({len(elements)}):\n")
        for r, c in elements:
            out.write(f"  {r} {c}\n")
    return EXIT_OK


def _write_record(path, record):
    Path(path).write_text(json.dumps(record, indent=2) + "\n")


def cmd_prob(args, out) -> int:
    config = _mc_config(args, state_config(args), [args.q])
    points = execute(config, _workers(args))
    record = run_record("prob", config, points)
    if args.record:
        _write_record(args.record, record)
    if args.format == "json":
        out.write(json.dumps(record, indent=2) + "\n")
    else:
        out.write(_csv_rows(points))
    return EXIT_OK


def q_grid(args) -> list[float]:
    if args.grid:
        try:
            return [float(t) for t in args.grid.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"cannot parse --grid {args.grid!r}") from None
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.steps == 1:
        return [args.q_start]
    return [float(x) for x in np.linspace(args.q_start, args.q_stop, args.steps)]


def cmd_sweep(args, out) -> int:
    config = _mc_config(args, state_config(args), q_grid(args))
    points = execute(config, _workers(args))
    if args.record:
        _write_record(args.record, run_record("sweep", config, points))
    out.write(_csv_rows(points))
    return EXIT_OK


def cmd_reference(args, out) -> int:
    out.write("# analytic detection probabilities (symmetric group, single basis); acceptance targets\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["state", "group", "criteria", "bases", "value", "closed_form"])
    for t in reference_targets():
        writer.writerow([t.state, t.group, t.criteria, t.bases, fmt(t.value), t.closed_form])
    return EXIT_OK


def cmd_replay(args, out) -> int:
    try:
        record = json.loads(Path(args.record).read_text())
        config = record["config"]
        expected = record["results"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read run record: {exc}") from None
    points = execute(config)
    out.write(_csv_rows(points))
    got = [est.n_hits for _, est in points]
    want = [r["n_hits"] for r in expected]
    if got != want:
        sys.stderr.write(f"replay mismatch: recorded n_hits {want}, reproduced {got}\n")
        return EXIT_INVALID
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "prob": cmd_prob,
    "sweep": cmd_sweep,
    "reference": cmd_reference,
    "replay": cmd_replay,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        sys.stderr.write(f"gmeprob: error: {exc}\n")
        return EXIT_USAGE
    except StateParseError as exc:
        sys.stderr.write(f"gmeprob: cannot parse state: {exc}\n")
        return EXIT_PARSE
    except StateValidationError as exc:
        sys.stderr.write(f"gmeprob: invalid state ({type(exc).__name__}): {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
