"""Command-line front end.

Subcommands
-----------
verify        run the verification suites and write a JSON or CSV report
evolve        sample the Schrodinger flow of a Hamiltonian into a CSV trajectory
bloch-export  project C^2 vectors to Bloch-sphere coordinates
export-matrix write a preset Hamiltonian in the JSON matrix format

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 I/O error.
The log level comes from ``VERIFY_LOG`` (quiet, info or debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import PAULI, random_hermitian
from .hilbert_kaehler import as_real, propagator
from .hopf_reduction import pauli_frame, project_point
from .io import (
    MatrixFormatError,
    atomic_write_text,
    csv_text,
    interleaved_to_complex,
    load_matrix,
    matrix_to_json,
    read_vectors,
)
from .suites import SUITES, ConfigError, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
PRESETS = ("pauli1", "pauli2", "pauli3", "identity", "random-gue")

log = logging.getLogger("qkahler")


class IOFailure(Exception):
    """Unreadable input or unwritable output."""


def setup_logging(env=None) -> None:
    env = os.environ if env is None else env
    name = env.get("VERIFY_LOG", "info").strip().lower() or "info"
    if name not in LOG_LEVELS:
        raise ConfigError(f"VERIFY_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    log.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(LOG_LEVELS[name])
    log.propagate = False


# ----------------------------------------------------------------- helpers --


def preset_hamiltonian(name: str, dim: int, seed: int = 0) -> np.ndarray:
    if name.startswith("pauli"):
        if dim != 2:
            raise ConfigError(f"preset {name} needs dim 2, got {dim}")
        return PAULI[int(name[-1])].copy()
    if name == "identity":
        return np.eye(dim, dtype=complex)
    if name == "random-gue":
        return random_hermitian(dim, np.random.default_rng(seed))
    raise ConfigError(f"unknown preset {name!r}")


def resolve_hamiltonian(source: str, dim: int | None, seed: int = 0) -> np.ndarray:
    """A preset name or a path to a JSON matrix file."""
    if source in PRESETS:
        if dim is None:
            raise ConfigError(f"preset {source} needs a dimension")
        return preset_hamiltonian(source, dim, seed)
    path = Path(source)
    try:
        h = load_matrix(path)
    except MatrixFormatError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except OSError as exc:
        raise IOFailure(f"cannot read {source}: {exc.strerror or exc}") from exc
    if dim is not None and h.shape[0] != dim:
        raise ConfigError(f"{source}: matrix has dim {h.shape[0]}, expected {dim}")
    return h


def parse_z0(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
        z = interleaved_to_complex(vals)
    except ValueError as exc:
        raise ConfigError(f"--z0: {exc}") from exc
    if not np.all(np.isfinite(z)):
        raise ConfigError("--z0 has non-finite entries")
    if not np.any(z):
        raise ConfigError("--z0 must be nonzero")
    return z


def check_writable(out: str | None) -> None:
    if out in (None, "-"):
        return
    parent = Path(out).resolve().parent
    if not parent.is_dir():
        raise IOFailure(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise IOFailure(f"output directory is not writable: {parent}")


def emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        atomic_write_text(out, text)
    except OSError as exc:
        raise IOFailure(f"cannot write {out}: {exc.strerror or exc}") from exc
    log.info("wrote %s", out)


# ----------------------------------------------------------------- verify --


REPORT_COLUMNS = ("check_id", "suite", "dim", "n_trials", "max_abs_err", "max_rel_err", "tol",
                  "metric", "pass", "identity")


def report_text(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    rows = [[r.to_dict()[c] for c in REPORT_COLUMNS] for r in report.records]
    return csv_text(REPORT_COLUMNS, rows)


def cmd_verify(args) -> int:
    config = RunConfig(dim=args.dim, trials=args.trials, seed=args.seed, tol=args.tol,
                       suite=args.suite, out_path=args.out, format=args.format)
    config.validate()
    check_writable(args.out)
    report = run_suite(config, timing=args.timing, log=log)
    for r in report.records:
        log.info("%-4s %-42s abs %.2e rel %.2e tol %.0e (%s)", "ok" if r.passed else "FAIL",
                 r.check_id, r.max_abs_err, r.max_rel_err, r.tol, r.metric)
    emit(report_text(report, args.format), args.out)
    n_fail = len(report.failures)
    log.info("%d checks, %d failed", len(report.records), n_fail)
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


# ----------------------------------------------------------------- evolve --


def trajectory(h, z0, t_max: float, steps: int) -> tuple[list[str], list[list[float]]]:
    """Rows (t, q.., p.., |z|^2[, y1, y2, y3]) at t_k = t_max k / steps."""
    n = z0.size
    header = ["t"] + [f"q{k + 1}" for k in range(n)] + [f"p{k + 1}" for k in range(n)]
    header.append("norm_sq")
    frame = pauli_frame() if n == 2 else None
    if frame is not None:
        header += ["y1", "y2", "y3"]
    rows = []
    for k in range(steps + 1):
        t = t_max * k / steps
        z = propagator(h, t) @ z0
        x = as_real(z)
        row = [t, *x, float(np.vdot(z, z).real)]
        if frame is not None:
            row += list(frame.y(x))
        rows.append(row)
    return header, rows


def cmd_evolve(args) -> int:
    z0 = parse_z0(args.z0)
    if args.steps < 1:
        raise ConfigError("--steps must be positive")
    if not (np.isfinite(args.t_max) and args.t_max >= 0):
        raise ConfigError("--t-max must be finite and nonnegative")
    h = resolve_hamiltonian(args.hamiltonian, z0.size, args.seed)
    check_writable(args.out)
    header, rows = trajectory(h, z0, args.t_max, args.steps)
    n0 = float(np.vdot(z0, z0).real)
    drift = max(abs(r[1 + 2 * z0.size] - n0) for r in rows)
    emit(csv_text(header, rows), args.out)
    limit = args.tol * max(1.0, n0)
    if drift > limit:
        log.error("norm drift %.3e exceeds %.1e", drift, limit)
        return EXIT_FAIL
    log.info("%d samples, max norm drift %.3e", len(rows), drift)
    return EXIT_OK


# ----------------------------------------------------------- bloch-export --


def cmd_bloch_export(args) -> int:
    try:
        vectors = read_vectors(args.inp)
    except MatrixFormatError as exc:
        raise ConfigError(f"{args.inp}: {exc}") from exc
    except OSError as exc:
        raise IOFailure(f"cannot read {args.inp}: {exc.strerror or exc}") from exc
    check_writable(args.out)
    rows = []
    for lineno, vals in vectors:
        if vals.size != 4:
            raise ConfigError(f"{args.inp}: line {lineno} has {vals.size} values, expected 4 "
                              "(q1, p1, q2, p2)")
        z = interleaved_to_complex(vals)
        if not np.all(np.isfinite(z)) or not np.any(z):
            log.warning("line %d: zero or non-finite vector skipped", lineno)
            continue
        rows.append(list(project_point(z).y))
    emit(csv_text(("y1", "y2", "y3"), rows), args.out)
    log.info("%d points exported, %d skipped", len(rows), len(vectors) - len(rows))
    return EXIT_OK


# ---------------------------------------------------------- export-matrix --


def cmd_export_matrix(args) -> int:
    dim = args.dim
    if dim is None and args.hamiltonian in PRESETS:
        dim = 2
    h = resolve_hamiltonian(args.hamiltonian, dim, args.seed)
    check_writable(args.out)
    emit(matrix_to_json(h), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser --


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qkahler", description="Kähler geometry verification tool")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--out", default=None, help="report path (stdout if omitted)")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--timing", action="store_true",
                   help="record wall time in the report (breaks byte determinism)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("evolve", help="sample the Schrodinger flow")
    e.add_argument("--hamiltonian", required=True, help=f"preset ({', '.join(PRESETS)}) or JSON path")
    e.add_argument("--z0", required=True, help='interleaved chart coordinates "q1,p1,q2,p2,..."')
    e.add_argument("--t-max", type=float, default=10.0)
    e.add_argument("--steps", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0, help="seed for random-gue")
    e.add_argument("--tol", type=float, default=1e-10, help="allowed norm drift (relative)")
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_evolve)

    b = sub.add_parser("bloch-export", help="project C^2 vectors to the Bloch sphere")
    b.add_argument("--in", dest="inp", required=True, help="CSV of q1,p1,q2,p2 rows")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bloch_export)

    m = sub.add_parser("export-matrix", help="write a preset Hamiltonian as JSON")
    m.add_argument("--hamiltonian", required=True)
    m.add_argument("--dim", type=int, default=None,
                   help="dimension for presets (default 2); checked against a file if given")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_export_matrix)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        setup_logging()
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
