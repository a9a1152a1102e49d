"""File formats: JSON matrices, CSV tables and atomic writes."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .algebra import TOL_SYM, hermitian_residual


class MatrixFormatError(ValueError):
    """Malformed or non-Hermitian matrix file."""


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory.

    Either the complete file appears or nothing does; OSError propagates.
    """
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt(x) -> str:
    """Shortest round-trip decimal of a float."""
    return repr(float(x))


def matrix_to_json(m) -> str:
    m = np.asarray(m, dtype=complex)
    doc = {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }
    return json.dumps(doc, indent=1) + "\n"


def save_matrix(path, m) -> None:
    atomic_write_text(path, matrix_to_json(m))


def parse_matrix(text: str, tol: float = TOL_SYM) -> np.ndarray:
    """Parse the JSON matrix format and enforce Hermiticity.

    Inputs within ``tol`` of Hermitian are symmetrized to (M + M^dagger)/2;
    larger residuals are rejected with the residual in the message.
    """
    try:
        doc = json.loads(text)
        dim = int(doc["dim"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix file: {exc}") from exc
    if dim < 1 or re.shape != (dim, dim) or im.shape != (dim, dim):
        raise MatrixFormatError(f"expected {dim}x{dim} 're' and 'im' arrays")
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise MatrixFormatError("matrix has non-finite entries")
    res = hermitian_residual(m)
    if res > tol:
        raise MatrixFormatError(f"matrix is not Hermitian: symmetrization residual {res:.3e}")
    if res == 0.0:
        return m
    return (m + m.conj().T) / 2.0


def load_matrix(path, tol: float = TOL_SYM) -> np.ndarray:
    return parse_matrix(Path(path).read_text(), tol)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def read_vectors(path) -> list[tuple[int, np.ndarray]]:
    """Rows of interleaved chart coordinates (q1, p1, q2, p2, ...) from a CSV file.

    Blank lines and lines starting with '#' are ignored, as is a first row
    that does not parse as numbers.  Returns (line number, values) pairs.
    """
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not cells or not any(cells) or cells[0].startswith("#"):
                continue
            try:
                vals = np.array([float(c) for c in cells])
            except ValueError:
                if not out and lineno == 1:
                    continue
                raise MatrixFormatError(f"line {lineno}: non-numeric entry") from None
            out.append((lineno, vals))
    return out


def interleaved_to_complex(vals) -> np.ndarray:
    """(q1, p1, q2, p2, ...) -> z with z_k = q_k + i p_k."""
    vals = np.asarray(vals, dtype=float)
    if vals.size == 0 or vals.size % 2:
        raise ValueError("expected an even, nonzero number of coordinates (q1, p1, q2, p2, ...)")
    return vals[0::2] + 1j * vals[1::2]
