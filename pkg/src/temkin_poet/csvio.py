"""Plain-text outputs: CSV with a ``#`` metadata block, JSON manifests.

Every CSV starts with ``# key: value`` lines, followed by one header line
and the data rows.  Floats are written with ``repr`` so files round-trip
exactly and repeated runs produce identical bytes.  All writes go through a
temporary file in the target directory followed by a rename.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .basis import Symmetry
from .coupling import CouplingMatrix
from .extrapolation import CorrectedTable
from .matcher import AmplitudeVector
from .observables import SdcsCurve, TMatrixTable

__all__ = [
    "CsvParseError",
    "atomic_write_text",
    "write_csv",
    "read_csv",
    "write_table",
    "read_table",
    "write_corrected_table",
    "write_sdcs",
    "read_sdcs",
    "write_amplitudes",
    "write_coupling",
    "write_json",
]


class CsvParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows, meta: dict | None = None) -> Path:
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return atomic_write_text(path, buf.getvalue())


def read_csv(path) -> tuple[dict, list[str], list[list[str]], list[int]]:
    """Returns (meta, header, rows, line numbers of the rows)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CsvParseError(path, 0, f"cannot read file ({exc.strerror})") from exc
    meta: dict[str, str] = {}
    header = None
    rows, lines = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if header is not None:
                continue
            body = line[1:].strip()
            if ":" not in body:
                raise CsvParseError(path, lineno, f"metadata line lacks 'key: value' form: {line!r}")
            key, value = body.split(":", 1)
            meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = [f.strip() for f in fields]
            continue
        if len(fields) != len(header):
            raise CsvParseError(path, lineno, f"expected {len(header)} fields, found {len(fields)}")
        rows.append([f.strip() for f in fields])
        lines.append(lineno)
    if header is None:
        raise CsvParseError(path, 0, "no header line")
    return meta, header, rows, lines


def _column_floats(path, header, rows, lines, name) -> np.ndarray:
    if name not in header:
        raise CsvParseError(path, 1, f"missing column {name!r}")
    j = header.index(name)
    out = []
    for row, lineno in zip(rows, lines):
        try:
            out.append(float(row[j]))
        except ValueError:
            raise CsvParseError(path, lineno, f"column {name!r}: not a number: {row[j]!r}") from None
    return np.array(out)


def _meta_value(path, meta, key, convert):
    if key not in meta:
        raise CsvParseError(path, 1, f"missing metadata key {key!r}")
    try:
        return convert(meta[key])
    except ValueError:
        raise CsvParseError(path, 1, f"bad metadata value for {key!r}: {meta[key]!r}") from None


def _optional_float(text: str):
    return None if text in ("", "None", "corrected") else float(text)


# ----------------------------------------------------------------------------
# T-matrix tables
# ----------------------------------------------------------------------------


def _table_meta(T: TMatrixTable, extra: dict | None) -> dict:
    meta = {
        "kind": "tmatrix",
        "symmetry": T.symmetry.label,
        "energy_Ry": float(T.energy),
        "h": "corrected" if T.h is None else float(T.h),
        "degrees": " ".join(str(d) for d in T.degrees),
    }
    meta.update(extra or {})
    return meta


def write_table(path, T: TMatrixTable, meta: dict | None = None) -> Path:
    """Columns P, n, n_prime, re, im, abs with P = 1..N^2 in row-major order."""
    rows = [(label, n, m, float(t.real), float(t.imag), float(abs(t))) for label, n, m, t in T.rows()]
    return write_csv(path, ["P", "n", "n_prime", "re", "im", "abs"], rows, _table_meta(T, meta))


def read_table(path) -> TMatrixTable:
    meta, header, rows, lines = read_csv(path)
    try:
        symmetry = Symmetry.parse(meta.get("symmetry", ""))
    except ValueError as exc:
        raise CsvParseError(path, 1, str(exc)) from None
    energy = _meta_value(path, meta, "energy_Ry", float)
    h = _meta_value(path, meta, "h", _optional_float)
    degrees = _meta_value(path, meta, "degrees", lambda s: tuple(int(v) for v in s.split()))
    n = len(degrees)
    if len(rows) != n * n:
        raise CsvParseError(path, lines[-1] if lines else 1, f"expected {n * n} rows for {n} channels, found {len(rows)}")
    labels = _column_floats(path, header, rows, lines, "P")
    if not np.array_equal(labels, np.arange(1, n * n + 1)):
        raise CsvParseError(path, lines[0], "pair labels must run 1..N^2 in order")
    re = _column_floats(path, header, rows, lines, "re")
    im = _column_floats(path, header, rows, lines, "im")
    return TMatrixTable(entries=(re + 1j * im).reshape(n, n), degrees=degrees, symmetry=symmetry, energy=energy, h=h)


def write_corrected_table(path, corrected: CorrectedTable, tables, meta: dict | None = None) -> Path:
    """Pair label, the three raw entries, T*, A and B (real and imaginary parts)."""
    tables = sorted(tables, key=lambda t: t.h)
    src = corrected.source
    header = ["P", "n", "n_prime"]
    for i in (1, 2, 3):
        header += [f"re_T_h{i}", f"im_T_h{i}"]
    header += ["re_Tstar", "im_Tstar", "abs_Tstar", "re_A", "im_A", "re_B", "im_B"]
    rows = []
    flat = [t.entries.ravel() for t in tables]
    Ts, A, B = (np.asarray(v).ravel() for v in (corrected.Tstar, corrected.model.A, corrected.model.B))
    for k, (label, n, m) in enumerate(src.basis.pairs()):
        row = [label, n, m]
        for f in flat:
            row += [float(f[k].real), float(f[k].imag)]
        row += [float(Ts[k].real), float(Ts[k].imag), float(abs(Ts[k]))]
        row += [float(A[k].real), float(A[k].imag), float(B[k].real), float(B[k].imag)]
        rows.append(row)
    info = {
        "kind": "tmatrix_corrected",
        "symmetry": src.symmetry.label,
        "energy_Ry": float(src.energy),
        "h": "corrected",
        "degrees": " ".join(str(d) for d in src.degrees),
        "steps": " ".join(repr(float(h)) for h in corrected.steps.steps),
        "unit": float(corrected.steps.unit),
        "exponents": " ".join(str(p) for p in corrected.model.exponents),
    }
    info.update(meta or {})
    return write_csv(path, header, rows, info)


# ----------------------------------------------------------------------------
# Curves, amplitudes, coupling
# ----------------------------------------------------------------------------


SDCS_HEADER = ["fraction", "value", "symmetry", "energy_Ry", "h_or_corrected", "kappa"]


def write_sdcs(path, curve: SdcsCurve, meta: dict | None = None) -> Path:
    info = {"kind": "sdcs", "units": "pi a0^2 / Ry"}
    info.update(meta or {})
    rows = [
        (float(f), float(v), curve.symmetry.label, float(curve.energy), curve.tag, float(curve.kappa))
        for f, v in zip(curve.fractions, curve.values)
    ]
    return write_csv(path, SDCS_HEADER, rows, info)


def read_sdcs(path) -> SdcsCurve:
    meta, header, rows, lines = read_csv(path)
    if not rows:
        raise CsvParseError(path, 1, "no data rows")
    f = _column_floats(path, header, rows, lines, "fraction")
    v = _column_floats(path, header, rows, lines, "value")
    energy = _column_floats(path, header, rows, lines, "energy_Ry")
    kappa = _column_floats(path, header, rows, lines, "kappa")
    for name in ("symmetry", "h_or_corrected"):
        if name not in header:
            raise CsvParseError(path, 1, f"missing column {name!r}")
    sym_col = header.index("symmetry")
    tag_col = header.index("h_or_corrected")
    if len({r[sym_col] for r in rows}) != 1 or len(set(energy)) != 1 or len({r[tag_col] for r in rows}) != 1:
        raise CsvParseError(path, lines[0], "symmetry, energy and tag must be constant within one curve")
    try:
        return SdcsCurve(
            fractions=f,
            values=v,
            symmetry=Symmetry.parse(rows[0][sym_col]),
            energy=float(energy[0]),
            tag=rows[0][tag_col],
            kappa=float(kappa[0]),
        )
    except ValueError as exc:
        raise CsvParseError(path, lines[0], str(exc)) from None


def write_amplitudes(path, amp: AmplitudeVector, meta: dict | None = None) -> Path:
    info = {"kind": "amplitudes", "symmetry": Symmetry(amp.symmetry).label, "energy_Ry": float(amp.energy)}
    info.update(meta or {})
    rows = [(n, float(c.real), float(c.imag)) for n, c in zip(amp.degrees, amp.C)]
    return write_csv(path, ["n", "re_C", "im_C"], rows, info)


def write_coupling(path, m: CouplingMatrix, meta: dict | None = None) -> Path:
    info = {"kind": "coupling", "symmetry": m.basis.symmetry.label, "P": float(m.momentum), "quad_order": m.quad_order}
    info.update(meta or {})
    degs = m.basis.degrees
    rows = [(i, j, degs[i], degs[j], v) for i, j, v in m.to_rows()]
    return write_csv(path, ["row", "col", "n", "n_prime", "alpha"], rows, info)


def write_json(path, payload: dict) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
