"""Command-line driver: solve -> correct -> fit, plus curve comparison.

Exit codes: 0 success, 1 internal error, 2 configuration error, 3 run
metadata mismatch, 4 unreadable or malformed input file.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .basis import DEFAULT_QUAD_ORDER, Symmetry
from .csvio import (
    CsvParseError,
    read_csv,
    read_sdcs,
    read_table,
    write_amplitudes,
    write_corrected_table,
    write_coupling,
    write_csv,
    write_json,
    write_sdcs,
    write_table,
    atomic_write_text,
)
from .extrapolation import DEFAULT_STEPS, DEFAULT_UNIT, MetadataMismatch, StepTriple, correct_table
from .fitting import DataSet, LinLin, fit_linlin, fit_poly, trim_extremes
from .matcher import ASYMPTOTIC_TERMS
from .observables import DEFAULT_SAMPLES, RYDBERG_EV, incident_to_total, sdcs_curve, tmatrix_table
from .pipeline import default_R0, solve_amplitudes
from .propagator import measure_inner_order

__all__ = ["ConfigError", "RunConfig", "RunManifest", "cmd_solve", "cmd_correct", "cmd_fit", "cmd_compare", "cmd_all", "main"]

logger = logging.getLogger("temkin_poet")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_METADATA, EXIT_PARSE = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run.

    ``R0`` of None selects the standard matching radius for the energy.
    """

    symmetry: Symmetry = Symmetry.SINGLET
    incident_ev: float = 27.2
    steps: tuple[float, float, float] = DEFAULT_STEPS
    R0: float | None = None
    basis_size: int = 6
    quad_order: int = DEFAULT_QUAD_ORDER
    taylor_order: int = 10
    asymptotic_terms: int = ASYMPTOTIC_TERMS
    kappa: float = 1.0
    samples: int = DEFAULT_SAMPLES
    unit: float = DEFAULT_UNIT
    exponent: int = 8
    max_drop: int = 8
    output_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "symmetry", Symmetry.parse(self.symmetry))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        steps = tuple(float(h) for h in self.steps)
        if len(steps) != 3:
            raise ConfigError(f"steps needs three values, got {len(steps)}")
        object.__setattr__(self, "steps", steps)
        try:
            StepTriple(*steps, unit=self.unit)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        try:
            E = incident_to_total(self.incident_ev)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.R0 is not None and not self.R0 > 100 * max(steps):
            raise ConfigError(f"R0 = {self.R0} must exceed Delta = 100 h for every step")
        checks = [
            (self.basis_size >= 1, "basis_size must be >= 1"),
            (self.quad_order >= 32, "quad_order must be >= 32"),
            (self.taylor_order >= 2, "taylor_order must be >= 2"),
            (self.asymptotic_terms >= 0, "asymptotic_terms must be >= 0"),
            (self.kappa > 0, "kappa must be positive"),
            (self.samples >= 2, "samples must be >= 2"),
            (self.exponent >= 1, "exponent must be >= 1"),
            (0 <= self.max_drop <= self.samples // 10, "max_drop must lie in [0, samples / 10]"),
            (self.jobs >= 1, "jobs must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        if E <= 0:
            raise ConfigError("energy must be above threshold")

    @property
    def energy(self) -> float:
        """Final-channel energy in Ry."""
        return incident_to_total(self.incident_ev)

    @property
    def matching_radius(self) -> float:
        return self.R0 if self.R0 is not None else default_R0(self.energy)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["symmetry"] = self.symmetry.label
        out["steps"] = list(self.steps)
        return out

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            kwargs[key] = _convert(key, raw)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keep "R0" as written
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"bad config file {path}: {exc}") from None
        merged = {}
        for section in parser.sections():
            merged.update(parser[section])
        return cls.from_mapping(merged)

    def with_overrides(self, **overrides) -> "RunConfig":
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        try:
            return replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _convert(key: str, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if key == "steps":
            return tuple(float(v) for v in text.replace(",", " ").split())
        if key == "R0":
            return None if text.lower() in ("", "auto", "none") else float(text)
        if key in ("basis_size", "quad_order", "taylor_order", "asymptotic_terms", "samples", "exponent", "max_drop", "jobs"):
            return int(text)
        if key in ("incident_ev", "kappa", "unit"):
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return text


@dataclass
class RunManifest:
    command: str
    config: dict
    measured_order: float
    order_errors: list
    conventions: dict
    version: str = __version__
    timings: dict = field(default_factory=dict)
    runs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def write(self, path) -> Path:
        return write_json(path, asdict(self))


_ORDER_CACHE: dict = {}


def _measured_order() -> tuple[float, list]:
    if "value" not in _ORDER_CACHE:
        _ORDER_CACHE["value"] = measure_inner_order()
    return _ORDER_CACHE["value"]


def _conventions(cfg: RunConfig | None, **extra) -> dict:
    out = {
        "amplitude_scale": "weight of the lowest regular solution (unit rho^(nu_0+1) coefficient) in the unit incoming-wave combination; no initial-state factor",
        "rydberg_eV": RYDBERG_EV,
        "energy_axis_fit": "secondary-electron energy x in Ry",
    }
    if cfg is not None:
        out.update(
            {
                "kappa": cfg.kappa,
                "extrapolation_unit_au": cfg.unit,
                "error_exponents": [cfg.exponent, cfg.exponent + 2],
            }
        )
    out.update(extra)
    return out


def _manifest(command: str, cfg: RunConfig | None, config: dict | None = None, **extra) -> RunManifest:
    t0 = time.perf_counter()
    order, errors = _measured_order()
    m = RunManifest(
        command=command,
        config=cfg.to_dict() if cfg is not None else (config or {}),
        measured_order=order,
        order_errors=errors,
        conventions=_conventions(cfg, **extra),
    )
    m.timings["order_measurement_s"] = time.perf_counter() - t0
    return m


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def _h_tag(h: float) -> str:
    return f"{h:g}"


def _solve_one(args):
    cfg, h = args
    return solve_amplitudes(
        cfg.symmetry,
        cfg.energy,
        h,
        cfg.matching_radius,
        basis_size=cfg.basis_size,
        quad_order=cfg.quad_order,
        taylor_order=cfg.taylor_order,
        asymptotic_terms=cfg.asymptotic_terms,
    )


def cmd_solve(cfg: RunConfig, dump_coupling: bool = False) -> list[Path]:
    """Solve at the three step lengths; write tables, amplitudes and a manifest."""
    out = Path(cfg.output_dir)
    manifest = _manifest("solve", cfg)
    t0 = time.perf_counter()
    jobs = [(cfg, h) for h in cfg.steps]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs))) as pool:
            results = list(pool.map(_solve_one, jobs))
    else:
        results = [_solve_one(j) for j in jobs]
    manifest.timings["solve_s"] = time.perf_counter() - t0
    sym = cfg.symmetry.label
    meta = {"incident_eV": cfg.incident_ev, "R0": cfg.matching_radius, "kappa": cfg.kappa}
    paths = []
    for h, res in zip(cfg.steps, results):
        table = tmatrix_table(res.amplitudes, h)
        p = write_table(out / f"table_{sym}_h{_h_tag(h)}.csv", table, meta)
        write_amplitudes(out / f"amplitudes_{sym}_h{_h_tag(h)}.csv", res.amplitudes, {"h": h, **meta})
        paths.append(p)
        run_info = {k: v for k, v in res.info.items() if k != "seconds"}
        manifest.runs.append(run_info)
        manifest.timings[f"solve_h{_h_tag(h)}_s"] = res.info["seconds"]
    if dump_coupling:
        paths_c = write_coupling(out / f"coupling_{sym}.csv", results[0].coupling)
        manifest.outputs.append(str(paths_c))
    manifest.outputs.extend(str(p) for p in paths)
    manifest.write(out / f"manifest_solve_{sym}.json")
    return paths


def cmd_correct(
    table_paths,
    output_dir,
    samples: int = DEFAULT_SAMPLES,
    kappa: float = 1.0,
    unit: float = DEFAULT_UNIT,
    exponent: int = 8,
    cfg: RunConfig | None = None,
) -> dict:
    """Two-term correction of three tables; writes the corrected table and raw/corrected SDCS curves."""
    tables = [read_table(p) for p in table_paths]
    if len(tables) != 3:
        raise ConfigError(f"correct needs three table files, got {len(tables)}")
    tables.sort(key=lambda t: t.h if t.h is not None else math.inf)
    if any(t.h is None for t in tables):
        raise MetadataMismatch("input tables must be raw step-length tables")
    try:
        steps = StepTriple(*(t.h for t in tables), unit=unit)
    except ValueError as exc:
        raise MetadataMismatch(str(exc)) from None
    corrected = correct_table(tables, steps, p=exponent)
    out = Path(output_dir)
    sym = tables[0].symmetry.label
    manifest = _manifest(
        "correct",
        cfg,
        config={"tables": [str(p) for p in table_paths], "samples": samples, "kappa": kappa, "unit": unit, "exponent": exponent},
        kappa=kappa,
        extrapolation_unit_au=unit,
        error_exponents=[exponent, exponent + 2],
    )
    written = {"corrected_table": write_corrected_table(out / f"table_{sym}_corrected.csv", corrected, tables)}
    raw = []
    for t in tables:
        curve = sdcs_curve(t, num_samples=samples, kappa=kappa)
        raw.append(write_sdcs(out / f"sdcs_{sym}_h{_h_tag(t.h)}.csv", curve))
    written["sdcs_raw"] = raw
    curve = sdcs_curve(corrected.as_table(), num_samples=samples, kappa=kappa)
    written["sdcs_corrected"] = write_sdcs(out / f"sdcs_{sym}_corrected.csv", curve)
    manifest.outputs = [str(written["corrected_table"])] + [str(p) for p in raw] + [str(written["sdcs_corrected"])]
    manifest.write(out / f"manifest_correct_{sym}.json")
    return written


def _read_reference(path, energy: float) -> tuple[np.ndarray, np.ndarray]:
    """Reference curve as (fractions, values); accepts a fraction or energy (Ry) column."""
    meta, header, rows, lines = read_csv(path)
    if "value" not in header:
        raise CsvParseError(path, 1, "reference needs a 'value' column")
    if "fraction" in header:
        xcol, scale = header.index("fraction"), 1.0
    elif "energy_Ry" in header or "energy" in header:
        xcol = header.index("energy_Ry" if "energy_Ry" in header else "energy")
        scale = 1.0 / energy
    else:
        raise CsvParseError(path, 1, "reference needs a 'fraction' or 'energy' column")
    vcol = header.index("value")
    xs, vs = [], []
    for row, lineno in zip(rows, lines):
        try:
            xs.append(float(row[xcol]) * scale)
            vs.append(float(row[vcol]))
        except ValueError:
            raise CsvParseError(path, lineno, f"not a number in {row!r}") from None
    xs, vs = np.array(xs), np.array(vs)
    if xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise CsvParseError(path, lines[0] if lines else 1, "reference abscissae must be strictly increasing")
    return xs, vs


def compare_curves(fractions, values, ref_x, ref_v, free_scale: bool = False) -> dict:
    """Deviation of a curve from a reference interpolated onto its fractions.

    With ``free_scale`` the curve is first multiplied by the single factor
    that minimises the squared deviation.
    """
    inside = (fractions >= ref_x[0]) & (fractions <= ref_x[-1])
    if inside.sum() < 2:
        raise ConfigError("reference curve does not overlap the computed fraction range")
    f, v = fractions[inside], values[inside]
    r = np.interp(f, ref_x, ref_v)
    scale = 1.0
    if free_scale:
        denom = float(v @ v)
        scale = float(v @ r) / denom if denom > 0 else 1.0
    diff = scale * v - r
    return {
        "scale": scale,
        "rms": float(np.sqrt(np.mean(diff**2))),
        "max_abs": float(np.max(np.abs(diff))),
        "points": int(inside.sum()),
        "fractions": f,
        "scaled": scale * v,
        "reference": r,
    }


def cmd_compare(sdcs_path, ref_path, output_dir, free_scale: bool = False) -> dict:
    curve = read_sdcs(sdcs_path)
    ref_x, ref_v = _read_reference(ref_path, curve.energy)
    result = compare_curves(curve.fractions, curve.values, ref_x, ref_v, free_scale)
    out = Path(output_dir)
    stem = Path(sdcs_path).stem
    rows = zip(result["fractions"], result["scaled"], result["reference"])
    meta = {"kind": "comparison", "reference": Path(ref_path).name, "scale": result["scale"], "rms": result["rms"]}
    result["path"] = write_csv(out / f"compare_{stem}.csv", ["fraction", "scaled_value", "reference"], rows, meta)
    return result


def _default_model(symmetry: Symmetry, energy: float) -> tuple[str, int]:
    if symmetry == Symmetry.SINGLET:
        return "linlin", 0
    return "poly", 4 if math.isclose(energy, 1.0, rel_tol=1e-9) else 6


def cmd_fit(
    sdcs_path,
    output_dir,
    model: str | None = None,
    degree: int | None = None,
    max_drop: int = 8,
    compare: str | None = None,
    free_scale: bool = False,
) -> dict:
    """Fit one SDCS curve; writes a text report, a coefficient CSV and fitted samples."""
    curve = read_sdcs(sdcs_path)
    auto_model, auto_degree = _default_model(curve.symmetry, curve.energy)
    model = (model or auto_model).lower()
    if model not in ("linlin", "poly"):
        raise ConfigError(f"model must be 'linlin' or 'poly', got {model!r}")
    if model == "poly":
        degree = auto_degree if degree is None else degree
        if not 1 <= degree <= 6:
            raise ConfigError(f"polynomial degree must lie in [1, 6], got {degree}")
    if model == "linlin" and curve.symmetry == Symmetry.TRIPLET:
        logger.warning("the kinked-line model is intended for singlet curves; fitting triplet data anyway")
    if model == "poly" and curve.symmetry == Symmetry.SINGLET:
        logger.warning("the polynomial model is intended for triplet curves; fitting singlet data anyway")
    fitter = fit_linlin if model == "linlin" else (lambda d: fit_poly(d, degree))
    data = DataSet(curve.energies, curve.values)
    if max_drop > len(data) // 10:
        raise ConfigError(f"max_drop = {max_drop} exceeds 10% of the {len(data)} samples")
    # a smooth preliminary fit: the kinked line can bend into an end spike
    data = trim_extremes(data, max_drop)
    fitted = fitter(data)
    names = "abcd" if isinstance(fitted, LinLin) else "abcdefg"[: len(fitted.coefficients)]
    coeffs = dict(zip(names, fitted.coefficients))
    out = Path(output_dir)
    stem = Path(sdcs_path).stem
    header = ["model"] + list("abcdefg") + ["residual_norm", "trimmed"]
    row = [model] + [coeffs.get(k, "") for k in "abcdefg"] + [fitted.residual, " ".join(str(i) for i in data.trimmed)]
    meta = {"kind": "fit", "source": Path(sdcs_path).name, "x_axis": "secondary-electron energy (Ry)"}
    if model == "poly":
        meta["degree"] = degree
    if isinstance(fitted, LinLin):
        meta["kink_identified"] = fitted.kink_identified
    csv_path = write_csv(out / f"fit_{stem}.csv", header, [row], meta)
    x = curve.energies
    y = fitted(x)
    sym_defect = float(np.max(np.abs(y - y[::-1]))) / (float(np.max(np.abs(y))) or 1.0)
    samples_path = write_csv(
        out / f"fitcurve_{stem}.csv",
        ["fraction", "energy_Ry", "value"],
        zip(curve.fractions, x, y),
        {"kind": "fitted_curve", "model": model},
    )
    lines = [
        f"source: {sdcs_path}",
        f"model: {model}" + (f" (degree {degree})" if model == "poly" else ""),
        "x axis: secondary-electron energy in Ry",
        "coefficients: " + ", ".join(f"{k} = {v!r}" for k, v in coeffs.items()),
        f"residual norm: {fitted.residual!r}",
        f"trimmed indices: {list(data.trimmed)}",
        f"symmetry defect of fitted curve about E/2: {sym_defect:.3e}",
    ]
    result = {"model": fitted, "trimmed": data.trimmed, "csv": csv_path, "samples": samples_path}
    if compare:
        cmp = cmd_compare(sdcs_path, compare, output_dir, free_scale)
        lines.append(f"reference {compare}: scale {cmp['scale']!r}, rms {cmp['rms']:.6e}, max {cmp['max_abs']:.6e}")
        result["compare"] = cmp
    report = atomic_write_text(out / f"fit_{stem}.txt", "\n".join(lines) + "\n")
    result["report"] = report
    return result


def cmd_all(cfg: RunConfig, dump_coupling: bool = False) -> dict:
    tables = cmd_solve(cfg, dump_coupling)
    written = cmd_correct(tables, cfg.output_dir, cfg.samples, cfg.kappa, cfg.unit, cfg.exponent, cfg=cfg)
    fit = cmd_fit(written["sdcs_corrected"], cfg.output_dir, max_drop=cfg.max_drop)
    return {"tables": tables, **written, "fit": fit}


# ----------------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------------


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file with key = value settings")
    p.add_argument("--symmetry", help="singlet or triplet")
    p.add_argument("--energy-ev", type=float, dest="incident_ev", help="incident electron energy in eV")
    p.add_argument("--steps", nargs=3, type=float, metavar=("H1", "H2", "H3"), help="step lengths in a.u.")
    p.add_argument("--R0", type=float, help="matching radius in a.u.")
    p.add_argument("--basis-size", type=int)
    p.add_argument("--quad-order", type=int)
    p.add_argument("--taylor-order", type=int)
    p.add_argument("--asymptotic-terms", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--unit", type=float, help="extrapolation length unit in a.u.")
    p.add_argument("--exponent", type=int, help="leading error exponent p")
    p.add_argument("--max-drop", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--dump-coupling", action="store_true", help="also write the coupling matrix")


_CONFIG_KEYS = [f.name for f in fields(RunConfig)]


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    if overrides.get("steps") is not None:
        overrides["steps"] = tuple(overrides["steps"])
    return cfg.with_overrides(**overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="temkin-poet", description="Temkin-Poet ionization amplitudes with step-length error correction")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve at three step lengths and write T-matrix tables")
    _add_config_args(p)

    p = sub.add_parser("correct", help="two-term correction of three tables, with SDCS curves")
    p.add_argument("tables", nargs=3)
    p.add_argument("--out", dest="output_dir", default="out")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--unit", type=float, default=DEFAULT_UNIT)
    p.add_argument("--exponent", type=int, default=8)

    p = sub.add_parser("fit", help="fit an SDCS curve")
    p.add_argument("sdcs")
    p.add_argument("--model", choices=("linlin", "poly"))
    p.add_argument("--degree", type=int)
    p.add_argument("--max-drop", type=int, default=8)
    p.add_argument("--compare", help="reference CSV to overlay")
    p.add_argument("--free-scale", action="store_true", help="fit one scale factor against the reference")
    p.add_argument("--out", dest="output_dir", default="out")

    p = sub.add_parser("compare", help="compare an SDCS curve with a reference CSV")
    p.add_argument("sdcs")
    p.add_argument("reference")
    p.add_argument("--free-scale", action="store_true")
    p.add_argument("--out", dest="output_dir", default="out")

    p = sub.add_parser("all", help="solve, correct and fit in one go")
    _add_config_args(p)
    return parser


def _run(args) -> None:
    if args.command == "solve":
        cfg = _config_from_args(args)
        for p in cmd_solve(cfg, args.dump_coupling):
            print(p)
    elif args.command == "correct":
        if args.samples < 2:
            raise ConfigError("samples must be >= 2")
        if not args.kappa > 0:
            raise ConfigError("kappa must be positive")
        written = cmd_correct(args.tables, args.output_dir, args.samples, args.kappa, args.unit, args.exponent)
        print(written["corrected_table"])
        print(written["sdcs_corrected"])
    elif args.command == "fit":
        res = cmd_fit(args.sdcs, args.output_dir, args.model, args.degree, args.max_drop, args.compare, args.free_scale)
        print(res["report"].read_text(), end="")
    elif args.command == "compare":
        res = cmd_compare(args.sdcs, args.reference, args.output_dir, args.free_scale)
        print(f"scale {res['scale']!r}  rms {res['rms']:.6e}  max {res['max_abs']:.6e}  ({res['points']} points)")
    elif args.command == "all":
        cfg = _config_from_args(args)
        res = cmd_all(cfg, args.dump_coupling)
        print(res["fit"]["report"].read_text(), end="")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MetadataMismatch as exc:
        print(f"metadata mismatch: {exc}", file=sys.stderr)
        return EXIT_METADATA
    except CsvParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001 - top-level guard
        logger.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
