"""Length sweeps, scaling fits, and the sweep file formats.

A sweep evaluates the full curvature report over a descending list of
core lengths and fits log-log slopes of |K|, Pi, and the chain bound
against l, which is how the asymptotic statements (K = O(l), bound =
O(l^-2), 1/Pi = O(l^3)) become checkable numbers.  Output goes to CSV
(data rows plus trailing "# fit ..." / "# warning ..." comment lines,
so the data block stays uniformly parseable) or JSON ({meta, rows,
fits, warnings}); both round-trip through parse_report, which reports
byte offsets on malformed input.

Numbers are written with repr, i.e. the shortest decimal that
round-trips, so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curvature import BC_MODES, CouplingProfile, CurvatureReport, build_fields, plane_quantities
from .errors import ConfigError, ReportParseError

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "SweepConfig",
    "ScalingFit",
    "SweepResult",
    "run_sweep",
    "write_csv",
    "write_json",
    "parse_report",
    "ParsedReport",
    "exponent_verdicts",
    "load_config_file",
]

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "l",
    "K",
    "R",
    "Pi",
    "inner00",
    "inner11",
    "inner01",
    "lemma7Bound",
    "gridSize",
    "bcMode",
    "profileC1",
    "schema_version",
)

MIN_SWEEP_GRID = 256

# verdict thresholds for the three fitted exponents
K_SLOPE_MIN = 0.8
BOUND_SLOPE_RANGE = (-2.3, -1.7)
PI_SLOPE_MAX = -3.0


def _finite(name: str, v) -> float:
    try:
        v = float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {v!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"{name} must be finite, got {v!r}")
    return v


@dataclass(frozen=True)
class SweepConfig:
    """Validated inputs for one sweep run."""

    lengths: tuple
    grid_size: int = 4096
    profile_c1: float = 1.0
    a1: float = 1.0
    b1: float = 1.0
    b2: float = 1.0
    bc_mode: str = "mixed"
    compact_offset: float = 0.0
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        try:
            lengths = tuple(float(v) for v in self.lengths)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"lengths must be numbers, got {self.lengths!r}") from exc
        if not lengths:
            raise ConfigError("lengths must be a nonempty list")
        for v in lengths:
            if not (math.isfinite(v) and 0.0 < v < 1.0):
                raise ConfigError(f"every length must lie in (0, 1), got {v!r}")
        if any(b >= a for a, b in zip(lengths, lengths[1:])):
            raise ConfigError(f"lengths must be strictly decreasing, got {lengths}")
        object.__setattr__(self, "lengths", lengths)
        try:
            n = int(self.grid_size)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid size must be an integer, got {self.grid_size!r}") from exc
        if n < MIN_SWEEP_GRID:
            raise ConfigError(f"grid size must be >= {MIN_SWEEP_GRID}, got {n}")
        object.__setattr__(self, "grid_size", n)
        for name in ("profile_c1", "a1", "b1", "b2", "compact_offset"):
            v = _finite(name, getattr(self, name))
            if v < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, v)
        if self.bc_mode not in BC_MODES:
            raise ConfigError(f"bc mode must be one of {BC_MODES}, got {self.bc_mode!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")


@dataclass(frozen=True)
class ScalingFit:
    """OLS fit of log(quantity) against log(l)."""

    name: str
    slope: float
    intercept: float
    residual: float  # rms of the log-space residuals


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    reports: tuple
    fits: dict
    warnings: tuple


def _fit_loglog(name: str, lengths, values) -> ScalingFit | None:
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0.0):
        return None
    x = np.log(np.asarray(lengths, dtype=float))
    y = np.log(vals)
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((y - design @ [slope, intercept]) ** 2)))
    return ScalingFit(name=name, slope=float(slope), intercept=float(intercept), residual=rms)


def _one_report(config: SweepConfig, l: float) -> CurvatureReport:
    fields = build_fields(l, CouplingProfile(c1=config.profile_c1), n=config.grid_size)
    return plane_quantities(
        fields,
        bc_mode=config.bc_mode,
        a1=config.a1,
        b1=config.b1,
        b2=config.b2,
        compact_offset=config.compact_offset,
    )


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Evaluate every configured length; rows keep the config's order."""
    workers = max(1, int(workers))
    if workers == 1:
        reports = tuple(_one_report(config, l) for l in config.lengths)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = tuple(pool.map(lambda l: _one_report(config, l), config.lengths))

    fits: dict = {}
    warnings = []
    if len(reports) < 3:
        warnings.append(f"fits skipped: need at least 3 lengths, got {len(reports)}")
    else:
        ls = [r.l for r in reports]
        for name, values in (
            ("K", [abs(r.k) for r in reports]),
            ("Pi", [r.pi for r in reports]),
            ("lemma7Bound", [r.lemma7_bound for r in reports]),
        ):
            fit = _fit_loglog(name, ls, values)
            if fit is None:
                warnings.append(f"fit {name} skipped: nonpositive values")
            else:
                fits[name] = fit
    return SweepResult(config=config, reports=reports, fits=fits, warnings=tuple(warnings))


def _row_values(r: CurvatureReport) -> list:
    return [
        r.l,
        r.k,
        r.r,
        r.pi,
        r.inner00,
        r.inner11,
        r.inner01,
        r.lemma7_bound,
        r.grid_size,
        r.bc_mode,
        r.profile.c1,
        SCHEMA_VERSION,
    ]


def write_csv(result: SweepResult) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in result.reports:
        cells = []
        for v in _row_values(r):
            cells.append(v if isinstance(v, str) else repr(v) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    for name in ("K", "Pi", "lemma7Bound"):
        fit = result.fits.get(name)
        if fit is not None:
            lines.append(
                f"# fit {name} slope={fit.slope!r} "
                f"intercept={fit.intercept!r} residual={fit.residual!r}"
            )
    for w in result.warnings:
        lines.append(f"# warning {w}")
    return "\n".join(lines) + "\n"


def write_json(result: SweepResult) -> str:
    c = result.config
    doc = {
        "meta": {
            "schema_version": SCHEMA_VERSION,
            "lengths": list(c.lengths),
            "gridSize": c.grid_size,
            "profileC1": c.profile_c1,
            "bcValues": [c.a1, c.b1, c.b2],
            "bcMode": c.bc_mode,
            "compactOffset": c.compact_offset,
            "format": c.format,
        },
        "rows": [dict(zip(CSV_COLUMNS, _row_values(r))) for r in result.reports],
        "fits": {
            name: {"slope": f.slope, "intercept": f.intercept, "residual": f.residual}
            for name, f in result.fits.items()
        },
        "warnings": list(result.warnings),
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class ParsedReport:
    """Rows and fits recovered from a sweep file of either format."""

    rows: tuple
    fits: dict
    warnings: tuple
    source_format: str


_NUMERIC_COLUMNS = ("l", "K", "R", "Pi", "inner00", "inner11", "inner01", "lemma7Bound", "profileC1")


def _parse_csv_bytes(raw: bytes) -> ParsedReport:
    header = ",".join(CSV_COLUMNS)
    rows = []
    fits: dict = {}
    warnings = []
    offset = 0
    lineno = 0
    for line in raw.split(b"\n"):
        start = offset
        offset += len(line) + 1
        text = line.decode("utf-8", errors="replace").strip()
        if lineno == 0:
            if text != header:
                raise ReportParseError(f"missing or wrong header at byte {start}: {text[:60]!r}")
            lineno += 1
            continue
        lineno += 1
        if not text:
            continue
        if text.startswith("#"):
            body = text.lstrip("#").strip()
            if body.startswith("fit "):
                try:
                    _, name, *pairs = body.split()
                    kv = dict(p.split("=", 1) for p in pairs)
                    fits[name] = ScalingFit(
                        name=name,
                        slope=float(kv["slope"]),
                        intercept=float(kv["intercept"]),
                        residual=float(kv["residual"]),
                    )
                except (ValueError, KeyError) as exc:
                    raise ReportParseError(f"bad fit line at byte {start}: {text!r}") from exc
            elif body.startswith("warning"):
                warnings.append(body[len("warning") :].strip())
            continue
        cells = text.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ReportParseError(
                f"row with {len(cells)} fields (expected {len(CSV_COLUMNS)}) at byte {start}"
            )
        row = dict(zip(CSV_COLUMNS, cells))
        try:
            for key in _NUMERIC_COLUMNS:
                row[key] = float(row[key])
            row["gridSize"] = int(row["gridSize"])
            row["schema_version"] = int(row["schema_version"])
        except ValueError as exc:
            raise ReportParseError(f"unparsable number at byte {start}: {exc}") from exc
        rows.append(row)
    return ParsedReport(rows=tuple(rows), fits=fits, warnings=tuple(warnings), source_format="csv")


def _parse_json_bytes(raw: bytes) -> ParsedReport:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ReportParseError(f"not UTF-8 at byte {exc.start}") from exc
    except json.JSONDecodeError as exc:
        raise ReportParseError(f"malformed JSON at byte {exc.pos}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ReportParseError("JSON report must be an object with a 'rows' array")
    rows = []
    for i, row in enumerate(doc["rows"]):
        missing = [c for c in CSV_COLUMNS if c not in row]
        if missing:
            raise ReportParseError(f"row {i} missing columns {missing}")
        rows.append({c: row[c] for c in CSV_COLUMNS})
    fits = {
        name: ScalingFit(name=name, slope=f["slope"], intercept=f["intercept"], residual=f["residual"])
        for name, f in doc.get("fits", {}).items()
    }
    return ParsedReport(
        rows=tuple(rows),
        fits=fits,
        warnings=tuple(doc.get("warnings", ())),
        source_format="json",
    )


def parse_report(path) -> ParsedReport:
    """Read a sweep file back; malformed content names a byte offset."""
    raw = Path(path).read_bytes()
    if raw.lstrip()[:1] == b"{":
        return _parse_json_bytes(raw)
    return _parse_csv_bytes(raw)


def exponent_verdicts(fits: dict) -> dict:
    """pass/fail/insufficient-data per fitted exponent."""
    lo, hi = BOUND_SLOPE_RANGE
    rules = {
        "K": lambda s: s >= K_SLOPE_MIN,
        "lemma7Bound": lambda s: lo <= s <= hi,
        "Pi": lambda s: s <= PI_SLOPE_MAX,
    }
    out = {}
    for name, ok in rules.items():
        fit = fits.get(name)
        out[name] = "insufficient-data" if fit is None else ("pass" if ok(fit.slope) else "fail")
    return out


# config-file keys share their names with the CLI flags
CONFIG_KEYS = (
    "lengths",
    "grid",
    "c1",
    "a1",
    "b1",
    "b2",
    "bc-mode",
    "offset",
    "out",
    "format",
    "workers",
)


def load_config_file(path) -> dict:
    """Flat key=value config; unknown keys are hard errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out
