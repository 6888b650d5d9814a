"""Point, sweep and phase-diagram evaluation with flat CSV / JSON output."""

from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .contractions import DEFAULT_N_EFF, Backend, Convention, contraction_table
from .correlation import correlator_x
from .entanglement import entanglement_entropy
from .model import ModelParams, classify_phase
from .spectrum import BandExtrema, band_extrema
from .topology import winding_number

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ObservableSet:
    correlator: tuple = ()
    entropy: tuple = ()
    winding: bool = False
    extrema: bool = False
    phase: bool = False

    @property
    def empty(self) -> bool:
        return not (self.correlator or self.entropy or self.winding or self.extrema or self.phase)


@dataclass(frozen=True)
class RunConfig:
    observables: ObservableSet = ObservableSet()
    convention: Convention = Convention.BIORTHOGONAL
    backend: Backend = Backend.FINITE_SUM
    n_eff: int = DEFAULT_N_EFF
    resolution: int = 1024
    workers: int = 1
    tol: float = 1e-9
    winding_samples: int = 1024
    n: int | None = None


@dataclass(frozen=True)
class Ray:
    """``lam = lam0 * exp(i phi)`` for ``steps`` equally spaced ``lam0``."""

    phi: float
    lam0_min: float
    lam0_max: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")
        if not 0 <= self.lam0_min < self.lam0_max:
            raise ValueError("lambda0 range must be non-negative and increasing")

    def points(self):
        lam0 = np.linspace(self.lam0_min, self.lam0_max, self.steps)
        return [(float(t), complex(t * math.cos(self.phi), t * math.sin(self.phi))) for t in lam0]


@dataclass(frozen=True)
class Segment:
    """``lam = start + t (end - start)`` for ``steps`` equally spaced ``t in [0, 1]``."""

    start: complex
    end: complex
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")

    def points(self):
        t = np.linspace(0.0, 1.0, self.steps)
        return [(float(s), complex(self.start + s * (self.end - self.start))) for s in t]


@dataclass(frozen=True)
class PhaseGrid:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    step: float

    def axes(self):
        def axis(lo, hi):
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ValueError(f"bad grid bounds [{lo}, {hi}]")
            count = int(round((hi - lo) / self.step)) + 1 if hi > lo else 1
            return np.linspace(lo, hi, count)
        return axis(self.re_min, self.re_max), axis(self.im_min, self.im_max)


@dataclass
class ObservablePoint:
    index: int
    gamma: float
    lam: complex
    param: float = math.nan
    phase: str | None = None
    correlator: dict = field(default_factory=dict)
    entropy: dict = field(default_factory=dict)
    winding: float | None = None
    extrema: BandExtrema | None = None
    error: str | None = None

    def to_dict(self):
        return {
            "index": self.index,
            "param": json_value(self.param),
            "gamma": self.gamma,
            "lambda": [self.lam.real, self.lam.imag],
            "phase": self.phase,
            "correlator": {str(r): [v.real, v.imag] for r, v in self.correlator.items()},
            "entropy": {str(L): [v.real, v.imag] for L, v in self.entropy.items()},
            "winding": json_value(self.winding),
            "extrema": asdict(self.extrema) if self.extrema is not None else None,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d):
        ext = d.get("extrema")
        return cls(
            index=int(d["index"]),
            gamma=float(d["gamma"]),
            lam=complex(*d["lambda"]),
            param=math.nan if d.get("param") is None else float(d["param"]),
            phase=d.get("phase"),
            correlator={int(r): complex(*v) for r, v in d.get("correlator", {}).items()},
            entropy={int(L): complex(*v) for L, v in d.get("entropy", {}).items()},
            winding=None if d.get("winding") is None else float(d["winding"]),
            extrema=BandExtrema(**ext) if ext else None,
            error=d.get("error"),
        )

    def correlator_series(self):
        """``[(r, Re C^x_r), ...]`` sorted by r, ready for :func:`scaling_fit`."""
        return [(r, self.correlator[r].real) for r in sorted(self.correlator)]

    def entropy_series(self):
        return [(L, self.entropy[L].real) for L in sorted(self.entropy)]


def json_value(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


class PointError(RuntimeError):
    def __init__(self, gamma, lam, cause):
        self.gamma, self.lam, self.cause = gamma, lam, cause
        super().__init__(f"at gamma={gamma:g}, lambda={lam.real:.12g}{lam.imag:+.12g}j: "
                         f"{type(cause).__name__}: {cause}")


def run_point(gamma, lam, config: RunConfig, index: int = 0, param: float = math.nan) -> ObservablePoint:
    """Evaluate every requested observable at one point of parameter space."""
    lam = complex(lam)
    obs = config.observables
    point = ObservablePoint(index, float(gamma), lam, param)
    if obs.empty:
        return point
    try:
        params = ModelParams(gamma, lam, config.n)
        if obs.phase:
            point.phase = str(classify_phase(params, config.tol))
        if obs.correlator or obs.entropy:
            r_need = max([*obs.correlator, 1]) if obs.correlator else 0
            l_need = max(obs.entropy) - 1 if obs.entropy else 0
            table = contraction_table(params, max(r_need, l_need, 0), config.convention,
                                      config.backend, config.n_eff)
            point.correlator = {r: correlator_x(table, r).value for r in obs.correlator}
            point.entropy = {L: entanglement_entropy(table, L).value for L in obs.entropy}
        if obs.winding:
            point.winding = winding_number(params, config.winding_samples).value
        if obs.extrema:
            point.extrema = band_extrema(params, config.resolution)
    except Exception as exc:
        raise PointError(gamma, lam, exc) from exc
    return point


def _safe_point(task):
    index, param, gamma, lam, config = task
    try:
        return run_point(gamma, lam, config, index, param)
    except PointError as exc:
        return ObservablePoint(index, float(gamma), complex(lam), param, error=str(exc))


def evaluate_tasks(tasks, workers: int = 1):
    """Evaluate independent point tasks; results come back in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [_safe_point(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_safe_point, tasks, chunksize=chunk))


def run_sweep(path, gamma: float, config: RunConfig) -> list[ObservablePoint]:
    """One point per step of a :class:`Ray` or :class:`Segment`; failures become error rows."""
    tasks = [(i, t, gamma, lam, config) for i, (t, lam) in enumerate(path.points())]
    return evaluate_tasks(tasks, config.workers)


def run_phase_diagram(grid: PhaseGrid, gamma: float, config: RunConfig) -> list[ObservablePoint]:
    """Phase label (and optionally winding) on every cell, rows ordered Im-major then Re."""
    res, ims = grid.axes()
    cfg = replace(config, observables=ObservableSet(phase=True, winding=config.observables.winding))
    tasks = []
    for im in ims:
        for re in res:
            tasks.append((len(tasks), math.nan, gamma, complex(re, im), cfg))
    return evaluate_tasks(tasks, config.workers)


def failed(points) -> int:
    return sum(p.error is not None for p in points)


def sweep_columns(obs: ObservableSet, derivatives: bool = False):
    cols = ["index", "param", "re_lambda", "im_lambda", "gamma", "phase"]
    for r in obs.correlator:
        cols += [f"re_cx_{r}", f"im_cx_{r}"]
    for L in obs.entropy:
        cols += [f"re_s_{L}", f"im_s_{L}"]
    if obs.winding:
        cols.append("w")
    if obs.extrema:
        cols += ["min_abs_re", "argmin_re_k", "min_abs_im", "argmin_im_k"]
    if derivatives:
        cols += [f"d_re_cx_{r}" for r in obs.correlator]
        cols += [f"d_re_s_{L}" for L in obs.entropy]
    cols.append("error")
    return cols


def format_value(x):
    if x is None:
        return "nan"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def point_row(p: ObservablePoint, obs: ObservableSet):
    nan = math.nan
    row = {"index": str(p.index), "param": format_value(p.param), "re_lambda": format_value(p.lam.real),
           "im_lambda": format_value(p.lam.imag), "gamma": format_value(p.gamma), "phase": p.phase or "",
           "error": p.error or ""}
    for r in obs.correlator:
        v = p.correlator.get(r, complex(nan, nan))
        row[f"re_cx_{r}"], row[f"im_cx_{r}"] = format_value(v.real), format_value(v.imag)
    for L in obs.entropy:
        v = p.entropy.get(L, complex(nan, nan))
        row[f"re_s_{L}"], row[f"im_s_{L}"] = format_value(v.real), format_value(v.imag)
    if obs.winding:
        row["w"] = format_value(p.winding)
    if obs.extrema:
        e = p.extrema
        for name in ("min_abs_re", "argmin_re_k", "min_abs_im", "argmin_im_k"):
            row[name] = format_value(getattr(e, name) if e is not None else None)
    return row


def add_derivatives(points, obs: ObservableSet, rows):
    """Finite-difference slopes of Re C^x and Re S_L with respect to the sweep parameter."""
    param = np.array([p.param for p in points], dtype=float)
    for key, series in [(f"d_re_cx_{r}", [p.correlator.get(r, complex(math.nan)).real for p in points])
                        for r in obs.correlator] + \
                       [(f"d_re_s_{L}", [p.entropy.get(L, complex(math.nan)).real for p in points])
                        for L in obs.entropy]:
        grad = np.gradient(np.array(series, dtype=float), param) if len(points) > 1 else [math.nan]
        for row, g in zip(rows, grad):
            row[key] = format_value(g)
    return rows


def header_line():
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return f"# nhxy schema={SCHEMA_VERSION} generated={stamp}\n"


def write_csv(fh, columns, rows, timestamp: bool = True):
    if timestamp:
        fh.write(header_line())
    writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def write_points_csv(fh, points, obs: ObservableSet, timestamp=True, derivatives=False):
    rows = [point_row(p, obs) for p in points]
    if derivatives:
        add_derivatives(points, obs, rows)
    write_csv(fh, sweep_columns(obs, derivatives), rows, timestamp)


def write_phase_csv(fh, points, timestamp=True):
    rows = [{"re_lambda": format_value(p.lam.real), "im_lambda": format_value(p.lam.imag),
             "phase": p.phase or "", "w": format_value(p.winding), "error": p.error or ""} for p in points]
    write_csv(fh, ["re_lambda", "im_lambda", "phase", "w", "error"], rows, timestamp)


def write_json(fh, points, meta=None, timestamp=True):
    doc = {"schema": SCHEMA_VERSION}
    if timestamp:
        doc["generated"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    if meta:
        doc["meta"] = meta
    doc["points"] = [p.to_dict() for p in points]
    json.dump(doc, fh, indent=1)
    fh.write("\n")


def load_points_json(path) -> list[ObservablePoint]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [ObservablePoint.from_dict(d) for d in doc["points"]]


def gnuplot_script(csv_path, obs: ObservableSet, x_column: str = "param"):
    """Companion gnuplot script plotting the real parts of every observable column."""
    cols = [f"re_cx_{r}" for r in obs.correlator] + [f"re_s_{L}" for L in obs.entropy]
    if obs.winding:
        cols.append("w")
    lines = ["set datafile separator ','", "set datafile commentschars '#'",
             "set key autotitle columnhead", f"set xlabel '{x_column}'"]
    if cols:
        plots = ", ".join(f"'{csv_path}' using '{x_column}':'{c}' with linespoints" for c in cols)
        lines.append(f"plot {plots}")
    return "\n".join(lines) + "\n"
