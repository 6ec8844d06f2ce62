"""Steady-state pipeline and parameter sweeps.

A point evaluation goes params -> derived quantities -> drift and diffusion
matrices -> stability -> Lyapunov covariance matrix -> entanglement measures.
Grid points are independent, so sweeps can be spread over a process pool;
results land in pre-indexed slots, so the table does not depend on the
number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gaussian, model
from .errors import DomainError, EmptyResultError, MagnomechError, PhysicalityError
from .linalg import lyapunov_residual, lyapunov_solve

MODE_LABELS = ("a", "m", "b")
MEASURES = ("e_am", "e_mb", "e_ab", "r_min")
AXIS_NAMES = ("delta_a", "delta_m_eff", "temperature", "g_ratio", "kappa_a")
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class PointResult:
    stable: bool
    max_real_eig: float
    e_am: Optional[float] = None
    e_mb: Optional[float] = None
    e_ab: Optional[float] = None
    r_min: Optional[float] = None
    residuals: Optional[Tuple[float, float, float]] = None
    lyapunov_residual: Optional[float] = None
    low_excitation_ok: Optional[bool] = None
    kerr_ok: Optional[bool] = None
    error: Optional[str] = None
    argmax: Optional[Dict[str, float]] = None

    def measure(self, name):
        return getattr(self, name)


def steady_state(p: model.SystemParams, derived: Optional[model.DerivedState] = None):
    """Drift matrix, diffusion matrix, stability verdict and (if stable) the CM.

    Returns ``(a, d, verdict, cm)`` with ``cm`` set to None for unstable points.
    Matrices are in units of ``omega_b``.
    """
    derived = derived or model.derive(p)
    a = model.drift_matrix(p, derived.g_mb_eff)
    d = model.diffusion_matrix(p, derived)
    verdict = model.stability_check(a)
    if not verdict.stable:
        return a, d, verdict, None
    v = lyapunov_solve(a, d)
    return a, d, verdict, gaussian.CovarianceMatrix(v, MODE_LABELS)


def evaluate_point(p: model.SystemParams, tripartite=True) -> PointResult:
    """Run the full pipeline at one parameter set.

    Solver failures are recorded in ``error`` rather than raised, so a sweep
    keeps going.
    """
    try:
        derived = model.derive(p)
        a, d, verdict, cm = steady_state(p, derived)
    except MagnomechError as exc:
        return PointResult(stable=False, max_real_eig=math.nan, error=f"{type(exc).__name__}: {exc}")
    row = PointResult(
        stable=verdict.stable,
        max_real_eig=verdict.max_real_part,
        low_excitation_ok=derived.low_excitation_ok,
        kerr_ok=derived.kerr_ok,
    )
    if cm is None:
        return row
    try:
        row.lyapunov_residual = lyapunov_residual(a, cm.matrix, d)
        if not cm.is_physical():
            raise PhysicalityError("steady-state covariance matrix is unphysical")
        part = gaussian.ModePartition
        row.e_am = gaussian.log_negativity(cm, part(0, (1,)), check=False)
        row.e_mb = gaussian.log_negativity(cm, part(1, (2,)), check=False)
        row.e_ab = gaussian.log_negativity(cm, part(0, (2,)), check=False)
        if tripartite:
            row.residuals = tuple(gaussian.residual_contangles(cm, check=False))
            row.r_min = gaussian.clamp_residual(min(row.residuals))
    except MagnomechError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


@dataclass(frozen=True)
class Axis:
    """One sweep axis. Frequencies in rad/s, temperature in K, g_ratio bare."""

    name: str
    lo: float
    hi: float
    points: int = 101

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise DomainError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.points < 2:
            raise DomainError(f"axis {self.name}: need at least 2 points")
        if not self.lo < self.hi:
            raise DomainError(f"axis {self.name}: min must be below max")

    def values(self):
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class InnerOptimization:
    """Maximize each output over ``delta_a`` at every grid point."""

    lo: float
    hi: float
    points: int = 401


@dataclass(frozen=True)
class SweepSpec:
    base: model.SystemParams
    axes: Tuple[Axis, ...]
    outputs: Tuple[str, ...] = ("e_am", "e_mb", "e_ab", "r_min")
    inner: Optional[InnerOptimization] = None

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not 1 <= len(self.axes) <= 2:
            raise DomainError("a sweep has one or two axes")
        if len({ax.name for ax in self.axes}) != len(self.axes):
            raise DomainError("sweep axes must differ")
        bad = [o for o in self.outputs if o not in MEASURES]
        if bad or not self.outputs:
            raise DomainError(f"unknown outputs {bad}; expected a subset of {MEASURES}")
        if self.inner is not None and any(ax.name == "delta_a" for ax in self.axes):
            raise DomainError("delta_a cannot be both a sweep axis and optimized")

    def grid(self) -> List[Tuple[float, ...]]:
        """Axis-value tuples in row-major order (last axis fastest)."""
        vals = [ax.values() for ax in self.axes]
        if len(vals) == 1:
            return [(float(x),) for x in vals[0]]
        return [(float(x), float(y)) for x in vals[0] for y in vals[1]]


def apply_axis(p: model.SystemParams, name: str, value: float) -> model.SystemParams:
    if name == "g_ratio":
        if p.is_physical:
            raise DomainError("g_ratio axis needs a direct effective coupling")
        return replace(p, coupling=model.DirectCoupling(value * p.g_ma))
    return replace(p, **{name: value})


@dataclass
class SweepResult:
    spec: SweepSpec
    points: List[Tuple[float, ...]]
    rows: List[PointResult]

    @property
    def failures(self) -> Dict[Tuple[float, ...], str]:
        return {pt: r.error for pt, r in zip(self.points, self.rows) if r.error}

    @property
    def stable_fraction(self):
        return sum(r.stable for r in self.rows) / len(self.rows)

    def column(self, name):
        return np.array([np.nan if r.measure(name) is None else r.measure(name) for r in self.rows])


def _evaluate_task(args):
    p, tripartite, inner, outputs = args
    if inner is None:
        return evaluate_point(p, tripartite)
    return _optimized_point(p, inner, outputs)


def _optimized_point(p, inner, outputs):
    try:
        optima = optimize_over_detunings(p, outputs, inner.lo, inner.hi, inner.points)
    except EmptyResultError as exc:
        return PointResult(stable=False, max_real_eig=math.nan, error=str(exc))
    first = optima[outputs[0]]
    row = PointResult(
        stable=True,
        max_real_eig=math.nan,
        lyapunov_residual=first.max_lyapunov_residual,
        argmax={name: opt.delta_a for name, opt in optima.items()},
    )
    for name, opt in optima.items():
        setattr(row, name, opt.value)
    return row


def default_workers():
    env = os.environ.get("MAGNOMECH_WORKERS")
    return max(1, int(env)) if env else 1


def map_points(
    params: Sequence[model.SystemParams], tripartite=True, workers=1, inner=None, outputs=MEASURES
):
    """Evaluate many parameter sets, preserving order."""
    tasks = [(p, tripartite, inner, tuple(outputs)) for p in params]
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=chunk))


def run_sweep(spec: SweepSpec, workers=1) -> SweepResult:
    points = spec.grid()
    params = []
    for pt in points:
        p = spec.base
        for ax, value in zip(spec.axes, pt):
            p = apply_axis(p, ax.name, value)
        params.append(p)
    rows = map_points(
        params,
        tripartite="r_min" in spec.outputs,
        workers=workers,
        inner=spec.inner,
        outputs=spec.outputs,
    )
    return SweepResult(spec, points, rows)


@dataclass
class Optimum:
    delta_a: float
    value: float
    evaluations: int = 0
    max_lyapunov_residual: float = 0.0
    min_residual: float = math.inf


class _Objective:
    """Caches point evaluations along the cavity-detuning line."""

    def __init__(self, base, tripartite):
        self.base = base
        self.tripartite = tripartite
        self.cache = {}
        self.max_residual = 0.0
        self.min_monogamy = math.inf

    def row(self, delta_a):
        r = self.cache.get(delta_a)
        if r is None:
            r = evaluate_point(replace(self.base, delta_a=delta_a), self.tripartite)
            self.cache[delta_a] = r
            if r.lyapunov_residual is not None:
                self.max_residual = max(self.max_residual, r.lyapunov_residual)
            if r.residuals is not None:
                self.min_monogamy = min(self.min_monogamy, *r.residuals)
        return r

    def __call__(self, delta_a, measure):
        v = self.row(delta_a).measure(measure)
        return -math.inf if v is None else v


def _golden_max(f, lo, hi, xtol):
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_over_detunings(
    base: model.SystemParams,
    measures: Sequence[str],
    lo: float,
    hi: float,
    points=401,
    tripartite=False,
    max_peaks=5,
) -> Dict[str, Optimum]:
    """Maximize several measures over ``delta_a`` sharing one grid scan.

    Each measure's grid local maxima (the best ``max_peaks`` of them) are
    refined by golden-section search within their neighbouring grid cells.
    Ties go to the smallest ``delta_a``; an objective that is zero everywhere
    reports the midpoint of the range.
    """
    if not lo < hi:
        raise DomainError("optimization range must have lo < hi")
    tripartite = tripartite or "r_min" in measures
    obj = _Objective(base, tripartite)
    xs = [float(x) for x in np.linspace(lo, hi, points)]
    xtol = 1e-9 * (hi - lo)
    for x in xs:
        obj.row(x)
    out = {}
    for name in measures:
        ys = [obj(x, name) for x in xs]
        if all(y == -math.inf for y in ys):
            raise EmptyResultError(f"no stable point for {name} in [{lo}, {hi}]")
        best = max(ys)
        if best <= 0.0:
            out[name] = Optimum(0.5 * (lo + hi), max(best, 0.0))
            continue
        peaks = [
            i
            for i in range(points)
            if ys[i] > 0
            and (i == 0 or ys[i] >= ys[i - 1])
            and (i == points - 1 or ys[i] >= ys[i + 1])
        ]
        peaks = sorted(peaks, key=lambda i: (-ys[i], i))[:max_peaks]
        best_x, best_y = xs[ys.index(best)], best
        for i in peaks:
            a = xs[max(i - 1, 0)]
            b = xs[min(i + 1, points - 1)]
            x, y = _golden_max(lambda t: obj(t, name), a, b, xtol)
            if y > best_y or (y == best_y and x < best_x):
                best_x, best_y = x, y
        out[name] = Optimum(best_x, best_y)
    for opt in out.values():
        opt.evaluations = len(obj.cache)
        opt.max_lyapunov_residual = obj.max_residual
        opt.min_residual = obj.min_monogamy
    return out


def optimize_over_detuning(base, measure, lo, hi, points=401) -> Tuple[float, float]:
    """Best ``(delta_a, value)`` for a single measure."""
    opt = optimize_over_detunings(base, [measure], lo, hi, points)[measure]
    return opt.delta_a, opt.value
