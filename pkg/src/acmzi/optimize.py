"""Working-phase and recombination-gain optimization, loss-plane maps, SQL contours."""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable

import numpy as np
from scipy import optimize as sopt

from . import metrology as mt
from .errors import AllDivergentError, NoValidGainError, ZeroSlopeError
from .metrology import Scheme, SensitivityReport
from .model import InterferometerConfig, LossConfig

PHI_GRID = 721
PHI_TOL = 1e-8
GAIN_TOL = 1e-4
G2_SQ_MAX = 500.0
GAIN_GRID = 48
DEFAULT_RESOLUTION = 101


class Plane(str, Enum):
    EXTERNAL = "external"   # (eta_a, eta_b), eta_c = eta_d = 1
    INTERNAL = "internal"   # (eta_c, eta_d), eta_a = eta_b = 1


def plane_loss(plane, x: float, y: float) -> LossConfig:
    if Plane(plane) is Plane.EXTERNAL:
        return LossConfig(eta_a=x, eta_b=y)
    return LossConfig(eta_c=x, eta_d=y)


def plane_axes(plane):
    return ("eta_a", "eta_b") if Plane(plane) is Plane.EXTERNAL else ("eta_c", "eta_d")


# ---------------------------------------------------------------------------
# scalar minimization helpers

def golden_refine(f: Callable[[float], float], lo: float, mid: float, hi: float,
                  tol: float) -> float:
    """Golden-section search inside a bracket with f(mid) <= f(lo), f(hi)."""
    scale = max(abs(mid), 1e-300)
    res = sopt.minimize_scalar(f, bracket=(lo, mid, hi), method="golden",
                               tol=tol / (2.0 * scale))
    x = float(res.x)
    return x if f(x) <= f(mid) else mid


def grid_then_golden(f_vec, f_scalar, grid: np.ndarray, tol: float):
    """Minimize over a coarse grid, then refine around the best finite point.

    Returns ``(x, f(x))``; ``(nan, inf)`` when every grid value is infinite.
    """
    vals = np.asarray(f_vec(grid), dtype=float)
    finite = np.isfinite(vals)
    if not finite.any():
        return math.nan, math.inf
    k = int(np.argmin(np.where(finite, vals, np.inf)))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    if k == 0 or k == grid.size - 1:
        # minimum on the boundary of the search interval: bounded search instead
        res = sopt.minimize_scalar(f_scalar, bounds=(lo, hi), method="bounded",
                                   options={"xatol": tol})
        x = float(res.x) if res.fun <= vals[k] else float(grid[k])
    else:
        x = golden_refine(f_scalar, float(lo), float(grid[k]), float(hi), tol)
    return x, float(f_scalar(x))


# ---------------------------------------------------------------------------
# working phase

class PhaseProfile:
    """Exact cheap representation of delta_phi(phi) at fixed (cfg, loss).

    Every output coefficient is linear in e^{+-i phi}, so both detection
    variances are trigonometric polynomials of degree <= 2 in phi.  Eight
    equally spaced samples pin the five Fourier coefficients; afterwards each
    evaluation costs a few scalar operations.  Near points where the variance
    itself vanishes (balanced, lossless, phi -> pi) the reconstruction loses
    relative accuracy, so final values are recomputed on the direct path.
    """

    N_SAMPLES = 8

    def __init__(self, cfg, loss, scheme):
        self.scheme = Scheme(scheme)
        n = self.N_SAMPLES
        v = np.asarray(mt.variance(cfg, loss, 2 * np.pi * np.arange(n) / n, self.scheme), float)
        x = np.fft.rfft(v) / n
        self.c0 = float(x[0].real)
        self.c1 = complex(2 * x[1])
        self.c2 = complex(2 * x[2])
        self.amp = abs(mt.slope_amplitude(cfg, loss, self.scheme))

    def variance(self, phi):
        e = np.exp(1j * np.asarray(phi, dtype=float))
        return self.c0 + (self.c1 * e).real + (self.c2 * e * e).real

    def _slope(self, phi):
        if self.scheme is Scheme.HOMODYNE:
            return self.amp * np.cos(phi)
        return self.amp * np.sin(phi)

    def __call__(self, phi):
        s = np.abs(np.asarray(self._slope(phi), dtype=float))
        v = np.maximum(np.asarray(self.variance(phi)), 0.0)
        out = np.full(np.broadcast(s, v).shape, np.inf)
        np.divide(np.sqrt(v), s, out=out, where=s > mt.SLOPE_ZERO_RTOL * self.amp)
        return out

    def scalar(self, phi: float) -> float:
        s = abs(math.cos(phi) if self.scheme is Scheme.HOMODYNE else math.sin(phi)) * self.amp
        if not s > mt.SLOPE_ZERO_RTOL * self.amp:
            return math.inf
        e = cmath.exp(1j * phi)
        v = self.c0 + (self.c1 * e).real + (self.c2 * e * e).real
        return math.sqrt(max(v, 0.0)) / s


def _phi_grid(n=PHI_GRID):
    return np.linspace(0.0, 2.0 * math.pi, n + 2)[1:-1]


def best_phase(cfg, loss, scheme, n_grid=PHI_GRID, tol=PHI_TOL, fast=False):
    """(phi_opt, delta_phi) without building a report; delta_phi = inf if all divergent.

    ``fast`` searches on a :class:`PhaseProfile` and only re-evaluates the
    winner directly.
    """
    if Scheme(scheme) is Scheme.HOMODYNE:
        return math.pi, float(mt.delta_phi(cfg, loss, math.pi, scheme))
    if fast:
        prof = PhaseProfile(cfg, loss, scheme)
        phi, d = grid_then_golden(prof, prof.scalar, _phi_grid(n_grid), tol)
        if math.isfinite(d):
            d = float(mt.delta_phi(cfg, loss, phi, scheme))
        return phi, d
    f_vec = partial(mt.delta_phi, cfg, loss, scheme=scheme)
    return grid_then_golden(f_vec, lambda p: float(f_vec(p)), _phi_grid(n_grid), tol)


def optimal_phase(cfg: InterferometerConfig, loss: LossConfig = mt.LOSSLESS,
                  scheme=Scheme.INTENSITY, n_grid: int = PHI_GRID,
                  tol: float = PHI_TOL) -> tuple[float, SensitivityReport]:
    """Working phase minimizing delta_phi.

    Homodyne detection always works at phi = pi.  Intensity detection scans
    ``n_grid`` points of (0, 2 pi), skips divergent ones and refines the best
    by golden-section search to ``tol`` radians.
    """
    phi, d = best_phase(cfg, loss, scheme, n_grid, tol)
    if not math.isfinite(d):
        raise AllDivergentError(f"{Scheme(scheme).value} sensitivity diverges everywhere")
    return phi, mt._report(cfg, loss, phi, scheme)


# ---------------------------------------------------------------------------
# recombination gain

def _g2_bounds(cfg, g2_range):
    lo, hi = g2_range if g2_range is not None else (1.0, math.sqrt(G2_SQ_MAX))
    return max(lo, 1.0), hi


def _numeric_gain(cfg, loss, scheme, g2_range, tol=GAIN_TOL, n_grid=GAIN_GRID):
    lo, hi = _g2_bounds(cfg, g2_range)

    def f(G2):
        return best_phase(cfg.with_g2(G2), loss, scheme, fast=True)[1]

    # log spacing resolves the steep region near G2 = 1
    grid = np.unique(np.concatenate([np.geomspace(lo, hi, n_grid),
                                     [min(max(cfg.g1_gain, lo), hi)]]))
    x, fx = grid_then_golden(lambda gs: np.array([f(g) for g in gs]), f, grid, tol)
    return x, fx


def optimize_gain(cfg: InterferometerConfig, loss: LossConfig = mt.LOSSLESS,
                  scheme=Scheme.HOMODYNE, g2_range=None):
    """Best PA2 gain G2 for the given losses; returns ``(G2_opt, report)``.

    For homodyne detection the closed-form optimum is used when it exists
    inside ``g2_range`` and is checked against the numeric argmin; otherwise
    (and always for intensity detection) G2 is found numerically, with the
    working phase re-optimized at each trial gain.  The balanced setting
    G2 = G1 is always a candidate, so optimization never does worse.
    """
    lo, hi = _g2_bounds(cfg, g2_range)
    candidates = []   # (delta_phi, priority, G2); lower priority wins ties
    if Scheme(scheme) is Scheme.HOMODYNE:
        try:
            _, g2c = mt.hd_optimal_gain(cfg, loss)
            if lo <= g2c <= hi:
                candidates.append((float(mt.delta_phi(cfg.with_g2(g2c), loss, math.pi, scheme)), 0, g2c))
        except NoValidGainError:
            pass
    gn, fn = _numeric_gain(cfg, loss, scheme, (lo, hi))
    if math.isfinite(fn):
        candidates.append((fn, 2, gn))
    if lo <= cfg.g1_gain <= hi:
        candidates.append((best_phase(cfg.balanced(), loss, scheme)[1], 1, cfg.g1_gain))
    candidates = [c for c in candidates if math.isfinite(c[0])]
    if not candidates:
        raise AllDivergentError("no finite sensitivity for any G2 in range")
    best = min(c[0] for c in candidates)
    # candidates within round-off of the best are ties
    _, _, g2 = min((c for c in candidates if c[0] <= best * (1 + 1e-9)), key=lambda c: c[1])
    tuned = cfg.with_g2(g2)
    _, report = optimal_phase(tuned, loss, scheme)
    return g2, report


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class GainSweepRow:
    ratio: float
    phi_opt: float
    delta_phi: float


def gain_sweep(cfg: InterferometerConfig, loss: LossConfig = mt.LOSSLESS,
               scheme=Scheme.HOMODYNE, ratios=()) -> list[GainSweepRow]:
    """Optimal sensitivity versus G2/G1; divergent rows carry delta_phi = inf."""
    rows = []
    for r in ratios:
        if r < 1:
            raise ValueError(f"gain ratio must be >= 1, got {r}")
        c = cfg.with_g2(r * cfg.g1_gain)
        phi, d = best_phase(c, loss, scheme)
        rows.append(GainSweepRow(float(r), float(phi), float(d)))
    return rows


@dataclass
class SweepGrid:
    """Optimal sensitivity over a loss plane.

    ``values[j, i]`` belongs to ``x_axis[i]``, ``y_axis[j]``; divergent cells
    hold ``nan`` and are flagged in ``divergent``.
    """

    plane: Plane
    scheme: Scheme
    x_name: str
    y_name: str
    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    divergent: np.ndarray
    gain_values: np.ndarray | None = None
    phi_values: np.ndarray | None = None
    optimized: bool = False

    def __post_init__(self):
        shape = (self.y_axis.size, self.x_axis.size)
        for name in ("values", "divergent", "gain_values", "phi_values"):
            arr = getattr(self, name)
            if arr is not None and arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")

    def beats(self, level: float) -> np.ndarray:
        return ~self.divergent & (np.nan_to_num(self.values, nan=np.inf) < level)


def cell_evaluator(cfg, plane, scheme, optimize: bool, g2_range=None):
    """Function (x, y) -> (delta_phi, G2, phi) for one loss-plane cell."""
    def evaluate(x, y):
        loss = plane_loss(plane, float(x), float(y))
        if optimize:
            try:
                g2, rep = optimize_gain(cfg, loss, scheme, g2_range)
                return rep.delta_phi, g2, rep.phi
            except (AllDivergentError, ZeroSlopeError):
                return math.inf, math.nan, math.nan
        phi, d = best_phase(cfg.balanced(), loss, scheme)
        return d, cfg.g1_gain, phi
    return evaluate


def _row(cfg, plane, scheme, optimize, g2_range, xs, y):
    ev = cell_evaluator(cfg, plane, scheme, optimize, g2_range)
    return [ev(x, y) for x in xs]


def loss_map(cfg: InterferometerConfig, plane=Plane.INTERNAL, resolution: int = DEFAULT_RESOLUTION,
             optimize_gain: bool = False, scheme=Scheme.HOMODYNE,
             workers: int = 1, g2_range=None) -> SweepGrid:
    """Sensitivity over a ``resolution`` x ``resolution`` grid of [0, 1]^2.

    Rows may be spread over ``workers`` processes; the result does not depend
    on the worker count.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    plane, scheme = Plane(plane), Scheme(scheme)
    cfg = cfg.balanced()
    axis = np.linspace(0.0, 1.0, resolution)
    job = partial(_row, cfg, plane, scheme, optimize_gain, g2_range, axis)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, axis))
    else:
        rows = [job(y) for y in axis]
    cells = np.array(rows, dtype=float)          # (ny, nx, 3)
    d = cells[..., 0]
    divergent = ~np.isfinite(d)
    xn, yn = plane_axes(plane)
    return SweepGrid(plane=plane, scheme=scheme, x_name=xn, y_name=yn,
                     x_axis=axis, y_axis=axis.copy(),
                     values=np.where(divergent, np.nan, d), divergent=divergent,
                     gain_values=cells[..., 1] / cfg.g1_gain,
                     phi_values=cells[..., 2], optimized=optimize_gain)


# ---------------------------------------------------------------------------
# SQL contours

@dataclass
class BoundaryCurve:
    level: float
    points: list = field(default_factory=list)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(-1, 2)


def _bisect_crossing(g, a, b, level, rtol, max_iter=200):
    """Bisection on g(t) - level between a and b (opposite signs)."""
    ga = g(a) - level
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        gm = g(m) - level
        if not math.isfinite(gm):
            return None
        if abs(gm) <= rtol * level:
            return m
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
        if b - a <= 1e-15:
            break
    return None


def extract_boundary(grid: SweepGrid, evaluate: Callable[[float, float], float],
                     sql_value: float, rtol: float = 1e-6) -> BoundaryCurve:
    """Points where delta_phi = ``sql_value`` along every grid row and column.

    Sign changes between adjacent finite cells are refined by bisection with
    ``evaluate(x, y) -> delta_phi``.  Crossings that do not converge to the
    residual bound (jumps across a divergence) are dropped.  Points are
    ordered by angle about the lossless corner (1, 1).
    """
    vals = np.where(grid.divergent, np.nan, grid.values) - sql_value
    xs, ys = grid.x_axis, grid.y_axis
    pts = []
    for j, y in enumerate(ys):
        row = vals[j]
        for i in range(xs.size - 1):
            u, v = row[i], row[i + 1]
            if np.isfinite(u) and np.isfinite(v) and (u < 0) != (v < 0):
                t = _bisect_crossing(lambda x: evaluate(x, y), xs[i], xs[i + 1], sql_value, rtol)
                if t is not None:
                    pts.append((float(t), float(y)))
    for i, x in enumerate(xs):
        col = vals[:, i]
        for j in range(ys.size - 1):
            u, v = col[j], col[j + 1]
            if np.isfinite(u) and np.isfinite(v) and (u < 0) != (v < 0):
                t = _bisect_crossing(lambda y: evaluate(x, y), ys[j], ys[j + 1], sql_value, rtol)
                if t is not None:
                    pts.append((float(x), float(t)))
    pts = sorted(set(pts), key=lambda p: (math.atan2(1.0 - p[1], 1.0 - p[0]), p))
    return BoundaryCurve(level=sql_value, points=pts)


def sensitivity_function(cfg, plane, scheme, optimize: bool, g2_range=None):
    """(x, y) -> delta_phi, the refinement callback for :func:`extract_boundary`."""
    ev = cell_evaluator(cfg.balanced(), plane, scheme, optimize, g2_range)
    return lambda x, y: ev(x, y)[0]


def beating_area(grid: SweepGrid, level: float) -> int:
    """Number of cells with delta_phi below ``level``."""
    return int(grid.beats(level).sum())
