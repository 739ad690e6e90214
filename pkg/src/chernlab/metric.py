"""Grid-sampled Holder seminorms, the two-point difference quotient, and
the approximate-diagonal decay experiment.

Grid estimates are lower bounds of the true suprema; growth under grid
refinement is the operational test for non-membership in a Holder class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .series import FourierSeries

__all__ = [
    "SampledMetricSpace", "DiagonalCutoff", "DecayFitReport",
    "SeminormEstimate", "estimate_holder_seminorm", "delta_alpha",
    "diagonal_decay_experiment", "chi_profile",
]

PAIR_CAP_DEFAULT = 10_000_000


@dataclass(frozen=True)
class SampledMetricSpace:
    """A uniform grid on the circle or on the product of two circles.

    kind 'circle_grid': M points theta_k = 2 pi k / M with the geodesic
    arc metric.  kind 'torus_grid': the M x M product grid with the max of
    the two arc distances.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("circle_grid", "torus_grid"):
            raise ValueError(f"unknown metric space kind {self.kind!r}")
        if self.size < 2:
            raise ValueError("grid needs at least 2 points")

    @staticmethod
    def circle(m: int) -> "SampledMetricSpace":
        return SampledMetricSpace("circle_grid", m)

    @staticmethod
    def torus(m: int) -> "SampledMetricSpace":
        return SampledMetricSpace("torus_grid", m)

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def n_points(self) -> int:
        return self.size if self.kind == "circle_grid" else self.size * self.size

    def arc(self, offset) -> np.ndarray:
        """Geodesic distance for a grid offset (vectorized)."""
        o = np.mod(np.asarray(offset), self.size)
        o = np.minimum(o, self.size - o)
        return 2.0 * np.pi * o / self.size

    def metric(self, x, y) -> float:
        """Distance between points given as angles (circle) or angle pairs."""
        if self.kind == "circle_grid":
            d = abs(float(x) - float(y)) % (2 * np.pi)
            return min(d, 2 * np.pi - d)
        d1 = abs(float(x[0]) - float(y[0])) % (2 * np.pi)
        d2 = abs(float(x[1]) - float(y[1])) % (2 * np.pi)
        return max(min(d1, 2 * np.pi - d1), min(d2, 2 * np.pi - d2))


def chi_profile(t) -> np.ndarray:
    """The fixed cutoff profile: 1 on [0, 0.1], then (1 - s^2)^3 with
    s = (t - 0.1)/0.9 on (0.1, 1), and 0 from 1 on.  Decreasing, smooth
    enough for the decay experiment, identical across runs."""
    t = np.asarray(t, dtype=float)
    s = np.clip((t - 0.1) / 0.9, 0.0, 1.0)
    return np.where(t <= 0.1, 1.0, np.where(t >= 1.0, 0.0, (1.0 - s * s) ** 3))


@dataclass(frozen=True)
class DiagonalCutoff:
    """Delta_j(x, y) = chi(j d(x, y)): a bump concentrating on d < 1/j."""

    j: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("cutoff index j must be >= 1")

    def on_distance(self, d) -> np.ndarray:
        return chi_profile(self.j * np.asarray(d, dtype=float))


@dataclass(frozen=True)
class SeminormEstimate:
    value: float
    truncated: bool
    pairs_used: int

    def __float__(self):
        return self.value


def _offset_ladder(max_off: int, budget: int) -> tuple:
    """Offsets 1..max_off if they fit the budget, else all small offsets
    plus a geometric ladder reaching max_off (near-diagonal prioritized)."""
    if max_off <= budget:
        return list(range(1, max_off + 1)), False
    near = max(budget // 2, 1)
    offs = set(range(1, near + 1))
    o = float(near)
    while len(offs) < budget and o < max_off:
        o *= 1.25
        offs.add(min(int(math.ceil(o)), max_off))
    return sorted(offs), True


def _values_on_grid(f, x: SampledMetricSpace) -> np.ndarray:
    if isinstance(f, FourierSeries):
        if x.kind == "circle_grid":
            if f.domain != "circle":
                raise ValueError("series domain does not match the grid")
            return f.evaluate_grid(x.angles())
        if f.domain != "torus":
            raise ValueError("series domain does not match the grid")
        th = x.angles()
        out = np.zeros((x.size, x.size), dtype=complex)
        for (k1, k2), v in f.coeffs.items():
            c = v.to_complex() if f.exact else v
            out += c * np.outer(np.exp(1j * k1 * th), np.exp(1j * k2 * th))
        return out
    vals = np.asarray(f, dtype=complex)
    expected = (x.size,) if x.kind == "circle_grid" else (x.size, x.size)
    if vals.shape != expected:
        raise ValueError(f"sampled values have shape {vals.shape}, expected {expected}")
    return vals


def estimate_holder_seminorm(f, x: SampledMetricSpace, alpha: float,
                             pair_cap: int = PAIR_CAP_DEFAULT,
                             details: bool = False):
    """Grid maximum of |f(a) - f(b)| / d(a,b)^alpha.

    Enumerates all pairs when they fit under pair_cap, otherwise samples
    near-diagonal-prioritized offsets; the estimate reports whether the cap
    truncated the search.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    vals = _values_on_grid(f, x)
    m = x.size
    if x.kind == "circle_grid":
        budget = max(1, pair_cap // m)
        offsets, truncated = _offset_ladder(m // 2, budget)
        best = 0.0
        for o in offsets:
            diff = np.max(np.abs(vals - np.roll(vals, -o)))
            best = max(best, diff / float(x.arc(o)) ** alpha)
        est = SeminormEstimate(best, truncated, len(offsets) * m)
        return est if details else est.value
    budget = max(1, pair_cap // (m * m))
    per_axis = max(2, int(math.isqrt(budget)))
    offs1, t1 = _offset_ladder(m // 2, per_axis)
    offs1 = [0] + offs1
    offs2, t2 = _offset_ladder(m // 2, per_axis)
    offs2_signed = [0] + offs2 + [-o for o in offs2]
    truncated = t1 or t2
    best = 0.0
    used = 0
    for o1 in offs1:
        for o2 in offs2_signed:
            if o1 == 0 and o2 <= 0:
                continue
            dist = max(float(x.arc(o1)), float(x.arc(abs(o2))))
            shifted = np.roll(np.roll(vals, -o1, axis=0), -o2, axis=1)
            diff = np.max(np.abs(vals - shifted))
            best = max(best, diff / dist ** alpha)
            used += m * m
    est = SeminormEstimate(best, truncated, used)
    return est if details else est.value


def delta_alpha(f, x: SampledMetricSpace, alpha: float, pair) -> complex:
    """The two-point difference quotient (f(a) - f(b)) / d(a,b)^alpha.

    It obeys the product rule d(fg)(a,b) = d(f)(a,b) g(b) + f(a) d(g)(a,b)
    exactly at every pair, and is odd under swapping the pair.
    """
    a, b = pair
    dist = x.metric(a, b)
    if dist == 0:
        raise ValueError("the difference quotient needs two distinct points")
    fa = f.evaluate(a) if isinstance(f, FourierSeries) else f(a)
    fb = f.evaluate(b) if isinstance(f, FourierSeries) else f(b)
    return (fa - fb) / dist ** alpha


@dataclass(frozen=True)
class DecayFitReport:
    alpha: float
    beta: float
    gamma: float
    js: List[int]
    norms: List[float]
    slope: float
    residual: float
    trivial: bool = False

    def to_csv(self) -> str:
        lines = [f"# alpha={self.alpha} beta={self.beta} gamma={self.gamma}",
                 "j,norm"]
        lines += [f"{j},{n:.12g}" for j, n in zip(self.js, self.norms)]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
                "slope": self.slope, "residual": self.residual}


def diagonal_decay_experiment(f: FourierSeries, alpha: float, beta: float,
                              j_schedule: Sequence[int] | None = None,
                              x: SampledMetricSpace | None = None,
                              pair_cap: int = PAIR_CAP_DEFAULT) -> DecayFitReport:
    """Norms of Delta_j (1 tensor f - f tensor 1) in the alpha-Holder norm
    on the product grid, with a log-log decay fit against j.

    The fitted slope is compared by callers against -(gamma - 0.1) with
    gamma = min(1 - alpha/beta, beta - alpha).
    """
    if beta <= alpha:
        raise ValueError("the decay exponent is trivial unless beta > alpha")
    x = x or SampledMetricSpace.circle(1024)
    if x.kind != "circle_grid":
        raise ValueError("the decay experiment runs on a circle grid (the "
                         "product grid is built internally)")
    j_schedule = list(j_schedule or [2, 4, 8, 16, 32, 64, 128, 256])
    gamma = min(1.0 - alpha / beta, beta - alpha)
    m = x.size
    fv = _values_on_grid(f, x)
    if np.max(np.abs(fv)) == 0 or np.max(np.abs(fv - fv[0])) == 0:
        return DecayFitReport(alpha, beta, gamma, j_schedule,
                              [0.0] * len(j_schedule), float("nan"),
                              float("nan"), trivial=True)
    # distance matrix of the circle grid, reused across j
    idx = np.arange(m)
    off = np.abs(idx[None, :] - idx[:, None])
    dmat = 2.0 * np.pi * np.minimum(off, m - off) / m
    gdiff = fv[None, :] - fv[:, None]
    product = SampledMetricSpace.torus(m)
    norms = []
    for j in j_schedule:
        g = chi_profile(j * dmat) * gdiff
        semi = estimate_holder_seminorm(g, product, alpha, pair_cap=pair_cap,
                                        details=True)
        norms.append(float(np.max(np.abs(g))) + semi.value)
    logs = np.log(np.maximum(norms, 1e-300))
    design = np.column_stack([np.ones(len(j_schedule)), np.log(j_schedule)])
    coef, *_ = np.linalg.lstsq(design, logs, rcond=None)
    fit = design @ coef
    residual = float(np.sqrt(np.mean((logs - fit) ** 2)))
    return DecayFitReport(alpha, beta, gamma, j_schedule, norms,
                          float(coef[1]), residual)
