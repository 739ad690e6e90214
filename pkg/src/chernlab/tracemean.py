"""Logarithmic-mean functionals standing in for singular traces.

A DiagonalSequence is a materialized prefix of diagonal matrix entries
d_k.  Its log-mean at checkpoint N is (1/log(2+N)) * sum_{k<N} d_k; the
extended limit that would turn these means into a singular trace is never
constructed.  Instead an ExtendedLimitProbe reports tail statistics of the
dyadic checkpoints: convergence claims become "checkpoints converge, flag
off", existence-of-different-limits claims become "flag on with min/max
separation".
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .operators import SparseOperator, TruncationWindow, product_diagonal

__all__ = [
    "DiagonalSequence", "LogMeanSeries", "ExtendedLimitProbe",
    "diagonal_of", "log_mean", "probe", "dyadic_schedule",
]

NORMALIZATION_TAG = "prefix/log(2+N)"
_CHUNK = 1 << 14


@dataclass(frozen=True)
class DiagonalSequence:
    """A materialized prefix of diagonal entries d_0, d_1, ....

    finite_tail records that the untruncated sequence is exactly zero
    beyond the materialized prefix (true for products containing a
    commutator with a trigonometric polynomial), which lets log-means be
    evaluated past the cap.
    """

    values: np.ndarray
    finite_tail: bool = False
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=np.complex128))

    @property
    def cap(self) -> int:
        return len(self.values)

    @staticmethod
    def from_rule(rule: Callable[[int], complex], cap: int,
                  finite_tail: bool = False, label: str = "") -> "DiagonalSequence":
        vals = np.fromiter((rule(k) for k in range(cap)), dtype=np.complex128, count=cap)
        return DiagonalSequence(vals, finite_tail, label)

    def __add__(self, other: "DiagonalSequence") -> "DiagonalSequence":
        n = max(self.cap, other.cap)
        if (self.cap < n and not self.finite_tail) or (other.cap < n and not other.finite_tail):
            raise ValueError("cannot add diagonal sequences of different caps "
                             "without a finite-tail guarantee")
        a = np.zeros(n, dtype=np.complex128)
        a[: self.cap] += self.values
        a[: other.cap] += other.values
        return DiagonalSequence(a, self.finite_tail and other.finite_tail,
                                self.label or other.label)

    def scale(self, s) -> "DiagonalSequence":
        return DiagonalSequence(self.values * complex(s), self.finite_tail, self.label)


def diagonal_of(product, w: TruncationWindow, grading: Callable | None = None,
                cap: int | None = None, finite_tail: bool = False,
                label: str = "") -> DiagonalSequence:
    """Diagonal of an operator (or list of factors) in the window's
    canonical order, with exact-column-radius checking.

    grading, if given, maps a frequency index to a sign folded into d_k
    (the supertrace weight)."""
    indices = w.points()
    if cap is not None:
        indices = indices[:cap]
    ops = product if isinstance(product, (list, tuple)) else [product]
    vals = product_diagonal(list(ops), indices)
    if grading is not None:
        signs = np.array([grading(k) for k in indices], dtype=np.complex128)
        vals = vals * signs
    return DiagonalSequence(vals, finite_tail, label)


def dyadic_schedule(m_min: int = 4, m_max: int = 24) -> List[tuple]:
    """Checkpoints (m, N = 2^m)."""
    return [(m, 1 << m) for m in range(m_min, m_max + 1)]


@dataclass(frozen=True)
class LogMeanSeries:
    """Checkpoint values N -> (1/log(2+N)) * sum_{k<N} d_k.

    checkpoints: list of (label m, N, complex value); for dyadic schedules
    m = log2(N).  normalization records the denominator convention.
    """

    checkpoints: List[tuple]
    normalization: str = NORMALIZATION_TAG
    label: str = ""

    def labels(self) -> np.ndarray:
        return np.array([m for (m, _, _) in self.checkpoints], dtype=float)

    def ns(self) -> np.ndarray:
        return np.array([n for (_, n, _) in self.checkpoints], dtype=float)

    def values(self) -> np.ndarray:
        return np.array([v for (_, _, v) in self.checkpoints], dtype=np.complex128)

    def last(self) -> complex:
        return self.checkpoints[-1][2]

    def __add__(self, other: "LogMeanSeries") -> "LogMeanSeries":
        if [c[:2] for c in self.checkpoints] != [c[:2] for c in other.checkpoints]:
            raise ValueError("checkpoint schedules differ")
        cps = [(m, n, v + w) for (m, n, v), (_, _, w)
               in zip(self.checkpoints, other.checkpoints)]
        return LogMeanSeries(cps, self.normalization, self.label or other.label)

    def scale(self, s) -> "LogMeanSeries":
        return LogMeanSeries([(m, n, v * complex(s)) for (m, n, v) in self.checkpoints],
                             self.normalization, self.label)

    def to_csv(self) -> str:
        lines = [f"# normalization={self.normalization}", "m,N,value"]
        for m, n, v in self.checkpoints:
            v = complex(v)
            if abs(v.imag) <= 1e-12 * max(1.0, abs(v.real)):
                lines.append(f"{m:g},{n},{v.real:.12g}")
            else:
                lines.append(f"{m:g},{n},{v.real:.12g}{v.imag:+.12g}j")
        return "\n".join(lines) + "\n"


def _prefix_sums_at(values: np.ndarray, checkpoints: Sequence[int]) -> List[complex]:
    """Compensated prefix sums: exact per-chunk pairwise sums combined with
    math.fsum, so each checkpoint value carries a single accumulation pass."""
    block_re: List[float] = []
    block_im: List[float] = []
    out = []
    pos = 0
    for n in checkpoints:
        n_eff = min(n, len(values))
        while pos + _CHUNK <= n_eff:
            chunk = values[pos: pos + _CHUNK]
            block_re.append(float(np.sum(chunk.real)))
            block_im.append(float(np.sum(chunk.imag)))
            pos += _CHUNK
        part = values[pos: n_eff]
        re = math.fsum(block_re) + float(np.sum(part.real))
        im = math.fsum(block_im) + float(np.sum(part.imag))
        out.append(complex(re, im))
    return out


def log_mean(d: DiagonalSequence, schedule: Sequence | None = None,
             label: str = "") -> LogMeanSeries:
    """Prefix-of-length-N logarithmic means at the given checkpoints.

    schedule entries are N values or (label, N) pairs; default dyadic
    N = 2^m for m = 4..24 clipped to the materialized cap unless the
    sequence has a finite tail.
    """
    if schedule is None:
        m_max = min(24, max(4, int(math.log2(max(d.cap, 16)))))
        schedule = dyadic_schedule(4, m_max)
    cps = []
    for item in schedule:
        if isinstance(item, tuple):
            m, n = item
        else:
            n = int(item)
            m = math.log2(n) if n > 0 else 0
        if n > d.cap and not d.finite_tail:
            raise ValueError(f"checkpoint N={n} exceeds materialized cap {d.cap} "
                             "and the sequence has no finite-tail guarantee")
        cps.append((m, n))
    sums = _prefix_sums_at(d.values, [n for (_, n) in cps])
    checkpoints = [(m, n, s / math.log(2 + n)) for (m, n), s in zip(cps, sums)]
    return LogMeanSeries(checkpoints, NORMALIZATION_TAG, label or d.label)


@dataclass(frozen=True)
class ExtendedLimitProbe:
    """Tail statistics of a log-mean series over its last T checkpoints."""

    min: float
    max: float
    mean: float
    last: float
    extrap: float
    residual: float
    oscillating: bool
    diverging: bool = False
    component: str = "real"
    tail_length: int = 6

    def to_dict(self) -> dict:
        return {
            "min": self.min, "max": self.max, "mean": self.mean,
            "last": self.last, "extrap": self.extrap, "residual": self.residual,
            "oscillating": self.oscillating, "diverging": self.diverging,
            "component": self.component,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def probe(series: LogMeanSeries, tail: int = 6, osc_tol: float = 0.05,
          eps: float = 1e-12) -> ExtendedLimitProbe:
    """Tail min/max/mean/last plus a linear-in-1/m extrapolation.

    The extrapolation fits value = a + b/m over the tail checkpoints and
    reports the intercept a with the RMS fit residual.  The oscillation
    flag fires when (max-min)/max(|mean|, eps) > osc_tol.
    """
    if len(series.checkpoints) < 3:
        raise ValueError("probe needs at least 3 checkpoints")
    vals_c = series.values()
    if np.max(np.abs(vals_c.imag)) <= 1e-9 * max(1.0, float(np.max(np.abs(vals_c.real)))):
        vals = vals_c.real.copy()
        component = "real"
    else:
        vals = np.abs(vals_c)
        component = "abs"
    ms = series.labels()
    t = min(tail, len(vals))
    tv = vals[-t:]
    tm = ms[-t:]
    vmin, vmax = float(tv.min()), float(tv.max())
    vmean = float(tv.mean())
    design = np.column_stack([np.ones(t), 1.0 / tm])
    coef, *_ = np.linalg.lstsq(design, tv, rcond=None)
    fit = design @ coef
    residual = float(np.sqrt(np.mean((tv - fit) ** 2)))
    oscillating = (vmax - vmin) / max(abs(vmean), eps) > osc_tol
    mags = np.abs(tv)
    diverging = bool(len(mags) >= 3 and np.all(np.diff(mags) > 0)
                     and mags[-1] > 1.5 * mags[0] and mags[-1] > 1.0)
    return ExtendedLimitProbe(vmin, vmax, vmean, float(tv[-1]), float(coef[0]),
                              residual, bool(oscillating), diverging, component, t)
