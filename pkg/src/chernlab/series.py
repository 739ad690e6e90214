"""Fourier-side representations of functions on the circle and the torus.

A function is stored as a finitely supported coefficient map on Z (circle)
or Z^2 (torus).  Coefficients are either exact Gaussian rationals (QGauss)
or ordinary complex floats; the exactness flag records which.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Tuple, Union

import numpy as np

from .scalars import QGauss, format_rational, parse_rational

CircleIndex = int
TorusIndex = Tuple[int, int]
FrequencyIndex = Union[CircleIndex, TorusIndex]

# dense-convolution crossover: sparse dict convolution wins below this
CONV_CROSSOVER = 64

MAX_FREQUENCY_BITS = 62


def cross(m: TorusIndex, n: TorusIndex) -> int:
    """Antisymmetric pairing m x n = Im(conj(m) n) under (k1,k2) <-> k1+i*k2."""
    return m[0] * n[1] - m[1] * n[0]


def torus_to_complex(k: TorusIndex) -> complex:
    return complex(k[0], k[1])


@dataclass(frozen=True)
class HolderExponent:
    """A Holder exponent alpha in (0,1] together with the ambient dimension."""

    alpha: float
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"Holder exponent must lie in (0,1], got {self.alpha}")
        if self.dim not in (1, 2):
            raise ValueError("only dimensions 1 (circle) and 2 (torus) are supported")


@dataclass(frozen=True)
class BoundedSequence:
    """A bounded sequence N -> complex with a designated tail rule.

    kinds: 'eventually-constant' (values then a constant tail),
    'explicit-finite' (values then zero tail), 'callback' (arbitrary rule
    with a declared bound).
    """

    kind: str
    values: tuple = ()
    tail: complex = 0.0
    rule: Callable[[int], complex] | None = None
    bound: float = 1.0

    @staticmethod
    def constant(value) -> "BoundedSequence":
        return BoundedSequence("eventually-constant", (), value, None, abs(complex(value)))

    @staticmethod
    def from_list(values, tail=0.0) -> "BoundedSequence":
        vals = tuple(values)
        kind = "explicit-finite" if tail == 0 else "eventually-constant"
        bound = max([abs(complex(v)) for v in vals] + [abs(complex(tail))], default=0.0)
        return BoundedSequence(kind, vals, tail, None, bound)

    @staticmethod
    def from_function(rule: Callable[[int], complex], bound: float) -> "BoundedSequence":
        return BoundedSequence("callback", (), 0.0, rule, bound)

    def __call__(self, k: int):
        if k < 0:
            raise IndexError("sequence index must be nonnegative")
        if self.kind == "callback":
            v = self.rule(k)
            if abs(complex(v)) > self.bound + 1e-12:
                raise ValueError(f"sequence value {v} at {k} exceeds declared bound {self.bound}")
            return v
        if k < len(self.values):
            return self.values[k]
        return self.tail


def _coerce_coeff(value, exact: bool):
    if exact:
        return QGauss.of(value)
    if isinstance(value, QGauss):
        return value.to_complex()
    return complex(value)


@dataclass(frozen=True)
class FourierSeries:
    """Finitely supported coefficient map on Z (circle) or Z^2 (torus)."""

    domain: str
    coeffs: Dict[FrequencyIndex, object] = field(default_factory=dict)
    exact: bool = False

    def __post_init__(self):
        if self.domain not in ("circle", "torus"):
            raise ValueError(f"unknown domain {self.domain!r}")
        cleaned = {}
        for k, v in self.coeffs.items():
            if self.domain == "torus":
                k = (int(k[0]), int(k[1]))
            else:
                k = int(k)
            v = _coerce_coeff(v, self.exact)
            if (v.is_zero() if self.exact else v == 0):
                continue
            cleaned[k] = v
        object.__setattr__(self, "coeffs", cleaned)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(domain: str = "circle", exact: bool = True) -> "FourierSeries":
        return FourierSeries(domain, {}, exact)

    @staticmethod
    def monomial(freq: FrequencyIndex, coeff=1, domain: str = "circle",
                 exact: bool = True) -> "FourierSeries":
        return FourierSeries(domain, {freq: coeff}, exact)

    @staticmethod
    def one(domain: str = "circle", exact: bool = True) -> "FourierSeries":
        freq = 0 if domain == "circle" else (0, 0)
        return FourierSeries.monomial(freq, 1, domain, exact)

    # -- basic queries -------------------------------------------------

    def coeff(self, k: FrequencyIndex):
        return self.coeffs.get(k, QGauss() if self.exact else 0j)

    def support(self):
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_frequency(self) -> int:
        """Largest coordinate magnitude in the support (0 for the zero series)."""
        if not self.coeffs:
            return 0
        if self.domain == "circle":
            return max(abs(k) for k in self.coeffs)
        return max(max(abs(k[0]), abs(k[1])) for k in self.coeffs)

    # -- arithmetic ----------------------------------------------------

    def _check_domain(self, other: "FourierSeries"):
        if self.domain != other.domain:
            raise ValueError(f"domain mismatch: {self.domain} vs {other.domain}")

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        self._check_domain(other)
        exact = self.exact and other.exact
        out: Dict[FrequencyIndex, object] = {}
        for k in set(self.coeffs) | set(other.coeffs):
            a = _coerce_coeff(self.coeff(k), exact)
            b = _coerce_coeff(other.coeff(k), exact)
            out[k] = a + b
        return FourierSeries(self.domain, out, exact)

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        return self + other.scale(-1)

    def scale(self, scalar) -> "FourierSeries":
        exact = self.exact and isinstance(scalar, (int, Fraction, QGauss))
        out = {}
        s = QGauss.of(scalar) if exact else complex(
            scalar.to_complex() if isinstance(scalar, QGauss) else scalar)
        for k, v in self.coeffs.items():
            out[k] = _coerce_coeff(v, exact) * s
        return FourierSeries(self.domain, out, exact)

    def star(self) -> "FourierSeries":
        """Pointwise complex conjugate: coefficient at k becomes conj(a_{-k})."""
        out = {}
        for k, v in self.coeffs.items():
            nk = -k if self.domain == "circle" else (-k[0], -k[1])
            out[nk] = v.conjugate() if self.exact else v.conjugate()
        return FourierSeries(self.domain, out, self.exact)

    def exactify(self) -> "FourierSeries":
        """Reinterpret floating coefficients as the exact rationals they are.

        Every double is a dyadic rational, so the conversion is lossless.
        """
        if self.exact:
            return self
        return FourierSeries(self.domain, dict(self.coeffs), True)

    def to_float(self) -> "FourierSeries":
        if not self.exact:
            return self
        return FourierSeries(
            self.domain, {k: v.to_complex() for k, v in self.coeffs.items()}, False)

    def key(self):
        """A hashable canonical form (for use as dict keys in chains)."""
        items = []
        for k in sorted(self.coeffs, key=lambda f: (f,) if self.domain == "circle" else f):
            v = self.coeffs[k]
            items.append((k, (v.re, v.im)) if self.exact else (k, v))
        return (self.domain, self.exact, tuple(items))

    def __eq__(self, other):
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def evaluate(self, point) -> complex:
        """Evaluate sum a_k e^{i k.theta} at angles in [0, 2pi)^n."""
        if self.domain == "circle":
            theta = float(point if np.isscalar(point) else point[0])
            total = 0j
            for k, v in self.coeffs.items():
                c = v.to_complex() if self.exact else v
                total += c * np.exp(1j * k * theta)
            return total
        t1, t2 = float(point[0]), float(point[1])
        total = 0j
        for (k1, k2), v in self.coeffs.items():
            c = v.to_complex() if self.exact else v
            total += c * np.exp(1j * (k1 * t1 + k2 * t2))
        return total

    def evaluate_grid(self, thetas: np.ndarray) -> np.ndarray:
        """Vectorized circle evaluation on an array of angles."""
        if self.domain != "circle":
            raise ValueError("evaluate_grid supports circle series only")
        out = np.zeros(np.shape(thetas), dtype=complex)
        for k, v in self.coeffs.items():
            c = v.to_complex() if self.exact else v
            out += c * np.exp(1j * k * np.asarray(thetas))
        return out


def multiply(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    """Pointwise product, realized as convolution of coefficient maps."""
    f._check_domain(g)
    exact = f.exact and g.exact
    if (not exact and f.domain == "circle"
            and len(f.coeffs) > CONV_CROSSOVER and len(g.coeffs) > CONV_CROSSOVER):
        return _multiply_dense_circle(f, g)
    out: Dict[FrequencyIndex, object] = {}
    for kf, vf in f.coeffs.items():
        vf = _coerce_coeff(vf, exact)
        for kg, vg in g.coeffs.items():
            vg = _coerce_coeff(vg, exact)
            k = kf + kg if f.domain == "circle" else (kf[0] + kg[0], kf[1] + kg[1])
            cur = out.get(k)
            out[k] = vf * vg if cur is None else cur + vf * vg
    return FourierSeries(f.domain, out, exact)


def _multiply_dense_circle(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    flo, fhi = min(f.coeffs), max(f.coeffs)
    glo, ghi = min(g.coeffs), max(g.coeffs)
    fa = np.zeros(fhi - flo + 1, dtype=complex)
    ga = np.zeros(ghi - glo + 1, dtype=complex)
    for k, v in f.coeffs.items():
        fa[k - flo] = v
    for k, v in g.coeffs.items():
        ga[k - glo] = v
    conv = np.convolve(fa, ga)
    lo = flo + glo
    return FourierSeries("circle", {lo + i: c for i, c in enumerate(conv) if c != 0}, False)


def lacunary_series(c: BoundedSequence, alpha: HolderExponent | float,
                    level_cap: int) -> FourierSeries:
    """The lacunary embedding: sum_k c_k 2^{-alpha k} z^{2^k}, k = 0..level_cap.

    Produces a floating circle series supported on powers of two.
    """
    a = alpha.alpha if isinstance(alpha, HolderExponent) else float(alpha)
    if not 0 < a < 1:
        raise ValueError(f"lacunary exponent must lie in (0,1), got {a}")
    if level_cap < 1:
        raise ValueError("level_cap must be at least 1")
    if level_cap >= MAX_FREQUENCY_BITS:
        raise ValueError(f"level_cap {level_cap} overflows the frequency type")
    out = {}
    for k in range(level_cap + 1):
        ck = complex(c(k))
        if ck != 0:
            out[2 ** k] = ck * 2.0 ** (-a * k)
    return FourierSeries("circle", out, False)


# -- serialization -----------------------------------------------------

def series_to_text(f: FourierSeries) -> str:
    lines = [f"# domain={f.domain} exact={1 if f.exact else 0}"]
    keys = sorted(f.coeffs, key=lambda k: (k,) if f.domain == "circle" else k)
    for k in keys:
        v = f.coeffs[k]
        if f.exact:
            re, im = format_rational(v.re), format_rational(v.im)
        else:
            re, im = repr(v.real), repr(v.imag)
        if f.domain == "circle":
            lines.append(f"{k} {re} {im}")
        else:
            lines.append(f"{k[0]} {k[1]} {re} {im}")
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> FourierSeries:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing series header line")
    header = dict(tok.split("=") for tok in lines[0].lstrip("# ").split())
    domain = header["domain"]
    exact = header["exact"] == "1"
    coeffs: Dict[FrequencyIndex, object] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if domain == "circle":
            k = int(parts[0])
            re_s, im_s = parts[1], parts[2]
        else:
            k = (int(parts[0]), int(parts[1]))
            re_s, im_s = parts[2], parts[3]
        if exact:
            coeffs[k] = QGauss(parse_rational(re_s), parse_rational(im_s))
        else:
            coeffs[k] = complex(float(re_s), float(im_s))
    return FourierSeries(domain, coeffs, exact)
