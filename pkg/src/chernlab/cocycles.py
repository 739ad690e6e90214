"""Evaluation of the singular cocycles and the Connes-Chern cochain.

Raw values use F-commutators throughout.  The reported pairing numbers of
the source computations correspond to the halved-commutator convention
([F,a] = 2[P,a]), so named experiments apply the documented constant
(1/2)^(p+1); the evaluators themselves always return raw values plus that
constant in their notes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .scalars import QGauss
from .series import FourierSeries, multiply
from .operators import (OperatorModel, SparseOperator, TruncationWindow,
                        commutator, compose, multiplication_operator,
                        product_diagonal, torus_phase_kernel_rho)
from .tracemean import (DiagonalSequence, ExtendedLimitProbe, LogMeanSeries,
                        diagonal_of, dyadic_schedule, log_mean, probe)

__all__ = [
    "FredholmModuleSpec", "CochainEvaluation", "CocycleConsistencyError",
    "pairing_normalization", "eval_c_omega", "eval_h_omega", "eval_ch_CC",
    "check_hochschild_cocycle", "check_cyclicity", "holomorphy_type",
    "fast_path_partial_sums", "eval_c_omega_wedge", "cross_check_wedge_paths",
    "szego_pair_diagonal", "torus_diagonal_operator", "torus_diagonal_kernel",
    "connes_chern_constant",
]


class CocycleConsistencyError(RuntimeError):
    """Two evaluation paths for the same cocycle disagree beyond tolerance."""


def pairing_normalization(p: int) -> float:
    """(1/2)^(p+1): one factor 1/2 per commutator, reconciling raw
    F-commutator traces with the halved-commutator pairing convention."""
    return 0.5 ** (p + 1)


@dataclass(frozen=True)
class FredholmModuleSpec:
    """The phase operator and summability bookkeeping of a Fredholm module.

    circle_F is odd parity with odd p; the torus block phase is even
    parity with even p.
    """

    operator_kind: str
    p: int

    def __post_init__(self):
        if self.operator_kind not in ("circle_F", "torus_F"):
            raise ValueError(f"unsupported module operator {self.operator_kind!r}")
        if self.p < 1:
            raise ValueError("summability exponent p must be positive")
        if self.operator_kind == "circle_F" and self.p % 2 == 0:
            raise ValueError("the circle phase is odd parity: p must be odd")
        if self.operator_kind == "torus_F" and self.p % 2 == 1:
            raise ValueError("the torus phase is even parity: p must be even")

    @property
    def domain(self) -> str:
        return "circle" if self.operator_kind == "circle_F" else "torus"

    @property
    def parity(self) -> str:
        return "odd" if self.p % 2 else "even"


@dataclass
class CochainEvaluation:
    """Result record of one multilinear cocycle evaluation."""

    kind: str
    module: FredholmModuleSpec
    inputs: List[FourierSeries]
    diagonal: DiagonalSequence | None = None
    series: LogMeanSeries | None = None
    probe_result: ExtendedLimitProbe | None = None
    exact_value: object = None
    exact: bool = False
    notes: Dict[str, object] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# circle operator path
# ---------------------------------------------------------------------------

def _circle_ops(inputs: Sequence[FourierSeries], bound: int,
                leading: FourierSeries | None = None) -> list:
    f_model = OperatorModel("circle_F")
    ops = [SparseOperator.diagonal_phase(f_model, bound)]
    if leading is not None:
        ops.append(multiplication_operator(leading, bound))
    ops.extend(commutator(f_model, a, bound) for a in inputs)
    return ops


def _circle_geometry(inputs, leading=None):
    bws = [a.max_frequency() for a in inputs]
    lead_bw = leading.max_frequency() if leading is not None else 0
    total = sum(bws) + lead_bw
    support = max(bws + [1])  # diagonal entries vanish beyond the widest corner
    return total, support


def _circle_diagonal(inputs, schedule, leading=None, prefactor=1,
                     label="") -> DiagonalSequence:
    """Diagonal of F [a0] [F,a1]...[F,ap] in symmetric canonical order."""
    total, support = _circle_geometry(inputs, leading)
    cap = 2 * support + 3
    max_n = max(n for (_, n) in schedule) if schedule else cap
    cap = min(cap, max(max_n, 8))
    bound = total + (cap + 1) // 2 + 4
    ops = _circle_ops(inputs, bound, leading)
    window = TruncationWindow.circle_symmetric((cap + 1) // 2 + 1)
    d = diagonal_of(ops, window, cap=cap, finite_tail=True, label=label)
    return d if prefactor == 1 else d.scale(prefactor)


def _exact_circle_trace(inputs, leading=None) -> QGauss:
    total, _ = _circle_geometry(inputs, leading)
    bound = 2 * total + 4
    prod = compose(_circle_ops([a for a in inputs], bound,
                               leading))
    trace = QGauss()
    for r, c, v in prod.items():
        if r == c:
            trace = trace + v
    return trace


# ---------------------------------------------------------------------------
# torus operator path (graded: difference of the two block diagonals)
# ---------------------------------------------------------------------------

def torus_diagonal_operator(inputs: Sequence[FourierSeries], points,
                            leading: FourierSeries | None = None) -> np.ndarray:
    """Pointwise diagonal of the graded product at the given lattice points.

    For the block phase F = [[0, U], [U*, 0]] an even-length commutator
    product is block diagonal and the supertrace diagonal is
    <e_k, U [a0] [U*,a1][U,a2]... e_k> - <e_k, U* [a0] [U,a1][U*,a2]... e_k>.
    """
    max_pt = max((max(abs(k[0]), abs(k[1])) for k in points), default=0)
    bws = [a.max_frequency() for a in inputs]
    lead_bw = leading.max_frequency() if leading is not None else 0
    bound = max_pt + sum(bws) + lead_bw + 2
    u = OperatorModel("torus_U")
    us = OperatorModel("torus_U_star")
    out = np.zeros(len(points), dtype=np.complex128)
    for lead_model, sign in ((u, 1.0), (us, -1.0)):
        ops = [SparseOperator.diagonal_phase(lead_model, bound)]
        if leading is not None:
            ops.append(multiplication_operator(leading, bound))
        model = lead_model.adjoint()
        for a in inputs:
            ops.append(commutator(model, a, bound))
            model = model.adjoint()
        out += sign * product_diagonal(ops, points)
    return out


def _phase_with_convention(k) -> complex:
    if k == (0, 0):
        return 1.0 + 0j
    z = complex(k[0], k[1])
    return z / abs(z)


def torus_diagonal_kernel(a0: FourierSeries, a1: FourierSeries,
                          a2: FourierSeries, points) -> np.ndarray:
    """The same diagonal from the degree-zero kernel:
    d(k) = 4i * sum_{m,n} rho(k, m, n) a0_{-n} a1_{n-m} a2_{m},
    where m is the offset after the first (rightmost) commutator and n
    after the second.  Triples hitting the zero frequency fall outside the
    generic kernel formula; there rho is evaluated as half the imaginary
    part of the phase product with the zero-frequency phase set to 1, the
    same convention the operator model uses, so the identity is exact
    everywhere."""
    sup0 = {k: (v.to_complex() if a0.exact else v) for k, v in a0.coeffs.items()}
    sup1 = {k: (v.to_complex() if a1.exact else v) for k, v in a1.coeffs.items()}
    sup2 = {k: (v.to_complex() if a2.exact else v) for k, v in a2.coeffs.items()}
    out = np.zeros(len(points), dtype=np.complex128)
    for i, k in enumerate(points):
        total = 0j
        for f2, c2 in sup2.items():
            m = f2
            for f1, c1 in sup1.items():
                n = (f1[0] + f2[0], f1[1] + f2[1])
                c0 = sup0.get((-n[0], -n[1]))
                if c0 is None:
                    continue
                try:
                    r = torus_phase_kernel_rho(k, m, n)
                except ZeroDivisionError:
                    z = _phase_with_convention(k)
                    w = _phase_with_convention((k[0] + m[0], k[1] + m[1]))
                    v = _phase_with_convention((k[0] + n[0], k[1] + n[1]))
                    r = 0.5 * (z * (z.conjugate() - v.conjugate())
                               * (v - w) * (w.conjugate() - z.conjugate())).imag
                total += r * c0 * c1 * c2
        out[i] = 4j * total
    return out


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------

def _finish(kind, spec, inputs, diag, schedule, notes, exact_value=None) -> CochainEvaluation:
    series = log_mean(diag, schedule, label=kind)
    pr = probe(series) if len(series.checkpoints) >= 3 else None
    return CochainEvaluation(kind, spec, list(inputs), diag, series, pr,
                             exact_value, exact_value is not None, notes)


def _torus_schedule(schedule, n_points):
    if schedule is not None:
        return schedule
    cps = [(m, 1 << m) for m in range(2, 24) if (1 << m) <= n_points]
    if not cps or cps[-1][1] != n_points:
        cps.append((math.log2(n_points), n_points))
    return cps


def eval_c_omega(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                 schedule=None, n_shells: int = 64) -> CochainEvaluation:
    """The cyclic cocycle: log-means of the diagonal of F [F,a0]...[F,ap]
    (circle) or its graded torus analogue, plus the limit probe.

    Finite-rank exact inputs also get an exact windowed trace.
    """
    if len(a) != spec.p + 1:
        raise ValueError(f"c_omega at p={spec.p} takes {spec.p + 1} inputs, got {len(a)}")
    notes = {"pairing_normalization": pairing_normalization(spec.p)}
    if spec.domain == "circle":
        if any(s.domain != "circle" for s in a):
            raise ValueError("input domain does not match the module")
        schedule = schedule or dyadic_schedule(4, 20)
        diag = _circle_diagonal(a, schedule, label="c_omega")
        exact_value = _exact_circle_trace(a) if all(s.exact for s in a) else None
        return _finish("c_omega", spec, a, diag, schedule, notes, exact_value)
    if any(s.domain != "torus" for s in a):
        raise ValueError("input domain does not match the module")
    w = TruncationWindow.torus_shells(n_shells)
    points = w.points()
    diag = DiagonalSequence(torus_diagonal_operator(list(a), points),
                            finite_tail=False, label="c_omega")
    return _finish("c_omega", spec, a, diag, _torus_schedule(schedule, len(points)), notes)


def eval_h_omega(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                 schedule=None, n_shells: int = 64) -> CochainEvaluation:
    """The Hochschild cocycle: p * log-means of F a0 [F,a1]...[F,a_{p+1}].

    The prefactor p is folded into the diagonal sequence, so the
    coboundary relation h(1, a...) = p * c(a...) holds with identical
    diagonals, not just equal limits.
    """
    if len(a) != spec.p + 2:
        raise ValueError(f"h_omega at p={spec.p} takes {spec.p + 2} inputs, got {len(a)}")
    notes = {"prefactor": spec.p,
             "pairing_normalization": pairing_normalization(spec.p)}
    if spec.domain == "circle":
        schedule = schedule or dyadic_schedule(4, 20)
        diag = _circle_diagonal(a[1:], schedule, leading=a[0],
                                prefactor=spec.p, label="h_omega")
        exact_value = None
        if all(s.exact for s in a):
            exact_value = _exact_circle_trace(a[1:], leading=a[0]) * spec.p
        return _finish("h_omega", spec, a, diag, schedule, notes, exact_value)
    w = TruncationWindow.torus_shells(n_shells)
    points = w.points()
    vals = spec.p * torus_diagonal_operator(list(a[1:]), points, leading=a[0])
    diag = DiagonalSequence(vals, finite_tail=False, label="h_omega")
    return _finish("h_omega", spec, a, diag, _torus_schedule(schedule, len(points)), notes)


def connes_chern_constant(n: int) -> complex:
    """c_n = (-1)^(n(n-1)/2) Gamma(n/2+1), times sqrt(2i) = 1+i for odd n."""
    c = (-1) ** ((n * (n - 1) // 2) % 2) * math.gamma(n / 2 + 1)
    if n % 2 == 1:
        return (1 + 1j) * c
    return complex(c)


def eval_ch_CC(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
               window_bound: int | None = None,
               stability_tol: float = 1e-10) -> CochainEvaluation:
    """The normalized character cochain: c_n * Tr(F [F,a0]...[F,a_n]) with an
    exact windowed trace and a window-doubling stability report."""
    n = len(a) - 1
    if spec.domain != "circle":
        raise NotImplementedError("the character cochain is implemented on the circle")
    total = sum(s.max_frequency() for s in a)
    bound = window_bound or (2 * total + 4)
    traces = []
    for b in (bound, 2 * bound):
        prod = compose(_circle_ops(list(a), b))
        if prod.exact:
            t = QGauss()
            for r, c, v in prod.items():
                if r == c:
                    t = t + v
            traces.append(t.to_complex())
        else:
            t = 0j
            for r, c, v in prod.items():
                if r == c:
                    t += v
            traces.append(t)
    drift = abs(traces[1] - traces[0])
    if drift > stability_tol * max(1.0, abs(traces[1])):
        raise CocycleConsistencyError(
            f"windowed trace drifts under doubling: {traces[0]} vs {traces[1]}")
    cn = connes_chern_constant(n)
    notes = {"raw_trace": traces[1], "c_n": cn, "window_drift": drift,
             "window_bound": bound}
    return CochainEvaluation("ch_CC", spec, list(a), None, None, None,
                             cn * traces[1], True, notes)


def check_hochschild_cocycle(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                             schedule=None) -> CochainEvaluation:
    """The coboundary of the Hochschild cocycle, summed at the diagonal level.

    (b h)(a0,...,a_{p+2}) = sum_i (-1)^i h(..., a_i a_{i+1}, ...)
                           + (-1)^(p+2) h(a_{p+2} a0, a1, ..., a_{p+1});
    its probe is expected to trend to zero (the product is trace class).
    """
    if len(a) != spec.p + 3:
        raise ValueError(f"b h_omega at p={spec.p} takes {spec.p + 3} inputs")
    if spec.domain != "circle":
        raise NotImplementedError("coboundary checks are implemented on the circle")
    schedule = schedule or dyadic_schedule(4, 20)
    total = None
    for i in range(spec.p + 2):
        args = list(a[:i]) + [multiply(a[i], a[i + 1])] + list(a[i + 2:])
        diag = _circle_diagonal(args[1:], schedule, leading=args[0],
                                prefactor=spec.p)
        term = diag.scale((-1) ** i)
        total = term if total is None else total + term
    args = [multiply(a[-1], a[0])] + list(a[1:-1])
    diag = _circle_diagonal(args[1:], schedule, leading=args[0], prefactor=spec.p)
    total = total + diag.scale((-1) ** (spec.p + 2))
    notes = {"terms": spec.p + 3}
    return _finish("b_h_omega", spec, a, total, schedule, notes)


def check_cyclicity(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                    schedule=None) -> CochainEvaluation:
    """Probe of c(a) - (-1)^p c(Lambda a), the defect of the trace identity
    Tr(F [F,a_p][F,a_0]...[F,a_{p-1}]) = (-1)^p Tr(F [F,a_0]...[F,a_p])
    (rotate one commutator around the trace and move it past F)."""
    if len(a) != spec.p + 1:
        raise ValueError("cyclicity check takes p+1 inputs")
    schedule = schedule or dyadic_schedule(4, 20)
    rotated = list(a[1:]) + [a[0]]
    d1 = _circle_diagonal(a, schedule, label="cyclicity")
    d2 = _circle_diagonal(rotated, schedule)
    diff = d1 + d2.scale(-((-1) ** spec.p))
    return _finish("cyclicity_defect", spec, a, diff, schedule, {})


# ---------------------------------------------------------------------------
# the circle p = 3 fast path and the wedge evaluator
# ---------------------------------------------------------------------------

def holomorphy_type(a: FourierSeries) -> str:
    """'analytic' (frequencies > 0), 'anti' (< 0), or 'mixed'.

    The strict inequalities matter: the fast path weights by the frequency
    k itself, so a constant term would contribute nothing anyway, but a
    constant also never appears in the intended inputs."""
    if a.domain != "circle" or not a.coeffs:
        return "mixed"
    if all(k > 0 for k in a.coeffs):
        return "analytic"
    if all(k < 0 for k in a.coeffs):
        return "anti"
    return "mixed"


def fast_path_partial_sums(b: Sequence[FourierSeries], ns: Sequence[int]) -> np.ndarray:
    """Partial double sums sum_{k<N} sum_{m>=k} k b0_k b2_m (b1_{-m} b3_{-k}
    - b1_{-k} b3_{-m}) at the given N, for the alternating holomorphy
    pattern; exact zero for patterns with an adjacent same-side pair."""
    types = [holomorphy_type(s) for s in b]
    if any(t == "mixed" for t in types):
        raise ValueError("fast path undefined: mixed holomorphy in an input")
    if any(types[i] == types[i + 1] for i in range(3)):
        # adjacent same-side commutators compose through the complementary
        # projection and vanish identically
        return np.zeros(len(ns), dtype=np.complex128)
    if types != ["analytic", "anti", "analytic", "anti"]:
        raise ValueError(f"fast path undefined for holomorphy pattern {types}")
    b0, b1, b2, b3 = b
    c = [{k: (v.to_complex() if s.exact else complex(v)) for k, v in s.coeffs.items()}
         for s in b]
    ks = sorted(c[0])
    ms = sorted(c[2])
    out = np.zeros(len(ns), dtype=np.complex128)
    for i, n in enumerate(ns):
        total = 0j
        for k in ks:
            if k >= n:
                break
            b3k = c[3].get(-k)
            b1k = c[1].get(-k)
            for m in ms:
                if m < k:
                    continue
                inner = 0j
                if b3k is not None and -m in c[1]:
                    inner += c[1][-m] * b3k
                if b1k is not None and -m in c[3]:
                    inner -= b1k * c[3][-m]
                if inner:
                    total += k * c[0][k] * c[2][m] * inner
        out[i] = total
    return out


_S3 = [((1, 2, 3), 1), ((1, 3, 2), -1), ((2, 1, 3), -1),
       ((2, 3, 1), 1), ((3, 1, 2), 1), ((3, 2, 1), -1)]


def eval_c_omega_wedge(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                       schedule=None, method: str = "fast") -> CochainEvaluation:
    """Antisymmetrized evaluation (1/2) c(a0 ^ a1 ^ a2 ^ a3).

    method 'fast': the double Fourier sums of the alternating-pattern
    tuples, summed with permutation signs.  method 'operator': the signed
    sum of operator diagonals of F [F,a0][F,a_s(1)][F,a_s(2)][F,a_s(3)]
    over the one-sided order, scaled by the halved-commutator constant
    (1/2)^4 so both methods target the same normalization.
    """
    if spec.p != 3 or len(a) != 4:
        raise ValueError("the wedge evaluator is the p = 3, 4-input form")
    schedule = schedule or dyadic_schedule(4, 20)
    ns = [n for (_, n) in schedule]
    notes = {"normalization": "half wedge sum, quarter-commutator scale"}
    if method == "fast":
        total = np.zeros(len(ns), dtype=np.complex128)
        for perm, sign in _S3:
            tup = [a[0]] + [a[j] for j in perm]
            total += sign * fast_path_partial_sums(tup, ns)
        total *= 0.5
        cps = [(m, n, complex(v) / math.log(2 + n))
               for (m, n), v in zip(schedule, total)]
        series = LogMeanSeries(cps, label="wedge_fast")
        return CochainEvaluation("c_omega_wedge", spec, list(a), None, series,
                                 probe(series), None, False, notes)
    if method != "operator":
        raise ValueError(f"unknown wedge method {method!r}")
    max_n = max(ns)
    total_bw = sum(s.max_frequency() for s in a)
    bound = total_bw + max_n + 4
    f_model = OperatorModel("circle_F")
    f_diag = SparseOperator.diagonal_phase(f_model, bound)
    comms = [commutator(f_model, s, bound) for s in a]
    window = TruncationWindow.circle_one_sided(max_n - 1)
    diag_total = None
    for perm, sign in _S3:
        ops = [f_diag, comms[0]] + [comms[j] for j in perm]
        d = diagonal_of(ops, window, label="wedge_operator")
        term = d.scale(sign)
        diag_total = term if diag_total is None else diag_total + term
    diag_total = diag_total.scale(0.5 * pairing_normalization(3))
    series = log_mean(diag_total, schedule, label="wedge_operator")
    return CochainEvaluation("c_omega_wedge", spec, list(a), diag_total, series,
                             probe(series), None, False, notes)


def cross_check_wedge_paths(spec: FredholmModuleSpec, a: Sequence[FourierSeries],
                            schedule=None, tol: float | None = None) -> dict:
    """Evaluate both wedge paths on the same schedule and report the
    checkpointwise discrepancy; raises when a tolerance is given and
    exceeded (internal consistency failure)."""
    fast = eval_c_omega_wedge(spec, a, schedule, method="fast")
    oper = eval_c_omega_wedge(spec, a, schedule, method="operator")
    diff = np.abs(fast.series.values() - oper.series.values())
    report = {"fast": fast, "operator": oper, "max_discrepancy": float(diff.max())}
    if tol is not None and diff.max() > tol:
        raise CocycleConsistencyError(
            f"fast and operator wedge paths disagree: max |delta| = {diff.max():.6g} "
            f"exceeds tolerance {tol:g}")
    return report


# ---------------------------------------------------------------------------
# the lacunary Szego product diagonal (closed form)
# ---------------------------------------------------------------------------

def szego_pair_diagonal(c1, c2, level_cap: int, cap: int,
                        alpha: float = 0.5) -> DiagonalSequence:
    """Closed-form diagonal of P W(c1) (1-P) W(c2)* P on the one-sided order:
    d_k = sum_{j <= level_cap, 2^j > k} c1_j conj(c2_j) 2^(-2 alpha j).

    Piecewise constant on dyadic blocks, so it materializes by repetition.
    The dense-product oracle in the test suite pins this formula.
    """
    gamma = np.array([complex(c1(j)) * complex(c2(j)).conjugate()
                      for j in range(level_cap + 1)], dtype=np.complex128)
    weights = gamma * np.power(2.0, -2.0 * alpha * np.arange(level_cap + 1))
    suffix = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    out = np.empty(cap, dtype=np.complex128)
    out[0] = suffix[0]
    t = 0
    while (1 << t) < cap:
        lo = 1 << t
        hi = min(1 << (t + 1), cap)
        out[lo:hi] = suffix[t + 1] if t + 1 <= level_cap else 0.0
        t += 1
    finite_tail = cap >= (1 << level_cap)
    return DiagonalSequence(out, finite_tail=finite_tail, label="szego_pair")
