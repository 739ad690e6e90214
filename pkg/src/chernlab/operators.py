"""Fourier-basis operator models: Szego projector, circle and torus phases,
sparse truncated commutators, singular values, weak-Schatten diagnostics.

All operators here are either diagonal in the Fourier basis (phase
operators) or banded-sparse (commutators with multiplication operators).
A SparseOperator tracks, besides its entries, the radius of frequencies
whose full operator column is exactly represented; composing operators
shrinks that radius by the bandwidth of the right factor, and diagonal
extraction refuses to read outside it.  This makes window truncation loud
instead of silently biased.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .scalars import QGauss, format_rational
from .series import FourierSeries, FrequencyIndex, TorusIndex, cross

__all__ = [
    "OperatorModel", "TruncationWindow", "SparseOperator",
    "SingularValueSequence", "WindowLeakageError", "commutator", "compose",
    "product_diagonal", "singular_values", "weak_quasinorm",
    "torus_phase_kernel_rho", "rho_exact_terms", "surd_sum_equal",
    "complex_cross",
]


class WindowLeakageError(ValueError):
    """Raised when a truncation window is too small for an exact answer."""


def _obj_array(items) -> np.ndarray:
    # np.array on a list of tuples builds a 2-D array; keep tuples as objects
    arr = np.empty(len(items), dtype=object)
    for i, it in enumerate(items):
        arr[i] = it
    return arr


# ---------------------------------------------------------------------------
# operator models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorModel:
    """A diagonal-phase operator in the Fourier basis.

    kinds: szego_P (projection onto nonnegative frequencies), circle_F
    (2P-1, with sign(0)=1), torus_U (phase k/|k| with phase 1 at the
    origin), torus_U_star (its adjoint), torus_F (the off-diagonal block
    symmetry; has no scalar phase, it is handled by graded evaluators).
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("szego_P", "circle_F", "torus_U", "torus_U_star", "torus_F"):
            raise ValueError(f"unknown operator kind {self.kind!r}")

    @property
    def domain(self) -> str:
        return "circle" if self.kind in ("szego_P", "circle_F") else "torus"

    def adjoint(self) -> "OperatorModel":
        if self.kind == "torus_U":
            return OperatorModel("torus_U_star")
        if self.kind == "torus_U_star":
            return OperatorModel("torus_U")
        return self

    def phase(self, k: FrequencyIndex):
        """Eigenvalue on the basis vector e_k."""
        if self.kind == "szego_P":
            return 1 if k >= 0 else 0
        if self.kind == "circle_F":
            return 1 if k >= 0 else -1
        if self.kind in ("torus_U", "torus_U_star"):
            if k == (0, 0):
                return 1.0 + 0.0j
            z = complex(k[0], k[1])
            u = z / abs(z)
            return u if self.kind == "torus_U" else u.conjugate()
        raise ValueError("torus_F has no scalar phase; use the graded evaluator")

    def phase_array(self, k1: np.ndarray, k2: np.ndarray | None = None) -> np.ndarray:
        """Vectorized phase over integer frequency arrays."""
        if self.kind == "szego_P":
            return (k1 >= 0).astype(np.int64)
        if self.kind == "circle_F":
            return np.where(k1 >= 0, 1, -1).astype(np.int64)
        z = k1.astype(np.complex128) + 1j * k2.astype(np.complex128)
        mod = np.abs(z)
        u = np.where(mod == 0, 1.0 + 0j, z / np.where(mod == 0, 1.0, mod))
        return u if self.kind == "torus_U" else np.conj(u)


# ---------------------------------------------------------------------------
# truncation windows
# ---------------------------------------------------------------------------

def _torus_shells(n_shells: int) -> Tuple[List[TorusIndex], List[int], List[int]]:
    """Lattice points of the first n_shells distinct values of |k|^2.

    Returns (points in canonical order, shell id per point, distinct norms).
    Canonical order: increasing |k|^2, ties lexicographic by (k1, k2).
    """
    radius = int(math.isqrt(2 * n_shells)) + 2
    while True:
        pts = [(i, j) for i in range(-radius, radius + 1)
               for j in range(-radius, radius + 1)]
        norms = sorted({i * i + j * j for (i, j) in pts})
        # distinct norms below radius^2 are guaranteed complete
        complete = [q for q in norms if q <= radius * radius]
        if len(complete) >= n_shells:
            break
        radius *= 2
    lam = complete[:n_shells]
    lam_max = lam[-1]
    kept = sorted((i * i + j * j, i, j) for (i, j) in pts if i * i + j * j <= lam_max)
    points = [(i, j) for (_, i, j) in kept]
    shell_of = {q: s for s, q in enumerate(lam)}
    shells = [shell_of[q] for (q, _, _) in kept]
    return points, shells, lam


@dataclass(frozen=True)
class TruncationWindow:
    """A finite index window with a canonical diagonal ordering.

    kinds:
      circle_symmetric(N): frequencies -N..N, order 0,-1,1,-2,2,...
      circle_one_sided(N): frequencies 0..N, order 0,1,2,...
      torus_shells(N):     E_N, all k with |k|^2 <= the N-th distinct
                           squared norm; order by (|k|^2, k1, k2).
    """

    domain: str
    kind: str
    size: int

    def __post_init__(self):
        valid = {("circle", "circle_symmetric"), ("circle", "circle_one_sided"),
                 ("torus", "torus_shells")}
        if (self.domain, self.kind) not in valid:
            raise ValueError(f"invalid window {self.domain}/{self.kind}")
        if self.size < 0:
            raise ValueError("window size must be nonnegative")

    @staticmethod
    def circle_symmetric(n: int) -> "TruncationWindow":
        return TruncationWindow("circle", "circle_symmetric", n)

    @staticmethod
    def circle_one_sided(n: int) -> "TruncationWindow":
        return TruncationWindow("circle", "circle_one_sided", n)

    @staticmethod
    def torus_shells(n: int) -> "TruncationWindow":
        return TruncationWindow("torus", "torus_shells", n)

    def sup_bound(self) -> int:
        """Max coordinate magnitude of any index in the window."""
        if self.domain == "circle":
            return self.size
        pts = self.points()
        return max((max(abs(i), abs(j)) for (i, j) in pts), default=0)

    def contains(self, k: FrequencyIndex) -> bool:
        if self.kind == "circle_symmetric":
            return -self.size <= k <= self.size
        if self.kind == "circle_one_sided":
            return 0 <= k <= self.size
        pts, _, lam = _torus_shells(self.size)
        return k[0] * k[0] + k[1] * k[1] <= lam[-1]

    def points(self) -> list:
        """Canonical diagonal ordering of the window's indices."""
        if self.kind == "circle_one_sided":
            return list(range(self.size + 1))
        if self.kind == "circle_symmetric":
            out = [0]
            for k in range(1, self.size + 1):
                out.extend([-k, k])
            return out
        pts, _, _ = _torus_shells(self.size)
        return pts

    def shell_norms(self) -> list:
        if self.kind != "torus_shells":
            raise ValueError("shell norms exist only for torus windows")
        _, _, lam = _torus_shells(self.size)
        return lam


# ---------------------------------------------------------------------------
# sparse operators
# ---------------------------------------------------------------------------

def _norm_inf(k: FrequencyIndex, domain: str) -> int:
    return abs(k) if domain == "circle" else max(abs(k[0]), abs(k[1]))


@dataclass
class SparseOperator:
    """Sparse matrix over frequency indices within a symmetric box window.

    bound: the box half-width W (circle: |k| <= W; torus: |k|_inf <= W).
    exact_col_radius: columns with |k|_inf <= this radius carry the full
        untruncated operator column; reads outside it raise.
    bandwidth: max |row - col|_inf over entries.
    Entries are an exact dict {(row, col): QGauss} when exact, else
    parallel numpy coordinate arrays.
    """

    domain: str
    bound: int
    exact: bool
    exact_col_radius: int
    bandwidth: int
    entries: Dict[tuple, QGauss] = field(default_factory=dict)
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None
    vals: np.ndarray | None = None

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_dict(domain: str, bound: int, entries: dict, exact: bool,
                  exact_col_radius: int, bandwidth: int) -> "SparseOperator":
        if exact:
            ent = {k: QGauss.of(v) for k, v in entries.items() if not QGauss.of(v).is_zero()}
            return SparseOperator(domain, bound, True, exact_col_radius, bandwidth, ent)
        op = SparseOperator(domain, bound, False, exact_col_radius, bandwidth, {})
        items = [(r, c, complex(v)) for (r, c), v in entries.items() if v != 0]
        if domain == "circle":
            op.rows = np.array([r for r, _, _ in items], dtype=np.int64)
            op.cols = np.array([c for _, c, _ in items], dtype=np.int64)
        else:
            op.rows = _obj_array([r for r, _, _ in items])
            op.cols = _obj_array([c for _, c, _ in items])
        op.vals = np.array([v for _, _, v in items], dtype=np.complex128)
        return op

    @staticmethod
    def identity(domain: str, bound: int, exact: bool = True) -> "SparseOperator":
        if domain == "circle":
            ent = {(k, k): 1 for k in range(-bound, bound + 1)}
        else:
            ent = {((i, j), (i, j)): 1 for i in range(-bound, bound + 1)
                   for j in range(-bound, bound + 1)}
        return SparseOperator.from_dict(domain, bound, ent, exact, bound, 0)

    @staticmethod
    def diagonal_phase(op: OperatorModel, bound: int) -> "SparseOperator":
        """The phase operator itself, truncated to the box window."""
        exact = op.kind in ("szego_P", "circle_F")
        if op.domain == "circle":
            ent = {(k, k): op.phase(k) for k in range(-bound, bound + 1)}
        else:
            ent = {((i, j), (i, j)): op.phase((i, j))
                   for i in range(-bound, bound + 1) for j in range(-bound, bound + 1)}
        return SparseOperator.from_dict(op.domain, bound, ent, exact, bound, 0)

    # -- basic queries -----------------------------------------------------

    def nnz(self) -> int:
        return len(self.entries) if self.exact else len(self.vals)

    def items(self):
        if self.exact:
            for (r, c), v in self.entries.items():
                yield r, c, v
        else:
            for r, c, v in zip(self.rows, self.cols, self.vals):
                if self.domain == "circle":
                    yield int(r), int(c), v
                else:
                    yield tuple(r), tuple(c), v

    def to_float(self) -> "SparseOperator":
        if not self.exact:
            return self
        ent = {(r, c): v.to_complex() for (r, c), v in self.entries.items()}
        return SparseOperator.from_dict(self.domain, self.bound, ent, False,
                                        self.exact_col_radius, self.bandwidth)

    def entry(self, r, c):
        if self.exact:
            return self.entries.get((r, c), QGauss())
        mask = (self.rows == r) & (self.cols == c) if self.domain == "circle" else \
            np.array([(rr, cc) == (r, c) for rr, cc in zip(self.rows, self.cols)])
        total = self.vals[mask].sum() if len(self.vals) else 0j
        return complex(total)

    def adjoint(self) -> "SparseOperator":
        if self.exact:
            ent = {(c, r): v.conjugate() for (r, c), v in self.entries.items()}
            return SparseOperator.from_dict(self.domain, self.bound, ent, True,
                                            self.exact_col_radius, self.bandwidth)
        op = SparseOperator(self.domain, self.bound, False, self.exact_col_radius,
                            self.bandwidth, {})
        op.rows, op.cols, op.vals = self.cols, self.rows, np.conj(self.vals)
        return op

    # -- scipy bridge ------------------------------------------------------

    def _linear_index(self, idx) -> np.ndarray:
        w = self.bound
        if self.domain == "circle":
            return np.asarray(idx, dtype=np.int64) + w
        arr = np.array([(k[0] + w) * (2 * w + 1) + (k[1] + w) for k in idx], dtype=np.int64)
        return arr

    def dim(self) -> int:
        return 2 * self.bound + 1 if self.domain == "circle" else (2 * self.bound + 1) ** 2

    def to_csr(self) -> sp.csr_matrix:
        f = self.to_float()
        n = self.dim()
        if f.vals is None or len(f.vals) == 0:
            return sp.csr_matrix((n, n), dtype=np.complex128)
        r = f._linear_index(f.rows)
        c = f._linear_index(f.cols)
        return sp.csr_matrix((f.vals, (r, c)), shape=(n, n))

    @staticmethod
    def from_csr(mat: sp.spmatrix, domain: str, bound: int,
                 exact_col_radius: int, bandwidth: int) -> "SparseOperator":
        coo = mat.tocoo()
        w = bound
        op = SparseOperator(domain, bound, False, exact_col_radius, bandwidth, {})
        if domain == "circle":
            op.rows = coo.row.astype(np.int64) - w
            op.cols = coo.col.astype(np.int64) - w
        else:
            side = 2 * w + 1
            op.rows = _obj_array([(int(r) // side - w, int(r) % side - w) for r in coo.row])
            op.cols = _obj_array([(int(c) // side - w, int(c) % side - w) for c in coo.col])
        op.vals = coo.data.astype(np.complex128)
        return op

    def diagonal_value(self, k) -> object:
        """Exact-or-float diagonal entry at frequency k; range-checked."""
        if _norm_inf(k, self.domain) > self.exact_col_radius:
            raise WindowLeakageError(
                f"diagonal at {k} exceeds the exact column radius "
                f"{self.exact_col_radius}; enlarge the construction window")
        return self.entry(k, k)

    def to_text(self) -> str:
        lines = [f"# domain={self.domain} bound={self.bound} exact={1 if self.exact else 0} "
                 f"exact_col_radius={self.exact_col_radius} bandwidth={self.bandwidth}"]
        for r, c, v in sorted(self.items(), key=lambda t: (str(t[0]), str(t[1]))):
            if self.exact:
                re, im = format_rational(v.re), format_rational(v.im)
            else:
                re, im = repr(v.real), repr(v.imag)
            if self.domain == "circle":
                lines.append(f"{r} {c} {re} {im}")
            else:
                lines.append(f"{r[0]} {r[1]} {c[0]} {c[1]} {re} {im}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commutators
# ---------------------------------------------------------------------------

def commutator(op: OperatorModel, a: FourierSeries, w: TruncationWindow | int) -> SparseOperator:
    """The matrix of [op, M_a] on the window: entry (r, c) = a_{r-c} (phase(r) - phase(c)).

    Entries are exact values of the untruncated commutator (truncation only
    removes rows/columns, it never perturbs retained entries).  The exact
    column radius is bound - max_frequency(a); a nonpositive radius means no
    column is complete and the caller must enlarge the window.
    """
    if op.kind == "torus_F":
        raise ValueError("torus_F commutators are evaluated through the graded "
                         "U/U* difference form; use the cocycle evaluators")
    if op.domain != a.domain:
        raise ValueError(f"domain mismatch: operator {op.domain} vs series {a.domain}")
    bound = w if isinstance(w, int) else w.sup_bound()
    bw = a.max_frequency()
    radius = bound - bw
    if radius < 0:
        raise WindowLeakageError(
            f"window bound {bound} is smaller than the series bandwidth {bw}")
    if op.domain == "circle":
        return _commutator_circle(op, a, bound, radius, bw)
    return _commutator_torus(op, a, bound, radius, bw)


def _commutator_circle(op: OperatorModel, a: FourierSeries, bound: int,
                       radius: int, bw: int) -> SparseOperator:
    step = 1 if op.kind == "szego_P" else 2
    exact = a.exact
    entries: dict = {}
    rows_list, cols_list, vals_list = [], [], []
    for f, coeff in a.coeffs.items():
        if f == 0:
            continue
        # phase(r) != phase(c) with r = c + f happens exactly for the |f|
        # columns where r and c straddle zero (sign(0) = +1 side included)
        if f > 0:
            cs = range(max(-f, -bound), min(0, bound - f + 1))
            sgn = step
        else:
            cs = range(max(0, -bound - f), min(-f, bound + 1))
            sgn = -step
        if exact:
            for c in cs:
                entries[(c + f, c)] = QGauss.of(coeff) * sgn
        else:
            for c in cs:
                rows_list.append(c + f)
                cols_list.append(c)
                vals_list.append(complex(coeff) * sgn)
    if exact:
        return SparseOperator.from_dict("circle", bound, entries, True, radius, bw)
    out = SparseOperator("circle", bound, False, radius, bw, {})
    out.rows = np.array(rows_list, dtype=np.int64)
    out.cols = np.array(cols_list, dtype=np.int64)
    out.vals = np.array(vals_list, dtype=np.complex128)
    return out


def _commutator_torus(op: OperatorModel, a: FourierSeries, bound: int,
                      radius: int, bw: int) -> SparseOperator:
    side = np.arange(-bound, bound + 1, dtype=np.int64)
    c1, c2 = np.meshgrid(side, side, indexing="ij")
    c1 = c1.ravel()
    c2 = c2.ravel()
    phase_c = op.phase_array(c1, c2)
    rows_list, cols_list, vals_list = [], [], []
    for (f1, f2), coeff in a.coeffs.items():
        r1, r2 = c1 + f1, c2 + f2
        keep = (np.abs(r1) <= bound) & (np.abs(r2) <= bound)
        pv = op.phase_array(r1[keep], r2[keep]) - phase_c[keep]
        nz = pv != 0
        rr1, rr2 = r1[keep][nz], r2[keep][nz]
        cc1, cc2 = c1[keep][nz], c2[keep][nz]
        for i in range(len(rr1)):
            rows_list.append((int(rr1[i]), int(rr2[i])))
            cols_list.append((int(cc1[i]), int(cc2[i])))
        vals_list.extend(complex(coeff) * pv[nz])
    out = SparseOperator("torus", bound, False, radius, bw, {})
    out.rows = _obj_array(rows_list)
    out.cols = _obj_array(cols_list)
    out.vals = np.array(vals_list, dtype=np.complex128)
    return out


def multiplication_operator(a: FourierSeries, w: TruncationWindow | int) -> SparseOperator:
    """The matrix of M_a on the box window: entry (c+f, c) = a_f."""
    bound = w if isinstance(w, int) else w.sup_bound()
    bw = a.max_frequency()
    radius = bound - bw
    if radius < 0:
        raise WindowLeakageError(
            f"window bound {bound} is smaller than the series bandwidth {bw}")
    entries: dict = {}
    if a.domain == "circle":
        for f, coeff in a.coeffs.items():
            for c in range(max(-bound, -bound - f), min(bound, bound - f) + 1):
                entries[(c + f, c)] = coeff
        return SparseOperator.from_dict("circle", bound, entries, a.exact, radius, bw)
    for (f1, f2), coeff in a.coeffs.items():
        for c1 in range(max(-bound, -bound - f1), min(bound, bound - f1) + 1):
            for c2 in range(max(-bound, -bound - f2), min(bound, bound - f2) + 1):
                entries[((c1 + f1, c2 + f2), (c1, c2))] = coeff
    return SparseOperator.from_dict("torus", bound, entries, a.exact, radius, bw)


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def _compose_pair(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    if a.domain != b.domain:
        raise ValueError("window/domain mismatch in composition")
    if a.bound != b.bound:
        raise ValueError(f"window mismatch: bounds {a.bound} vs {b.bound}")
    radius = min(b.exact_col_radius, a.exact_col_radius - b.bandwidth)
    bw = a.bandwidth + b.bandwidth
    if a.exact and b.exact and a.nnz() * b.nnz() <= 4_000_000:
        out: dict = {}
        bycol: Dict[object, list] = {}
        for r, c, v in b.items():
            bycol.setdefault(r, []).append((c, v))
        for r, s, va in a.items():
            for c, vb in bycol.get(s, ()):  # (A B)(r,c) = sum_s A(r,s) B(s,c)
                key = (r, c)
                prod = va * vb
                cur = out.get(key)
                out[key] = prod if cur is None else cur + prod
        return SparseOperator.from_dict(a.domain, a.bound, out, True, radius, bw)
    mat = a.to_csr() @ b.to_csr()
    mat.eliminate_zeros()
    return SparseOperator.from_csr(mat, a.domain, a.bound, radius, bw)


def compose(ops: Sequence[SparseOperator], bound: int | None = None,
            domain: str = "circle") -> SparseOperator:
    """Matrix product of the operators; empty list gives the identity."""
    if not ops:
        if bound is None:
            raise ValueError("empty product needs an explicit window bound")
        return SparseOperator.identity(domain, bound)
    result = ops[0]
    for op in ops[1:]:
        result = _compose_pair(result, op)
    return result


def product_diagonal(ops: Sequence[SparseOperator], indices: Iterable) -> np.ndarray:
    """Diagonal entries of the product of ops at the given frequencies.

    Splits the factor list in half and contracts row-by-column, which
    avoids materializing the full product for long factor lists.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one operator")
    if len(ops) == 1:
        full = ops[0]
        return np.array([complex(full.diagonal_value(k)) for k in indices])
    mid = (len(ops) + 1) // 2
    left = compose(ops[:mid]) if mid > 0 else None
    right = compose(ops[mid:])
    if left is None:
        return product_diagonal([right], indices)
    radius = min(right.exact_col_radius, left.exact_col_radius - right.bandwidth)
    idx = list(indices)
    for k in idx:
        if _norm_inf(k, right.domain) > radius:
            raise WindowLeakageError(
                f"diagonal at {k} exceeds the exact column radius {radius}; "
                f"enlarge the construction window")
    lm = left.to_csr()
    rm = right.to_csr()
    diag_full = np.asarray(lm.multiply(rm.T).sum(axis=1)).ravel()
    probe = SparseOperator(right.domain, right.bound, False, radius, 0, {})
    pos = probe._linear_index(idx)
    return diag_full[pos]


# ---------------------------------------------------------------------------
# singular values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularValueSequence:
    mu: np.ndarray
    provenance: str

    def __post_init__(self):
        m = np.asarray(self.mu, dtype=float)
        if np.any(m < -1e-12):
            raise ValueError("singular values must be nonnegative")
        if np.any(np.diff(m) > 1e-9 * (1 + m[:-1] if len(m) > 1 else 1)):
            raise ValueError("singular values must be nonincreasing")
        object.__setattr__(self, "mu", np.maximum(m, 0.0))

    def __len__(self):
        return len(self.mu)

    def to_csv(self) -> str:
        lines = [f"# {self.provenance}", "k,mu"]
        lines += [f"{k},{v:.12g}" for k, v in enumerate(self.mu)]
        return "\n".join(lines) + "\n"


DENSE_SVD_DIM = 512
GRAM_EIG_DIM = 9000


def singular_values(a: SparseOperator, count: int, provenance: str = "") -> SingularValueSequence:
    """Top `count` singular values, iterative with a dense fallback.

    The operator is first compressed to its nonzero rows and columns.
    Below dimension 512 a dense decomposition is used; above, PROPACK
    bidiagonalization (dense-verified on small windows by the test suite).
    """
    f = a.to_float()
    if f.vals is None or len(f.vals) == 0:
        return SingularValueSequence(np.zeros(count), provenance or "zero operator")
    rkeys = sorted({str(r): r for r in f.rows}.items())
    ckeys = sorted({str(c): c for c in f.cols}.items())
    rpos = {k: i for i, (k, _) in enumerate(rkeys)}
    cpos = {k: i for i, (k, _) in enumerate(ckeys)}
    ri = np.array([rpos[str(r)] for r in f.rows], dtype=np.int64)
    ci = np.array([cpos[str(c)] for c in f.cols], dtype=np.int64)
    mat = sp.csr_matrix((f.vals, (ri, ci)), shape=(len(rkeys), len(ckeys)))
    dim = min(mat.shape)
    if max(mat.shape) <= DENSE_SVD_DIM:
        mu = np.linalg.svd(mat.toarray(), compute_uv=False)
        method = "dense"
    else:
        # Singular values are invariant under row/column permutations, so a
        # matrix whose bipartite row/column graph splits into components is
        # decomposed and each block handled densely when small enough.
        nr, nc = mat.shape
        coo = mat.tocoo()
        graph = sp.csr_matrix(
            (np.ones(coo.nnz), (coo.row, coo.col + nr)), shape=(nr + nc, nr + nc))
        n_comp, labels = csgraph.connected_components(graph, directed=False)
        blocks = []
        for comp in range(n_comp):
            rows = np.nonzero(labels[:nr] == comp)[0]
            cols = np.nonzero(labels[nr:] == comp)[0]
            if len(rows) and len(cols):
                blocks.append((rows, cols))
        if blocks and all(min(len(r), len(c)) <= DENSE_SVD_DIM
                          and len(r) * len(c) <= 8_000_000 for r, c in blocks):
            csc = mat.tocsc()
            pieces = [np.linalg.svd(csc[rows][:, cols].toarray(), compute_uv=False)
                      for rows, cols in blocks]
            mu = np.concatenate(pieces) if pieces else np.zeros(0)
            method = f"dense per block ({len(blocks)} blocks)"
        elif dim <= GRAM_EIG_DIM:
            # singular values via the smaller Gram matrix: a dense symmetric
            # eigensolve is far cheaper than a high-count iterative SVD
            gram = (mat @ mat.getH()) if nr <= nc else (mat.getH() @ mat)
            g = gram.toarray()
            if np.max(np.abs(g.imag)) == 0.0:
                g = g.real
            ev = np.linalg.eigvalsh(g)
            mu = np.sqrt(np.clip(ev, 0.0, None))
            method = "gram eigensolver"
        else:
            k = min(count, dim - 1)
            mu = spla.svds(mat, k=k, solver="propack",
                           return_singular_vectors=False)
            method = "propack"
        # beyond the rank of the windowed operator the singular values
        # are exactly zero; report them so tail quasinorms see the rank
        mu = np.sort(mu)[::-1]
    mu = np.abs(mu)
    if len(mu) < count:
        mu = np.concatenate([mu, np.zeros(count - len(mu))])
    mu = np.sort(mu)[::-1][:count]
    return SingularValueSequence(mu, provenance or f"{method} svd, nnz={f.vals.size}")


def weak_quasinorm(mu: SingularValueSequence, p: float) -> tuple:
    """sup_k (k+1)^{1/p} mu_k and the same sup over the last dyadic block.

    The tail sup diagnoses the separable subideal: finite rank (or faster
    than k^{-1/p} decay) drives it to zero.
    """
    if p <= 0:
        raise ValueError("weak-Schatten exponent must be positive")
    m = np.asarray(mu.mu, dtype=float)
    if len(m) == 0:
        raise ValueError("empty singular value sequence")
    weights = (np.arange(len(m)) + 1.0) ** (1.0 / p)
    vals = weights * m
    tail = vals[len(m) // 2:]
    return float(vals.max()), float(tail.max())


# ---------------------------------------------------------------------------
# torus kernel
# ---------------------------------------------------------------------------

def complex_cross(z: complex, w: complex) -> float:
    """Im(conj(z) w), the scalar cross product under C = R^2."""
    return (z.conjugate() * w).imag


def _rho_guards(k: TorusIndex, m: TorusIndex, n: TorusIndex) -> list:
    failed = []
    if k == (0, 0):
        failed.append("k = 0")
    if (k[0] + m[0], k[1] + m[1]) == (0, 0):
        failed.append("k + m = 0")
    if (k[0] + n[0], k[1] + n[1]) == (0, 0):
        failed.append("k + n = 0")
    return failed


def torus_phase_kernel_rho(k: TorusIndex, m: TorusIndex, n: TorusIndex) -> float:
    """The degree-zero kernel pairing the torus phase with Fourier data.

    rho(k,m,n) = (m x n + (m-n) x k)/(|n+k||m+k|) + (n x k)/(|k||k+n|)
               + (k x m)/(|k||k+m|).
    """
    failed = _rho_guards(k, m, n)
    if failed:
        raise ZeroDivisionError("degenerate kernel denominator: " + ", ".join(failed))
    kk = math.hypot(*k)
    nk = math.hypot(n[0] + k[0], n[1] + k[1])
    mk = math.hypot(m[0] + k[0], m[1] + k[1])
    t1 = (cross(m, n) + cross((m[0] - n[0], m[1] - n[1]), k)) / (nk * mk)
    t2 = cross(n, k) / (kk * nk)
    t3 = cross(k, m) / (kk * mk)
    return t1 + t2 + t3


def _squarefree_split(q: int) -> tuple:
    """q = s * f^2 with s squarefree; returns (s, f). Trial division."""
    s, f, d = 1, 1, 2
    while d * d <= q:
        e = 0
        while q % d == 0:
            q //= d
            e += 1
        f *= d ** (e // 2)
        if e % 2:
            s *= d
        d += 1 if d == 2 else 2
    return s * q, f


def rho_exact_terms(k: TorusIndex, m: TorusIndex, n: TorusIndex) -> dict:
    """rho as an exact sum of quadratic surds: {squarefree s: Fraction c}
    meaning sum c * sqrt(s) over the keys.  Enables exact equality tests.
    """
    failed = _rho_guards(k, m, n)
    if failed:
        raise ZeroDivisionError("degenerate kernel denominator: " + ", ".join(failed))
    q_k = k[0] * k[0] + k[1] * k[1]
    q_nk = (n[0] + k[0]) ** 2 + (n[1] + k[1]) ** 2
    q_mk = (m[0] + k[0]) ** 2 + (m[1] + k[1]) ** 2
    terms = [
        (cross(m, n) + cross((m[0] - n[0], m[1] - n[1]), k), q_nk * q_mk),
        (cross(n, k), q_k * q_nk),
        (cross(k, m), q_k * q_mk),
    ]
    out: Dict[int, Fraction] = {}
    for num, q in terms:
        if num == 0:
            continue
        # num / sqrt(q) = num * sqrt(s) / (s * f)  with q = s f^2
        s, f = _squarefree_split(q)
        coeff = Fraction(num, s * f)
        out[s] = out.get(s, Fraction(0)) + coeff
    return {s: c for s, c in out.items() if c != 0}


def surd_sum_equal(a: dict, b: dict) -> bool:
    """Exact equality of surd sums (sqrt(s) over distinct squarefree s are
    linearly independent over Q, so componentwise equality is equivalence)."""
    return a == b
