"""Sparse operator assembly against dense oracles, window-leakage
accounting, singular values, and the torus phase kernel."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chernlab.scalars import QGauss
from chernlab.series import BoundedSequence, FourierSeries, lacunary_series
from chernlab.operators import (OperatorModel, SparseOperator,
                                TruncationWindow, WindowLeakageError,
                                commutator, complex_cross, compose,
                                multiplication_operator, product_diagonal,
                                rho_exact_terms, singular_values,
                                surd_sum_equal, torus_phase_kernel_rho,
                                weak_quasinorm)

WINDOW = 64


def dense_circle(op: SparseOperator, bound: int) -> np.ndarray:
    n = 2 * bound + 1
    m = np.zeros((n, n), dtype=complex)
    f = op.to_float()
    for r, c, v in zip(f.rows, f.cols, f.vals):
        m[r + bound, c + bound] = v
    return m


def dense_phase(kind: str, bound: int) -> np.ndarray:
    model = OperatorModel(kind)
    return np.diag([complex(model.phase(k)) for k in range(-bound, bound + 1)])


def dense_mult(a: FourierSeries, bound: int) -> np.ndarray:
    n = 2 * bound + 1
    m = np.zeros((n, n), dtype=complex)
    for f, v in a.coeffs.items():
        c = v.to_complex() if a.exact else complex(v)
        for k in range(-bound, bound + 1):
            if -bound <= k + f <= bound:
                m[k + f + bound, k + bound] = c
    return m


class TestCommutatorOracle:
    @pytest.mark.parametrize("kind", ["szego_P", "circle_F"])
    def test_matches_dense(self, kind):
        rng = np.random.default_rng(3)
        a = FourierSeries("circle",
                          {int(k): complex(*rng.standard_normal(2))
                           for k in rng.integers(-5, 6, size=4)}, False)
        c = commutator(OperatorModel(kind), a, WINDOW)
        ph = dense_phase(kind, WINDOW)
        ma = dense_mult(a, WINDOW)
        expected = ph @ ma - ma @ ph
        got = dense_circle(c, WINDOW)
        # interior columns only: the dense oracle truncates the shifts
        bw = a.max_frequency()
        sl = slice(bw, 2 * WINDOW + 1 - bw)
        assert np.allclose(got[:, sl], expected[:, sl], atol=1e-14)

    def test_exact_values_for_exact_inputs(self):
        z = FourierSeries.monomial(1)
        c = commutator(OperatorModel("circle_F"), z, 8)
        assert c.exact
        assert c.entry(0, -1) == QGauss.of(2)

    def test_rejects_small_window(self):
        ones = BoundedSequence.constant(1.0)
        a = lacunary_series(ones, 0.5, 8)
        with pytest.raises(WindowLeakageError):
            commutator(OperatorModel("szego_P"), a, 100)


class TestComposeOracle:
    def test_product_matches_dense(self):
        rng = np.random.default_rng(5)
        mk = lambda: FourierSeries(
            "circle", {int(k): complex(*rng.standard_normal(2))
                       for k in rng.integers(-3, 4, size=3)}, False)
        model = OperatorModel("circle_F")
        ops = [SparseOperator.diagonal_phase(model, WINDOW)] + \
              [commutator(model, mk(), WINDOW) for _ in range(3)]
        got = dense_circle(compose(ops), WINDOW)
        expected = dense_circle(ops[0], WINDOW)
        for o in ops[1:]:
            expected = expected @ dense_circle(o, WINDOW)
        radius = compose(ops).exact_col_radius
        lo, hi = WINDOW - radius, WINDOW + radius + 1
        assert np.allclose(got[:, lo:hi], expected[:, lo:hi], atol=1e-12)

    def test_generator_commutator_product_is_rank_one(self):
        z = FourierSeries.monomial(1)
        zi = FourierSeries.monomial(-1)
        model = OperatorModel("circle_F")
        prod = compose([commutator(model, z, 4), commutator(model, zi, 4)])
        entries = {(r, c): v for r, c, v in prod.items() if not
                   (isinstance(v, QGauss) and v.is_zero())}
        assert entries == {(0, 0): QGauss.of(-4)}

    def test_product_diagonal_matches_dense(self):
        rng = np.random.default_rng(11)
        mk = lambda: FourierSeries(
            "circle", {int(k): complex(*rng.standard_normal(2))
                       for k in rng.integers(-3, 4, size=3)}, False)
        model = OperatorModel("circle_F")
        ops = [SparseOperator.diagonal_phase(model, WINDOW)] + \
              [commutator(model, mk(), WINDOW) for _ in range(2)]
        idx = list(range(-10, 11))
        got = product_diagonal(ops, idx)
        expected = dense_circle(ops[0], WINDOW)
        for o in ops[1:]:
            expected = expected @ dense_circle(o, WINDOW)
        want = np.array([expected[k + WINDOW, k + WINDOW] for k in idx])
        assert np.allclose(got, want, atol=1e-12)

    def test_diagonal_read_past_radius_raises(self):
        z = FourierSeries.monomial(1)
        c = commutator(OperatorModel("circle_F"), z, 8)
        with pytest.raises(WindowLeakageError):
            product_diagonal([c, c], list(range(-8, 9)))


class TestWindows:
    def test_symmetric_order(self):
        w = TruncationWindow.circle_symmetric(2)
        assert list(w.points()) == [0, -1, 1, -2, 2]

    def test_one_sided_order(self):
        w = TruncationWindow.circle_one_sided(3)
        assert list(w.points()) == [0, 1, 2, 3]

    def test_torus_shells_sorted_by_norm(self):
        w = TruncationWindow.torus_shells(10)
        pts = w.points()
        norms = [k[0] ** 2 + k[1] ** 2 for k in pts]
        assert norms == sorted(norms)
        assert pts[0] == (0, 0)


class TestSingularValues:
    def test_matches_dense_svd(self):
        ones = BoundedSequence.constant(1.0)
        a = lacunary_series(ones, 0.5, 7)
        c = commutator(OperatorModel("szego_P"), a, 200)
        mu = singular_values(c, 150).mu
        dense = np.linalg.svd(dense_circle(c, 200), compute_uv=False)
        assert np.allclose(mu, dense[:150], atol=1e-10)

    def test_finite_rank_padding(self):
        trig = FourierSeries("circle", {1: 1.0, -1: 1.0}, False)
        c = commutator(OperatorModel("szego_P"), trig, 32)
        sv = singular_values(c, 20)
        assert len(sv.mu) == 20
        assert np.all(sv.mu[2:] == 0.0)
        _, tail = weak_quasinorm(sv, 2.0)
        assert tail == 0.0

    def test_quasinorm_flat_for_inverse_sqrt(self):
        from chernlab.operators import SingularValueSequence
        mu = (np.arange(1, 513)) ** -0.5
        sv = SingularValueSequence(mu, "synthetic")
        sup, tail = weak_quasinorm(sv, 2.0)
        assert sup == pytest.approx(1.0, abs=1e-12)
        assert tail == pytest.approx(sup, abs=1e-12)


def torus_index():
    return st.tuples(st.integers(-12, 12), st.integers(-12, 12))


class TestTorusKernel:
    def test_guards_raise_on_degenerate_triples(self):
        with pytest.raises(ZeroDivisionError):
            torus_phase_kernel_rho((0, 0), (1, 0), (0, 1))
        with pytest.raises(ZeroDivisionError):
            torus_phase_kernel_rho((1, 0), (-1, 0), (0, 1))
        with pytest.raises(ZeroDivisionError):
            torus_phase_kernel_rho((1, 0), (1, 1), (-1, 0))

    @given(torus_index(), torus_index(), torus_index())
    @settings(max_examples=60, deadline=None)
    def test_exact_terms_match_float_kernel(self, k, m, n):
        try:
            exact = rho_exact_terms(k, m, n)
        except ZeroDivisionError:
            return
        total = sum(float(c) * math.sqrt(s) for s, c in exact.items())
        assert total == pytest.approx(torus_phase_kernel_rho(k, m, n), abs=1e-9)

    @given(torus_index(), torus_index(), torus_index(),
           st.sampled_from([2, 3, 5]))
    @settings(max_examples=60, deadline=None)
    def test_homogeneity_exact(self, k, m, n, t):
        try:
            base = rho_exact_terms(k, m, n)
        except ZeroDivisionError:
            return
        scaled = rho_exact_terms((t * k[0], t * k[1]), (t * m[0], t * m[1]),
                                 (t * n[0], t * n[1]))
        assert surd_sum_equal(base, scaled)

    @given(torus_index(), torus_index(), torus_index())
    @settings(max_examples=60, deadline=None)
    def test_antisymmetry_exact(self, k, m, n):
        try:
            base = rho_exact_terms(k, m, n)
            swapped = rho_exact_terms(k, n, m)
        except ZeroDivisionError:
            return
        assert surd_sum_equal({s: -c for s, c in base.items()}, swapped)

    def test_complex_cross(self):
        assert complex_cross(1j, 1.0) == -1.0
        assert complex_cross(1.0, 1j) == 1.0


class TestSerialization:
    def test_coo_text_header_and_determinism(self):
        z = FourierSeries.monomial(1)
        c = commutator(OperatorModel("circle_F"), z, 4)
        t1, t2 = c.to_text(), c.to_text()
        assert t1 == t2
        assert t1.splitlines()[0].startswith("#")
