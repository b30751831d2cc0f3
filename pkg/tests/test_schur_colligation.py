import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npext.errors import IllConditionedFeedbackError, InvalidInputError, NotSchurError, RealizationError
from npext.schur import (Colligation, MatrixPolynomial, full_transfer, haar_unitary, opnorm,
                         pad_pair, realize, realize_divided, transfer_eval, transfer_function)
from npext.schur.operators import operator_moebius

from oracles import random_disc, spectral_norm, transfer_direct


def random_schur_poly(rng, d, deg, sup=0.9, vanish=False):
    c = rng.normal(size=(deg + 1, d, d)) + 1j * rng.normal(size=(deg + 1, d, d))
    if vanish:
        c[0] = 0
    g = MatrixPolynomial(c)
    return MatrixPolynomial(c * sup / g.boundary_sup(4096))


def random_colligation(rng, dX, dK):
    return Colligation.from_matrix(haar_unitary(dX + dK, rng), dX)


class TestColligationType:
    def test_rejects_non_unitary(self):
        with pytest.raises(RealizationError):
            Colligation.from_matrix(np.diag([1, 0.9]), 1)

    def test_rejects_bad_shapes(self):
        with pytest.raises(InvalidInputError):
            Colligation(np.eye(2), np.zeros((2, 1)), np.zeros((2, 2)), np.zeros((1, 1)))

    def test_json_round_trip(self, rng):
        col = Colligation.from_matrix(haar_unitary(5, rng), 3, ancilla=1)
        back = Colligation.from_dict(json.loads(json.dumps(col.to_dict())))
        assert np.array_equal(back.matrix, col.matrix) and back.ancilla == 1 and back.dH == 2

    def test_bad_json(self):
        with pytest.raises(InvalidInputError):
            Colligation.from_dict({"dims": {"external": 1}})


class TestTransfer:
    def test_no_feedback_loop(self, rng):
        A = haar_unitary(3, rng)
        col = Colligation(A, np.zeros((3, 0)), np.zeros((0, 3)), np.zeros((0, 0)))
        assert np.allclose(transfer_eval(col, 0.5), 0.5 * A)

    def test_vanishes_at_zero(self, rng):
        col = random_colligation(rng, 2, 3)
        assert np.array_equal(transfer_eval(col, 0), np.zeros((2, 2)))

    def test_schwarz_bound_example(self, rng):
        col = random_colligation(rng, 2, 2)
        assert spectral_norm(transfer_eval(col, 0.9)) <= 0.9 + 1e-12

    @given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 2 ** 31))
    def test_schwarz_bound_property(self, dX, dK, seed):
        rng = np.random.default_rng(seed)
        col = random_colligation(rng, dX, dK)
        lam = random_disc(rng, 50, 0.999)
        norms = opnorm(transfer_eval(col, lam))
        assert np.all(norms <= np.abs(lam) + 1e-10)

    def test_matches_explicit_inverse(self, rng):
        col = random_colligation(rng, 3, 4)
        lam = random_disc(rng, 40, 0.99)
        got = lam[:, None, None] * full_transfer(col, lam)
        assert np.allclose(got, transfer_direct(col.matrix, 3, lam), atol=1e-12)

    def test_feedback_guard(self):
        U = np.eye(2, dtype=complex)
        col = Colligation.from_matrix(U, 1)
        with pytest.raises(IllConditionedFeedbackError):
            transfer_eval(col, 1 - 1e-14)


class TestRealize:
    def test_constant_contraction(self, rng):
        G = random_schur_poly(rng, 2, 0, sup=0.7)
        col = realize(G)
        assert np.allclose(col.A[:2, :2], G.coeffs[0], atol=1e-12)
        lam = random_disc(rng, 50)
        assert np.max(np.abs(transfer_function(col, lam) - G.coeffs[0])) <= 1e-12

    def test_identity_polynomial(self, rng):
        col = realize(MatrixPolynomial.scalar([0, 1]))
        lam = random_disc(rng, 100)
        assert np.max(np.abs(transfer_function(col, lam)[:, 0, 0] - lam)) <= 1e-10

    def test_random_matrix_polynomial_fresh_samples(self, rng):
        tol = 1e-10
        g = random_schur_poly(rng, 2, 3)
        col = realize(g, tol=tol)
        lam = random_disc(rng, 1000)
        assert np.max(opnorm(transfer_function(col, lam) - g(lam))) <= 10 * tol
        assert col.unitarity_residual() <= 1e-10
        assert col.dK <= 64 * col.dH

    @settings(max_examples=25)
    @given(st.integers(1, 3), st.integers(0, 3), st.floats(0.05, 0.999), st.integers(0, 2 ** 31))
    def test_round_trip_property(self, d, deg, sup, seed):
        rng = np.random.default_rng(seed)
        g = random_schur_poly(rng, d, deg, sup)
        col = realize(g)
        lam = random_disc(rng, 200)
        assert np.max(opnorm(transfer_function(col, lam) - g(lam))) <= 1e-9

    def test_inner_boundary_function(self, rng):
        # unimodular on the circle: sup exactly 1
        col = realize(MatrixPolynomial.scalar([0, 0, 1]))
        lam = random_disc(rng, 100)
        assert np.max(np.abs(transfer_function(col, lam)[:, 0, 0] - lam ** 2)) <= 1e-10

    def test_rejects_non_schur(self):
        with pytest.raises(NotSchurError):
            realize(MatrixPolynomial.scalar([0.5, 0.6]))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            realize(MatrixPolynomial(np.zeros((1, 2, 3))))


class TestRealizeDivided:
    def test_vanishing_case_is_coefficient_shift(self, rng):
        f = random_schur_poly(rng, 2, 3, vanish=True)
        col = realize_divided(f)
        lam = random_disc(rng, 300, 0.99)
        assert np.max(opnorm(transfer_eval(col, lam)[..., :2, :2] - f(lam))) <= 1e-10

    def test_nonvanishing_absorbs_moebius(self, rng):
        f = random_schur_poly(rng, 2, 2, sup=0.8)
        W = f.coeffs[0]
        col = realize_divided(f)
        lam = random_disc(rng, 300, 0.99)
        target = operator_moebius(W, f(lam))
        assert np.max(opnorm(transfer_eval(col, lam)[..., :2, :2] - target)) <= 1e-9

    def test_rejects_boundary_base_value(self):
        with pytest.raises(NotSchurError):
            realize_divided(MatrixPolynomial.scalar([1.0]))


class TestPadPair:
    def test_trivial_state_spaces(self, rng):
        c1, c2 = random_colligation(rng, 2, 0), random_colligation(rng, 2, 0)
        p1, p2 = pad_pair(c1, c2)
        assert np.array_equal(p1.matrix, c1.matrix) and np.array_equal(p2.matrix, c2.matrix)

    def test_dimension_bookkeeping(self, rng):
        p1, p2 = pad_pair(random_colligation(rng, 1, 2), random_colligation(rng, 1, 3))
        assert p1.matrix.shape == (6, 6) and p2.matrix.shape == (6, 6)
        assert p1.unitarity_residual() <= 1e-12 and p2.unitarity_residual() <= 1e-12

    def test_transfer_functions_preserved(self, rng):
        g1, g2 = random_schur_poly(rng, 2, 2), random_schur_poly(rng, 2, 3)
        c1, c2 = realize(g1), realize(g2)
        p1, p2 = pad_pair(c1, c2)
        lam = random_disc(rng, 100, 0.99)
        assert np.max(np.abs(transfer_function(p1, lam) - transfer_function(c1, lam))) <= 1e-12
        assert np.max(np.abs(transfer_function(p2, lam) - transfer_function(c2, lam))) <= 1e-12

    def test_shared_ancilla(self, rng):
        c1 = realize_divided(random_schur_poly(rng, 2, 2, vanish=True))
        c2 = realize_divided(random_schur_poly(rng, 2, 3, vanish=True))
        p1, p2 = pad_pair(c1, c2, shared_ancilla=2)
        assert p1.dE == c1.dE + c2.dE - 2 and p1.dK == c1.dK + c2.dK
        lam = random_disc(rng, 50, 0.99)
        assert np.max(np.abs(transfer_function(p2, lam) - transfer_function(c2, lam))) <= 1e-12
        with pytest.raises(InvalidInputError):
            pad_pair(c1, c2, shared_ancilla=c1.dE + 1)

    def test_mismatched_physical_dimension(self, rng):
        with pytest.raises(InvalidInputError):
            pad_pair(random_colligation(rng, 1, 1), random_colligation(rng, 2, 1))
