"""The nine acceptance criteria, each at its stated tolerance and runtime bound.

Every test prints one ``PASS criterion N`` or ``FAIL criterion N`` line.
"""
import time

import numpy as np
import pytest

from npext.bergman import apply_extension, build_bergman_operator, make_problem
from npext.counterexample import (Case, Side, case2_witness, case_one_report, find_inequality_violation,
                                  inequality_sides, mobius_slice_probe, omega_fourier, royal_extension,
                                  slice_taylor, unimodular_gap, unimodular_grid_max, unique_extension)
from npext.domains import in_g2, sample_domain
from npext.extension import VarietyFunction, build_extension, diamond_linear_extension, verify_extension
from npext.schur import MatrixPolynomial, haar_unitary, realize, unitarity_residual, unitary_eig

from oracles import kkt_minimal_norm, magic, moebius, random_disc, random_unimodular, random_variety_function


@pytest.fixture
def verdict(capsys):
    def emit(n, checks, detail=""):
        ok = all(bool(v) for v in checks.values())
        failed = [k for k, v in checks.items() if not v]
        with capsys.disabled():
            line = f"{'PASS' if ok else 'FAIL'} criterion {n}"
            print(f"\n{line}: {detail}" + (f" [failed: {', '.join(failed)}]" if failed else ""))
        assert ok, f"criterion {n} failed: {failed} ({detail})"
    return emit


def test_criterion_1_scalar_royal_extension(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    pts = sample_domain("g2", 100_000, 1).coords
    worst_restr, worst_sup = 0.0, 0.0
    for _ in range(100):
        alpha, beta = random_unimodular(rng, 2)
        l0 = random_disc(rng, 1, 0.99)[0]
        F = unique_extension(alpha, beta, l0)
        lam = random_disc(rng, 10_000)
        worst_restr = max(worst_restr, F.restriction_error(lam))
        assert np.allclose(F.branch2(lam), moebius(beta * l0, beta * lam), atol=1e-14)
        worst_sup = max(worst_sup, float(np.max(np.abs(F(pts[:, 0], pts[:, 1])))))
    dt = time.perf_counter() - t0
    verdict(1, {"restriction": worst_restr <= 1e-12, "supnorm": worst_sup <= 1, "runtime": dt < 10},
            f"max restriction error {worst_restr:.2e}, sup-norm {worst_sup:.6f}, {dt:.1f}s")


def test_criterion_2_matrix_pipeline(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst_restr, worst_sup = 0.0, 0.0
    for k in range(50):
        d, deg = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        domain = ("g2", "diamond")[k % 2]
        f = random_variety_function(rng, d, deg, domain, vanish=True, scale=0.9)
        rep = verify_extension(build_extension(f), f, n=100_000, seed=k)
        worst_restr = max(worst_restr, rep.restriction_max_error)
        worst_sup = max(worst_sup, rep.supnorm_estimate)
    dt = time.perf_counter() - t0
    verdict(2, {"restriction": worst_restr <= 1e-8, "supnorm": worst_sup <= 1 + 1e-8, "runtime": dt < 120},
            f"max restriction error {worst_restr:.2e}, max sup-norm {worst_sup:.6f}, {dt:.1f}s")


def test_criterion_3_colligation_contracts(verdict):
    rng = np.random.default_rng(303)
    worst_col = 0.0
    for _ in range(50):
        d, deg = int(rng.integers(1, 5)), int(rng.integers(0, 4))
        c = rng.normal(size=(deg + 1, d, d)) + 1j * rng.normal(size=(deg + 1, d, d))
        g = MatrixPolynomial(c)
        g = MatrixPolynomial(c * rng.uniform(0.1, 1.0) / g.boundary_sup(4096))
        worst_col = max(worst_col, realize(g).unitarity_residual())
    worst_w, worst_res, worst_mod = 0.0, 0.0, 0.0
    for k in range(100):
        n = 1 + k % 16
        U = haar_unitary(n, rng)
        e = unitary_eig(U)
        worst_w = max(worst_w, unitarity_residual(e.W))
        worst_res = max(worst_res, e.residual(U))
        worst_mod = max(worst_mod, float(np.max(np.abs(np.abs(e.taus) - 1))))
    verdict(3, {"colligation": worst_col <= 1e-10, "W unitary": worst_w <= 1e-10,
                "eigen residual": worst_res <= 1e-9, "unimodular": worst_mod <= 1e-10},
            f"colligation {worst_col:.1e}, W {worst_w:.1e}, residual {worst_res:.1e}, |tau| {worst_mod:.1e}")


def test_criterion_4_scalar_reduction(verdict):
    rng = np.random.default_rng(404)
    pts = sample_domain("g2", 10_000, 4).coords
    worst = 0.0
    for _ in range(20):
        alpha, beta = random_unimodular(rng, 2)
        F = build_extension(VarietyFunction.scalar([0, alpha], [0, beta]))
        want = alpha * magic(beta / alpha, pts[:, 0], pts[:, 1])
        worst = max(worst, float(np.max(np.abs(F(pts)[:, 0, 0] - want))))
    verdict(4, {"agreement": worst <= 1e-9}, f"max deviation from alpha Phi {worst:.2e} over 20 pairs")


def test_criterion_5_diamond_linear_map(verdict):
    rng = np.random.default_rng(505)
    pts = sample_domain("diamond", 100_000, 5).coords
    worst_lin, worst_sup = 0.0, 0.0
    for _ in range(100):
        deg = int(rng.integers(1, 5))
        f = random_variety_function(rng, 1, deg, "diamond")
        g = random_variety_function(rng, 1, deg, "diamond")
        a, b = random_disc(rng, 2, 2.0)
        h = VarietyFunction(MatrixPolynomial(a * f.branch1.coeffs + b * g.branch1.coeffs),
                            MatrixPolynomial(a * f.branch2.coeffs + b * g.branch2.coeffs), "diamond",
                            ) if abs(a) + abs(b) <= 1 else None
        Ff, Fg = diamond_linear_extension(f)(pts), diamond_linear_extension(g)(pts)
        worst_sup = max(worst_sup, float(np.max(np.abs(Ff))))
        if h is None:
            # linearity does not need a Schur combination: evaluate the branches directly
            comb = a * f.branch1.coeffs + b * g.branch1.coeffs, a * f.branch2.coeffs + b * g.branch2.coeffs
            direct = (MatrixPolynomial(comb[0])(pts[:, 0]) + MatrixPolynomial(comb[1])(pts[:, 1]))
        else:
            direct = diamond_linear_extension(h)(pts)
        worst_lin = max(worst_lin, float(np.max(np.abs(direct - (a * Ff + b * Fg)))))
    verdict(5, {"linearity": worst_lin <= 1e-12, "supnorm": worst_sup <= 1},
            f"linearity residual {worst_lin:.2e}, sup-norm {worst_sup:.6f}")


def test_criterion_6_bergman_minimality(verdict):
    rng = np.random.default_rng(606)
    worst_obj, worst_lin, max_basis = 0.0, 0.0, 0
    for k in range(20):
        domain = ("g2", "diamond")[k % 2]
        degree = 1 + k % 8
        prob = make_problem(domain, degree, 3000, 2 * degree + 3, seed=k)
        op = build_bergman_operator(prob)
        m = prob.n_basis
        max_basis = max(max_basis, m)
        F = op.restriction @ (rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2)))
        X = apply_extension(op, F)
        for j in range(2):
            _, obj = kkt_minimal_norm(op.weighted_basis, op.restriction, F[:, j])
            worst_obj = max(worst_obj, abs(op.objective(X[:, j]) - obj) / max(1.0, obj))
        a, b = random_disc(rng, 2, 3.0)
        worst_lin = max(worst_lin, float(np.max(np.abs(apply_extension(op, a * F[:, 0] + b * F[:, 1])
                                                         - (a * X[:, 0] + b * X[:, 1])))))
    verdict(6, {"objective": worst_obj <= 1e-8, "linearity": worst_lin <= 1e-10, "size": max_basis <= 50},
            f"objective gap {worst_obj:.2e}, linearity {worst_lin:.2e}, up to {max_basis} monomials")


def test_criterion_7_case_one(verdict):
    rng = np.random.default_rng(707)
    worst = 0.0
    for l0 in [0.5, -0.3 + 0.4j, 0.8j, 0.05]:
        lam = random_disc(rng, 1000)
        c = omega_fourier(Case.CASE_I, l0, Side.LHS, lam=lam).coefficients
        worst = max(worst, float(np.max(np.abs(c[0, 0] - l0))), float(np.max(np.abs(c[0, 1] - moebius(l0, lam)))),
                    float(np.max(np.abs(c[1, 0] - (abs(l0) ** 2 - 1) * lam))), float(np.max(np.abs(c[1, 1]))))
        pts = sample_domain("g2", 2000, 7).coords
        pts = pts[np.abs(pts[:, 0]) >= 0.05]
        r = omega_fourier(Case.CASE_I, l0, Side.RHS, points=pts).coefficients
        worst = max(worst, float(np.max(np.abs(r[1] + 2 * pts[:, 1] / pts[:, 0] * (1 - abs(l0) ** 2)))))
    rep = case_one_report(0.5)
    m_half = moebius(0.5, -0.5)
    verdict(7, {"coefficients": worst <= 1e-6, "margin": rep.contradiction_margin > 0.1,
                "m(-1/2)": abs(m_half - 0.8) <= 1e-15},
            f"coefficient error {worst:.2e}, margin {rep.contradiction_margin:.4f} at lambda "
            f"{rep.witness_lambda:.3f}")


def test_criterion_8_case_two(verdict):
    t0 = time.perf_counter()
    ts = np.arange(1, 100) / 100
    closed = max(abs(unimodular_gap(t)[2] - (2 * (1 + 4 * t * t + t ** 4) / (1 + t * t) - 2 * (1 + t * t)))
                 for t in ts)
    positive = all(unimodular_gap(t)[2] > 0 for t in ts)
    grid = max(abs(unimodular_grid_max(t)[0] - unimodular_gap(t)[0]) for t in ts)
    rng = np.random.default_rng(808)
    missing = []
    for t in ts[ts >= 0.05]:
        l0 = t * np.exp(2j * np.pi * rng.random())
        w = find_inequality_violation(l0)
        if w is None:
            missing.append(t)
            continue
        lhs, rhs = inequality_sides(l0, w.lam, w.mu)
        if not (lhs > rhs and abs(w.lam) <= 1 and abs(w.mu) <= 1):
            missing.append(t)
    cand = case2_witness(0.5, 1000)
    dt = time.perf_counter() - t0
    verdict(8, {"closed form": closed <= 1e-12, "positive": positive, "grid": grid <= 1e-6,
                "witnesses": not missing, "candidate": abs(cand.value) > 1 and bool(in_g2(cand.s, cand.p)),
                "runtime": dt < 30},
            f"closed-form error {closed:.1e}, grid error {grid:.1e}, candidate modulus {abs(cand.value):.4f} "
            f"at (s, p) = ({cand.s:.3f}, {cand.p:.3f}), {dt:.1f}s")


def test_criterion_9_slice_probes(verdict):
    rng = np.random.default_rng(909)
    worst_dev, worst_c = 0.0, 0.0
    for _ in range(100):
        alpha, beta, omega = random_unimodular(rng, 3)
        F = royal_extension(alpha, beta)
        worst_dev = max(worst_dev, mobius_slice_probe(F, omega).deviation)
        ser = slice_taylor(F, omega)
        worst_c = max(worst_c, abs(ser[1] - alpha * (1 + omega) / 2), abs(ser[2] + beta * ((1 - omega) / 2) ** 2))
    verdict(9, {"probe": worst_dev <= 1e-8, "taylor": worst_c <= 1e-8},
            f"max slice deviation {worst_dev:.2e}, coefficient error {worst_c:.2e}")
