import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npext.domains import DomainTag, sample_domain, variety_coords
from npext.errors import DomainError, InvalidInputError, NotSchurError
from npext.extension import (ExtensionFunction, VarietyFunction, branch_extender, build_extension,
                             diamond_linear_extension, eval_extension, verify_extension)
from npext.schur import MatrixPolynomial, haar_unitary, opnorm

from oracles import extension_direct, magic, random_disc, random_unimodular, random_variety_function

DOMAINS = [DomainTag.G2, DomainTag.DIAMOND]


def restriction_error(F, f, lam):
    err = 0.0
    for b in (1, 2):
        got = eval_extension(F, variety_coords(F.domain, b, lam))
        err = max(err, float(opnorm(got - f.values(b, lam)).max()))
    return err


class TestBranchExtender:
    def test_sigma_identity(self):
        assert branch_extender("g2", 1)((0.8, 0.16)) == pytest.approx(0.4, abs=1e-15)

    def test_axis(self):
        assert branch_extender("g2", 1j)((0, 0.5)) == pytest.approx(0.5j, abs=1e-15)

    def test_diamond(self):
        assert branch_extender("diamond", -1)((0.3, 0.2)) == pytest.approx(0.1, abs=1e-15)

    @pytest.mark.parametrize("domain", DOMAINS)
    def test_interpolates_both_branches_and_is_schur(self, rng, domain):
        lam = random_disc(rng, 200)
        for tau in random_unimodular(rng, 5):
            g = branch_extender(domain, tau)
            assert np.allclose(g(variety_coords(domain, 1, lam)), lam, atol=1e-14)
            assert np.allclose(g(variety_coords(domain, 2, lam)), tau * lam, atol=1e-14)
            assert np.max(np.abs(g(sample_domain(domain, 20_000, 1).coords))) < 1

    def test_rejects_non_unimodular(self):
        with pytest.raises(DomainError):
            branch_extender("g2", 0.9)


class TestVarietyFunction:
    def test_base_point_consistency(self):
        with pytest.raises(InvalidInputError, match="base point"):
            VarietyFunction.scalar([0.1, 0.5], [0.2, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            VarietyFunction(MatrixPolynomial.scalar([0, 1]), MatrixPolynomial(np.zeros((2, 2, 2))))

    def test_not_schur(self):
        with pytest.raises(NotSchurError):
            VarietyFunction.scalar([0, 1.1], [0, 1])

    def test_json_round_trip(self, rng):
        f = random_variety_function(rng, 2, 2, "diamond")
        back = VarietyFunction.from_dict(json.loads(json.dumps(f.to_dict())))
        assert back.domain is DomainTag.DIAMOND
        assert np.array_equal(back.branch2.coeffs, f.branch2.coeffs)


class TestBuild:
    def test_scalar_royal_pair(self, rng):
        alpha, beta = np.exp(0.4j), np.exp(2.1j)
        F = build_extension(VarietyFunction.scalar([0, alpha], [0, beta]))
        assert F.size == 1 and F.dK == 0
        assert F.taus[0] == pytest.approx(beta / alpha, abs=1e-14)
        c = sample_domain("g2", 10_000, 2).coords
        want = alpha * magic(beta / alpha, c[:, 0], c[:, 1])
        assert np.max(np.abs(F(c)[:, 0, 0] - want)) <= 1e-9

    def test_identity_pair(self):
        F = build_extension(VarietyFunction.scalar([0, 1], [0, 1]))
        assert F((0.6, 0.09))[0, 0, 0] == pytest.approx(0.3, abs=1e-15)

    @pytest.mark.parametrize("domain", DOMAINS)
    def test_base_point_maps_to_zero(self, rng, domain):
        F = build_extension(random_variety_function(rng, 2, 2, domain))
        assert np.max(np.abs(F((0, 0)))) <= 1e-14

    @pytest.mark.parametrize("domain", DOMAINS)
    @pytest.mark.parametrize("vanish", [True, False])
    def test_random_restriction_and_contraction(self, rng, domain, vanish):
        f = random_variety_function(rng, 2, 3, domain, vanish=vanish)
        F = build_extension(f)
        assert restriction_error(F, f, random_disc(rng, 200)) <= 1e-8
        norms = opnorm(F(sample_domain(domain, 20_000, 3).coords))
        assert norms.max() <= 1 + 1e-8

    def test_matches_explicit_inverse_oracle(self, rng):
        f = random_variety_function(rng, 2, 2, "g2", vanish=False)
        F = build_extension(f)
        c = sample_domain("g2", 50, 4).coords
        assert np.max(np.abs(F(c) - extension_direct(F, c))) <= 1e-10

    def test_zero_function(self, rng):
        zero = MatrixPolynomial(np.zeros((2, 2, 2)))
        f = VarietyFunction(zero, zero)
        F = build_extension(f)
        assert np.max(np.abs(F(sample_domain("g2", 1000, 5).coords))) == 0
        assert verify_extension(F, f, 1000).supnorm_estimate == 0

    @pytest.mark.parametrize("domain", DOMAINS)
    def test_unitary_covariance(self, rng, domain):
        f = random_variety_function(rng, 2, 2, domain, vanish=False)
        V, Vp = haar_unitary(2, rng), haar_unitary(2, rng)
        F, G = build_extension(f), build_extension(f.conjugated(V, Vp))
        c = sample_domain(domain, 500, 6).coords
        assert np.max(np.abs(G(c) - V @ F(c) @ Vp)) <= 1e-8

    def test_covariance_with_one_inner_branch(self, rng):
        U = haar_unitary(2, rng)
        inner = MatrixPolynomial(np.stack([np.zeros((2, 2)), U]))
        other = random_variety_function(rng, 2, 2).branch2
        f = VarietyFunction(inner, other)
        V, Vp = haar_unitary(2, rng), haar_unitary(2, rng)
        F, G = build_extension(f), build_extension(f.conjugated(V, Vp))
        c = sample_domain("g2", 500, 10).coords
        assert np.max(np.abs(G(c) - V @ F(c) @ Vp)) <= 1e-8
        assert restriction_error(F, f, random_disc(rng, 200)) <= 1e-8

    def test_inner_pair_needs_no_ancilla(self):
        F = build_extension(VarietyFunction.scalar([0, 1j], [0, -1j]))
        assert (F.dE, F.dK) == (0, 0)

    def test_rejects_boundary_base_value(self):
        f = VarietyFunction.scalar([1.0], [1.0])
        with pytest.raises(DomainError):
            build_extension(f)

    def test_boundary_points_rejected(self):
        F = build_extension(VarietyFunction.scalar([0, 1], [0, 1]))
        with pytest.raises(DomainError):
            F((2.0, 1.0))

    def test_json_round_trip(self, rng):
        F = build_extension(random_variety_function(rng, 2, 2, "diamond", vanish=False))
        G = ExtensionFunction.from_dict(json.loads(F.to_json()))
        c = sample_domain("diamond", 100, 7).coords
        assert np.array_equal(F(c), G(c))

    @settings(max_examples=15)
    @given(st.integers(1, 3), st.integers(1, 3), st.sampled_from(["g2", "diamond"]),
           st.booleans(), st.integers(0, 2 ** 31))
    def test_restriction_property(self, d, deg, domain, vanish, seed):
        rng = np.random.default_rng(seed)
        f = random_variety_function(rng, d, deg, domain, vanish=vanish)
        F = build_extension(f)
        assert restriction_error(F, f, random_disc(rng, 100)) <= 1e-8
        assert opnorm(F.phi(sample_domain(domain, 100, seed % 1000).coords)).max() <= 1 + 1e-10


class TestVerify:
    def test_report(self, rng):
        f = VarietyFunction.scalar([0, 1j], [0, -1])
        rep = verify_extension(build_extension(f), f, 5000, seed=3)
        assert rep.restriction_max_error <= 1e-9
        assert rep.supnorm_estimate <= 1 + 1e-8
        assert rep.supnorm_estimate >= rep.variety_supnorm - 1e-8
        assert rep.passed() and len(rep.witnesses) == 10
        assert rep.witnesses[0]["norm"] == rep.supnorm_estimate

    def test_reproducible_from_seed(self, rng):
        f = random_variety_function(rng, 2, 2)
        F = build_extension(f)
        assert verify_extension(F, f, 2000, 9).to_dict() == verify_extension(F, f, 2000, 9).to_dict()


class TestDiamondLinear:
    def test_identity(self):
        F = diamond_linear_extension(VarietyFunction.scalar([0, 1], [0, 1], "diamond"))
        assert F((0.3, 0.4))[0, 0, 0] == pytest.approx(0.7)

    def test_linearity(self, rng):
        f = random_variety_function(rng, 2, 2, "diamond")
        g = random_variety_function(rng, 2, 2, "diamond")
        a, b = 0.3 - 0.1j, 0.2j
        c = sample_domain("diamond", 500, 8).coords
        Ff, Fg = diamond_linear_extension(f)(c), diamond_linear_extension(g)(c)
        comb = MatrixPolynomial(a * f.branch1.coeffs + b * g.branch1.coeffs), \
            MatrixPolynomial(a * f.branch2.coeffs + b * g.branch2.coeffs)
        h = VarietyFunction(*comb, "diamond")
        assert np.max(np.abs(diamond_linear_extension(h)(c) - (a * Ff + b * Fg))) <= 1e-12

    def test_schur_on_diamond(self):
        F = diamond_linear_extension(VarietyFunction.scalar([0, 1], [0, 1], "diamond"))
        assert np.max(np.abs(F(sample_domain("diamond", 100_000, 9).coords))) < 1

    def test_rejects(self):
        with pytest.raises(InvalidInputError):
            diamond_linear_extension(VarietyFunction.scalar([0.1, 0.5], [0.1, 0.5], "diamond"))
        with pytest.raises(InvalidInputError):
            diamond_linear_extension(VarietyFunction.scalar([0, 1], [0, 1], "g2"))
