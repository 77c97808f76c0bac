"""Automorphism certificates, classifications, flows, invariant faces."""

from fractions import Fraction as F

import numpy as np
import pytest

from hypercones import autgroup, gallery
from hypercones.autgroup import LinearMap
from hypercones.cones import HyperCone
from hypercones.poly import HomoPoly
from hypercones.report import Verdict


def weighted_product_cone():
    return HyperCone(
        HomoPoly(3, 4, {(2, 1, 1): 1}), (1, 1, 1),
        label="weighted", minimality_assumed=True,
    )


class TestLinearMap:
    def test_det_and_inverse(self):
        m = LinearMap([[2, 1, 0], [0, 1, 0], [0, 0, 3]])
        assert m.det == 6
        prod = m @ m.inverse()
        assert prod.rows == LinearMap.identity(3).rows

    def test_scaled_permutation_parts_roundtrip(self):
        m = LinearMap.scaled_permutation([F(1, 2), 3, 5], [2, 0, 1])
        parts = autgroup.scaled_permutation_parts(m)
        assert parts == ((F(1, 2), F(3), F(5)), (2, 0, 1))

    def test_parts_reject_general_maps(self):
        assert autgroup.scaled_permutation_parts(LinearMap([[1, 1], [0, 1]])) is None
        assert autgroup.scaled_permutation_parts(LinearMap([[-1, 0], [0, 1]])) is None

    def test_json_rows_roundtrip(self):
        m = LinearMap([[F(1, 3), 0], [2, F(-5, 7)]])
        again = LinearMap.from_json_rows(m.to_json_rows())
        assert again.rows == m.rows


class TestStabilizer:
    def test_scaling_fixes_everything(self):
        res = autgroup.stabilizer_check(LinearMap.diagonal([5, 5, 5]), (1, 2, 3))
        assert res.fixed and res.alpha == 5

    def test_permutation_fixes_ones(self):
        res = autgroup.stabilizer_check(LinearMap.permutation([1, 2, 0]), (1, 1, 1))
        assert res.fixed and res.alpha == 1

    def test_unequal_diagonal_does_not(self):
        assert not autgroup.stabilizer_check(
            LinearMap.diagonal([1, 2, 1]), (1, 1, 1)
        ).fixed

    def test_float_tier(self):
        q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))
        lq = autgroup.lm_linear_map(q, 3)
        e = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])  # svec of the identity
        assert autgroup.stabilizer_check(lq, e).fixed


class TestCheckAutomorphism:
    def test_orthant_scaled_permutation(self):
        rep = autgroup.check_automorphism(
            gallery.orthant(3), LinearMap.scaled_permutation([1, 2, 3], [1, 2, 0])
        )
        assert rep.holds and rep.kappa == F(1, 6) and rep.tier == "exact"

    def test_weighted_product_swap_refuted(self):
        rep = autgroup.check_automorphism(
            weighted_product_cone(), LinearMap.permutation([1, 0, 2])
        )
        assert rep.fails
        assert rep.details["conditional_on_minimality"]

    def test_psd_signed_permutation_conjugation(self):
        q = LinearMap([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])
        rep = autgroup.check_automorphism(
            gallery.psd(3), autgroup.lm_linear_map(q, 3)
        )
        assert rep.holds and rep.kappa == 1

    def test_direction_image_outside_refuted(self):
        rep = autgroup.check_automorphism(
            gallery.orthant(3), LinearMap.diagonal([-1, 1, 1])
        )
        assert rep.fails

    def test_noninvertible_rejected(self):
        with pytest.raises(ValueError):
            autgroup.check_automorphism(
                gallery.orthant(3), LinearMap([[1, 0, 0], [1, 0, 0], [0, 0, 1]])
            )

    def test_group_closure_products_and_inverses(self):
        cone = gallery.orthant(4)
        rng = np.random.default_rng(1)
        certified = []
        for _ in range(10):
            scalings = [F(int(rng.integers(1, 5)), int(rng.integers(1, 3)))
                        for _ in range(4)]
            perm = [int(v) for v in rng.permutation(4)]
            cand = LinearMap.scaled_permutation(scalings, perm)
            assert autgroup.check_automorphism(cone, cand).holds
            certified.append(cand)
        for _ in range(50):
            a, b = rng.integers(0, len(certified), size=2)
            prod = certified[a] @ certified[b]
            assert autgroup.check_automorphism(cone, prod).holds
            assert autgroup.check_automorphism(cone, certified[a].inverse()).holds

    def test_float_orthogonal_on_psd(self):
        rng = np.random.default_rng(2)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rep = autgroup.check_automorphism(
            gallery.psd(3), autgroup.lm_linear_map(q, 3), samples=600, seed=3
        )
        assert rep.holds and rep.tier == "float"

    def test_float_non_automorphism_refuted_with_witness(self):
        rep = autgroup.check_automorphism(
            gallery.orthant(3),
            np.array([[1.0, 0.3, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            samples=600,
            seed=4,
        )
        assert rep.fails
        assert rep.witness is not None


class TestDerivAutomorphism:
    def test_scaled_cycle_holds_both_sides(self):
        cone = gallery.orthant(5)
        cand = LinearMap.scaled_permutation([3] * 5, [1, 2, 3, 4, 0])
        rep = autgroup.check_deriv_automorphism(cone, 1, cand)
        assert rep.holds and rep.kappa == F(1, 81)
        assert not rep.details["equivalence_violation"]

    def test_unequal_diagonal_refuted_with_coefficient_witness(self):
        cone = gallery.orthant(5)
        rep = autgroup.check_deriv_automorphism(
            cone, 1, LinearMap.diagonal([1, 2, 1, 1, 1])
        )
        assert rep.fails and rep.tier == "exact"
        assert rep.details["base_verdict"] == "Holds"
        assert not rep.details["stabilizer"]["fixed"]
        assert not rep.details["equivalence_violation"]

    def test_l1_hyperbolic_rotation(self):
        # preserves the first relaxation (a quadratic cone) but not the
        # quartic cone itself; outside the equivalence regime, so only a
        # warning is recorded
        cone = gallery.l1_cone()
        cand = LinearMap(
            [[F(5, 4), 0, F(3, 4)], [0, 1, 0], [F(3, 4), 0, F(5, 4)]]
        )
        base = autgroup.check_automorphism(cone, cand)
        assert base.fails
        rep = autgroup.check_deriv_automorphism(cone, 1, cand, samples=600, seed=5)
        assert rep.holds and rep.tier == "float"
        assert rep.regime_warnings
        assert not rep.details["equivalence_violation"]

    def test_out_of_regime_order_warns(self):
        cone = gallery.orthant(4)
        rep = autgroup.check_deriv_automorphism(
            cone, 2, LinearMap.scaled_permutation([2] * 4, [3, 2, 1, 0])
        )
        assert rep.holds
        assert any("outside" in w for w in rep.regime_warnings)


class TestGarding:
    def test_proportional_tuple_has_zero_gap(self):
        cone = gallery.orthant(3)
        rep = autgroup.garding_check(cone.p, cone.e, [(1, 1, 1), (2, 2, 2), (3, 3, 3)])
        assert rep.holds
        assert abs(rep.details["gap"]) <= 1e-12
        assert rep.details["proportional"]

    def test_non_proportional_tuple_has_positive_gap(self):
        cone = gallery.orthant(3)
        rep = autgroup.garding_check(cone.p, cone.e, [(1, 1, 1), (1, 1, 1), (1, 1, 4)])
        assert rep.holds
        # normalized gap: polarized value 2 against geometric mean 4^(1/3)
        assert rep.details["gap"] == pytest.approx(2 / 4 ** (1 / 3) - 1, rel=1e-9)

    def test_boundary_argument_rejected(self):
        cone = gallery.orthant(3)
        with pytest.raises(ValueError):
            autgroup.garding_check(cone.p, cone.e, [(1, 1, 1), (1, 1, 0), (1, 1, 1)])

    def test_wrong_arity_rejected(self):
        cone = gallery.orthant(3)
        with pytest.raises(ValueError):
            autgroup.garding_check(cone.p, cone.e, [(1, 1, 1)] * 2)


class TestPerronAndMinimalFace:
    def test_transposition_eigenvector(self):
        cone = gallery.orthant(3)
        cand = LinearMap.permutation([1, 0, 2])
        rep = autgroup.perron_eigenvector(cone, cand, assume_invariant=True)
        assert rep.holds
        w = np.array(rep.witness)
        assert rep.details["eigenvalue"] == pytest.approx(1.0)
        assert w.min() > -1e-9

    def test_scaling_returns_any_direction(self):
        rep = autgroup.perron_eigenvector(
            gallery.orthant(3), LinearMap.diagonal([2, 2, 2]), assume_invariant=True
        )
        assert rep.holds

    def test_rotation_conjugation_fixes_identity_direction(self):
        q = LinearMap([[F(3, 5), F(-4, 5), 0], [F(4, 5), F(3, 5), 0], [0, 0, 1]])
        lq = autgroup.lm_linear_map(q, 3)
        rep = autgroup.perron_eigenvector(gallery.psd(3), lq, assume_invariant=True)
        assert rep.holds

    def test_invariance_precondition_enforced(self):
        with pytest.raises(ValueError):
            autgroup.perron_eigenvector(
                gallery.orthant(3), LinearMap.diagonal([-1, 1, 1])
            )

    def test_min_face_support_preserved(self):
        cone = gallery.orthant(3)
        cand = LinearMap.permutation([1, 0, 2])
        rep = autgroup.min_face_fix_check(cone, cand, (1, 1, 0))
        assert rep.holds
        assert rep.details["support"] == [0, 1]

    def test_min_face_range_preserved_on_matrix_cone(self):
        q = LinearMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        lq = autgroup.lm_linear_map(q, 3)
        u = (F(1), F(1), F(0))
        z = gallery.svec(tuple(tuple(a * b for b in u) for a in u))
        rep = autgroup.min_face_fix_check(gallery.psd(3), lq, z)
        assert rep.holds

    def test_non_eigenvector_rejected(self):
        cone = gallery.orthant(3)
        with pytest.raises(ValueError):
            autgroup.min_face_fix_check(
                cone, LinearMap.permutation([1, 0, 2]), (1, 0, 0)
            )

    def test_unsupported_gallery_rejected(self):
        with pytest.raises(ValueError):
            autgroup.min_face_fix_check(
                gallery.soc(3), LinearMap.identity(3), (1, 0, 0)
            )


class TestClassifications:
    def test_orthant_scaled_permutation_holds(self):
        cand = LinearMap.scaled_permutation([7] * 4, [1, 2, 3, 0])
        rep = autgroup.classify_orthant_deriv(4, 1, cand, seed=0)
        assert rep.holds and rep.details["prediction"] is True
        assert not rep.details["classification_violation"]

    def test_orthant_unequal_diagonal_fails_with_witness(self):
        cand = LinearMap.diagonal([1, 1, 1, 2])
        rep = autgroup.classify_orthant_deriv(4, 1, cand, seed=1)
        assert rep.fails and rep.details["prediction"] is False
        w = rep.details["membership_witness"]
        assert w is not None
        assert w["lambda_min_x"] >= 1e-6 and w["lambda_min_image"] <= -1e-6

    def test_orthant_quadratic_regime_warns(self):
        cand = LinearMap.scaled_permutation([3] * 4, [0, 1, 2, 3])
        rep = autgroup.classify_orthant_deriv(4, 2, cand, seed=2)
        assert rep.holds
        assert rep.regime_warnings

    def test_orthant_small_n_rejected(self):
        with pytest.raises(ValueError):
            autgroup.classify_orthant_deriv(3, 1, LinearMap.identity(3))

    def test_psd_signed_permutation_holds(self):
        m = LinearMap([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
        rep = autgroup.classify_psd_deriv(4, 1, m, seed=3)
        assert rep.holds and rep.kappa == 1

    def test_psd_scaled_orthogonal_holds(self):
        m = LinearMap.diagonal([3, 3, 3, 3])
        rep = autgroup.classify_psd_deriv(4, 1, m, seed=4)
        assert rep.holds and rep.details["prediction"] is True

    def test_psd_unequal_diagonal_fails_with_witness(self):
        m = LinearMap.diagonal([1, 1, 1, 2])
        rep = autgroup.classify_psd_deriv(4, 1, m, seed=5)
        assert rep.fails
        assert rep.details["membership_witness"] is not None


class TestRankOnePreservation:
    def test_certified_matrix_cone_automorphisms_preserve_rank_one(self):
        from hypercones import spectrum

        cone = gallery.psd(3)
        rng = np.random.default_rng(7)
        q = LinearMap([[0, 0, 1], [1, 0, 0], [0, -1, 0]])
        cand = autgroup.lm_linear_map(q, 3)
        assert autgroup.check_automorphism(cone, cand).holds
        for _ in range(1000):
            u = [F(int(v), 4) for v in rng.integers(-8, 9, size=3)]
            if all(v == 0 for v in u):
                u[0] = F(1)
            vec = gallery.svec(tuple(tuple(a * b for b in u) for a in u))
            assert spectrum.rank_exact(cone, cand.apply(vec)) == 1


class TestSpectralProjection:
    def test_orthogonal_projects_to_identity(self):
        m = LinearMap([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
        rep = autgroup.spectral_aut_projection(4, 1, m)
        assert rep.holds

    def test_scaled_orthogonal_projects_to_scaling(self):
        m = LinearMap.diagonal([2, 2, 2, 2])
        rep = autgroup.spectral_aut_projection(4, 1, m)
        assert rep.holds

    def test_spread_diagonal_refuted_consistently(self):
        m = LinearMap.diagonal([1, 2, 1, 1])
        lm_rep = autgroup.classify_psd_deriv(4, 1, m, seed=6)
        assert lm_rep.fails
        rep = autgroup.spectral_aut_projection(4, 1, m, lm_report=lm_rep, seed=7)
        assert rep.fails
        assert rep.details["projection_consistent"]
        assert rep.details["singular_values_squared"] == [4.0, 1.0, 1.0, 1.0]


class TestLieProbe:
    def test_identity_flow_scales(self):
        rep = autgroup.lie_probe(
            gallery.orthant(4), 1, np.eye(4), (-1.0, -0.1, 0.1, 1.0),
            samples=300, seed=8,
        )
        assert rep.holds

    def test_single_coordinate_flow_refuted(self):
        gen = np.diag([1.0, 0.0, 0.0, 0.0])
        rep = autgroup.lie_probe(
            gallery.orthant(4), 1, gen, (-1.0, -0.1, 0.1, 1.0),
            samples=300, seed=9,
        )
        assert rep.fails
        assert rep.witness[0] in (-1.0, -0.1, 0.1, 1.0)

    def test_skew_conjugation_flow_preserves_matrix_relaxation(self):
        w = np.zeros((4, 4))
        w[0, 2], w[2, 0] = 1.0, -1.0
        dim = gallery.svec_dim(4)
        cols = []
        for t in range(dim):
            b = np.zeros(dim)
            b[t] = 1.0
            mat = gallery.smat_float(b, 4)
            cols.append(gallery.svec_float(w @ mat + mat @ w.T))
        gen = np.stack(cols, axis=1)
        # the flow is conjugation by a rotation; verified numerically
        flow = __import__("scipy.linalg", fromlist=["expm"]).expm(0.7 * w)
        assert np.allclose(flow @ flow.T, np.eye(4), atol=1e-12)
        rep = autgroup.lie_probe(
            gallery.psd(4), 1, gen, (-1.0, 1.0), samples=300, seed=10
        )
        assert rep.holds

    def test_overflow_is_inconclusive(self):
        rep = autgroup.lie_probe(
            gallery.orthant(4), 1, np.eye(4) * 500.0, (4.0,), samples=50, seed=11
        )
        assert rep.verdict is Verdict.INCONCLUSIVE
