from fractions import Fraction

import numpy as np
import pytest

from group_kstab import linalg
from group_kstab.kenergy import (
    BarrierBreach,
    ChamberViolation,
    ChiFunction,
    GuilleminFunction,
    InvalidCandidate,
    KEnergyError,
    NotConvexAtNodes,
    NotConvexSamples,
    PropernessRequired,
    QuadratureOptions,
    SingularHessian,
    SmoothCandidate,
    WallTooClose,
    boundary_contract,
    candidate_from_dict,
    first_variation,
    inverse_legendre_transform,
    j_functional_proxy,
    kappa_bounds,
    kenergy_value,
    legendre_transform,
    minimize_kenergy,
    modified_kenergy_value,
    nonlinear_first_variation,
    q_diagnostic,
    round_trip_error,
    scalar_curvature,
    scalar_curvature_at,
    symmetric_basis,
)
from group_kstab.kenergy.minimize import HEURISTIC_LABEL
from group_kstab.polyint import Polynomial, build_polytope, restrict_to_chamber
from group_kstab.rootdata import build_root_system
from group_kstab.soliton import solve_soliton


CORPUS = ["a1_torus", "a2_hexagon", "quadric_sl2", "torus_blowup", "torus_p2", "torus_square"]


def _y_squared():
    return Polynomial.variable(1, 0) ** 2


@pytest.mark.unit
@pytest.mark.kenergy
class TestCandidates:
    def test_symmetric_basis_sizes(self, quadric, torus_square):
        rs, _ = quadric
        basis = symmetric_basis(rs, 4)
        assert basis == [_y_squared(), Polynomial.variable(1, 0) ** 4]
        rs, _ = torus_square
        assert len(symmetric_basis(rs, 2)) == 3

    def test_normalized_candidate_vanishes_to_first_order(self, blowup):
        _, cp = blowup
        u = SmoothCandidate.guillemin(cp.polytope).normalized()
        origin = np.zeros((1, 2))
        assert u.values(origin)[0] == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(u.gradients(origin)[0], 0.0, atol=1e-12)

    def test_guillemin_hessian_matches_gradient_differences(self, blowup):
        _, cp = blowup
        u0 = GuilleminFunction.of(cp.polytope)
        point = np.array([[0.3, 0.1]])
        h = 1e-6
        columns = []
        for k in range(2):
            step = np.zeros((1, 2))
            step[0, k] = h
            columns.append((u0.gradient(point + step) - u0.gradient(point - step))[0] / (2 * h))
        np.testing.assert_allclose(np.array(columns).T, u0.hessian(point)[0], rtol=1e-6)

    def test_flat_candidate(self):
        u = SmoothCandidate.flat(2, 2.0)
        points = np.array([[1.0, 2.0], [0.0, -1.0]])
        np.testing.assert_allclose(u.values(points), [5.0, 1.0])
        np.testing.assert_allclose(u.hessians(points)[0], 2 * np.eye(2))

    def test_check_convex_rejects_degenerate_hessian(self):
        x = Polynomial.variable(2, 0)
        u = SmoothCandidate.polynomial(2, [x**2], [1.0])
        with pytest.raises(NotConvexAtNodes):
            u.check_convex(np.array([[0.5, 0.5]]))

    def test_candidate_from_dict(self, quadric):
        _, cp = quadric
        u = candidate_from_dict(
            {"base": "none", "terms": [{"exponent": [2], "coefficient": 0.5}]}, cp.polytope
        )
        assert u.values(np.array([[2.0]]))[0] == pytest.approx(2.0)
        assert u.to_dict() == {
            "base": "none",
            "terms": [{"exponent": [2], "coefficient": 0.5}],
            "affine": {"gradient": [0.0], "constant": 0.0},
        }

    @pytest.mark.parametrize(
        "data",
        [
            {"base": "spline"},
            {"terms": [{"exponent": [1, 1], "coefficient": 1.0}]},
            {"terms": [{"exponent": [-1], "coefficient": 1.0}]},
            {"terms": [{"exponent": [2], "coefficient": "1"}]},
            {"terms": [{"exponent": [2], "coefficient": True}]},
        ],
    )
    def test_invalid_candidate_dicts(self, quadric, data):
        _, cp = quadric
        with pytest.raises(InvalidCandidate):
            candidate_from_dict(data, cp.polytope)


@pytest.mark.unit
@pytest.mark.kenergy
class TestChiFunction:
    @pytest.fixture
    def chi(self, a2_hexagon):
        rs, _ = a2_hexagon
        return ChiFunction.of(rs)

    def test_shifted_forms(self, chi):
        x = np.array([[0.7, 0.4]])
        four_rho_x = float(4 * chi.rho @ x[0])
        assert chi.value_plus_four_rho(x)[0] == pytest.approx(chi.value(x)[0] + four_rho_x)
        np.testing.assert_allclose(
            chi.gradient_plus_four_rho(x)[0], chi.gradient(x)[0] + 4 * chi.rho
        )

    def test_hessian_matches_gradient_differences(self, chi):
        x = np.array([[0.7, 0.4]])
        h = 1e-6
        columns = []
        for k in range(2):
            step = np.zeros((1, 2))
            step[0, k] = h
            columns.append((chi.gradient(x + step) - chi.gradient(x - step))[0] / (2 * h))
        np.testing.assert_allclose(np.array(columns).T, chi.hessian(x)[0], rtol=1e-5)


@pytest.mark.unit
@pytest.mark.kenergy
class TestScalarCurvature:
    def test_guillemin_on_square_has_constant_curvature(self, torus_square):
        rs, cp = torus_square
        u0 = SmoothCandidate.guillemin(cp.polytope)
        points = np.array([[0.3, -0.7], [1.5, 1.9], [-1.2, 0.0]])
        np.testing.assert_allclose(scalar_curvature(cp, rs, u0, points), 2.0, rtol=1e-8)

    @pytest.mark.parametrize("route", ["pi", "roots"])
    def test_guillemin_on_quadric_has_constant_curvature(self, quadric, route):
        rs, cp = quadric
        u0 = SmoothCandidate.guillemin(cp.polytope)
        for y in (0.5, 2.5, 5.5):
            assert scalar_curvature_at(cp, rs, u0, [y], route=route) == pytest.approx(
                3.0, rel=1e-8
            )

    def test_weight_routes_agree(self, a2_hexagon):
        rs, cp = a2_hexagon
        u0 = SmoothCandidate.guillemin(cp.polytope)
        y = [1.0, 1.5]
        assert scalar_curvature_at(cp, rs, u0, y, route="roots") == pytest.approx(
            scalar_curvature_at(cp, rs, u0, y, route="pi"), rel=1e-8
        )

    def test_flat_candidate_on_square(self, torus_square):
        rs, cp = torus_square
        u = SmoothCandidate.flat(2)
        assert scalar_curvature_at(cp, rs, u, [0.5, 0.5]) == pytest.approx(0.0, abs=1e-12)

    def test_points_near_walls_are_rejected(self, quadric):
        rs, cp = quadric
        u0 = SmoothCandidate.guillemin(cp.polytope)
        with pytest.raises(WallTooClose):
            scalar_curvature_at(cp, rs, u0, [0.0])
        with pytest.raises(WallTooClose):
            scalar_curvature_at(cp, rs, u0, [7.0])

    def test_singular_hessian(self, torus_square):
        rs, cp = torus_square
        x = Polynomial.variable(2, 0)
        u = SmoothCandidate.polynomial(2, [x**2], [1.0])
        with pytest.raises(SingularHessian):
            scalar_curvature_at(cp, rs, u, [0.5, 0.5])

    def test_unknown_weight_route(self, quadric):
        rs, cp = quadric
        u0 = SmoothCandidate.guillemin(cp.polytope)
        with pytest.raises(KEnergyError, match="route"):
            scalar_curvature_at(cp, rs, u0, [2.0], route="bogus")


@pytest.mark.unit
@pytest.mark.kenergy
class TestQDiagnostic:
    @pytest.mark.parametrize(
        "fixture_name, y",
        [("quadric", [2.5]), ("quadric", [5.0]), ("a2_hexagon", [1.0, 1.5])],
    )
    def test_expanded_matches_direct(self, request, fixture_name, y):
        rs, cp = request.getfixturevalue(fixture_name)
        expanded = q_diagnostic(cp, rs, y, route="expanded")
        assert q_diagnostic(cp, rs, y, route="direct") == pytest.approx(expanded, rel=1e-8)

    @pytest.mark.parametrize("name", ["quadric_sl2", "a1_torus", "a2_hexagon"])
    def test_expanded_matches_direct_on_random_points(self, built, name):
        rs, cp = built(name)
        rng = np.random.default_rng(7)
        simplices = [np.array([linalg.as_float_array(v) for v in s]) for s in cp.simplices]
        for _ in range(50):
            simplex = simplices[rng.integers(len(simplices))]
            weights = 0.5 * rng.dirichlet(np.ones(len(simplex))) + 0.5 / len(simplex)
            y = weights @ simplex
            expanded = q_diagnostic(cp, rs, y, route="expanded")
            assert q_diagnostic(cp, rs, y, route="direct") == pytest.approx(
                expanded, rel=1e-7, abs=1e-8
            )

    def test_quadric_closed_form(self, quadric):
        """Q(y) = 4/3 on the quadric for every interior y."""
        rs, cp = quadric
        assert q_diagnostic(cp, rs, [2.5]) == pytest.approx(4 / 3, rel=1e-8)

    def test_torus_is_zero(self, torus_square):
        rs, cp = torus_square
        assert q_diagnostic(cp, rs, [0.5, 0.5]) == 0.0


@pytest.mark.unit
@pytest.mark.kenergy
class TestBoundaryContract:
    def test_square_limits(self, torus_square):
        rs, cp = torus_square
        samples = boundary_contract(cp, rs, 1e-6)
        assert len(samples) == 4 * 3
        for sample in samples:
            assert sample.eps == 1e-6
            assert sample.normal_residual < 1e-5
            assert sample.divergence_error < 1e-5

    def test_blowup_limits(self, blowup):
        rs, cp = blowup
        for sample in boundary_contract(cp, rs, 1e-6):
            assert sample.normal_residual < 1e-4
            assert sample.divergence == pytest.approx(2.0, abs=1e-4)

    @pytest.mark.parametrize("name", ["torus_square", "torus_blowup", "quadric_sl2", "a2_hexagon"])
    def test_limits_converge_to_first_order(self, built, name):
        rs, cp = built(name)
        errors = []
        for eps in (1e-2, 1e-3, 1e-4):
            samples = boundary_contract(cp, rs, eps)
            errors.append(max(max(s.normal_residual, s.divergence_error) for s in samples))
        for coarse, fine in zip(errors, errors[1:], strict=False):
            assert 5 < coarse / fine < 20


@pytest.mark.unit
@pytest.mark.kenergy
class TestKEnergyValue:
    def test_flat_candidate_on_square(self, torus_square):
        rs, cp = torus_square
        result = kenergy_value(cp, rs, SmoothCandidate.flat(2))
        assert result.nonlinear == pytest.approx(0.0, abs=1e-12)
        assert result.linear == pytest.approx(128 / 3, rel=1e-10)
        assert result.dropped_fraction == 0.0

    def test_guillemin_on_quadric(self, quadric):
        rs, cp = quadric
        result = kenergy_value(cp, rs, SmoothCandidate.guillemin(cp.polytope))
        assert np.isfinite(result.value)
        assert result.dropped_fraction == 0.0
        assert set(result.to_dict()) == {
            "value",
            "linear",
            "nonlinear",
            "quadrature_error",
            "dropped_mass_fraction",
        }

    def test_gradient_outside_chamber_is_rejected(self, quadric):
        rs, cp = quadric
        y = Polynomial.variable(1, 0)
        u = SmoothCandidate.polynomial(1, [y, y**2], [-10.0, 0.5])
        with pytest.raises(ChamberViolation) as exc_info:
            kenergy_value(cp, rs, u)
        assert exc_info.value.details["dropped_fraction"] > 0.01

    @pytest.mark.parametrize("name", ["quadric_sl2", "torus_blowup", "a2_hexagon"])
    def test_constant_shift_leaves_value_unchanged(self, built, name):
        rs, cp = built(name)
        u0 = SmoothCandidate.guillemin(cp.polytope)
        shifted = kenergy_value(cp, rs, u0.plus_constant(3.7))
        assert shifted.value == pytest.approx(kenergy_value(cp, rs, u0).value, abs=1e-8)

    @pytest.mark.parametrize("name", ["quadric_sl2", "torus_blowup"])
    def test_constant_shift_leaves_modified_value_unchanged(self, built, name):
        rs, cp = built(name)
        field_ = solve_soliton(cp, rs)
        u0 = SmoothCandidate.guillemin(cp.polytope)
        shifted = modified_kenergy_value(cp, rs, field_, u0.plus_constant(3.7))
        plain = modified_kenergy_value(cp, rs, field_, u0)
        assert shifted.value == pytest.approx(plain.value, abs=1e-8)

    def test_options_refine_by_doubling(self):
        options = QuadratureOptions(order=5, grading=2)
        assert options.refined() == QuadratureOptions(order=10, grading=2)


@pytest.mark.unit
@pytest.mark.kenergy
class TestVariations:
    @pytest.fixture
    def perturbed(self, quadric):
        rs, cp = quadric
        return rs, cp, SmoothCandidate.guillemin(cp.polytope, [_y_squared()], [0.05])

    def test_first_variation_matches_central_difference(self, perturbed):
        rs, cp, u = perturbed
        f = Polynomial.variable(1, 0) ** 4 * Fraction(1, 100)
        h = 1e-4
        forward = kenergy_value(cp, rs, u.plus(f, h)).value
        backward = kenergy_value(cp, rs, u.plus(f, -h)).value
        assert first_variation(cp, rs, u, f) == pytest.approx(
            (forward - backward) / (2 * h), rel=1e-5
        )

    @pytest.mark.parametrize("name", CORPUS)
    def test_first_variation_along_symmetric_directions(self, built, name):
        rs, cp = built(name)
        u = SmoothCandidate.guillemin(cp.polytope)
        h = 1e-4
        for p in symmetric_basis(rs, 6)[:3]:
            f = p * (1 / max(abs(p.evaluate(v)) for v in cp.polytope.vertices))
            forward = kenergy_value(cp, rs, u.plus(f, h)).value
            backward = kenergy_value(cp, rs, u.plus(f, -h)).value
            assert first_variation(cp, rs, u, f) == pytest.approx(
                (forward - backward) / (2 * h), rel=1e-5, abs=1e-6
            )

    def test_nonlinear_variation_matches_central_difference(self, perturbed):
        rs, cp, u = perturbed
        f = _y_squared()
        h = 1e-4
        forward = kenergy_value(cp, rs, u.plus(f, h)).nonlinear
        backward = kenergy_value(cp, rs, u.plus(f, -h)).nonlinear
        assert nonlinear_first_variation(cp, rs, u, f) == pytest.approx(
            (forward - backward) / (2 * h), rel=1e-5
        )


@pytest.mark.unit
@pytest.mark.kenergy
class TestReportedQuantities:
    def test_j_proxy(self, quadric):
        rs, cp = quadric
        assert j_functional_proxy(cp, rs, SmoothCandidate.guillemin(cp.polytope)) == 0.0
        u = SmoothCandidate.guillemin(cp.polytope, [_y_squared()], [0.05])
        assert j_functional_proxy(cp, rs, u) == pytest.approx(1.08, rel=1e-9)

    def test_kappa_bounds(self, a2_hexagon):
        rs, cp = a2_hexagon
        bounds = kappa_bounds(cp, rs, SmoothCandidate.guillemin(cp.polytope))
        assert np.isfinite(bounds.boundary)
        assert np.isfinite(bounds.interior)
        assert set(bounds.to_dict()) == {"boundary", "interior"}

    def test_modified_kenergy_with_trivial_field(self, quadric):
        rs, cp = quadric
        u0 = SmoothCandidate.guillemin(cp.polytope)
        modified = modified_kenergy_value(cp, rs, solve_soliton(cp, rs), u0)
        plain = kenergy_value(cp, rs, u0)
        assert modified.linear == pytest.approx(plain.linear, rel=1e-10)
        assert modified.nonlinear == pytest.approx(plain.nonlinear, rel=1e-10)

    def test_modified_kenergy_requires_fano(self):
        rs = build_root_system(2, [[1, 0], [0, 1]], [])
        polytope = build_polytope(
            2, [((1, 0), 3), ((-1, 0), 3), ((0, 1), 3), ((0, -1), 3)], root_system=rs
        )
        cp = restrict_to_chamber(polytope, rs)
        with pytest.raises(KEnergyError, match="Fano"):
            modified_kenergy_value(
                cp, rs, solve_soliton(cp, rs), SmoothCandidate.guillemin(polytope)
            )


@pytest.mark.unit
@pytest.mark.kenergy
class TestLegendre:
    def test_quadratic_is_self_dual(self):
        grid = np.linspace(-2.0, 2.0, 81)
        psi = grid**2 / 2
        u = legendre_transform([grid], psi, [grid])
        np.testing.assert_allclose(u, psi, atol=1e-12)
        assert round_trip_error([grid], psi, [grid]) < 1e-12

    def test_two_dimensional_transform(self):
        x = np.linspace(-2.0, 2.0, 81)
        y1, y2 = np.linspace(-2.0, 2.0, 81), np.linspace(-2.0, 2.0, 41)
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        psi = (x1**2 + 2 * x2**2) / 2
        u = legendre_transform([x, x], psi, [y1, y2], chunk=7)
        t1, t2 = np.meshgrid(y1, y2, indexing="ij")
        np.testing.assert_allclose(u, t1**2 / 2 + t2**2 / 4, atol=1e-12)
        back = inverse_legendre_transform([y1, y2], u, [x, x])
        assert back.shape == psi.shape

    def test_concave_samples_rejected(self):
        grid = np.linspace(-1.0, 1.0, 11)
        with pytest.raises(NotConvexSamples):
            legendre_transform([grid], -(grid**2), [grid])

    def test_grid_validation(self):
        grid = np.linspace(-1.0, 1.0, 11)
        with pytest.raises(KEnergyError, match="do not match"):
            legendre_transform([grid], np.zeros(10), [grid])
        with pytest.raises(KEnergyError, match="increasing"):
            legendre_transform([grid[::-1]], grid**2, [grid])


@pytest.mark.unit
@pytest.mark.kenergy
@pytest.mark.slow
class TestMinimize:
    def test_descent_on_quadric(self, quadric):
        rs, cp = quadric
        result = minimize_kenergy(cp, rs, start=[0.05], max_iter=10)
        values = [row["kenergy"] for row in result.trace]
        assert all(b <= a for a, b in zip(values, values[1:], strict=False))
        assert result.trace[0]["iteration"] == 0
        assert result.stop_reason in {"gradient-tolerance", "rounding", "line-search", "iteration-cap"}
        assert result.label == HEURISTIC_LABEL
        assert result.candidate.values(np.zeros((1, 1)))[0] == pytest.approx(0.0, abs=1e-10)
        assert result.to_dict()["iterations"] == len(result.trace) - 1

    def test_reported_value_matches_last_trace_row(self, blowup):
        rs, cp = blowup
        result = minimize_kenergy(cp, rs, max_iter=3, allow_improper=True)
        assert result.value.value == pytest.approx(
            result.trace[-1]["kenergy"], abs=result.value.quadrature_error + 1e-8
        )
        np.testing.assert_allclose(
            result.candidate.gradients(np.zeros((1, 2)))[0], 0.0, atol=1e-10
        )

    def test_properness_is_required(self, blowup):
        rs, cp = blowup
        with pytest.raises(PropernessRequired) as exc_info:
            minimize_kenergy(cp, rs)
        assert exc_info.value.exit_code == 2
        assert exc_info.value.details["verdict"] == "inconclusive"

    def test_infeasible_start(self, quadric):
        rs, cp = quadric
        with pytest.raises(BarrierBreach) as exc_info:
            minimize_kenergy(cp, rs, start=[-10.0])
        assert exc_info.value.exit_code == 3
        assert exc_info.value.tag == "kenergy.BarrierBreach"
