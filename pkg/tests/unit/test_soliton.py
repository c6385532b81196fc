from fractions import Fraction

import numpy as np
import pytest

from scipy import integrate, optimize

from group_kstab.criteria import PLConvexFunction
from group_kstab.polyint import Polynomial, build_polytope, restrict_to_chamber
from group_kstab.rootdata import build_root_system
from group_kstab.soliton import (
    BarX,
    NoConvergence,
    SolitonVerdict,
    bar_x,
    modified_futaki,
    modified_linear,
    solve_soliton,
    verdict_soliton,
)


@pytest.mark.unit
@pytest.mark.soliton
class TestSolveSoliton:
    def test_no_toric_part_gives_trivial_field(self, quadric):
        rs, cp = quadric
        field_ = solve_soliton(cp, rs)
        assert field_.is_trivial
        assert field_.converged
        assert field_.iterations == 0
        assert field_.trace == ()

    def test_symmetric_polytope_has_vanishing_field(self, torus_square):
        rs, cp = torus_square
        field_ = solve_soliton(cp, rs)
        assert field_.converged
        np.testing.assert_allclose(field_.c, 0.0, atol=1e-9)
        assert abs(field_.c0) < 1e-9

    def test_blowup_field_balances_toric_moments(self, blowup):
        rs, cp = blowup
        field_ = solve_soliton(cp, rs)
        assert field_.converged
        assert field_.moment_residual <= 1e-12 * 16
        assert field_.normalization_residual < 1e-8
        assert np.linalg.norm(field_.c) > 1e-3
        assert field_.c[0] < 0
        assert field_.c[0] == pytest.approx(field_.c[1], rel=1e-8)
        assert [row["iteration"] for row in field_.trace] == list(range(len(field_.trace)))
        for value in modified_futaki(cp, rs, field_):
            assert abs(value.value) < 1e-6

    def test_blowup_field_matches_bisection(self, blowup):
        rs, cp = blowup
        field_ = solve_soliton(cp, rs)

        # By the diagonal symmetry c = (t, t); the first toric moment vanishes at t.
        def moment(t):
            def integrand(y2, y1):
                return y1 * np.exp(t * (y1 + y2))

            return sum(
                integrate.dblquad(
                    integrand,
                    lo,
                    hi,
                    lambda y1: max(-2.0, -2.0 - y1),
                    lambda y1: 2.0 - y1,
                    epsabs=1e-13,
                    epsrel=1e-13,
                )[0]
                for lo, hi in ((-2.0, 0.0), (0.0, 4.0))
            )

        t = optimize.bisect(moment, -1.0, 0.0, xtol=1e-13)
        assert abs(field_.c[0] - t) < 1e-8
        assert abs(field_.c[1] - t) < 1e-8

    def test_hessian_positive_along_newton_path(self, blowup, a1_torus):
        for rs, cp in (blowup, a1_torus):
            field_ = solve_soliton(cp, rs)
            assert field_.trace
            assert all(row["min_eig"] > 0 for row in field_.trace)

    def test_failed_line_search_raises_with_best_iterate(self, blowup, monkeypatch):
        from group_kstab import soliton

        real = soliton._log_objective
        calls = []

        def never_decreasing(t, z, base):
            value, gradient, hessian = real(t, z, base)
            calls.append(t)
            return (value if len(calls) == 1 else value + 1.0), gradient, hessian

        monkeypatch.setattr(soliton, "_log_objective", never_decreasing)
        rs, cp = blowup
        with pytest.raises(NoConvergence, match="line search") as exc_info:
            solve_soliton(cp, rs)
        best = exc_info.value.best
        assert best is not None
        assert not best.converged
        np.testing.assert_allclose(best.c, 0.0)
        assert len(best.trace) == 1

    def test_a1_torus_converges(self, a1_torus):
        rs, cp = a1_torus
        field_ = solve_soliton(cp, rs)
        assert field_.converged
        assert field_.c[0] == 0
        assert len(modified_futaki(cp, rs, field_)) == 1
        assert abs(modified_futaki(cp, rs, field_)[0].value) < 1e-6

    def test_iteration_cap_raises_with_best_iterate(self, blowup):
        rs, cp = blowup
        with pytest.raises(NoConvergence) as exc_info:
            solve_soliton(cp, rs, 1e-14, max_iter=0)
        error = exc_info.value
        assert error.exit_code == 3
        assert error.tag == "soliton.NoConvergence"
        assert error.best is not None
        assert not error.best.converged
        assert error.best.moment_residual > 0

    def test_field_dict(self, blowup):
        rs, cp = blowup
        data = solve_soliton(cp, rs).to_dict()
        assert set(data) == {"c", "c0", "residuals", "converged", "iterations"}
        assert set(data["residuals"]) == {"moment", "normalization"}
        assert len(data["c"]) == 2


@pytest.mark.unit
@pytest.mark.soliton
class TestSolitonVerdict:
    def test_trivial_field_uses_exact_barycenter(self, quadric):
        rs, cp = quadric
        barycenter = bar_x(cp, rs, solve_soliton(cp, rs))
        assert barycenter.error == 0.0
        assert barycenter.value.tolist() == [4.5]

    def test_quadric_is_soliton(self, quadric):
        rs, cp = quadric
        result = verdict_soliton(cp, rs, solve_soliton(cp, rs))
        assert result.verdict is SolitonVerdict.YES
        assert result.margin == pytest.approx(0.5)

    def test_blowup_is_soliton(self, blowup):
        rs, cp = blowup
        field_ = solve_soliton(cp, rs)
        result = verdict_soliton(cp, rs, field_)
        assert result.verdict is SolitonVerdict.YES
        assert result.margin is None
        assert np.max(np.abs(result.toric_component)) <= result.tolerance

    def test_margin_classification(self, quadric):
        rs, cp = quadric
        field_ = solve_soliton(cp, rs)
        on_wall = BarX(value=np.array([4.0]), error=1e-3, mass=72.0)
        marginal = verdict_soliton(cp, rs, field_, barycenter=on_wall)
        assert marginal.verdict is SolitonVerdict.MARGINAL
        outside = BarX(value=np.array([3.0]), error=1e-3, mass=72.0)
        rejected = verdict_soliton(cp, rs, field_, barycenter=outside)
        assert rejected.verdict is SolitonVerdict.NO
        assert rejected.margin == pytest.approx(-1.0)
        assert rejected.note

    def test_not_fano_is_not_applicable(self):
        rs = build_root_system(2, [[1, 0], [0, 1]], [])
        polytope = build_polytope(
            2, [((1, 0), 3), ((-1, 0), 3), ((0, 1), 3), ((0, -1), 3)], root_system=rs
        )
        cp = restrict_to_chamber(polytope, rs)
        result = verdict_soliton(cp, rs, solve_soliton(cp, rs))
        assert result.verdict is SolitonVerdict.NOT_APPLICABLE
        assert result.margin is None


@pytest.mark.unit
@pytest.mark.soliton
class TestModifiedLinear:
    def test_trivial_field_reduces_to_linear_functional(self, quadric):
        rs, cp = quadric
        field_ = solve_soliton(cp, rs)
        half_y = Polynomial.linear((Fraction(1, 2),))
        smooth = modified_linear(cp, rs, field_, half_y)
        assert smooth.value == pytest.approx(18.0, rel=1e-10)
        assert smooth.error < 1e-9
        pl = PLConvexFunction.weyl_orbit_max(rs, rs.fundamental_weights[0])
        assert modified_linear(cp, rs, field_, pl).value == pytest.approx(18.0, rel=1e-10)
