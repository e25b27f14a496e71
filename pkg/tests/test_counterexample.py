"""The distinguished planar system and its perturbed unit-step operators.

Independent oracle used throughout: the scalar equation y'' = a(t) y with
a(t) = (2t^2 - 1)/(1 + t^2)^2 has the two explicit solutions

    u(t) = 1/sqrt(1 + t^2),          v(t) = t (3 + t^2)/sqrt(1 + t^2),

(checked below by high-order finite differences), so the transition matrix
must equal F(t) F(s)^{-1} for the fundamental frame F = [[u, v], [u', v']].
That construction never touches the closed-form entry formulas under test.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from satflow.core import NormKind, matrix_norm
from satflow.counterexample import (PLANAR_COEFFICIENT_TEXT,
                                    closed_form_cocycle_residual,
                                    closed_form_grid_residual,
                                    closed_form_perturbation,
                                    closed_form_transition,
                                    perturbation_scale, perturbed_step,
                                    planar_coefficient, planar_system,
                                    recover_perturbation, saturation_deficit,
                                    select_amplitude, step_deviations,
                                    step_polynomials)
from satflow.expr import parse_coefficient
from satflow.flow import integrate_transition

times = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def _u(t):
    return 1.0 / math.sqrt(1.0 + t * t)


def _du(t):
    return -t / (1.0 + t * t) ** 1.5


def _v(t):
    return t * (3.0 + t * t) / math.sqrt(1.0 + t * t)


def _dv(t):
    return (3.0 + 3.0 * t * t + 2.0 * t ** 4) / (1.0 + t * t) ** 1.5


def _frame(t):
    return np.array([[_u(t), _v(t)], [_du(t), _dv(t)]])


def _transition_oracle(t, s):
    return _frame(t) @ np.linalg.inv(_frame(s))


class TestCoefficient:
    def test_values(self):
        assert planar_coefficient(0.0) == -1.0
        assert planar_coefficient(1.0) == pytest.approx(0.25, abs=0)
        assert planar_coefficient(2.0) == pytest.approx(7.0 / 25.0, rel=1e-15)

    def test_text_matches_function(self):
        expr = parse_coefficient(PLANAR_COEFFICIENT_TEXT)
        for t in (-3.0, -0.5, 0.0, 1.25, 4.0):
            assert expr(t) == pytest.approx(planar_coefficient(t), rel=1e-15)

    def test_bounded_by_one(self):
        for t in np.linspace(-50.0, 50.0, 401):
            assert abs(planar_coefficient(float(t))) <= 1.0

    @pytest.mark.parametrize("solution,second_derivative", [
        (_u, None), (_v, None)])
    def test_explicit_solutions_satisfy_equation(self, solution,
                                                 second_derivative):
        # five-point stencil, O(h^4): y'' ~ (-y(2h)+16y(h)-30y+16y(-h)-y(-2h))/(12h^2)
        h = 1e-3
        for t in (-2.0, -0.7, 0.0, 0.4, 1.0, 3.0):
            stencil = (-solution(t + 2 * h) + 16 * solution(t + h)
                       - 30 * solution(t) + 16 * solution(t - h)
                       - solution(t - 2 * h)) / (12 * h * h)
            assert stencil == pytest.approx(
                planar_coefficient(t) * solution(t), abs=1e-8)

    def test_derivative_formulas(self):
        h = 1e-6
        for t in (-1.5, 0.3, 2.0):
            assert (_u(t + h) - _u(t - h)) / (2 * h) == pytest.approx(
                _du(t), abs=1e-9)
            assert (_v(t + h) - _v(t - h)) / (2 * h) == pytest.approx(
                _dv(t), abs=1e-9)

    def test_wronskian_is_three(self):
        for t in (-4.0, 0.0, 0.5, 2.5):
            wronskian = _u(t) * _dv(t) - _v(t) * _du(t)
            assert wronskian == pytest.approx(3.0, rel=1e-14)


class TestPlanarSystem:
    def test_matrix_shape(self):
        system = planar_system()
        assert system.dimension == 2
        m = system.matrix(1.5)
        assert m[0, 0] == 0.0 and m[0, 1] == 1.0 and m[1, 1] == 0.0
        assert m[1, 0] == pytest.approx(planar_coefficient(1.5), rel=1e-15)

    def test_kind_tag(self):
        assert planar_system().kind == "counterexample2d"


class TestClosedFormTransition:
    def test_identity_at_equal_times(self):
        for s in (-3.0, 0.0, 1.7):
            value = closed_form_transition(s, s).value
            assert np.allclose(value, np.eye(2), atol=1e-12)

    def test_unit_step_from_zero(self):
        value = closed_form_transition(0.0, 1.0).value
        expected = np.array([[1 / math.sqrt(2), 2 * math.sqrt(2) / 3],
                             [-math.sqrt(2) / 4, 2 * math.sqrt(2) / 3]])
        assert np.allclose(value, expected, atol=1e-15)

    @given(times, times)
    def test_matches_fundamental_frame_oracle(self, t, s):
        value = closed_form_transition(s, t).value
        assert np.allclose(value, _transition_oracle(t, s), atol=1e-11)

    def test_matches_integration(self):
        for s, t in [(0.0, 1.0), (-2.0, 3.0), (4.0, -1.0)]:
            integrated = integrate_transition(planar_system(), s, t,
                                              tol=1e-12).value
            closed = closed_form_transition(s, t).value
            assert np.allclose(integrated, closed, atol=1e-9)

    def test_unit_determinant(self):
        for s, t in [(0.0, 1.0), (-3.0, 4.0), (2.5, -2.5)]:
            value = closed_form_transition(s, t).value
            assert float(np.linalg.det(value)) == pytest.approx(1.0,
                                                                abs=1e-12)

    def test_metadata(self):
        result = closed_form_transition(0.0, 2.0)
        assert result.method == "closed_form"
        assert result.from_time == 0.0
        assert result.to_time == 2.0

    def test_grid_residual_small(self):
        assert closed_form_grid_residual((-2.0, 2.0), 5, tol=1e-11) <= 1e-8

    def test_cocycle_residual_small(self):
        assert closed_form_cocycle_residual((-2.0, 2.0), 5) <= 1e-12


class TestStepPolynomials:
    def test_first_step_values(self):
        blocks = step_polynomials(1, 0.1)
        assert blocks.pos_num == 3.0
        assert blocks.vel_num == -3.0
        assert blocks.left_denom == 72.0
        assert blocks.right_denom_core == 36.0
        assert blocks.right_denom == pytest.approx(72.6, rel=1e-15)
        assert blocks.determinant == pytest.approx(72.6 / 72.0, rel=1e-15)

    def test_zero_amplitude_gives_unit_determinant(self):
        for m in (1, 2, 5, 10):
            assert step_polynomials(m, 0.0).determinant == pytest.approx(
                1.0, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            step_polynomials(0, 0.1)
        with pytest.raises(TypeError):
            step_polynomials(True, 0.1)
        with pytest.raises(TypeError):
            step_polynomials(1.5, 0.1)
        with pytest.raises(ValueError):
            step_polynomials(1, -0.1)
        with pytest.raises(ValueError):
            step_polynomials(1, float("nan"))


class TestPerturbedStep:
    def test_scale_formula(self):
        assert perturbation_scale(1, 0.1) == pytest.approx(
            0.1 / (6.0 * math.sqrt(2.0)), rel=1e-15)
        assert perturbation_scale(3, 0.0) == 0.0

    def test_bump_location(self):
        exact = closed_form_transition(1.0, 2.0).value
        perturbed = perturbed_step(2, 0.25)
        difference = perturbed - exact
        assert difference[0, 0] == 0.0 and difference[0, 1] == 0.0
        assert difference[1, 0] == 0.0
        assert difference[1, 1] == pytest.approx(perturbation_scale(2, 0.25),
                                                 rel=1e-12)

    def test_write_protected(self):
        step = perturbed_step(1, 0.1)
        with pytest.raises(ValueError):
            step[0, 0] = 5.0

    def test_determinant_matches_polynomials(self):
        for m, r in [(1, 0.1), (3, 0.5), (7, 2.0)]:
            step = perturbed_step(m, r)
            assert float(np.linalg.det(step)) == pytest.approx(
                step_polynomials(m, r).determinant, rel=1e-12)


class TestStepDeviations:
    def test_first_step_frozen_values(self):
        deviations = step_deviations(1, 0.1)
        assert np.allclose(deviations.left * 720.0,
                           [[0.0, 0.0], [3.0, 6.0]], atol=1e-12)
        assert np.allclose(deviations.right * 726.0,
                           [[0.0, 0.0], [-3.0, -6.0]], atol=1e-12)
        assert deviations.left_residual <= 1e-14
        assert deviations.right_residual <= 1e-14

    @pytest.mark.parametrize("m,r", [(1, 0.1), (2, 0.3), (5, 1.0), (9, 0.05)])
    def test_products_match_references(self, m, r):
        deviations = step_deviations(m, r)
        assert deviations.left_residual <= 1e-12
        assert deviations.right_residual <= 1e-12

    def test_top_rows_vanish(self):
        deviations = step_deviations(4, 0.7)
        assert np.allclose(deviations.left[0], 0.0, atol=1e-14)
        assert np.allclose(deviations.right[0], 0.0, atol=1e-14)

    def test_zero_amplitude_gives_zero_deviations(self):
        deviations = step_deviations(3, 0.0)
        assert np.allclose(deviations.left, 0.0, atol=1e-13)
        assert np.allclose(deviations.right, 0.0, atol=1e-13)


class TestSaturationDeficit:
    def test_first_step_analytic_value(self):
        # sqrt(45)*r/g1 + sqrt(45)*r/g2 with g1 = 720/10, g2 = 72.6
        expected = math.sqrt(45.0) * 0.1 * (1.0 / 72.0 + 1.0 / 72.6)
        assert saturation_deficit(1, 0.1) == pytest.approx(expected,
                                                           rel=1e-13)

    def test_zero_at_zero_amplitude(self):
        for m in (1, 4, 11):
            assert saturation_deficit(m, 0.0) <= 1e-13

    @given(st.integers(min_value=1, max_value=12),
           st.floats(min_value=0.01, max_value=2.0),
           st.floats(min_value=1.1, max_value=3.0))
    def test_strictly_increasing_in_amplitude(self, m, r, factor):
        smaller = saturation_deficit(m, r)
        larger = saturation_deficit(m, r * factor)
        assert larger > smaller

    def test_norm_kinds_give_comparable_values(self):
        spectral = saturation_deficit(2, 0.4, NormKind.SPECTRAL)
        frobenius = saturation_deficit(2, 0.4, NormKind.FROBENIUS)
        infinity = saturation_deficit(2, 0.4, NormKind.INFINITY)
        assert 0.0 < spectral <= frobenius
        assert infinity > 0.0


class TestSelectAmplitude:
    def test_first_step_against_quadratic_oracle(self):
        # with f = sqrt(45): f*r/72 + f*r/(72 + 6r) = 0.05 clears to
        # 6f r^2 + (144f - 21.6) r - 259.2 = 0; take the positive root
        f = math.sqrt(45.0)
        a, b, c = 6.0 * f, 144.0 * f - 21.6, -259.2
        root = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
        assert select_amplitude(1, 0.1) == pytest.approx(root, abs=1e-12)

    @pytest.mark.parametrize("delta", [0.1, 0.01])
    @pytest.mark.parametrize("m", [1, 2, 7, 30])
    def test_hits_per_step_target(self, m, delta):
        r = select_amplitude(m, delta)
        assert r > 0.0
        target = delta / (2.0 * m * m)
        assert saturation_deficit(m, r) == pytest.approx(target, rel=1e-6)

    def test_deficit_stays_strictly_below_budget(self):
        delta = 0.05
        for m in range(1, 21):
            r = select_amplitude(m, delta)
            assert saturation_deficit(m, r) < delta

    def test_validation(self):
        with pytest.raises(ValueError):
            select_amplitude(1, 0.0)
        with pytest.raises(ValueError):
            select_amplitude(1, -0.5)
        with pytest.raises(ValueError):
            select_amplitude(0, 0.1)


class TestPerturbationRecovery:
    def test_closed_form_first_step(self):
        value = closed_form_perturbation(1, 0.1) * 72.6
        assert np.allclose(value, [[-0.3, -0.6], [-0.45, -0.9]], atol=1e-13)

    def test_closed_form_entries_all_nonzero(self):
        for m in (1, 2, 6):
            value = closed_form_perturbation(m, 0.2)
            assert (np.abs(value) > 0.0).all()

    def test_recovered_matches_closed_form(self):
        recovered = recover_perturbation(1, 0.1)
        assert np.allclose(recovered.matrix, closed_form_perturbation(1, 0.1),
                           atol=1e-11)

    def test_recovered_first_step_frozen_values(self):
        recovered = recover_perturbation(1, 0.1)
        assert recovered.matrix[0, 0] == pytest.approx(-0.004132231404958678,
                                                       rel=1e-9)
        assert recovered.residual_single_entry == pytest.approx(
            math.sqrt(126.0) * 0.1 / 72.6, rel=1e-9)
        assert recovered.residual_last_row == pytest.approx(
            math.sqrt(45.0) * 0.1 / 72.6, rel=1e-9)

    def test_reference_disagrees_in_one_slot(self):
        recovered = recover_perturbation(1, 0.1)
        assert recovered.entry_mismatches == ((1, 1),)
        # the transcribed variant carries the opposite sign there
        assert recovered.reference[1][1] == pytest.approx(
            -float(recovered.matrix[1, 1]), rel=1e-6)

    def test_residual_ordering(self):
        # relaxing the mask from one entry to the whole last row can only
        # shrink what is left over
        for m in (1, 3):
            recovered = recover_perturbation(m, 0.5)
            assert (recovered.residual_last_row
                    <= recovered.residual_single_entry)
            assert recovered.residual_last_row > 0.0

    def test_zero_amplitude_recovers_zero(self):
        recovered = recover_perturbation(2, 0.0)
        assert np.allclose(recovered.matrix, 0.0, atol=1e-11)
        assert recovered.residual_last_row <= 1e-11
