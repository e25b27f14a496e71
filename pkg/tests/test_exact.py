"""Exact rational-arithmetic verification of the step identities.

Everything here runs over Fractions, so "equal" means literal equality with
zero residual -- no tolerances.  The float route in the counterexample module
is cross-checked against these values at the end.
"""

from fractions import Fraction

import numpy as np
import pytest

from satflow.counterexample import (closed_form_perturbation,
                                    closed_form_transition, perturbed_step,
                                    step_deviations)
from satflow.exact import verify_exact_identities


class TestReport:
    def test_short_run_passes(self):
        report = verify_exact_identities(5)
        assert report.passed
        assert report.failures == ()
        assert report.m_max == 5
        assert report.inverse_exact
        assert report.determinant_exact
        assert report.left_deviation_exact
        assert report.right_deviation_exact
        assert report.recovered_exact

    def test_amplitude_recorded_as_string(self):
        report = verify_exact_identities(2, Fraction(3, 7))
        assert report.amplitude == "3/7"

    def test_notes_describe_resolved_discrepancies(self):
        report = verify_exact_identities(1)
        assert len(report.notes) == 4
        # each resolved transcription gap has an exact closed-form size
        joined = " ".join(report.notes)
        assert "sign" in joined

    def test_other_amplitudes(self):
        for amplitude in (Fraction(1, 3), Fraction(2), Fraction(7, 100)):
            assert verify_exact_identities(3, amplitude).passed

    def test_validation(self):
        with pytest.raises(ValueError):
            verify_exact_identities(0)
        with pytest.raises(ValueError):
            verify_exact_identities(3, Fraction(0))
        with pytest.raises(ValueError):
            verify_exact_identities(3, Fraction(-1, 2))


class TestFloatAgreement:
    """The float pipeline must reproduce the exact rational values."""

    def test_transition_entries(self):
        # scaled transition M = 3 sqrt((1+t^2)(1+s^2)) X is rational at
        # integer times; compare X against M with the prefactor restored
        import math
        from satflow.exact import _scaled_transition
        for m in (1, 2, 5):
            t, s = Fraction(m), Fraction(m - 1)
            scaled = _scaled_transition(t, s)
            prefactor = 3.0 * math.sqrt(float((1 + t * t) * (1 + s * s)))
            closed = closed_form_transition(float(s), float(m)).value
            for i in range(2):
                for j in range(2):
                    assert closed[i, j] * prefactor == pytest.approx(
                        float(scaled[i][j]), rel=1e-13)

    def test_float_deviations_match_exact_scale(self):
        # left deviation (1,0) entry is -vel*r/g1 exactly; g1(1) = 720/r
        deviations = step_deviations(1, 0.1)
        assert deviations.left[1, 0] == pytest.approx(3.0 / 720.0, rel=1e-12)
        assert deviations.right[1, 0] == pytest.approx(-3.0 / 726.0,
                                                       rel=1e-12)

    def test_float_perturbation_matches_exact(self):
        value = closed_form_perturbation(1, 0.1)
        exact = np.array([[-3.0, -6.0], [-4.5, -9.0]]) / 726.0
        assert np.allclose(value, exact, rtol=1e-13, atol=0.0)

    def test_perturbed_step_determinant(self):
        # det W = g2/g1 = 72.6/72 at m=1, r=1/10
        step = perturbed_step(1, 0.1)
        assert float(np.linalg.det(step)) == pytest.approx(72.6 / 72.0,
                                                           rel=1e-12)
