"""Transition (Cauchy) matrices of x' = A(t) x by adaptive explicit Runge-Kutta.

The integrator is an embedded Dormand-Prince 5(4) pair with a deterministic
step controller: local error is measured entrywise against tol*|h| (error per
unit time), steps scale by SAFETY*(threshold/error)^(1/4) clamped to
[MIN_SCALE, MAX_SCALE], and the starting step is fixed by the span alone.
Repeated calls with identical inputs therefore produce bit-identical output.
Backward transitions integrate in reverse time rather than inverting a
forward result.  The Liouville determinant check integrates the coefficient
trace with the same controller, so a single tolerance knob governs both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import NormKind, SystemLike, matrix_norm, system_sup_norm, _norm_kind
from .reports import CheckReport

__all__ = [
    "IntegrationError",
    "TransitionMatrix",
    "ShiftedSystem",
    "shift",
    "integrate_transition",
    "cocycle_residual",
    "liouville_residual",
    "growth_bound_check",
    "family_axioms_check",
]

TOL_MIN = 1e-13
TOL_MAX = 1e-3

# fixed controller constants (documented; changing them changes results)
_SAFETY = 0.9
_MIN_SCALE = 0.2
_MAX_SCALE = 5.0
_FIRST_STEP = 0.1
_MAX_STEPS = 1_000_000

# Dormand-Prince 5(4) tableau
_STAGE_TIMES = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_STAGE_WEIGHTS = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_FIFTH_ORDER = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_ERROR_WEIGHTS = (71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                  -17253 / 339200, 22 / 525, -1 / 40)


class IntegrationError(RuntimeError):
    """Integration failure; ``time`` holds the failing interior point."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not TOL_MIN <= tol <= TOL_MAX:
        raise ValueError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}], got {tol}")
    return tol


def _rk_step(f: Callable[[float, np.ndarray], np.ndarray], t: float,
             y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
    """One Dormand-Prince attempt: returns (5th-order value, error estimate)."""
    stages = [f(t, y)]
    for i in range(1, 7):
        increment = _STAGE_WEIGHTS[i][0] * stages[0]
        for j in range(1, i):
            weight = _STAGE_WEIGHTS[i][j]
            if weight != 0.0:
                increment = increment + weight * stages[j]
        stages.append(f(t + _STAGE_TIMES[i] * h, y + h * increment))
    advance = sum(w * k for w, k in zip(_FIFTH_ORDER, stages) if w != 0.0)
    error = sum(w * k for w, k in zip(_ERROR_WEIGHTS, stages) if w != 0.0)
    return y + h * advance, float(np.abs(h * error).max())


def _integrate(f: Callable[[float, np.ndarray], np.ndarray], start: float,
               stop: float, initial: np.ndarray, tol: float) -> np.ndarray:
    if start == stop:
        return initial.copy()
    direction = 1.0 if stop > start else -1.0
    span = abs(stop - start)
    h = direction * min(_FIRST_STEP, span)
    t, y = start, initial
    for _ in range(_MAX_STEPS):
        if (t - stop) * direction >= 0.0:
            return y
        if (t + h - stop) * direction > 0.0:
            h = stop - t
        if not math.isfinite(h) or t + h == t:
            raise IntegrationError(f"step size underflow at u={t}", t)
        candidate, error = _rk_step(f, t, y, h)
        threshold = tol * abs(h)
        if math.isfinite(error) and error <= threshold:
            t = t + h
            y = candidate
            scale = (_MAX_SCALE if error == 0.0
                     else _SAFETY * (threshold / error) ** 0.25)
        elif not math.isfinite(error):
            # a stage overflowed or produced NaN: retry much smaller
            scale = _MIN_SCALE
        else:
            scale = _SAFETY * (threshold / error) ** 0.25
        scale = min(max(scale, _MIN_SCALE), _MAX_SCALE)
        h = h * scale
    raise IntegrationError(f"step limit exceeded near u={t}", t)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Transition matrix value with its endpoints and provenance."""

    value: np.ndarray
    from_time: float
    to_time: float
    method: str                      # "integrated" or "closed_form"
    tolerance: "float | None" = None
    system: "SystemLike | None" = None


@dataclass(frozen=True, eq=False)
class ShiftedSystem:
    """Time shift of a base system: matrix(t) = base.matrix(t + offset)."""

    base: SystemLike
    offset: float

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def matrix(self, t: float) -> np.ndarray:
        return self.base.matrix(t + self.offset)


def shift(system: SystemLike, offset: float) -> ShiftedSystem:
    """Shift a system in time; nested shifts flatten, so composing two shifts
    evaluates identically to a single shift by the summed offset."""
    offset = float(offset)
    if isinstance(system, ShiftedSystem):
        return ShiftedSystem(system.base, system.offset + offset)
    return ShiftedSystem(system, offset)


def integrate_transition(system: SystemLike, from_time: float, to_time: float,
                         tol: float = 1e-10) -> TransitionMatrix:
    """Transition matrix of the system from ``from_time`` to ``to_time``."""
    tol = _check_tol(tol)
    n = system.dimension
    from_time, to_time = float(from_time), float(to_time)
    if from_time == to_time:
        value = np.eye(n)
    else:
        def derivative(u: float, y: np.ndarray) -> np.ndarray:
            return system.matrix(u) @ y

        value = _integrate(derivative, from_time, to_time, np.eye(n), tol)
    value.setflags(write=False)
    return TransitionMatrix(value, from_time, to_time, "integrated", tol, system)


def cocycle_residual(system: SystemLike, t: float, u: float, s: float,
                     tol: float = 1e-10,
                     kind: "NormKind | str" = NormKind.SPECTRAL) -> float:
    """|| X(t,u) X(u,s) - X(t,s) || for the composition property."""
    kind = _norm_kind(kind)
    outer = integrate_transition(system, u, t, tol).value
    inner = integrate_transition(system, s, u, tol).value
    direct = integrate_transition(system, s, t, tol).value
    return matrix_norm(outer @ inner - direct, kind)


def liouville_residual(system: SystemLike, from_time: float, to_time: float,
                       tol: float = 1e-10) -> float:
    """| det X(to,from) - exp(integral of trace A) |, sharing the controller."""
    tol = _check_tol(tol)
    transition = integrate_transition(system, from_time, to_time, tol)
    determinant = float(np.linalg.det(transition.value))

    def trace_rate(u: float, y: np.ndarray) -> np.ndarray:
        return np.array([[float(np.trace(system.matrix(u)))]])

    integral = _integrate(trace_rate, float(from_time), float(to_time),
                          np.zeros((1, 1)), tol)[0, 0]
    return abs(determinant - math.exp(integral))


def growth_bound_check(system: SystemLike, horizon: float, samples: int = 40,
                       tol: float = 1e-10,
                       kind: "NormKind | str" = NormKind.SPECTRAL,
                       window: tuple[float, float] = (-50.0, 50.0),
                       grid_points: int = 2001,
                       slack: float = 1e-6) -> CheckReport:
    """Check max(||X(t,0)||, ||X(-t,0)||) <= exp(t * a(A)) * (1 + slack) on a
    sample of t in (0, horizon], with a(A) the grid supremum of ||A||."""
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    kind = _norm_kind(kind)
    bound = system_sup_norm(system, window, grid_points, kind)
    worst = -math.inf
    for k in range(1, samples + 1):
        t = horizon * k / samples
        forward = matrix_norm(integrate_transition(system, 0.0, t, tol).value, kind)
        backward = matrix_norm(integrate_transition(system, 0.0, -t, tol).value, kind)
        # compare in log space so large exponents cannot overflow
        excess = math.exp(math.log(max(forward, backward)) - t * bound) - 1.0
        worst = max(worst, excess)
    return CheckReport(
        name="growth_bound",
        value=worst,
        tolerance=slack,
        passed=worst <= slack,
        note=(f"coefficient bound a(A)={bound:.6g} on window "
              f"[{window[0]:g}, {window[1]:g}] with {grid_points} grid points"),
    )


def family_axioms_check(system: SystemLike, m_max: int, tol: float = 1e-6,
                        kind: "NormKind | str" = NormKind.SPECTRAL,
                        window: tuple[float, float] = (-50.0, 50.0),
                        grid_points: int = 2001, shift_tol: float = 1e-6,
                        integration_tol: float = 1e-10) -> list[CheckReport]:
    """Family-structure checks for the unit-step operators of a system.

    Three checks: the m-step transition factors into the ordered product of
    unit-step transitions (within ``tol``); the m-step transition and its
    reverse both stay below exp(m * a(A)) with slack 1e-6; and the coefficient
    bound is invariant under integer time shifts (within ``shift_tol``, a grid
    comparison).
    """
    if not 1 <= m_max <= 64:
        raise ValueError(f"m_max must lie in 1..64, got {m_max}")
    kind = _norm_kind(kind)
    bound = system_sup_norm(system, window, grid_points, kind)

    worst_factorization = 0.0
    worst_excess = -math.inf
    product = np.eye(system.dimension)
    for m in range(1, m_max + 1):
        step = integrate_transition(system, m - 1.0, float(m), integration_tol).value
        product = step @ product
        direct = integrate_transition(system, 0.0, float(m), integration_tol).value
        reverse = integrate_transition(system, float(m), 0.0, integration_tol).value
        worst_factorization = max(worst_factorization,
                                  matrix_norm(product - direct, kind))
        largest = max(matrix_norm(direct, kind), matrix_norm(reverse, kind))
        worst_excess = max(worst_excess,
                           math.exp(math.log(largest) - m * bound) - 1.0)

    worst_shift = 0.0
    for m in range(1, m_max + 1):
        shifted_bound = system_sup_norm(shift(system, float(m)), window,
                                        grid_points, kind)
        worst_shift = max(worst_shift, abs(shifted_bound - bound))

    note = (f"coefficient bound a(A)={bound:.6g} on window [{window[0]:g}, "
            f"{window[1]:g}] with {grid_points} grid points; m=1..{m_max}")
    return [
        CheckReport("one_step_factorization", worst_factorization, tol,
                    worst_factorization <= tol, note),
        CheckReport("two_sided_growth", worst_excess, 1e-6,
                    worst_excess <= 1e-6, note),
        CheckReport("shift_invariance", worst_shift, shift_tol,
                    worst_shift <= shift_tol, note),
    ]
