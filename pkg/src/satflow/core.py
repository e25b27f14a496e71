"""Core types: time-varying linear systems, matrix norms, perturbation masks.

A system is anything exposing ``dimension`` and ``matrix(t) -> ndarray``;
``SystemSpec`` is the concrete entry-grid implementation, and companion-form
systems (the first-order reduction of an n-th order scalar equation) are built
with :func:`companion_system`.  Distances between systems and the uniform
coefficient bound are measured as grid suprema over an explicit window, which
is always disclosed alongside results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Protocol, Sequence, Union

import numpy as np

from .expr import CoefficientExpr, constant_expr

__all__ = [
    "Entry",
    "NormKind",
    "SystemLike",
    "SystemSpec",
    "PerturbationMask",
    "single_entry_mask",
    "last_row_mask",
    "zero_system",
    "constant_system",
    "companion_system",
    "matrix_norm",
    "mask_residual",
    "system_distance",
    "system_sup_norm",
]

Entry = Union[float, CoefficientExpr]


class NormKind(str, enum.Enum):
    """Matrix norm selector: spectral (largest singular value), Frobenius,
    or the operator infinity norm (max absolute row sum)."""

    SPECTRAL = "spectral"
    FROBENIUS = "frobenius"
    INFINITY = "inf"


def _norm_kind(kind: "NormKind | str") -> NormKind:
    if isinstance(kind, NormKind):
        return kind
    try:
        return NormKind(kind)
    except ValueError:
        raise ValueError(f"unknown norm kind {kind!r}; expected one of "
                         f"{[k.value for k in NormKind]}") from None


class SystemLike(Protocol):
    dimension: int

    def matrix(self, t: float) -> np.ndarray:  # pragma: no cover - protocol
        ...


@dataclass(frozen=True)
class SystemSpec:
    """A square time-varying system given by an entry grid.

    Each entry is a float constant or a CoefficientExpr.  ``kind`` tags the
    construction ("raw", "companion", "counterexample2d"); companion systems
    additionally carry the scalar-equation coefficients that generated them,
    ordered from the (n-1)-th derivative down to the 0-th.
    """

    dimension: int
    entries: tuple[tuple[Entry, ...], ...]
    kind: str = "raw"
    equation_coeffs: "tuple[Entry, ...] | None" = None

    def __post_init__(self):
        n = self.dimension
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError(f"entry grid must be {n}x{n}")

    def entry_value(self, i: int, j: int, t: float) -> float:
        entry = self.entries[i][j]
        if isinstance(entry, CoefficientExpr):
            return entry(t)
        return entry

    def matrix(self, t: float) -> np.ndarray:
        n = self.dimension
        out = np.empty((n, n), dtype=float)
        for i in range(n):
            row = self.entries[i]
            for j in range(n):
                entry = row[j]
                out[i, j] = entry(t) if isinstance(entry, CoefficientExpr) else entry
        return out


def zero_system(n: int) -> SystemSpec:
    entries = tuple(tuple(0.0 for _ in range(n)) for _ in range(n))
    return SystemSpec(n, entries)


def constant_system(matrix: Sequence[Sequence[float]]) -> SystemSpec:
    grid = tuple(tuple(float(x) for x in row) for row in matrix)
    return SystemSpec(len(grid), grid)


def companion_system(n: int, coefficients: Sequence[Entry],
                     kind: str = "companion") -> SystemSpec:
    """Companion system of y^(n) + c1*y^(n-1) + ... + cn*y = 0.

    The state is (y, y', ..., y^(n-1)): ones on the superdiagonal, and the
    last row holds (-cn, ..., -c1).  Constant coefficients may be passed as
    plain floats.
    """
    if n < 2:
        raise ValueError(f"companion order must be >= 2, got {n}")
    coefficients = tuple(coefficients)
    if len(coefficients) != n:
        raise ValueError(f"expected {n} coefficients, got {len(coefficients)}")
    rows = []
    for i in range(n - 1):
        rows.append(tuple(1.0 if j == i + 1 else 0.0 for j in range(n)))
    last = []
    for j in range(n):
        coefficient = coefficients[n - 1 - j]
        if isinstance(coefficient, CoefficientExpr):
            last.append(CoefficientExpr(f"-({coefficient.source_text})",
                                        _negated(coefficient)))
        else:
            last.append(-float(coefficient))
    rows.append(tuple(last))
    return SystemSpec(n, tuple(rows), kind=kind, equation_coeffs=coefficients)


def _negated(expression: CoefficientExpr):
    evaluator = expression.evaluator
    return lambda t: -evaluator(t)


@dataclass(frozen=True)
class PerturbationMask:
    """Entry mask naming where a perturbation is allowed to live.

    Variants: "single_entry" allows only the (n, n-1) entry (1-based), the
    coefficient slot of a companion system for y^(n) = a(t) y^(n-2); and
    "last_row" allows the whole last row.  The single-entry set is contained
    in the last-row set.
    """

    variant: str
    n: int

    def __post_init__(self):
        if self.variant not in ("single_entry", "last_row"):
            raise ValueError(f"unknown mask variant {self.variant!r}")
        if self.n < 2:
            raise ValueError(f"mask dimension must be >= 2, got {self.n}")

    def allows(self, i: int, j: int) -> bool:
        """Whether the 0-based entry (i, j) is inside the allowed set."""
        if self.variant == "single_entry":
            return i == self.n - 1 and j == self.n - 2
        return i == self.n - 1


def single_entry_mask(n: int) -> PerturbationMask:
    return PerturbationMask("single_entry", n)


def last_row_mask(n: int) -> PerturbationMask:
    return PerturbationMask("last_row", n)


# fixed constants of the deterministic spectral-norm iteration
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 60


def _spectral_norm_2x2(matrix: np.ndarray) -> float:
    # singular values from the Frobenius mass and the determinant
    mass = float((matrix * matrix).sum())
    determinant = float(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])
    discriminant = mass * mass - 4.0 * determinant * determinant
    if discriminant < 0.0:
        discriminant = 0.0
    return math.sqrt(0.5 * (mass + math.sqrt(discriminant)))


def _jacobi_max_eigenvalue(sym: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by cyclic Jacobi sweeps."""
    work = sym.copy()
    n = work.shape[0]
    scale = float(np.abs(work).max())
    if scale == 0.0:
        return 0.0
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(0.0, float((work * work).sum()
                                       - (np.diag(work) ** 2).sum())))
        if off <= _JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(work[p, q])
                if apq == 0.0:
                    continue
                diff = float(work[q, q] - work[p, p])
                if abs(diff) + 100.0 * abs(apq) == abs(diff):
                    tangent = apq / diff
                else:
                    theta = 0.5 * diff / apq
                    sign = 1.0 if theta >= 0.0 else -1.0
                    tangent = sign / (abs(theta)
                                      + math.sqrt(1.0 + theta * theta))
                cosine = 1.0 / math.sqrt(1.0 + tangent * tangent)
                sine = tangent * cosine
                rotation = np.array([[cosine, sine], [-sine, cosine]])
                pair = [p, q]
                work[pair, :] = rotation.T @ work[pair, :]
                work[:, pair] = work[:, pair] @ rotation
    return float(np.diag(work).max())


def matrix_norm(matrix: np.ndarray, kind: "NormKind | str" = NormKind.SPECTRAL) -> float:
    """Norm of a square matrix; raises on non-finite entries."""
    kind = _norm_kind(kind)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.isfinite(matrix).all():
        raise ValueError("matrix has non-finite entries")
    if kind is NormKind.FROBENIUS:
        return math.sqrt(float((matrix * matrix).sum()))
    if kind is NormKind.INFINITY:
        return float(np.abs(matrix).sum(axis=1).max())
    n = matrix.shape[0]
    if n == 1:
        return float(abs(matrix[0, 0]))
    if n == 2:
        return _spectral_norm_2x2(matrix)
    eigenvalue = _jacobi_max_eigenvalue(matrix.T @ matrix)
    return math.sqrt(max(eigenvalue, 0.0))


def mask_residual(matrix: np.ndarray, mask: PerturbationMask,
                  kind: "NormKind | str" = NormKind.SPECTRAL) -> float:
    """Norm of the matrix with every mask-allowed entry zeroed.

    Zero exactly when the matrix conforms to the mask; since the single-entry
    set is contained in the last-row set, the last-row residual never exceeds
    the single-entry residual.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = mask.n
    if matrix.shape != (n, n):
        raise ValueError(f"matrix shape {matrix.shape} does not match mask "
                         f"dimension {n}")
    stripped = matrix.copy()
    if mask.variant == "single_entry":
        stripped[n - 1, n - 2] = 0.0
    else:
        stripped[n - 1, :] = 0.0
    return matrix_norm(stripped, kind)


def _check_window(window: tuple[float, float], grid_points: int) -> tuple[float, float]:
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"window must satisfy lo < hi, got ({lo}, {hi})")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    return lo, hi


def system_distance(first: SystemLike, second: SystemLike,
                    window: tuple[float, float], grid_points: int = 1001,
                    kind: "NormKind | str" = NormKind.SPECTRAL) -> float:
    """Grid supremum over the window of ||first(t) - second(t)||.

    This under-approximates the true supremum; the window and grid size are
    part of any reported result.
    """
    if first.dimension != second.dimension:
        raise ValueError(f"dimension mismatch: {first.dimension} vs "
                         f"{second.dimension}")
    lo, hi = _check_window(window, grid_points)
    kind = _norm_kind(kind)
    worst = 0.0
    for t in np.linspace(lo, hi, grid_points):
        value = matrix_norm(first.matrix(t) - second.matrix(t), kind)
        if value > worst:
            worst = value
    return worst


def system_sup_norm(system: SystemLike, window: tuple[float, float],
                    grid_points: int = 1001,
                    kind: "NormKind | str" = NormKind.SPECTRAL) -> float:
    """Grid supremum over the window of ||A(t)|| (the uniform bound a(A))."""
    lo, hi = _check_window(window, grid_points)
    kind = _norm_kind(kind)
    worst = 0.0
    for t in np.linspace(lo, hi, grid_points):
        value = matrix_norm(system.matrix(t), kind)
        if value > worst:
            worst = value
    return worst
