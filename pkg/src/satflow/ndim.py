"""Lifting the planar witness into dimension n >= 3.

The n-dimensional system is the companion form of y^(n) = a(t) y^(n-2): ones
on the superdiagonal and a(t) in the last row's (n, n-1) slot (1-based).  Its
state splits into a chain part (the first n-2 derivatives) driven by a planar
part (the last two), so the coefficient matrix is block upper triangular and
the transition matrix inherits that shape: the lower-left block vanishes, the
chain diagonal block is the exact polynomial flow of the shift chain, and the
bottom-right 2x2 block is the planar witness transition.

A lifted perturbed step bumps only the bottom-right corner, exactly as in the
plane.  Because the perturbation lives entirely in the planar block and the
off-diagonal blocks are shared, both deviation products are block diagonal
and the n-dimensional saturation deficit (spectral) coincides with the planar
one -- ``deficit_transfer`` verifies that equality numerically.  Embedding
the recovered coefficient perturbation in the planar corner then shows the
mask residuals stay strictly positive in every dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (NormKind, SystemSpec, _norm_kind, companion_system,
                   last_row_mask, mask_residual, matrix_norm,
                   single_entry_mask)
from .counterexample import (PLANAR_COEFFICIENT_TEXT, closed_form_transition,
                             perturbation_scale, recover_perturbation)
from .expr import CoefficientExpr, negate_expr, parse_coefficient
from .flow import integrate_transition

__all__ = [
    "higher_order_system",
    "reduce_to_planar",
    "chain_block",
    "BlockResiduals",
    "block_structure_residual",
    "LiftedStep",
    "lift_step",
    "DeficitTransfer",
    "deficit_transfer",
    "LiftedMaskResiduals",
    "lifted_mask_violation",
]


def higher_order_system(n: int,
                        coefficient: "CoefficientExpr | None" = None
                        ) -> SystemSpec:
    """Companion system of y^(n) = c(t) y^(n-2) (witness coefficient if
    ``coefficient`` is omitted)."""
    if n < 2:
        raise ValueError(f"order must be >= 2, got {n}")
    if coefficient is None:
        coefficient = parse_coefficient(PLANAR_COEFFICIENT_TEXT)
    coefficients: list = [0.0] * n
    coefficients[1] = negate_expr(coefficient)
    return companion_system(n, coefficients)


def reduce_to_planar(system: SystemSpec) -> SystemSpec:
    """Extract the planar block of a companion system of y^(n) = c(t) y^(n-2).

    Validates the structure entry by entry (superdiagonal ones, the single
    coefficient slot in the last row, zeros elsewhere) and returns the
    two-dimensional system the last two state components satisfy on their own.
    """
    if not isinstance(system, SystemSpec):
        raise TypeError("reduce_to_planar needs an explicit entry grid")
    n = system.dimension
    for i in range(n):
        for j in range(n):
            entry = system.entries[i][j]
            if i == n - 1 and j == n - 2:
                continue
            expected = 1.0 if (i < n - 1 and j == i + 1) else 0.0
            if isinstance(entry, CoefficientExpr) or float(entry) != expected:
                raise ValueError(
                    f"entry ({i + 1},{j + 1}) breaks the single-coefficient "
                    f"companion structure")
    coefficient = system.entries[n - 1][n - 2]
    return SystemSpec(2, ((0.0, 1.0), (coefficient, 0.0)), kind="companion")


def chain_block(n: int, dt: float) -> np.ndarray:
    """Exact flow of the (n-2)-dimensional shift chain over a time dt:
    upper triangular with dt^(j-i)/(j-i)! at (i, j)."""
    if n < 3:
        raise ValueError(f"chain block needs dimension >= 3, got {n}")
    size = n - 2
    value = np.zeros((size, size))
    for i in range(size):
        for j in range(i, size):
            value[i, j] = dt ** (j - i) / math.factorial(j - i)
    return value


def _check_lift_dimension(n: int) -> int:
    if n < 3:
        raise ValueError(
            f"lift dimension must be >= 3 (use the planar routines for "
            f"n = 2), got {n}")
    return int(n)


@dataclass(frozen=True)
class BlockResiduals:
    """How far an integrated transition is from its forced block shape."""

    dimension: int
    from_time: float
    to_time: float
    lower_left: float
    chain: float
    planar_agreement: float


def _rectangular_norm(block: np.ndarray, kind: NormKind) -> float:
    """Norm of a rectangular block, via zero-padding to square (which leaves
    all three supported norms unchanged)."""
    rows, cols = block.shape
    size = max(rows, cols)
    padded = np.zeros((size, size))
    padded[:rows, :cols] = block
    return matrix_norm(padded, kind)


def _block_residuals(value: np.ndarray, n: int, from_time: float,
                     to_time: float, kind: NormKind) -> BlockResiduals:
    split = n - 2
    lower_left = _rectangular_norm(value[split:, :split], kind)
    chain = matrix_norm(value[:split, :split]
                        - chain_block(n, to_time - from_time), kind)
    planar = matrix_norm(value[split:, split:]
                         - closed_form_transition(from_time, to_time).value,
                         kind)
    return BlockResiduals(n, from_time, to_time, lower_left, chain, planar)


def block_structure_residual(n: int, from_time: float, to_time: float,
                             tol: float = 1e-10,
                             kind: "NormKind | str" = NormKind.SPECTRAL
                             ) -> BlockResiduals:
    """Integrate the n-dimensional witness transition and measure its
    lower-left block, its chain block against the exact polynomial flow, and
    its planar block against the planar closed form."""
    n = _check_lift_dimension(n)
    kind = _norm_kind(kind)
    from_time, to_time = float(from_time), float(to_time)
    value = integrate_transition(higher_order_system(n), from_time, to_time,
                                 tol).value
    return _block_residuals(value, n, from_time, to_time, kind)


@dataclass(frozen=True, eq=False)
class LiftedStep:
    """Step-m operator in dimension n, with its block diagnostics.

    ``unperturbed`` is the integrated transition with its (numerically tiny)
    lower-left block zeroed so the block algebra is exact; ``matrix`` adds
    the bottom-right bump; ``planar_block`` is the extracted 2x2 transition
    the deficit comparison runs against.
    """

    dimension: int
    step: int
    amplitude: float
    matrix: np.ndarray
    unperturbed: np.ndarray
    planar_block: np.ndarray
    lower_left_residual: float
    chain_residual: float
    planar_residual: float


def lift_step(n: int, m: int, r: float, tol: float = 1e-10,
              kind: "NormKind | str" = NormKind.SPECTRAL) -> LiftedStep:
    """Build the lifted perturbed step over [m-1, m] in dimension n."""
    n = _check_lift_dimension(n)
    kind = _norm_kind(kind)
    value = integrate_transition(higher_order_system(n), m - 1.0, float(m),
                                 tol).value
    blocks = _block_residuals(value, n, m - 1.0, float(m), kind)
    split = n - 2
    base = value.copy()
    base[split:, :split] = 0.0
    perturbed = base.copy()
    perturbed[n - 1, n - 1] += perturbation_scale(m, r)
    planar = base[split:, split:].copy()
    base.setflags(write=False)
    perturbed.setflags(write=False)
    planar.setflags(write=False)
    return LiftedStep(n, int(m), float(r), perturbed, base, planar,
                      blocks.lower_left, blocks.chain,
                      blocks.planar_agreement)


@dataclass(frozen=True)
class DeficitTransfer:
    """Lifted vs planar saturation deficit for one step."""

    dimension: int
    step: int
    amplitude: float
    lifted: float
    planar: float
    difference: float


def deficit_transfer(n: int, m: int, r: float, tol: float = 1e-10,
                     kind: "NormKind | str" = NormKind.SPECTRAL
                     ) -> DeficitTransfer:
    """Compare the n-dimensional deficit of the lifted step against the
    planar deficit computed from the same extracted block.

    Both deviations of the lifted step are block diagonal (the shared chain
    and coupling blocks cancel), so with the spectral norm the two deficits
    agree to rounding; the returned difference quantifies that.
    """
    kind = _norm_kind(kind)
    lifted = lift_step(n, m, r, tol, kind)
    identity = np.eye(n)
    big = (matrix_norm(lifted.matrix @ np.linalg.inv(lifted.unperturbed)
                       - identity, kind)
           + matrix_norm(lifted.unperturbed @ np.linalg.inv(lifted.matrix)
                         - identity, kind))

    planar_exact = lifted.planar_block
    planar_perturbed = planar_exact.copy()
    planar_perturbed[1, 1] += perturbation_scale(m, r)
    small_identity = np.eye(2)
    small = (matrix_norm(planar_perturbed @ np.linalg.inv(planar_exact)
                         - small_identity, kind)
             + matrix_norm(planar_exact @ np.linalg.inv(planar_perturbed)
                           - small_identity, kind))
    return DeficitTransfer(lifted.dimension, lifted.step, lifted.amplitude,
                           big, small, abs(big - small))


@dataclass(frozen=True, eq=False)
class LiftedMaskResiduals:
    """Mask residuals of the recovered perturbation embedded in dimension n.

    The planar perturbation occupies the bottom-right 2x2 corner (the rows
    of the two planar state components); both companion-mask residuals stay
    strictly positive whenever the amplitude is, in every dimension.
    """

    dimension: int
    step: int
    amplitude: float
    embedded: np.ndarray
    residual_single_entry: float
    residual_last_row: float


def lifted_mask_violation(n: int, m: int, r: float,
                          kind: "NormKind | str" = NormKind.FROBENIUS
                          ) -> LiftedMaskResiduals:
    """Embed the recovered coefficient perturbation for step m into
    dimension n and measure both companion-mask residuals."""
    n = _check_lift_dimension(n)
    kind = _norm_kind(kind)
    recovered = recover_perturbation(m, r, kind)
    embedded = np.zeros((n, n))
    embedded[n - 2:, n - 2:] = recovered.matrix
    embedded.setflags(write=False)
    return LiftedMaskResiduals(
        n, int(m), float(r), embedded,
        mask_residual(embedded, single_entry_mask(n), kind),
        mask_residual(embedded, last_row_mask(n), kind),
    )
