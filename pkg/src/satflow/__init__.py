"""Transition-matrix flows for linear time-varying ODE systems and a
constructive counterexample to saturation of the companion-form family.

The library computes state-transition (Cauchy) matrices with a closed-form
fast path for one distinguished planar system, perturbs its unit-step
operators by controllably small amounts, recovers the coefficient
perturbation implied by the perturbed steps, and quantifies how that
perturbation violates the companion-form sparsity masks — in floating point,
by high-precision differentiation, and in exact rational arithmetic.
"""

from .core import (Entry, NormKind, PerturbationMask, SystemLike, SystemSpec,
                   companion_system, constant_system, last_row_mask,
                   mask_residual, matrix_norm, single_entry_mask,
                   system_distance, system_sup_norm, zero_system)
from .counterexample import (PLANAR_COEFFICIENT_TEXT, RecoveredPerturbation,
                             StepDeviations, StepPolynomials,
                             closed_form_cocycle_residual,
                             closed_form_grid_residual,
                             closed_form_perturbation, closed_form_transition,
                             perturbation_scale, perturbed_step,
                             planar_coefficient, planar_system,
                             recover_perturbation, saturation_deficit,
                             select_amplitude, step_deviations,
                             step_polynomials)
from .exact import ExactIdentityReport, verify_exact_identities
from .expr import (CoefficientExpr, EvaluationError, ParseError,
                   constant_expr, negate_expr, parse_coefficient)
from .flow import (IntegrationError, ShiftedSystem, TransitionMatrix,
                   cocycle_residual, family_axioms_check, growth_bound_check,
                   integrate_transition, liouville_residual)
from .ndim import (BlockResiduals, DeficitTransfer, LiftedMaskResiduals,
                   LiftedStep, block_structure_residual, chain_block,
                   deficit_transfer, higher_order_system, lift_step,
                   lifted_mask_violation, reduce_to_planar)
from .reports import (CheckReport, RunReport, SCHEMA_VERSION, render_json,
                      write_csv)
from .satcheck import (InterpolatedCompanion, ScenarioReport, ScenarioRow,
                       StepSequence, WitnessVerdict, check_witness,
                       run_counterexample_scenario, sequence_deficit)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "CoefficientExpr",
    "Entry",
    "EvaluationError",
    "ExactIdentityReport",
    "IntegrationError",
    "InterpolatedCompanion",
    "NormKind",
    "PLANAR_COEFFICIENT_TEXT",
    "ParseError",
    "PerturbationMask",
    "BlockResiduals",
    "DeficitTransfer",
    "LiftedMaskResiduals",
    "LiftedStep",
    "RecoveredPerturbation",
    "RunReport",
    "SCHEMA_VERSION",
    "ScenarioReport",
    "ScenarioRow",
    "ShiftedSystem",
    "StepDeviations",
    "StepPolynomials",
    "StepSequence",
    "SystemLike",
    "SystemSpec",
    "TransitionMatrix",
    "WitnessVerdict",
    "block_structure_residual",
    "chain_block",
    "check_witness",
    "closed_form_cocycle_residual",
    "closed_form_grid_residual",
    "closed_form_perturbation",
    "closed_form_transition",
    "cocycle_residual",
    "companion_system",
    "constant_expr",
    "constant_system",
    "deficit_transfer",
    "family_axioms_check",
    "growth_bound_check",
    "higher_order_system",
    "integrate_transition",
    "last_row_mask",
    "lift_step",
    "lifted_mask_violation",
    "liouville_residual",
    "mask_residual",
    "matrix_norm",
    "negate_expr",
    "parse_coefficient",
    "perturbation_scale",
    "perturbed_step",
    "planar_coefficient",
    "planar_system",
    "recover_perturbation",
    "reduce_to_planar",
    "render_json",
    "run_counterexample_scenario",
    "saturation_deficit",
    "select_amplitude",
    "sequence_deficit",
    "single_entry_mask",
    "step_deviations",
    "step_polynomials",
    "system_distance",
    "system_sup_norm",
    "verify_exact_identities",
    "write_csv",
    "zero_system",
]
