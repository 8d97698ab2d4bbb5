"""Pseudo-spectral simulation and verification of nonlocal wave breaking.

The model is u_t + alpha*u*u_x + beta*u_xxx + nu*(dissipative +
dispersive half-derivative) = 0 on a periodic interval.  The package
provides an exact spectral core, calibrated singular-integral operators,
an ETDRK4 integrator with breaking detection, Lagrangian slope tracking,
and exact-arithmetic certificates for the hypotheses and conclusion of
the wave-breaking theorem.
"""

from .certificates import (ANALYTIC_KERNEL_CONSTANT, EPSILON_MAX,
                           KPHI_CONSTANT, AnalyticProfile, BoundSample,
                           BreakingBracket, ConditionRecord, HypothesisParams,
                           HypothesisReport, PROFILES, ScaledFamily,
                           StirlingReport, blowup_bracket, check_hypotheses,
                           g5_monitor, kphi_bound_check, riccati_residual,
                           verify_stirling_lemma)
from .characteristics import (CharacteristicBundle, SigmaSet, SlopeTracker,
                              advance, min_slope, nesting_violations, seed,
                              sigma_members, track)
from .errors import (CalibrationError, ConfigurationError,
                     CorruptedSpectrumError, DomainError, InvalidFieldError,
                     KmwaveError, QuadratureFailureError)
from .evolution import (ETDRK4, BreakingReport, EquationSpec, MonitorSet,
                        SolverState, StepControl, Trajectory, choose_dt,
                        detect_breaking, integrate, linear_exact, step)
from .grid import (GridField, Spectrum, dealias, derivative,
                   field_from_function, frequencies, grid_nodes,
                   hermitian_defect, interpolate, inverse, l2_norm,
                   mode_numbers, sobolev_norm, spectral_tail_fraction,
                   transform)
from .operators import (Calibration, DEFAULT_CALIBRATION_GRID, KernelKind,
                        MultiplierOp, apply, calibrate, combined_op,
                        default_calibration, hilbert_lambda_half_op,
                        lambda_half_op, pv_quadrature)
from .runner import (RunArtifacts, ScenarioConfig, emit_plot, parse_config,
                     run_scenario, sweep, write_csv)

__version__ = "1.0.0"
