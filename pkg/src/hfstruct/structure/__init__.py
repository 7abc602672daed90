"""Structure of the Hartree-Fock critical set at a solution."""

from .checks import (BoundsReport, GradientReport, RescalingResult, SingularGramError,
                     bounds_check, gradient_check, koopmans_check, koopmans_residuals,
                     lagrangian_extended, random_direction, rescaling_construction)
from .decomposition import (LMDecomposition, SplitPreconditionError, default_split,
                            lm_decomposition, pair_positivity_samples, rq_positivity_samples)
from .jacobian import (RealJacobian, coupling_columns, directional_errors,
                       finite_difference_jacobian, jacobian, orbital_components,
                       residual_extended, residual_vector)
from .kernel import (AmbiguousRank, ContinuationOutcome, CorrectorDiverged, KernelBasis,
                     ManifoldReport, ProbePreconditionError, StepCollapsed, StepResult,
                     continue_path, continue_step, kernel_basis, manifold_probe)
from .realify import (SQRT2, derealify, global_phase_tangent, orbit_sample, orbital_slice,
                      phase_tangent, realify, realify_operator)
