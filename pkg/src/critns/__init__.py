"""critns: pseudo-spectral toolkit for smallness certification and a priori
estimate monitoring of the 3D incompressible equations on the periodic box."""

from ._version import FORMAT_VERSION, __version__
from .spectral import (Grid, IncompatibleScaling, NegativeOrderOnMeanfulField,
                       SpectralScalarField, SpectralVectorField,
                       SymmetricTensorField, advective_terms, divergence,
                       forward_transform, fractional_laplacian, gradient,
                       heat_kernel_values, heat_semigroup, inverse_transform,
                       leray_project, nonlinear_term, rescale_field,
                       set_fft_workers, solenoidal_defect)
from .norms import (DyadicDecomposition, NormSeries, besov_0_3_2,
                    besov_m1_inf_2, besov_m1_inf_inf, geometric_grid, l2_norm,
                    lebesgue_norm, sobolev_norm, triple_bar_norm, w13_seminorm)
from .certifier import (CertificateReport, CertifierConfig, build_u0_source,
                        certify, cg_nonlinear_smallness, condition_lhs,
                        log_epsilon0, tstar_from)
from .gronwall import (GronwallProblem, GronwallSolution, beta_moment,
                       singular_convolution, solve_extremal, verify_lemma_bound)
from .solver import (BlowupOrInstability, SimulationConfig,
                     TrajectoryDiagnostics, h_half_at, monitor_bootstrap,
                     monitor_energy, monitor_h1_energy, monitor_prop31,
                     picard_mild, pigeonhole_scan, run_simulation,
                     split_linear, step_imex)
from .datagen import (DataFamilySpec, build_datum, oscillatory_profile,
                      random_solenoidal, shear_flow, stream_function_data,
                      taylor_green)

__all__ = [name for name in dir() if not name.startswith("_")]
