"""Discrete Schrodinger and Klein-Gordon waves on periodic lattices.

Spectral solvers with exact subflows, symplectic wave integration, Fourier
multiplier kernels, and quantitative growth/blow-up diagnostics, plus a CLI
(`latwave`) for reproducible experiment campaigns.
"""

__version__ = "0.1.0"

from .lattice import (INF, Field, LatticeSpec, RealField, as_complex,
                      constant_field, delta_field, dft, gaussian_field, idft,
                      inner, lp_norm, plancherel_defect, random_field,
                      random_real_field, real_delta_field)
from .spectral import (KernelCoefficients, MultiplierSymbol, bessel_power,
                       bessel_symbol_function, convolve_kernel,
                       discrete_laplacian, kernel_l1_norm, kernel_tail_fraction,
                       kernel_truncation_warning, kg_propagator,
                       laplacian_symbol, multiplier_kernel,
                       schrodinger_propagator)
from .potentials import (PotentialSpec, constant_potential, generate,
                         validate_blowup_assumption, validate_kg_defocusing,
                         zero_potential)
from .dnls import (ContractionWindowError, DnlsParams, DnlsRun, DnlsState,
                   apriori_envelope, conjectured_envelope, contraction_window,
                   diagnostics_from_samples, picard_chain, picard_solve,
                   pointwise_phase_flow, run_dnls, strang_step)
from .dkg import (ConfigurationError, KgParams, KgState, PsiState,
                  blowup_functional, blowup_monitor, decomposition_experiment,
                  energy, linear_kg_solve, negative_energy_seed,
                  pointwise_blowup_criterion, psi_inverse, psi_transform,
                  run_kg, run_kg_blowup, stable_tau_max, verlet_step)
from .reports import (BlowupReport, BoundReport, ModifiedEnergyReport,
                      dump_json, dump_reports)
from .config import (ConfigError, GrowthSweepConfig, KernelSweepConfig,
                     RunConfig, load_config, load_document, parse_config,
                     parse_growth_sweep, parse_kernel_sweep, parse_potential)
from .experiments import (blowup_campaign, growth_sweep, kernel_sweep,
                          load_field, run, save_field)
