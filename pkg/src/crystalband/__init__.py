"""crystalband: spectra and dynamics of periodic graphs with summable weights.

Build a crystal (a Z^d-periodic weighted graph with a finite fundamental
cell, possibly with infinitely many neighbours per vertex), then sample its
band structure, probe its spectral type, evolve wave packets, measure
transport and resolvent decay — every infinite sum carries a certified tail.
"""

from .crystal import (BUILTIN_NAMES, ConnectivityReport, CrystalSpec,
                      ValidationReport, builtin, check_connected,
                      crystal_from_json, crystal_to_json, ensure_valid,
                      load_crystal, norm_bound, validate)
from .errors import (CrystalError, DivergentGradientEnergy, IntegrationFailure,
                     LoopViolation, NotAdmissible, PositivityViolation,
                     ResolutionExceeded, SpectrumProximity, SummabilityViolation,
                     SymmetryViolation)
from .evolve import (DispersionTrace, WaveField, closed_form_oracle,
                     dispersion_trace, power_dispersion_probe, propagate)
from .floquet import (BandGrid, BandReport, detect_flat_bands,
                      dirichlet_form_check, floquet_matrix, quotient_matrix,
                      sample_bands, top_band_flatness)
from .fractional import fractional_laplacian, heat_kernel_crosscheck
from .functions import (FloquetFunctionSpec, combine, fourier_coefficients,
                        from_floquet_function, named_function)
from .locality import (CommutatorReport, commutator_kernel_window,
                       finite_rank_error, hs_norm)
from .resolvent import DecayFit, GreenSamples, decay_fit, green
from .spectral import (ACVerdict, OccupationHistogram, RegularityProbe,
                       ac_criterion, occupation_density, regularity_probe)
from .transport import (TransportReport, analytic_ballistic_limit, layer_speed,
                        msd_series, superballistic_detector)
from .weights import DyadicTail, PowerTail, WeightFamily, dyadic_power_tail

__version__ = "0.1.0"
