"""Artificial U(1) monopole on a sphere: potentials, Chern numbers, latitude
spectra, vortices and topology-induced ground-state degeneracy."""

from .errors import (AmbiguousWindingError, ConvergenceError, DomainError, MonopoleError,
                     RootBracketError, SectorMismatchError)
from .gauge_field import (GAUGE_OFF, GaugeProfile, HemisphereTag, LaserModePair,
                          beta_gamma_from_lasers, chern_analytic, chern_quadrature,
                          f_derivative, f_profile, gauge_a_phi, scalar_w,
                          scalar_w_from_definition)
from .latitude_spectrum import (LatitudeGrid, LatitudeMode, LatitudeOperator, Sector,
                                assemble, eigen_lowest, f_cap_profile, ground_energy,
                                legendre_reference, sector_make, solve_sector)
from .phase_analysis import (PhaseReport, SectorScanTable, classify_phase, order_parameter,
                             sector_scan)
from .tridiag import backend_name
from .vortex_analysis import (BlochPoint, SphereWavefunction, VortexRecord, bloch_to_vortex,
                              find_zeros, ground_pair, psi_evaluate, sector_state, superpose,
                              total_winding, vortex_to_bloch, winding_number)

__version__ = "0.1.0"
