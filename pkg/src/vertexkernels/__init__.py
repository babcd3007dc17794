"""Exact Green functions, spectral densities and vacuum energy density of an
infinite star graph with a delta (Exner-Seba) vertex, with independent
numerical routes for checking every closed form."""

from .core import (ConditionKind, EdgePoint, Grid, StarGraphConfig, TabulatedSweep,
                   make_dirichlet_graph, make_graph)
from .errors import (AccuracyError, AccuracyWarning, ContractError, DomainError,
                     InternalConsistencyError, RangeError)
from .bondurant import EdgeVectorFunction, apply_T, apply_T_inverse
from .kernels import (ProblemKind, apply_kernel, cylinder_kernel, free_kernel, heat_kernel,
                      quantum_kernel, star_kernel, wave_kernel_row, wave_kernel_slice)
from .spectral import (global_density_from_local, global_density_regular,
                       local_spectral_density, scattering_eigenfunction,
                       scattering_reconstruction, spectral_projection_kernel,
                       staircase_increment)
from .vacuum import (Route, energy_density, energy_density_closed, energy_density_far,
                     energy_density_from_density, energy_density_near,
                     energy_density_numeric)
from .wavesolve import (InitialData, evolve_exact, evolve_fd_oracle, exact_snapshot,
                        field_energy, robin_energy, robin_energy_alt)

__version__ = "0.1.0"
