"""
Quantum-classical fidelity of chaotic maps on the torus.

Quantized Sawtooth and perturbed cat maps, Wigner functions in the
continuous (Agam-Brenner) and discrete (Miquel) lattice formalisms, exact
Liouville pullback of Gaussian densities, and the quantum-classical
fidelity with its decay-time fits.
"""

__version__ = "0.1.0"

from .density import GaussianDensity, density_grid, density_pullback, grid_quadrature
from .fidelity import (DecayFit, EchoReport, FidelitySeries, FitUnavailable,
                       echoed_wigner, ensemble_average, fit_decay, fit_log_scaling,
                       loschmidt_echoes, qcf_continuous, qcf_discrete, qcf_ensemble)
from .kinematics import (Direction, HilbertSpec, QuantumState, coherent_state, dft,
                         overlap)
from .quantum_maps import QuantumMap, propagate, propagator_matrix
from .torus_dynamics import (ClassicalMap, MapKind, TorusPoint, lyapunov_numerical,
                             lyapunov_sawtooth_exact, map_forward, map_inverse,
                             tangent_matrix)
from .wigner import (Formalism, WignerGrid, negativity_fraction, point_operator_oracle,
                     random_wave_plateau, wigner, wigner_continuous, wigner_discrete)

__all__ = [
    "__version__",
    "ClassicalMap", "MapKind", "TorusPoint", "map_forward", "map_inverse",
    "tangent_matrix", "lyapunov_numerical", "lyapunov_sawtooth_exact",
    "HilbertSpec", "QuantumState", "Direction", "dft", "coherent_state", "overlap",
    "QuantumMap", "propagate", "propagator_matrix",
    "Formalism", "WignerGrid", "wigner", "wigner_continuous", "wigner_discrete",
    "point_operator_oracle", "negativity_fraction", "random_wave_plateau",
    "GaussianDensity", "density_pullback", "density_grid", "grid_quadrature",
    "FidelitySeries", "DecayFit", "EchoReport", "FitUnavailable", "qcf_continuous",
    "qcf_discrete", "qcf_ensemble", "ensemble_average", "echoed_wigner",
    "loschmidt_echoes", "fit_decay", "fit_log_scaling",
]
