"""Large-N saddle points, spectral curves and the q-independence analysis."""

from .analysis import (Claim1Verdict, QIndependenceReport, SokhotskiResult, claim1_report,
                       density_sup_distance, gaussian_bump, q_independence_test, sokhotski_check)
from .curve import SpectralCurveQ1, build_curve_q1, density_from_curve
from .saddle import (Density, EquilibriumConfig, TooftData, cut_endpoints, empirical_density,
                     extrapolated_endpoints, saddle_energy, saddle_solve, solve_rank_pair)

__all__ = [
    "Claim1Verdict", "Density", "EquilibriumConfig", "QIndependenceReport", "SokhotskiResult",
    "SpectralCurveQ1", "TooftData", "build_curve_q1", "claim1_report", "cut_endpoints",
    "density_from_curve", "density_sup_distance", "empirical_density", "extrapolated_endpoints",
    "gaussian_bump", "q_independence_test", "saddle_energy", "saddle_solve", "sokhotski_check",
    "solve_rank_pair",
]
