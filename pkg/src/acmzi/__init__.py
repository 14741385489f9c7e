"""Phase-sensitivity modelling of an actively correlated Mach-Zehnder interferometer.

Closed-form input-output coefficients live in :mod:`acmzi.model`, a Gaussian
Bogoliubov network simulator in :mod:`acmzi.gaussian`, the detection
formulas and bounds in :mod:`acmzi.metrology`, phase/gain/loss-plane
optimization in :mod:`acmzi.optimize` and a small Fock-space oracle in
:mod:`acmzi.fock`.
"""

__version__ = "0.1.0"

from .metrology import Scheme, SensitivityReport, FisherReport  # noqa: E402
from .model import (LOSSLESS, CoefficientSet, InterferometerConfig, LossConfig,  # noqa: E402
                    coefficients_lossless, coefficients_lossy)

__all__ = ["__version__", "InterferometerConfig", "LossConfig", "LOSSLESS", "CoefficientSet",
           "coefficients_lossless", "coefficients_lossy", "Scheme", "SensitivityReport",
           "FisherReport"]
