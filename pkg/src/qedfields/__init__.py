"""Numerical toolkit for tree-level electron scattering, the classical
potentials it implies, Aharonov-Bohm interference, and boosted field modes."""

from .amplitudes import (DEFAULT_COUPLING, Amplitude, ScatteringConfig, com_config, sigma,
                         sigma_nonrelativistic)
from .dirac import DiracSpinor, PolarizationPair, build_spinor, polarization_vectors
from .emergent import (ChargeSource, SourceEnsemble, eb_fields, gauss_flux, maxwell_residual,
                       potential_closed_form, potential_fourier_oracle)
from .errors import DomainError, PrecisionError, ResolutionError, SingularityError
from .interference import (DoubleSlitGeometry, IdealSolenoid, Path, SourceArraySolenoid,
                           interference_pattern, path_phase)
from .kinematics import BoostParameters, FourVector, boost, boost_z, on_shell
from .modes import FreeFieldMode, ModeComponent, boost_mode_set, phase_velocity, sample_field

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_COUPLING", "Amplitude", "ScatteringConfig", "com_config", "sigma",
    "sigma_nonrelativistic", "DiracSpinor", "PolarizationPair", "build_spinor",
    "polarization_vectors", "ChargeSource", "SourceEnsemble", "eb_fields", "gauss_flux",
    "maxwell_residual", "potential_closed_form", "potential_fourier_oracle", "DomainError",
    "PrecisionError", "ResolutionError", "SingularityError", "DoubleSlitGeometry",
    "IdealSolenoid", "Path", "SourceArraySolenoid", "interference_pattern", "path_phase",
    "BoostParameters", "FourVector", "boost", "boost_z", "on_shell", "FreeFieldMode",
    "ModeComponent", "boost_mode_set", "phase_velocity", "sample_field",
]
