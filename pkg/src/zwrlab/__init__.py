"""Zero-width resonances of a laser-dressed two-channel diatomic model.

Floquet resonances with Siegert boundary conditions, their zero-width paths in
the (intensity, wavelength) plane, a semiclassical interference predictor,
chirped filtration pulses and a split-operator wavepacket check.
"""

from .potentials import FieldPoint, ModelParameters, PotentialSet, analytic_model, default_model

__version__ = "0.1.0"

__all__ = ["FieldPoint", "ModelParameters", "PotentialSet", "analytic_model", "default_model",
           "__version__"]
