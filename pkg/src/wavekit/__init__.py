"""Bessel-function machinery for the Cauchy problem of the wave equation."""
from wavekit._backend import NAME as backend

__version__ = "0.1.0"
__all__ = ["backend", "__version__"]
