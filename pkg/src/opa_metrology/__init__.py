"""Loss-tolerant multi-phase estimation with parametrically amplified Gaussian entangled states."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
