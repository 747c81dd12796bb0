"""
Commands package initialization.
"""
from .core import register as register_core
from .spectral import register as register_spectral
from .resistance import register as register_resistance
from .dims import register as register_dims
from .walk import register as register_walk
from .perc import register as register_perc

__all__ = [
    "register_core",
    "register_spectral",
    "register_resistance",
    "register_dims",
    "register_walk",
    "register_perc",
]
