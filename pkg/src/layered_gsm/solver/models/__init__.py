"""Record types shared across the solver.

This package contains the immutable data models that describe the spherical
wave basis, the layered medium, the antenna GSM and the integration contour.
"""

from .basis import Parity, Polarization, SvwfBasis, SvwfIndex
from .contour import ContourOrientation, ContourSpec
from .gsm_blocks import GsmBlocks
from .layer_stack import VACUUM, Layer, LayerStack, Termination

__all__ = [
    "VACUUM",
    "ContourOrientation",
    "ContourSpec",
    "GsmBlocks",
    "Layer",
    "LayerStack",
    "Parity",
    "Polarization",
    "SvwfBasis",
    "SvwfIndex",
    "Termination",
]
