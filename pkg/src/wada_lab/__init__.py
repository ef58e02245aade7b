"""Rotation numbers, climbing intervals and Wada-type attractors of circle and graph endomorphisms."""
from .circle_lift import ArnoldLift, Lift, LiftError, MonotoneLift, PlateauLift
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["ArnoldLift", "Lift", "LiftError", "MonotoneLift", "PlateauLift", "BACKEND"]
