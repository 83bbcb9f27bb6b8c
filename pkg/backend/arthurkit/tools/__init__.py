"""
Rendering helpers that sit outside the engine.
"""

from .region_plotter import RegionPlotter

__all__ = ["RegionPlotter"]
