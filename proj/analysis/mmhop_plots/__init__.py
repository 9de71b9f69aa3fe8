"""Offline charts from exported simulation runs."""
from .render import KINDS, PlotSpec, render
from .runs import PlotError

__all__ = ["KINDS", "PlotError", "PlotSpec", "render"]
