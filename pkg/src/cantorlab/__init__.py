"""Constructive tools around the uniqueness of trigonometric expansions."""

from .creals import CReal, Interval, PI, from_rational, q
from .trigseries import PiScaled, TrigSeries

__all__ = ["CReal", "Interval", "PI", "PiScaled", "TrigSeries", "from_rational", "q"]
