"""Rigorous existence certificates for the Henon equation on the unit box.

The package solves -Lap(u) = |x - x0|^l |u|^(p-1) u with zero Dirichlet data
on (0,1)^N (N = 1, 2) by a spectral Galerkin method and then certifies, via
the Newton-Kantorovich theorem with outward-rounded interval arithmetic, that
a true solution exists near the computed approximation and is locally unique.
"""

from .interval import Interval, iv_gamma, iv_powf, next_after_up

__all__ = [
    "Interval",
    "iv_gamma",
    "iv_powf",
    "next_after_up",
]
