"""Periodic re-allocation of a switched linear system.

Permutations are lists of 1-based images: ``[2, 3, 1]`` sends slot 1 to
slot 2, slot 2 to slot 3 and slot 3 to slot 1.
"""

from ._core import (
    CapExceeded,
    __version__,
    criterion,
    efficiency_ratios,
    han_system,
    light_profile,
    mu_bar,
    objective_J,
    objective_J_approx,
    solve,
    steady_state,
)

__all__ = [
    "CapExceeded",
    "__version__",
    "criterion",
    "efficiency_ratios",
    "han_system",
    "light_profile",
    "mu_bar",
    "objective_J",
    "objective_J_approx",
    "solve",
    "steady_state",
]
