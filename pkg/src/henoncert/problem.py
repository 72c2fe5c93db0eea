"""Problem description for the Henon Dirichlet problem on the unit box."""

from __future__ import annotations

from dataclasses import dataclass, field


class InvalidProblem(ValueError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    """One instance of -Lap(u) = |x - x0|^l |u|^(p-1) u on (0,1)^N, u = 0 on
    the boundary.

    The weight center x0 is pinned to the center of the box.  The rigorous
    certification path requires the weight and nonlinearity to be polynomial,
    i.e. l an even integer and p an odd integer >= 3; the approximate solver
    accepts any l >= 0, p >= 2.
    """

    N: int
    l: float
    p: float
    x0: tuple = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.N not in (1, 2):
            raise InvalidProblem(f"N must be 1 or 2, got {self.N}")
        if self.l < 0:
            raise InvalidProblem("weight exponent l must be >= 0")
        if self.p < 2:
            raise InvalidProblem("nonlinearity index p must be >= 2")
        center = tuple([0.5] * self.N)
        if self.x0 is None:
            object.__setattr__(self, "x0", center)
        elif tuple(self.x0) != center:
            raise InvalidProblem("weight center is fixed at the box center")

    @property
    def domain(self) -> tuple:
        return tuple([(0.0, 1.0)] * self.N)

    @property
    def l_is_even_int(self) -> bool:
        return float(self.l).is_integer() and int(self.l) % 2 == 0

    @property
    def p_is_odd_int(self) -> bool:
        return float(self.p).is_integer() and int(self.p) % 2 == 1 and self.p >= 3

    @property
    def verified_eligible(self) -> bool:
        return self.l_is_even_int and self.p_is_odd_int
