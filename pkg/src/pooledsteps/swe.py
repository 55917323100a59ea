"""Shallow-water algebra: states, fluxes, characteristic speeds and Lax curves.

Depth ``h`` is measured from the local canal bottom and ``v`` is the
depth-averaged velocity (positive to the right).  Every operation here is a
pure function of its arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import DomainError, DryStateError

GRAVITY = 9.81
H_DRY = 1e-12
SONIC_RTOL = 1e-9


@dataclass(frozen=True)
class State:
    """Depth and velocity at a point; ``q`` is the discharge per unit width."""

    h: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.v)):
            raise DomainError(f"non-finite state ({self.h}, {self.v})")
        if self.h < 0.0:
            raise DomainError(f"negative depth {self.h}")

    @property
    def q(self) -> float:
        return self.h * self.v

    @classmethod
    def from_conservative(cls, h: float, q: float) -> "State":
        if h <= H_DRY:
            raise DryStateError(f"depth {h} is dry")
        return cls(float(h), float(q) / float(h))


class FlowRegime(enum.Enum):
    SUBSONIC_INTERIOR = "SubsonicInterior"
    SONIC_BOUNDARY = "SonicBoundary"
    SUPERSONIC_UPPER = "SupersonicUpper"
    SUPERSONIC_LOWER = "SupersonicLower"

    def __str__(self):
        return self.value


def require_wet(s: State) -> None:
    if s.h <= H_DRY:
        raise DryStateError(f"state has dry depth h={s.h}")


def check_gravity(g: float) -> float:
    if not g > 0.0:
        raise DomainError(f"gravity must be positive, got {g}")
    return g


def flux(s: State, g: float = GRAVITY) -> tuple[float, float]:
    """Physical flux ``(hv, hv^2 + g h^2 / 2)``."""
    require_wet(s)
    return s.h * s.v, s.h * s.v * s.v + 0.5 * g * s.h * s.h


def celerity(s: State, g: float = GRAVITY) -> float:
    return math.sqrt(g * s.h)


def eigenvalues(s: State, g: float = GRAVITY) -> tuple[float, float]:
    require_wet(s)
    c = math.sqrt(g * s.h)
    return s.v - c, s.v + c


def eigenvectors(s: State, g: float = GRAVITY):
    """Right eigenvectors in the ``(h, hv)`` variables, in the sign convention
    ``r1 = (-1, -v + c)``, ``r2 = (1, v + c)``."""
    require_wet(s)
    c = math.sqrt(g * s.h)
    return (-1.0, -s.v + c), (1.0, s.v + c)


def regime(s: State, g: float = GRAVITY) -> FlowRegime:
    require_wet(s)
    c = math.sqrt(g * s.h)
    if abs(abs(s.v) - c) <= SONIC_RTOL * max(1.0, c):
        return FlowRegime.SONIC_BOUNDARY
    if abs(s.v) < c:
        return FlowRegime.SUBSONIC_INTERIOR
    if s.v > 0.0:
        return FlowRegime.SUPERSONIC_UPPER
    return FlowRegime.SUPERSONIC_LOWER


def is_subsonic(s: State, g: float = GRAVITY) -> bool:
    return regime(s, g) is FlowRegime.SUBSONIC_INTERIOR


def _rarefaction_jump(h, h0, g):
    return 2.0 * (math.sqrt(g * h) - math.sqrt(g * h0))


def _shock_jump(h, h0, g):
    return (h - h0) * math.sqrt(0.5 * g * (h + h0) / (h * h0))


# (family, direction) -> (sign, branch test selecting the rarefaction formula)
_CURVES = {
    (1, "forward"): (-1.0, lambda h, h0: h <= h0),
    (2, "forward"): (1.0, lambda h, h0: h >= h0),
    (1, "reversed"): (-1.0, lambda h, h0: h >= h0),
    (2, "reversed"): (1.0, lambda h, h0: h <= h0),
}


def lax_curve(family: int, direction: str, h: float, anchor: State, g: float = GRAVITY) -> float:
    """Velocity on a Lax curve through ``anchor`` at depth ``h``.

    ``direction="forward"`` gives the states reachable to the right of the
    anchor by one wave of ``family``; ``"reversed"`` gives the states that can
    sit to the left of the anchor.
    """
    try:
        sign, use_rarefaction = _CURVES[(family, direction)]
    except KeyError:
        raise DomainError(f"unknown Lax curve ({family!r}, {direction!r})") from None
    if not h > 0.0:
        raise DomainError(f"Lax curve depth must be positive, got {h}")
    require_wet(anchor)
    h0, v0 = anchor.h, anchor.v
    if use_rarefaction(h, h0):
        return v0 + sign * _rarefaction_jump(h, h0, g)
    return v0 + sign * _shock_jump(h, h0, g)


def lax_curve_slope(family: int, direction: str, h: float, anchor: State, g: float = GRAVITY) -> float:
    """d v / d h along :func:`lax_curve`."""
    sign, use_rarefaction = _CURVES[(family, direction)]
    h0 = anchor.h
    if use_rarefaction(h, h0):
        return sign * math.sqrt(g / h)
    s = math.sqrt(0.5 * g * (h + h0) / (h * h0))
    return sign * (s - (h - h0) * g / (4.0 * h * h * s))
