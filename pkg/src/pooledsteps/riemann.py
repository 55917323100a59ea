"""Exact solution of the classical two-state Riemann problem."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .exceptions import VacuumError
from .swe import GRAVITY, State, eigenvalues, flux, lax_curve, require_wet

SHOCK = "shock"
RAREFACTION = "rarefaction"
NONE = "contact-none"

_STRENGTH_TOL = 1e-12


@dataclass(frozen=True)
class Wave:
    """A single elementary wave; ``speed_range`` is ``(lo, hi)`` in x/t."""

    family: int
    kind: str
    left_state: State
    right_state: State
    speed_range: tuple[float, float]

    @property
    def is_trivial(self) -> bool:
        return self.kind == NONE


@dataclass(frozen=True)
class RiemannFan:
    left: State
    middle: State
    right: State
    wave1: Wave
    wave2: Wave


def make_wave(family: int, a: State, b: State, g: float = GRAVITY) -> Wave:
    """Classify the ``family`` wave joining ``a`` (left) to ``b`` (right).

    ``b`` must lie on the forward Lax curve of ``family`` through ``a``.
    """
    if abs(b.h - a.h) <= _STRENGTH_TOL * max(1.0, a.h):
        lam = eigenvalues(a, g)[family - 1]
        return Wave(family, NONE, a, b, (lam, lam))
    if family == 1:
        if b.h > a.h:
            s = a.v - math.sqrt(0.5 * g * b.h * (b.h + a.h) / a.h)
            return Wave(1, SHOCK, a, b, (s, s))
        return Wave(1, RAREFACTION, a, b, (eigenvalues(a, g)[0], eigenvalues(b, g)[0]))
    if a.h > b.h:
        s = b.v + math.sqrt(0.5 * g * a.h * (a.h + b.h) / b.h)
        return Wave(2, SHOCK, a, b, (s, s))
    return Wave(2, RAREFACTION, a, b, (eigenvalues(a, g)[1], eigenvalues(b, g)[1]))


def solve(left: State, right: State, g: float = GRAVITY) -> RiemannFan:
    """Lax solution: a 1-wave from ``left`` to the middle state, then a 2-wave.

    Raises
    ------
    VacuumError
        If the forward 1-curve and reversed 2-curve do not meet at h > 0.
    """
    require_wet(left)
    require_wet(right)
    if left == right:
        middle = left
    else:
        hm = _kernels.middle_depth(left.h, left.v, right.h, right.v, g)
        if hm <= 0.0:
            raise VacuumError(
                f"Riemann data {left} / {right} open a vacuum "
                f"(v_l + 2 sqrt(g h_l) <= v_r - 2 sqrt(g h_r))"
            )
        middle = State(hm, lax_curve(1, "forward", hm, left, g))
    return RiemannFan(
        left, middle, right, make_wave(1, left, middle, g), make_wave(2, middle, right, g)
    )


def _inside_rarefaction(wave: Wave, xi: float, g: float) -> State:
    if wave.family == 1:
        a = wave.left_state
        c = (a.v + 2.0 * math.sqrt(g * a.h) - xi) / 3.0
        return State(c * c / g, xi + c)
    b = wave.right_state
    c = (xi - b.v + 2.0 * math.sqrt(g * b.h)) / 3.0
    return State(c * c / g, xi - c)


def sample_wave(wave: Wave, xi: float, g: float = GRAVITY):
    """State inside ``wave`` at ``xi``; ``None`` when ``xi`` lies outside it."""
    lo, hi = wave.speed_range
    if wave.kind == RAREFACTION and lo < xi < hi:
        return _inside_rarefaction(wave, xi, g)
    return None


def sample(fan: RiemannFan, xi: float, g: float = GRAVITY) -> State:
    """Self-similar solution at ``xi = x / t``.

    At a shock location the downstream (right-hand) state is returned.
    """
    lo1, hi1 = fan.wave1.speed_range
    if xi < lo1 or (xi == lo1 and fan.wave1.kind == RAREFACTION):
        return fan.left
    if xi < hi1:
        return sample_wave(fan.wave1, xi, g) or fan.middle
    lo2, hi2 = fan.wave2.speed_range
    if xi < lo2 or (xi == lo2 and fan.wave2.kind == RAREFACTION):
        return fan.middle
    if xi < hi2:
        return sample_wave(fan.wave2, xi, g) or fan.right
    return fan.right


def godunov_flux(left: State, right: State, g: float = GRAVITY) -> tuple[float, float]:
    """Flux of the exact Riemann solution evaluated at x/t = 0."""
    require_wet(left)
    require_wet(right)
    if left == right:
        return flux(left, g)
    m, p, ok = _kernels.godunov_flux(left.h, left.q, right.h, right.q, g)
    if not ok:
        raise VacuumError(f"Riemann data {left} / {right} open a vacuum")
    return m, p
