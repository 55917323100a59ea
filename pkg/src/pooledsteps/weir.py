"""Weir coupling: the 3/2 overflow law, region classification, the map that
pairs coupled left/right traces, and the exact Riemann solver at a weir.

Trace states are written ``(k*, w*)`` on the left of the weir and ``(k, w)``
on the right.  ``H_minus``/``H_plus`` are the crest heights measured from the
bottoms of the left/right canals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import DomainError, NumericalFailure
from .riemann import RAREFACTION, Wave, make_wave, sample_wave
from .swe import (
    GRAVITY,
    State,
    check_gravity,
    is_subsonic,
    lax_curve,
    lax_curve_slope,
    require_wet,
)

GAMMA_RTOL = 1e-9
ROOT_RTOL = 1e-12
_MAX_EXPAND = 200


@dataclass(frozen=True)
class WeirGeometry:
    """Crest heights above the adjacent canal bottoms and the overflow
    coefficient ``C = c_tilde * sqrt(g)``."""

    H_minus: float
    H_plus: float
    c_tilde: float = 0.6
    g: float = GRAVITY

    def __post_init__(self):
        if not (self.H_minus >= 0.0 and self.H_plus >= 0.0):
            raise DomainError(f"crest heights must be >= 0, got {self.H_minus}, {self.H_plus}")
        if not 0.0 < self.c_tilde <= 1.0:
            raise DomainError(f"c_tilde must lie in (0, 1], got {self.c_tilde}")
        check_gravity(self.g)

    @property
    def C(self) -> float:
        return self.c_tilde * math.sqrt(self.g)

    def mirrored(self) -> "WeirGeometry":
        return WeirGeometry(self.H_plus, self.H_minus, self.c_tilde, self.g)


class RegionLabel(enum.Enum):
    OMEGA_U = "Omega_u"
    SIGMA_L = "Sigma_l"
    A_MINUS = "A_minus"
    B_MINUS = "B_minus"
    GAMMA_U = "Gamma_u"
    OMEGA_L = "Omega_l"
    SIGMA_U = "Sigma_u"
    A_PLUS = "A_plus"
    B_PLUS = "B_plus"
    GAMMA_L = "Gamma_l"

    def __str__(self):
        return self.value


LEFT_LABELS = frozenset(
    {RegionLabel.OMEGA_U, RegionLabel.SIGMA_L, RegionLabel.A_MINUS, RegionLabel.B_MINUS, RegionLabel.GAMMA_U}
)
RIGHT_LABELS = frozenset(
    {RegionLabel.OMEGA_L, RegionLabel.SIGMA_U, RegionLabel.A_PLUS, RegionLabel.B_PLUS, RegionLabel.GAMMA_L}
)


class FlowDirection(enum.Enum):
    NONE = "none"
    LEFT_TO_RIGHT = "left_to_right"
    RIGHT_TO_LEFT = "right_to_left"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class WeirTraces:
    """One-sided limits at the weir.  ``mass_flux`` is the single discharge
    shared by both sides, so the two canals exchange exactly the same volume."""

    left_trace: State
    right_trace: State
    mass_flux: float

    def left_flux(self, g: float = GRAVITY) -> tuple[float, float]:
        k = self.left_trace.h
        return self.mass_flux, self.mass_flux * self.mass_flux / k + 0.5 * g * k * k

    def right_flux(self, g: float = GRAVITY) -> tuple[float, float]:
        k = self.right_trace.h
        return self.mass_flux, self.mass_flux * self.mass_flux / k + 0.5 * g * k * k


@dataclass(frozen=True)
class WeirRiemannSolution:
    """Self-similar solution of a Riemann problem centred on a weir.

    ``left_wave`` is the 1-wave joining the left datum to the left trace
    (non-positive speeds); ``right_wave`` is the 2-wave joining the right trace
    to the right datum (non-negative speeds).
    """

    left: State
    right: State
    traces: WeirTraces
    left_wave: Wave
    right_wave: Wave
    geometry: WeirGeometry

    def sample(self, xi: float) -> State:
        """State at ``xi = x / t``; ``xi = 0`` returns the right trace."""
        g = self.geometry.g
        if xi < 0.0:
            lo, hi = self.left_wave.speed_range
            if xi < lo or (xi == lo and self.left_wave.kind == RAREFACTION):
                return self.left
            if xi < hi:
                return sample_wave(self.left_wave, xi, g) or self.traces.left_trace
            return self.traces.left_trace
        lo, hi = self.right_wave.speed_range
        if xi < lo or (xi == lo and self.right_wave.kind == RAREFACTION):
            return self.traces.right_trace
        if xi < hi:
            return sample_wave(self.right_wave, xi, g) or self.right
        return self.right


def _overflow(d: float, C: float) -> float:
    return math.copysign(C * abs(d) ** 1.5, d)


def coupling_residual(left: State, right: State, w: WeirGeometry) -> tuple[float, float]:
    """Residuals of the coupling conditions for a candidate trace pair.

    ``r1 = h-v- - C sign(D) |D|^{3/2}`` with
    ``D = [h- - H-]_+ - [h+ - H+]_+`` and ``r2 = h+v+ - h-v-``.
    """
    require_wet(left)
    require_wet(right)
    d = max(left.h - w.H_minus, 0.0) - max(right.h - w.H_plus, 0.0)
    return left.q - _overflow(d, w.C), right.q - left.q


def gamma_flux(h: float, H: float, w: WeirGeometry) -> float:
    """Critical overflow discharge ``C [h - H]_+^{3/2}``."""
    return w.C * max(h - H, 0.0) ** 1.5


def _on_gamma(q: float, target: float, h: float, w: WeirGeometry) -> bool:
    return abs(q - target) <= GAMMA_RTOL * max(1.0, w.C * h**1.5)


def classify(s: State, side: str, w: WeirGeometry) -> RegionLabel:
    """Region of the ``(h, hv)`` plane containing a trace candidate.

    States within round-off of the critical curve are labelled with the curve;
    this includes the rest states ``v = 0, h <= H``.
    """
    require_wet(s)
    h, q = s.h, s.q
    if side == "left":
        crit = gamma_flux(h, w.H_minus, w)
        if _on_gamma(q, crit, h, w):
            return RegionLabel.GAMMA_U
        if q > crit:
            return RegionLabel.OMEGA_U
        if q > 0.0:
            return RegionLabel.A_MINUS
        if h > w.H_minus:
            return RegionLabel.B_MINUS
        return RegionLabel.SIGMA_L
    if side == "right":
        crit = -gamma_flux(h, w.H_plus, w)
        if _on_gamma(q, crit, h, w):
            return RegionLabel.GAMMA_L
        if q < crit:
            return RegionLabel.OMEGA_L
        if q <= 0.0:
            return RegionLabel.B_PLUS
        if h > w.H_plus:
            return RegionLabel.A_PLUS
        return RegionLabel.SIGMA_U
    raise DomainError(f"side must be 'left' or 'right', got {side!r}")


def gamma_residual(s: State, side: str, w: WeirGeometry) -> float:
    """Signed distance in discharge from the critical curve of ``side``."""
    if side == "left":
        return s.q - gamma_flux(s.h, w.H_minus, w)
    return s.q + gamma_flux(s.h, w.H_plus, w)


def _phi_depth(h: float, q: float, w: WeirGeometry) -> float:
    # right depth coupled to the left point (h, q); valid below the Gamma_u curve
    return w.H_plus + max(h - w.H_minus, 0.0) - math.copysign((abs(q) / w.C) ** (2.0 / 3.0), q)


def phi(s: State, w: WeirGeometry) -> State:
    """Right trace coupled to the left trace ``s`` at equal discharge."""
    label = classify(s, "left", w)
    if label not in (RegionLabel.A_MINUS, RegionLabel.B_MINUS, RegionLabel.SIGMA_L):
        raise DomainError(f"left state {s} lies in {label}; no coupled right state with C < sqrt(g)")
    depth = _phi_depth(s.h, s.q, w)
    if depth <= 0.0:
        raise DomainError(f"coupled depth {depth} is not positive")
    return State.from_conservative(depth, s.q)


def flow_direction(left: State, right: State, w: WeirGeometry) -> FlowDirection:
    d = max(left.h - w.H_minus, 0.0) - max(right.h - w.H_plus, 0.0)
    if left.h <= w.H_minus and right.h <= w.H_plus or d == 0.0:
        return FlowDirection.NONE
    return FlowDirection.LEFT_TO_RIGHT if d > 0.0 else FlowDirection.RIGHT_TO_LEFT


def gamma_intersection(left: State, w: WeirGeometry) -> State:
    """Unique meeting point ``(h*, v*)`` of the forward 1-curve through
    ``left`` with the critical curve ``Gamma_u``.

    The velocity difference between the two curves is strictly decreasing in
    h, so a bracketing Newton/bisection hybrid is globally convergent.
    """
    require_wet(left)
    g, C, H = w.g, w.C, w.H_minus
    if left.v + 2.0 * math.sqrt(g * left.h) <= 0.0:
        raise DomainError(f"forward 1-curve through {left} never reaches positive velocity")

    def f(h):
        return lax_curve(1, "forward", h, left, g) - C * max(h - H, 0.0) ** 1.5 / h

    def df(h):
        dv = lax_curve_slope(1, "forward", h, left, g)
        if h > H:
            dv -= C * math.sqrt(h - H) * (0.5 * h + H) / (h * h)
        return dv

    lo, hi = 0.0, 10.0 * max(left.h, H, 1e-3)
    for _ in range(_MAX_EXPAND):
        if f(hi) < 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalFailure(f"could not bracket the Gamma_u intersection for {left}")
    h = left.h if lo < left.h < hi else 0.5 * (lo + hi)
    for _ in range(300):
        fh = f(h)
        if fh == 0.0:
            break
        if fh > 0.0:
            lo = h
        else:
            hi = h
        hn = h - fh / df(h)
        if not lo < hn < hi:
            hn = 0.5 * (lo + hi)
        converged = abs(hn - h) <= ROOT_RTOL * max(1.0, h)
        h = hn
        if converged:
            break
    else:
        raise NumericalFailure(f"Gamma_u intersection did not converge for {left}")
    # Newton polish; the bracket test above may stop on a bisection step
    for _ in range(3):
        fh = f(h)
        if fh == 0.0:
            break
        hn = h - fh / df(h)
        if not (hn > 0.0 and abs(f(hn)) < abs(fh)):
            break
        h = hn
    return State(h, lax_curve(1, "forward", h, left, g))


def connect_curve(h: float, left: State, w: WeirGeometry, h_star: float, v_star: float) -> tuple[float, float]:
    """Right-side ``(depth, discharge)`` reachable from the left datum, as a
    function of the left parameter depth ``h``.

    For ``h <= h_star`` the left trace is pinned at the critical point and the
    right depth sweeps ``(0, H_plus]``; beyond it the left trace follows the
    1-curve and the right trace is its coupled image.
    """
    if h <= h_star:
        return w.H_plus / h_star * h, h_star * v_star
    q = h * lax_curve(1, "forward", h, left, w.g)
    return _phi_depth(h, q, w), q


def _bisect(func, lo, hi, what):
    flo = func(lo)
    if flo == 0.0:
        return lo
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= ROOT_RTOL * max(1.0, mid):
            return mid
        fm = func(mid)
        if fm == 0.0:
            return mid
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    raise NumericalFailure(f"bisection for {what} did not converge")


def _expand_upper(func, lo, hi, what):
    # grow hi until func(hi) < 0
    for _ in range(_MAX_EXPAND):
        if func(hi) < 0.0:
            return hi
        lo, hi = hi, 2.0 * hi
    raise NumericalFailure(f"could not bracket {what}")


def construct_traces(left: State, right: State, w: WeirGeometry) -> WeirTraces:
    """Trace pair of the weir Riemann problem by curve intersection.

    Works whenever the 1-wave through ``left`` can move left and the 2-wave
    through ``right`` can move right; :func:`solve_weir_riemann` adds the
    subsonic precondition.
    """
    require_wet(left)
    require_wet(right)
    g = w.g
    star = gamma_intersection(left, w)
    hs, vs = star.h, star.v

    cb = (2.0 * math.sqrt(g * right.h) - right.v) / 3.0
    k_sonic = max(cb * cb / g if cb > 0.0 else 0.0, 1e-12 * right.h)

    def depth(h):
        return connect_curve(h, left, w, hs, vs)[0]

    def mismatch(h):
        d, q = connect_curve(h, left, w, hs, vs)
        return q - d * lax_curve(2, "reversed", d, right, g)

    if w.H_plus > 0.0 and k_sonic <= w.H_plus:
        lo = k_sonic * hs / w.H_plus
    else:
        top = _expand_upper(lambda h: k_sonic - depth(h), hs, 2.0 * hs, "the sonic right depth")
        lo = _bisect(lambda h: k_sonic - depth(h), hs, top, "the sonic right depth")
    if mismatch(lo) < 0.0:
        raise NumericalFailure(
            f"no admissible right trace for {left} / {right}: the 2-wave cannot move right"
        )
    hi = _expand_upper(mismatch, lo, max(2.0 * lo, 10.0 * max(left.h, right.h, hs)), "the right trace")
    root = _bisect(mismatch, lo, hi, "the right trace")

    d, q = connect_curve(root, left, w, hs, vs)
    left_trace = star if root <= hs else State(root, q / root)
    # Near zero discharge the coupled depth is a 2/3 power of q and magnifies
    # round-off; the discharge along the 2-curve is monotone with slope
    # lambda_2 > 0 on this branch, so recover the right depth from it.
    def discharge_gap(k):
        return q - k * lax_curve(2, "reversed", k, right, g)

    top = _expand_upper(discharge_gap, k_sonic, max(2.0 * d, 2.0 * k_sonic), "the right trace depth")
    d = _bisect(discharge_gap, k_sonic, top, "the right trace depth")
    return WeirTraces(left_trace, State(d, q / d), q)


def solve_weir_riemann(left: State, right: State, w: WeirGeometry) -> WeirRiemannSolution:
    """Exact solution of the Riemann problem at a weir for subsonic data."""
    for name, s in (("left", left), ("right", right)):
        require_wet(s)
        if not is_subsonic(s, w.g):
            raise DomainError(f"{name} state {s} is not strictly subsonic")
    traces = construct_traces(left, right, w)
    return WeirRiemannSolution(
        left,
        right,
        traces,
        make_wave(1, left, traces.left_trace, w.g),
        make_wave(2, traces.right_trace, right, w.g),
        w,
    )
