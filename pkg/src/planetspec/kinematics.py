"""Conserved-quantity ray integrals in a layered radial profile.

Every ray with angular slowness (ray parameter) p >= 0 has the radial
slowness component

    beta(r, p) = sqrt(c(r)^-2 - p^2/r^2) = sqrt(xi(r) - p^2) / r,

with xi = (r/c)^2.  Along a single smooth leg inside one layer the
epicentral distance and travel time are

    alpha = int p / (r^2 beta) dr,      time = int 1 / (c^2 beta) dr,

both carrying an integrable 1/sqrt(r - R*) singularity at a turning
radius R* (where xi(R*) = p^2).  The substitution r = R* + u^2 removes it:
the transformed integrands extend continuously to u = 0 with value
2 F(R*) / sqrt(xi'(R*)) for an integrand F(r)/sqrt(xi - p^2).

For d(alpha)/dp on a turning leg, differentiating under the integral is not
allowed (the termwise derivative is non-integrable), so we first integrate
by parts,

    alpha_1(p) = 2 p sqrt(xi(r_hi) - p^2) / (r_hi xi'(r_hi))
                 + 2 p int_{R*}^{r_hi} sqrt(xi - p^2) W(r) dr,
    W = (xi' + r xi'') / (r xi')^2,

whose p-derivative has only an integrable singularity again.  The identity
is exact whenever xi' > 0 on the leg (the smooth monotone-slowness
condition); it reproduces d/dp arccos(p) = -1/sqrt(1-p^2) for c = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.optimize import brentq

LEG_TOL = 1e-10          # default absolute tolerance of single-leg integrals
GRAZE_TOL = 1e-9         # |rho - p| below this tags a grazing encounter
_TURN_REL = 1e-9         # xi(r_lo) - p^2 below this (relative) => turning leg

# per-interface regime verdicts
TRANSMITTING = "Transmitting"
TOTAL_INTERNAL_REFLECTION = "TotalInternalReflection"
GRAZING_TRANSMISSION = "GrazingTransmission"
TURNING_ABOVE = "TurningAbove"
TURNING_AT_INTERFACE = "TurningAtInterface"


class EvanescentIntervalError(ValueError):
    """A leg integral was requested across an evanescent (xi < p^2) region."""


class ItineraryError(ValueError):
    """A traced itinerary is inconsistent with the regime at an encounter."""


@dataclass(frozen=True)
class Evanescent:
    """Marker for beta^2 < 0; magnitude is the decay rate |beta|."""

    magnitude: float

    def __bool__(self):
        return False


def beta(profile, r, p, side="above"):
    """Radial slowness sqrt(c^-2 - p^2/r^2), or an Evanescent marker."""
    val = profile.xi(r, side) - p * p
    if val >= 0.0:
        return math.sqrt(val) / r
    return Evanescent(math.sqrt(-val) / r)


# ---------------------------------------------------------------------------
# turning radius and interface regimes
# ---------------------------------------------------------------------------

@dataclass
class TurningInfo:
    """Deepest point of a downward ray with parameter p.

    kind: "smooth" (xi = p^2 inside a layer), "interface" (total internal
    reflection or a grazing encounter at an interface), "inner_boundary",
    or "center" (p = 0 in a full ball).
    """

    radius: float
    kind: str
    layer: int
    grazing: bool = False
    grazing_side: str | None = None  # "above" (turning graze) / "below" (transmitted graze)

    @property
    def tag(self):
        if self.kind == "smooth":
            return TURNING_ABOVE
        if self.kind == "interface":
            if not self.grazing:
                return TOTAL_INTERNAL_REFLECTION
            return TURNING_AT_INTERFACE if self.grazing_side == "above" else GRAZING_TRANSMISSION
        return self.kind  # inner_boundary / center


def smooth_turning_radius(model, p, r_lo, r_hi):
    """Root of xi(r) = p^2 in [r_lo, r_hi] for one layer's model."""
    p2 = p * p
    f = lambda r: model.xi(r) - p2
    lo = max(r_lo, 1e-14)
    return brentq(f, lo, r_hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)


def turning_radius(profile, p, graze_tol=GRAZE_TOL):
    """Deepest radius reachable by a downward ray with parameter p.

    Walks layers from the surface down: the ray turns smoothly where
    xi(r) = p^2, totally reflects at an interface whose underside slowness
    is below p, or runs into the inner boundary/center.
    """
    rho_surface = profile.rho(1.0, side="above")
    if not 0.0 <= p < rho_surface:
        raise ValueError(f"p={p} outside [0, rho(1)) = [0, {rho_surface})")
    for k in range(1, profile.n_layers + 1):
        lo, hi = profile.layer_bounds(k)
        model = profile.layers[k - 1]
        if lo <= 0.0:
            # full ball: rho -> 0 at the center, so any p > 0 turns smoothly
            if p == 0.0:
                return TurningInfo(0.0, "center", k)
            return TurningInfo(smooth_turning_radius(model, p, lo, hi), "smooth", k)
        rho_above = lo / float(model.c(lo))  # slowness at the layer bottom, from above
        if p > rho_above + graze_tol:
            return TurningInfo(smooth_turning_radius(model, p, lo, hi), "smooth", k)
        if abs(p - rho_above) <= graze_tol:
            kind = "interface" if k < profile.n_layers else "inner_boundary"
            return TurningInfo(lo, kind, k, grazing=True, grazing_side="above")
        # ray reaches radius lo with beta > 0
        if k == profile.n_layers:
            return TurningInfo(lo, "inner_boundary", k)
        rho_below = lo / float(profile.layers[k].c(lo))
        if p > rho_below + graze_tol:
            return TurningInfo(lo, "interface", k)  # total internal reflection
        if abs(p - rho_below) <= graze_tol:
            return TurningInfo(lo, "interface", k, grazing=True, grazing_side="below")
        # transmits into layer k+1
    raise AssertionError("unreachable")


@dataclass
class RegimeClassification:
    p: float
    verdicts: list
    turning: TurningInfo


def classify_regimes(profile, p, graze_tol=GRAZE_TOL):
    """Per-interface verdict for ray parameter p, plus the global R*(p).

    The verdict at interface k compares p against the two one-sided
    slownesses rho(r_k^-), rho(r_k^+); the bracket between them is total
    internal reflection when the profile jumps the distributional way
    (rho_below < rho_above), and unreachable-from-above otherwise.
    """
    verdicts = []
    for j, rk in enumerate(profile.interfaces, start=1):
        rho_above = rk / float(profile.layers[j - 1].c(rk))
        rho_below = rk / float(profile.layers[j].c(rk))
        lo, hi = sorted((rho_below, rho_above))
        if abs(p - rho_below) <= graze_tol:
            verdicts.append(GRAZING_TRANSMISSION)
        elif abs(p - rho_above) <= graze_tol:
            verdicts.append(TURNING_AT_INTERFACE)
        elif p < lo:
            verdicts.append(TRANSMITTING)
        elif p < hi:
            verdicts.append(TOTAL_INTERNAL_REFLECTION if rho_below < rho_above
                            else TURNING_ABOVE)
        else:
            verdicts.append(TURNING_ABOVE)
    return RegimeClassification(p=p, verdicts=verdicts,
                                turning=turning_radius(profile, p, graze_tol))


# ---------------------------------------------------------------------------
# single-leg integrals
# ---------------------------------------------------------------------------

@dataclass
class LegIntegrals:
    alpha: float
    time: float
    layer: int
    r_lo: float
    r_hi: float
    p: float
    turning: bool = False


def _quad(f, a, b, tol):
    val, err = quad(f, a, b, epsabs=tol, epsrel=1e-13, limit=300)
    if err > 50 * max(tol, 1e-14) and err > 1e-10 * abs(val):
        raise RuntimeError(f"quadrature tolerance not achieved: err={err:.2e}")
    return val


def _turning_quad(F, model, p, r_star, r_hi, tol):
    """int_{r_star}^{r_hi} F(r)/sqrt(xi-p^2) dr with xi(r_star) = p^2."""
    p2 = p * p
    umax = math.sqrt(r_hi - r_star)
    dxi_s = float(model.dxi_dr(max(r_star, 1e-300)))
    d2xi_s = float(model.d2xi_dr2(max(r_star, 1e-300)))
    ucut = 1e-7 * max(1.0, umax)

    def H(u):
        r = r_star + u * u
        if u <= ucut:
            q = dxi_s + 0.5 * d2xi_s * u * u
        else:
            q = (float(model.xi(r)) - p2) / (u * u)
            if q <= 0.0:  # roundoff right at the turning point
                q = dxi_s
        return 2.0 * F(r) / math.sqrt(q)

    return _quad(H, 0.0, umax, tol)


def _regular_inverse_sqrt_quad(F, model, p, r_lo, r_hi, tol):
    """Same integral with xi(r_lo) > p^2 strictly; still done in u = sqrt(r-r_lo)
    so that a small starting margin only produces a bounded integrand."""
    p2 = p * p
    umax = math.sqrt(r_hi - r_lo)

    def H(u):
        r = r_lo + u * u
        return 2.0 * u * F(r) / math.sqrt(float(model.xi(r)) - p2)

    return _quad(H, 0.0, umax, tol)


def _check_not_evanescent(model, p, r_lo, r_hi, turning):
    p2 = p * p
    grid = np.linspace(r_lo, r_hi, 33)
    vals = np.asarray(model.xi(grid), float) - p2
    bad = vals < (-1e-12 if not turning else -1e-9 * max(p2, 1.0))
    if turning:
        bad[0] = False
    if np.any(bad):
        r_bad = grid[np.nonzero(bad)[0][0]]
        raise EvanescentIntervalError(
            f"xi(r) < p^2 at r={r_bad:.6g} inside leg [{r_lo}, {r_hi}] (p={p})")


def leg_integrals(profile, layer, r_lo, r_hi, p, tol=LEG_TOL):
    """Epicentral distance and travel time of one leg of layer `layer`.

    r_lo may equal the turning radius; the endpoint singularity is removed
    by substitution.  Raises EvanescentIntervalError when the leg crosses a
    region with xi < p^2.
    """
    if not r_lo < r_hi:
        raise ValueError("need r_lo < r_hi")
    lo, hi = profile.layer_bounds(layer)
    if r_lo < lo - 1e-12 or r_hi > hi + 1e-12:
        raise ValueError(f"leg [{r_lo}, {r_hi}] not inside layer {layer} = ({lo}, {hi}]")
    model = profile.layers[layer - 1]
    if p == 0.0:
        time = _quad(lambda r: 1.0 / float(model.c(r)), max(r_lo, 0.0), r_hi, tol)
        return LegIntegrals(alpha=0.0, time=time, layer=layer,
                            r_lo=r_lo, r_hi=r_hi, p=p, turning=False)
    p2 = p * p
    margin0 = float(model.xi(r_lo)) - p2
    scale = max(float(model.xi(r_hi)) - p2, 1.0)
    turning = margin0 <= _TURN_REL * scale
    _check_not_evanescent(model, p, r_lo, r_hi, turning)
    if turning:
        alpha = _turning_quad(lambda r: p / r, model, p, r_lo, r_hi, tol)
        time = _turning_quad(lambda r: float(model.xi(r)) / r, model, p, r_lo, r_hi, tol)
    else:
        alpha = _regular_inverse_sqrt_quad(lambda r: p / r, model, p, r_lo, r_hi, tol)
        time = _regular_inverse_sqrt_quad(lambda r: float(model.xi(r)) / r, model, p, r_lo, r_hi, tol)
    return LegIntegrals(alpha=alpha, time=time, layer=layer,
                        r_lo=r_lo, r_hi=r_hi, p=p, turning=turning)


def _W(model, r):
    r = np.asarray(r, float)
    dxi = np.asarray(model.dxi_dr(r), float)
    d2xi = np.asarray(model.d2xi_dr2(r), float)
    return (dxi + r * d2xi) / (r * dxi) ** 2


def leg_alpha_derivative(profile, layer, r_lo, r_hi, p, tol=LEG_TOL):
    """d(alpha)/dp of a single leg at fixed endpoint radii (turning-aware).

    For a turning leg the lower endpoint is R*(p) and moves with p; the
    by-parts representation makes that motion contribute nothing explicit.
    """
    model = profile.layers[layer - 1]
    if p == 0.0:
        if r_lo <= 0.0:
            return math.inf  # focusing through the center: alpha'(0+) diverges
        return _quad(lambda r: 1.0 / (r * math.sqrt(float(model.xi(r)))), r_lo, r_hi, tol)
    p2 = p * p
    margin0 = float(model.xi(r_lo)) - p2
    scale = max(float(model.xi(r_hi)) - p2, 1.0)
    if margin0 <= _TURN_REL * scale:
        d_hi = float(model.xi(r_hi)) - p2
        dxi_hi = float(model.dxi_dr(r_hi))
        boundary = (2.0 * math.sqrt(d_hi) / (r_hi * dxi_hi)
                    - 2.0 * p2 / (r_hi * dxi_hi * math.sqrt(d_hi)))
        def sqrtW(u, r_star=r_lo):
            # integrand of int sqrt(xi-p^2) W dr after r = r_star + u^2:
            # 2 u^2 sqrt(q) W with q = (xi - p^2)/u^2
            r = r_star + u * u
            d = float(model.xi(r)) - p2
            q = d / (u * u) if u > 1e-7 else float(model.dxi_dr(r_star))
            if q <= 0.0:
                q = float(model.dxi_dr(r_star))
            return 2.0 * u * u * math.sqrt(q) * float(_W(model, r))
        smooth_part = 2.0 * _quad(sqrtW, 0.0, math.sqrt(r_hi - r_lo), tol)
        singular_part = -2.0 * p2 * _turning_quad(lambda r: float(_W(model, r)),
                                                  model, p, r_lo, r_hi, tol)
        return boundary + smooth_part + singular_part
    f1 = _regular_inverse_sqrt_quad(lambda r: 1.0 / r, model, p, r_lo, r_hi, tol)
    def f2_int(u):
        r = r_lo + u * u
        d = float(model.xi(r)) - p2
        return 2.0 * u / (r * d ** 1.5)
    f2 = _quad(f2_int, 0.0, math.sqrt(r_hi - r_lo), tol)
    return f1 + p2 * f2


def basic_ray_geometry(profile, layer, p, n_legs):
    """Totals (alpha, T) of a basic ray with n_legs legs in one layer.

    One "leg" is a full down-and-up chord, so totals are 2*n_legs one-way
    integrals from the deepest point (turning radius or the layer's lower
    boundary) up to the layer's upper boundary.
    """
    if n_legs < 1:
        raise ValueError("n_legs must be >= 1")
    lo, hi = profile.layer_bounds(layer)
    info = turning_radius(profile, p) if p > 0 else None
    if p > 0 and info.kind == "smooth" and info.layer == layer:
        r_lo = info.radius
    else:
        r_lo = lo
    leg = leg_integrals(profile, layer, r_lo, hi, p)
    return 2 * n_legs * leg.alpha, 2 * n_legs * leg.time


# ---------------------------------------------------------------------------
# fixed-order scans (vectorized over p; used for bracketing, not final values)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gl_nodes01(n):
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _q_mean_slope(model, p_arr, rstar_arr, U, R):
    """q(u) = (xi(r* + u^2) - p^2)/u^2, with the analytic limit xi'(r*)
    substituted where u^2 is below the float-cancellation scale of r*."""
    q = (np.asarray(model.xi(R), float) - (p_arr ** 2)[:, None]) / U ** 2
    dxi_star = np.asarray(model.dxi_dr(np.maximum(rstar_arr, 1e-300)), float)
    tiny = U ** 2 < 64 * np.finfo(float).eps * np.maximum(rstar_arr, 1e-3)[:, None]
    q = np.where(tiny, dxi_star[:, None], q)
    return np.maximum(q, 1e-300)


def alpha_scan_turning(model, p_arr, rstar_arr, r_hi, n=96):
    """One-way alpha for turning legs, fixed-order GL in u = sqrt(r - R*)."""
    p_arr = np.asarray(p_arr, float)
    rstar_arr = np.asarray(rstar_arr, float)
    x, w = _gl_nodes01(n)
    umax = np.sqrt(r_hi - rstar_arr)
    U = umax[:, None] * x[None, :]
    R = rstar_arr[:, None] + U ** 2
    q = _q_mean_slope(model, p_arr, rstar_arr, U, R)
    G = 2.0 * p_arr[:, None] / (R * np.sqrt(q))
    return (G * w[None, :]).sum(axis=1) * umax


def alpha_scan_reflecting(model, p_arr, r_lo, r_hi, n=96):
    """One-way alpha for non-turning legs (still u-substituted at r_lo)."""
    p_arr = np.asarray(p_arr, float)
    x, w = _gl_nodes01(n)
    umax = math.sqrt(r_hi - r_lo)
    U = umax * x
    R = r_lo + U ** 2
    d = np.asarray(model.xi(R), float)[None, :] - (p_arr ** 2)[:, None]
    np.maximum(d, 1e-300, out=d)
    G = 2.0 * U[None, :] * p_arr[:, None] / (R[None, :] * np.sqrt(d))
    return (G * w[None, :]).sum(axis=1) * umax


def dalpha_scan_turning(model, p_arr, rstar_arr, r_hi, n=96):
    """One-way d(alpha)/dp for turning legs via the by-parts representation."""
    p_arr = np.asarray(p_arr, float)
    rstar_arr = np.asarray(rstar_arr, float)
    p2 = p_arr ** 2
    x, w = _gl_nodes01(n)
    d_hi = np.asarray(model.xi(r_hi), float) - p2
    dxi_hi = float(model.dxi_dr(r_hi))
    boundary = 2.0 * np.sqrt(d_hi) / (r_hi * dxi_hi) - 2.0 * p2 / (r_hi * dxi_hi * np.sqrt(d_hi))
    umax = np.sqrt(r_hi - rstar_arr)
    U = umax[:, None] * x[None, :]
    R = rstar_arr[:, None] + U ** 2
    q = _q_mean_slope(model, p_arr, rstar_arr, U, R)
    Wv = _W(model, R)
    smooth = 2.0 * ((2.0 * U ** 2 * np.sqrt(q) * Wv) * w[None, :]).sum(axis=1) * umax
    singular = -2.0 * p2 * ((2.0 * Wv / np.sqrt(q)) * w[None, :]).sum(axis=1) * umax
    return boundary + smooth + singular


def dalpha_scan_reflecting(model, p_arr, r_lo, r_hi, n=96):
    p_arr = np.asarray(p_arr, float)
    p2 = (p_arr ** 2)[:, None]
    x, w = _gl_nodes01(n)
    umax = math.sqrt(r_hi - r_lo)
    U = umax * x
    R = (r_lo + U ** 2)[None, :]
    d = np.asarray(model.xi(R), float) - p2
    np.maximum(d, 1e-300, out=d)
    G = 2.0 * U[None, :] * (1.0 / (R * np.sqrt(d)) + p2 / (R * d ** 1.5))
    return (G * w[None, :]).sum(axis=1) * umax


def phase_scan_turning(model, p_arr, rstar_arr, r_hi, n=96):
    """One-way radial phase integral of sqrt(xi - p^2)/r for turning legs."""
    p_arr = np.asarray(p_arr, float)
    rstar_arr = np.asarray(rstar_arr, float)
    x, w = _gl_nodes01(n)
    umax = np.sqrt(r_hi - rstar_arr)
    U = umax[:, None] * x[None, :]
    R = rstar_arr[:, None] + U ** 2
    q = _q_mean_slope(model, p_arr, rstar_arr, U, R)
    G = 2.0 * U ** 2 * np.sqrt(q) / R
    return (G * w[None, :]).sum(axis=1) * umax


def phase_scan_reflecting(model, p_arr, r_lo, r_hi, n=96):
    """One-way radial phase integral of sqrt(xi - p^2)/r for non-turning legs."""
    p_arr = np.asarray(p_arr, float)
    x, w = _gl_nodes01(n)
    umax = math.sqrt(r_hi - r_lo)
    U = umax * x
    R = r_lo + U ** 2
    d = np.asarray(model.xi(R), float)[None, :] - (p_arr ** 2)[:, None]
    np.maximum(d, 1e-300, out=d)
    G = 2.0 * U[None, :] * np.sqrt(d) / R[None, :]
    return (G * w[None, :]).sum(axis=1) * umax


def turning_radius_scan(model, p_arr, r_lo, r_hi):
    """Vectorized xi(r) = p^2 inversion within one layer (monotone xi)."""
    p_arr = np.asarray(p_arr, float)
    out = np.empty_like(p_arr)
    for i, p in enumerate(p_arr):
        out[i] = smooth_turning_radius(model, float(p), r_lo, r_hi)
    return out


# ---------------------------------------------------------------------------
# path tracing
# ---------------------------------------------------------------------------

@dataclass
class PathLeg:
    r: np.ndarray
    theta: np.ndarray
    layer: int
    kind: str          # "chord" (smooth U through a turning point) / "down" / "up"
    alpha: float
    time: float


@dataclass
class TracedPath:
    legs: list
    alpha_total: float
    time_total: float
    p: float

    def to_json(self):
        return {
            "p": self.p,
            "alpha_total": self.alpha_total,
            "time_total": self.time_total,
            "legs": [
                {"layer": leg.layer, "kind": leg.kind, "alpha": leg.alpha,
                 "time": leg.time, "r": leg.r.tolist(), "theta": leg.theta.tolist()}
                for leg in self.legs
            ],
        }

    def to_csv(self):
        lines = ["leg,layer,kind,r,theta"]
        for i, leg in enumerate(self.legs):
            for r, th in zip(leg.r, leg.theta):
                lines.append(f"{i},{leg.layer},{leg.kind},{r!r},{th!r}")
        return "\n".join(lines) + "\n"


def _oneway_profile(model, p, r_bot, r_top, turning, samples, sub_n=12):
    """(r, dalpha, dtime) knots from r_bot up to r_top along one smooth piece."""
    x, w = _gl_nodes01(sub_n)
    u_knots = np.linspace(0.0, math.sqrt(r_top - r_bot), samples)
    r_knots = r_bot + u_knots ** 2
    dal = np.zeros(samples)
    dt = np.zeros(samples)
    p2 = p * p
    for i in range(1, samples):
        a, b = u_knots[i - 1], u_knots[i]
        U = a + (b - a) * x
        R = r_bot + U ** 2
        xi = np.asarray(model.xi(R), float)
        if turning:
            q = _q_mean_slope(model, np.array([p]), np.array([r_bot]),
                              U[None, :], R[None, :])[0]
            root = U * np.sqrt(q)
        else:
            root = np.sqrt(np.maximum(xi - p2, 1e-300))
        dal[i] = (b - a) * np.sum(w * 2.0 * U * p / (R * root))
        dt[i] = (b - a) * np.sum(w * 2.0 * U * xi / (R * root))
    return r_knots, dal, dt


def trace_path(profile, start, p, itinerary=(), max_legs=200, samples_per_leg=96):
    """Trace a broken ray leg by leg, consuming reflect/transmit decisions.

    start: (r0, theta0); the ray initially goes downward.  One decision from
    `itinerary` is consumed at every encounter with the outer surface, an
    interface, or a positive inner boundary ("reflect" or "transmit";
    transmitting through the surface or the inner boundary, or under total
    internal reflection, is inconsistent).  Smooth turning points and the
    center of a full ball are passed automatically.  The path ends at the
    first encounter reached with the itinerary exhausted; exceeding max_legs
    before that raises ItineraryError.  Angles follow the alpha-integral
    convention (a purely radial ray advances theta by zero).
    """
    r0, theta0 = start
    if not profile.inner_radius < r0 <= 1.0:
        raise ValueError(f"start radius {r0} outside (inner_radius, 1]")
    decisions = list(itinerary)
    legs = []
    alpha_total = 0.0
    time_total = 0.0
    theta = theta0
    layer = profile.layer_of(r0, side="below")
    going_down = True
    r_cur = r0
    graze = GRAZE_TOL
    first = True

    while True:
        if not first:
            # we are at an encounter radius r_cur
            if not decisions:
                break
            going_down, layer = _consume_decision(
                profile, layer, p, decisions.pop(0), r_cur, going_down, graze)
        first = False
        if len(legs) >= max_legs:
            raise ItineraryError(
                f"leg budget max_legs={max_legs} exhausted with "
                f"{len(decisions)} decisions unconsumed")
        lo, hi = profile.layer_bounds(layer)
        model = profile.layers[layer - 1]
        if going_down:
            if lo > 0:
                turns = p > lo / float(model.c(lo)) + graze
            else:
                turns = p > 0.0  # in a full ball every p > 0 turns above the center
            r_bot = smooth_turning_radius(model, p, lo, r_cur) if turns else lo
            rk, dal, dt = _oneway_profile(model, p, r_bot, r_cur, turns, samples_per_leg)
            th_down = theta + np.concatenate(([0.0], np.cumsum(dal[1:][::-1])))
            a, t = dal[1:].sum(), dt[1:].sum()
            if turns:
                # smooth U-chord: continue up to the layer top without a decision
                rk2, dal2, dt2 = _oneway_profile(model, p, r_bot, hi, True, samples_per_leg)
                th_up = th_down[-1] + np.cumsum(np.concatenate(([0.0], dal2[1:])))
                leg_r = np.concatenate([rk[::-1], rk2])
                leg_th = np.concatenate([th_down, th_up])
                a += dal2[1:].sum()
                t += dt2[1:].sum()
                legs.append(PathLeg(leg_r, leg_th, layer, "chord", a, t))
                theta, r_cur, going_down = leg_th[-1], hi, False
            elif r_bot <= 0.0:
                # straight through the center of a full ball (p = 0)
                rk2, dal2, dt2 = _oneway_profile(model, p, 0.0, hi, False, samples_per_leg)
                th_up = th_down[-1] + np.cumsum(np.concatenate(([0.0], dal2[1:])))
                legs.append(PathLeg(np.concatenate([rk[::-1], rk2]),
                                    np.concatenate([th_down, th_up]),
                                    layer, "chord", a + dal2[1:].sum(), t + dt2[1:].sum()))
                theta, r_cur, going_down = legs[-1].theta[-1], hi, False
            else:
                legs.append(PathLeg(rk[::-1].copy(), th_down, layer, "down", a, t))
                theta, r_cur = th_down[-1], r_bot
            alpha_total += legs[-1].alpha
            time_total += legs[-1].time
        else:
            rk, dal, dt = _oneway_profile(model, p, r_cur, hi, False, samples_per_leg)
            th_up = theta + np.cumsum(np.concatenate(([0.0], dal[1:])))
            legs.append(PathLeg(rk.copy(), th_up, layer, "up", dal[1:].sum(), dt[1:].sum()))
            alpha_total += legs[-1].alpha
            time_total += legs[-1].time
            theta, r_cur = th_up[-1], hi

    return TracedPath(legs, alpha_total, time_total, p)


def _consume_decision(profile, layer, p, choice, r_cur, going_down, graze):
    """Apply one reflect/transmit decision at encounter radius r_cur; the ray
    arrived moving down (going_down=True, hit from above) or up (hit from
    below).  Returns the new (going_down, layer)."""
    if choice not in ("reflect", "transmit"):
        raise ItineraryError(f"unknown itinerary decision {choice!r}")
    if going_down:
        # hit the bottom of `layer` from above
        if choice == "reflect":
            return False, layer
        if layer == profile.n_layers:
            raise ItineraryError(
                f"cannot transmit through the inner boundary at r={r_cur}")
        rho_below = r_cur / float(profile.layers[layer].c(r_cur))
        if p >= rho_below - graze:
            raise ItineraryError(
                f"cannot transmit below interface at r={r_cur}: "
                f"p={p} >= rho(below)={rho_below} (total internal reflection)")
        return True, layer + 1
    # hit the top of `layer` from below
    if choice == "reflect":
        return True, layer
    if layer == 1:
        raise ItineraryError(f"cannot transmit through the outer surface")
    return False, layer - 1
