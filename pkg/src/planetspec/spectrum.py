"""Periodic rays confined to one layer, and the resulting length spectrum.

A closed ray that stays in layer k either turns smoothly at R*(p) where
xi(R*) = p^2, reflects from the layer's lower boundary, or runs radially
(p = 0).  With alpha_chord(p) the opening angle of one down-and-up chord,
closure after N chords and m windings reads

    N * alpha_chord(p) = 2 pi m,

and the period is T = 2 N L(p) with L the one-way radial travel time.  The
radial orbit is the p -> 0 endpoint of the two-chord family, so it carries
N = 2 and T equals four one-way radial times.

Roots in p are located on a fixed-order scan of alpha_chord (split into
monotone pieces at sign changes of d alpha/dp) and polished with adaptive
quadrature Newton steps; repeated traversals of a primitive ray are
generated arithmetically instead of re-solved.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import kinematics as K
from ._threads import thread_map

CLOSURE_TOL = 1e-8
DEDUPE_TOL = 1e-9            # relative, in units of the ray length
PCC_TOL = 1e-6               # |dalpha_dp| threshold, per chord
P_TOL = 1e-11                # distinct roots closer than this are one ray

TURNING = "Turning"
INTERFACE_REFLECTING = "InterfaceReflecting"
RADIAL = "Radial"


class RootSolveWarning(UserWarning):
    """A periodic-ray root did not converge or failed re-verification."""


@dataclass
class PeriodicBasicRay:
    layer: int
    kind: str                # Turning | InterfaceReflecting | Radial
    p: float
    n_legs: int              # chords per period (down-and-up pairs)
    winding: int
    length: float            # period T, in time units
    dalpha_dp: float         # d/dp of the total angle 2 N alpha_1
    conjugacy_ok: bool
    primitive: bool = True
    repetition: int = 1
    closure_defect: float = 0.0

    def to_json(self):
        d = {
            "layer": self.layer, "kind": self.kind, "p": self.p,
            "n_legs": self.n_legs, "winding": self.winding,
            "length": self.length,
            "dalpha_dp": None if math.isinf(self.dalpha_dp) else self.dalpha_dp,
            "conjugacy_ok": self.conjugacy_ok, "primitive": self.primitive,
            "repetition": self.repetition,
        }
        return d


@dataclass
class SpectrumEntry:
    length: float
    rays: list
    multiplicity: int = 0

    def __post_init__(self):
        self.multiplicity = len(self.rays)

    def to_json(self):
        return {"length": self.length, "multiplicity": self.multiplicity,
                "rays": [r.to_json() for r in self.rays]}


# ---------------------------------------------------------------------------
# per-layer p-brackets
# ---------------------------------------------------------------------------

def _reach_limit(profile, k):
    """Largest p that still penetrates below every interface above layer k."""
    lim = profile.rho(1.0, side="above")
    for j in range(1, k):
        rj = profile.interfaces[j - 1]
        lim = min(lim, rj / float(profile.layers[j].c(rj)))  # below-side slowness
    return lim


def _layer_brackets(profile, k):
    """(kind -> (p_lo, p_hi)) of admissible ray parameters in layer k."""
    lo, hi = profile.layer_bounds(k)
    model = profile.layers[k - 1]
    reach = _reach_limit(profile, k)
    rho_top = hi / float(model.c(hi))
    out = {}
    if lo > 0:
        rho_bot = lo / float(model.c(lo))
        t_hi = min(rho_top, reach)
        if rho_bot < t_hi:
            out[TURNING] = (rho_bot, t_hi)
        r_hi = min(rho_bot, reach)
        if r_hi > 0:
            out[INTERFACE_REFLECTING] = (0.0, r_hi)
    else:
        out[TURNING] = (0.0, min(rho_top, reach))
    return out


def _alpha_scan_fn(profile, k, kind):
    """Vectorized one-way alpha(p) over the layer's bracket (fixed order)."""
    lo, hi = profile.layer_bounds(k)
    model = profile.layers[k - 1]
    if kind == TURNING:
        def f(p_arr):
            p_arr = np.atleast_1d(np.asarray(p_arr, float))
            rstar = K.turning_radius_scan(model, p_arr, lo, hi)
            return K.alpha_scan_turning(model, p_arr, rstar, hi)
        def df(p_arr):
            p_arr = np.atleast_1d(np.asarray(p_arr, float))
            rstar = K.turning_radius_scan(model, p_arr, lo, hi)
            return K.dalpha_scan_turning(model, p_arr, rstar, hi)
    else:
        def f(p_arr):
            return K.alpha_scan_reflecting(model, np.atleast_1d(p_arr), lo, hi)
        def df(p_arr):
            return K.dalpha_scan_reflecting(model, np.atleast_1d(p_arr), lo, hi)
    return f, df


def _accurate_alpha(profile, k, kind, p):
    """(alpha_1, dalpha_1/dp, time) by adaptive quadrature (one-way values)."""
    lo, hi = profile.layer_bounds(k)
    if kind == TURNING:
        r_lo = K.smooth_turning_radius(profile.layers[k - 1], p, lo, hi)
    else:
        r_lo = lo
    leg = K.leg_integrals(profile, k, r_lo, hi, p)
    da = K.leg_alpha_derivative(profile, k, r_lo, hi, p)
    return leg.alpha, da, leg.time


def _polish_root(profile, k, kind, p0, target, bracket):
    """Newton-polish alpha_1(p) = target starting from the scan root p0."""
    p = p0
    for _ in range(6):
        a, da, _t = _accurate_alpha(profile, k, kind, p)
        step = (a - target) / da
        p_new = p - step
        if not bracket[0] < p_new < bracket[1]:
            p_new = 0.5 * (p + (bracket[0] if step > 0 else bracket[1]))
        if abs(p_new - p) < 1e-15 * max(1.0, abs(p)):
            p = p_new
            break
        p = p_new
    a, da, t = _accurate_alpha(profile, k, kind, p)
    return p, a, da, t


def _scan_grid(f, bracket, n_grid):
    eps = 1e-6 * (bracket[1] - bracket[0])
    ps = np.linspace(bracket[0] + eps, bracket[1] - eps, n_grid)
    return ps, f(ps)


def _roots_on_grid(fn_scalar, ps, vals, target):
    """All sign-change brackets of vals-target, refined by brentq."""
    roots = []
    g = vals - target
    sign = np.sign(g)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        try:
            r = brentq(lambda p: fn_scalar(p) - target, ps[i], ps[i + 1],
                       xtol=1e-14, rtol=8.9e-16, maxiter=200)
            roots.append(r)
        except Exception as e:  # pragma: no cover - reported, not dropped
            warnings.warn(f"root refinement failed in [{ps[i]}, {ps[i+1]}]: {e}",
                          RootSolveWarning)
    for i in np.nonzero(g == 0.0)[0]:
        roots.append(float(ps[i]))
    return roots


def _radial_ray(profile, k, pcc_tol):
    lo, hi = profile.layer_bounds(k)
    model = profile.layers[k - 1]
    t_oneway, _ = quad(lambda r: 1.0 / float(model.c(r)), max(lo, 0.0), hi,
                       epsabs=1e-12, epsrel=1e-13, limit=200)
    if lo <= 0.0:
        da = math.inf
    else:
        v, _ = quad(lambda r: 1.0 / (r * math.sqrt(float(model.xi(r)))), lo, hi,
                    epsabs=1e-12, epsrel=1e-13, limit=200)
        da = 4.0 * v
    return PeriodicBasicRay(
        layer=k, kind=RADIAL, p=0.0, n_legs=2, winding=0,
        length=4.0 * t_oneway, dalpha_dp=da,
        conjugacy_ok=bool(abs(da) > pcc_tol * 4), primitive=True)


def enumerate_basic(profile, layer, max_legs, max_winding,
                    closure_tol=CLOSURE_TOL, p_tol=P_TOL, pcc_tol=PCC_TOL,
                    n_grid=600, include_harmonics=True):
    """All periodic rays of layer `layer` with at most max_legs chords.

    Solves N * alpha_chord(p) = 2 pi m for every primitive pair
    gcd(N, m) = 1, N <= max_legs, m <= max_winding, over each regime
    bracket; repeated traversals (l N, l m) within the caps are generated
    from the primitive solutions.  The radial orbit (N = 2, m = 0) is
    always included.  Non-converged roots are reported as
    RootSolveWarning, never silently dropped.
    """
    if max_legs < 2 or max_winding < 1:
        raise ValueError("need max_legs >= 2 and max_winding >= 1")
    rays = [_radial_ray(profile, layer, pcc_tol)]
    brackets = _layer_brackets(profile, layer)

    # a chord's opening angle stays below pi, so closure needs 2m < N
    prim = [(N, m) for N in range(2, max_legs + 1)
            for m in range(1, max_winding + 1)
            if math.gcd(N, m) == 1 and 2 * m < N]

    def solve_kind(item):
        kind, bracket = item
        f, _df = _alpha_scan_fn(profile, layer, kind)
        ps, vals = _scan_grid(f, bracket, n_grid)
        fn_scalar = lambda p: float(f(np.array([p]))[0])
        found = []
        for (N, m) in prim:
            target = math.pi * m / N        # one-way alpha per half-chord
            if not (vals.min() - 0.1 <= target <= vals.max() + 0.1):
                continue
            for p0 in _roots_on_grid(fn_scalar, ps, vals, target):
                try:
                    p_fin, a, da, t = _polish_root(profile, layer, kind, p0,
                                                   target, bracket)
                except (RuntimeError, ValueError) as e:
                    warnings.warn(
                        f"polish failed for (N={N}, m={m}) at p0={p0:.6g} in "
                        f"layer {layer} ({kind}): {e}", RootSolveWarning)
                    continue
                defect = 2 * N * a - 2 * math.pi * m
                if abs(defect) > closure_tol:
                    warnings.warn(
                        f"closure defect {defect:.2e} for (N={N}, m={m}) in "
                        f"layer {layer} ({kind}); ray dropped", RootSolveWarning)
                    continue
                found.append(PeriodicBasicRay(
                    layer=layer, kind=kind, p=p_fin, n_legs=N, winding=m,
                    length=2 * N * t, dalpha_dp=2 * N * da,
                    conjugacy_ok=bool(abs(2 * N * da) > pcc_tol * 2 * N),
                    primitive=True, closure_defect=defect))
        return found

    for chunk in thread_map(solve_kind, list(brackets.items())):
        rays.extend(chunk)

    # deduplicate identical (kind, N, m, p) roots from adjacent scan cells
    uniq = []
    for r in sorted(rays, key=lambda r: (r.kind, r.n_legs, r.winding, r.p)):
        if uniq and r.kind == uniq[-1].kind and r.n_legs == uniq[-1].n_legs \
                and r.winding == uniq[-1].winding and abs(r.p - uniq[-1].p) < p_tol:
            continue
        uniq.append(r)

    if include_harmonics:
        harmonics = []
        for r in uniq:
            l = 2
            while l * r.n_legs <= max_legs and l * r.winding <= max_winding:
                harmonics.append(PeriodicBasicRay(
                    layer=r.layer, kind=r.kind, p=r.p,
                    n_legs=l * r.n_legs, winding=l * r.winding,
                    length=l * r.length, dalpha_dp=l * r.dalpha_dp,
                    conjugacy_ok=r.conjugacy_ok, primitive=False,
                    repetition=l, closure_defect=l * r.closure_defect))
                l += 1
        uniq.extend(harmonics)

    uniq.sort(key=lambda r: (r.length, r.layer, r.n_legs, r.winding))
    return uniq


def blsp(profile, length_cutoff, max_legs=24, max_winding=4,
         dedupe_tol=DEDUPE_TOL, **kw):
    """Basic length spectrum up to length_cutoff, sorted, grouped by length.

    The chord families accumulate (T -> 2 pi m per winding as N grows), so
    max_legs/max_winding cap the enumeration; entries are grouped when
    lengths agree within dedupe_tol * length.
    """
    if length_cutoff <= 0:
        raise ValueError("length_cutoff must be positive")
    rays = []
    for k in range(1, profile.n_layers + 1):
        rays.extend(r for r in enumerate_basic(profile, k, max_legs,
                                               max_winding, **kw)
                    if r.length <= length_cutoff)
    rays.sort(key=lambda r: (r.length, r.layer, r.n_legs, r.winding))
    entries = []
    for r in rays:
        if entries and abs(r.length - entries[-1].length) \
                <= dedupe_tol * entries[-1].length:
            entries[-1].rays.append(r)
            entries[-1].multiplicity = len(entries[-1].rays)
        else:
            entries.append(SpectrumEntry(length=r.length, rays=[r]))
    return entries


@dataclass
class TwoSpeedSpectrum:
    entries_p: list
    entries_s: list
    merged: list                 # (length, source tag, SpectrumEntry)
    collisions: list             # (entry_P, entry_S) with |T_P - T_S| small


def blsp_two_speeds(profile_p, profile_s, length_cutoff,
                    dedupe_tol=DEDUPE_TOL, **kw):
    """Tagged union of two spectra sharing the same interface geometry."""
    ip, is_ = np.asarray(profile_p.interfaces, float), np.asarray(profile_s.interfaces, float)
    if ip.shape != is_.shape or not np.array_equal(ip, is_) \
            or profile_p.inner_radius != profile_s.inner_radius:
        raise ValueError("profiles must share identical interface radii")
    ep = blsp(profile_p, length_cutoff, dedupe_tol=dedupe_tol, **kw)
    es = blsp(profile_s, length_cutoff, dedupe_tol=dedupe_tol, **kw)
    merged = sorted([(e.length, "P", e) for e in ep] + [(e.length, "S", e) for e in es],
                    key=lambda t: (t[0], t[1]))
    collisions = []
    for e1 in ep:
        for e2 in es:
            if abs(e1.length - e2.length) < dedupe_tol * max(e1.length, e2.length):
                collisions.append((e1, e2))
    return TwoSpeedSpectrum(ep, es, merged, collisions)


def check_periodic_conjugacy(ray, pcc_tol=PCC_TOL):
    """Nondegeneracy |d alpha/dp| > tol (per chord) of a periodic ray."""
    scale = max(2 * ray.n_legs, 1)
    da = ray.dalpha_dp
    if math.isinf(da):
        return True
    return bool(abs(da) > pcc_tol * scale)


def countable_conjugacy_scan(profile, layer, grid=800, refine_tol=1e-12):
    """Turning radii where the chord's d alpha/dp vanishes.

    Scans d alpha_1/dp over the layer's turning bracket (parametrized by p,
    reported as turning radii R*(p)), and over the reflecting bracket if
    any (reported as the layer's lower boundary radius).  Sign changes are
    refined by bisection on the adaptive-quadrature derivative.
    """
    lo, hi = profile.layer_bounds(layer)
    model = profile.layers[layer - 1]
    radii = []
    brackets = _layer_brackets(profile, layer)
    for kind, bracket in brackets.items():
        _f, df = _alpha_scan_fn(profile, layer, kind)
        ps, dvals = _scan_grid(df, bracket, grid)
        sign = np.sign(dvals)
        for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            def dacc(p):
                if kind == TURNING:
                    r_lo = K.smooth_turning_radius(model, p, lo, hi)
                else:
                    r_lo = lo
                return K.leg_alpha_derivative(profile, layer, r_lo, hi, p)
            try:
                p_root = brentq(dacc, ps[i], ps[i + 1], xtol=refine_tol,
                                rtol=8.9e-16, maxiter=200)
            except ValueError:
                continue
            if kind == TURNING:
                radii.append(K.smooth_turning_radius(model, p_root, lo, hi))
            else:
                radii.append(lo)
    return sorted(set(radii))


# ---------------------------------------------------------------------------
# rigidity operators
# ---------------------------------------------------------------------------

def abel_forward(profile, f, r, tol=1e-8):
    """h(r) = int_r^1 f(s) [1 - xi(r)/xi(s)]^(-1/2) ds / c(s).

    r must lie in the open interior of the outermost layer; the kernel's
    endpoint singularity at s = r is removed by the turning-point
    substitution.  A kernel singularity away from the endpoint (xi
    non-increasing somewhere above r) is an error.
    """
    lo, hi = profile.layer_bounds(1)
    if not lo < r < 1.0:
        raise ValueError(f"r={r} not in the outermost layer's interior ({lo}, 1)")
    model = profile.layers[0]
    xi_r = float(model.xi(r))
    ss = np.linspace(r, 1.0, 65)[1:]
    margins = np.asarray(model.xi(ss), float) - xi_r
    if np.any(margins <= 0.0):
        s_bad = ss[np.nonzero(margins <= 0.0)[0][0]]
        raise ValueError(f"singular kernel off the endpoint: xi({s_bad:.6g}) <= xi({r})")

    def F(s):
        xs = float(model.xi(s))
        return float(f(s)) * math.sqrt(xs) / float(model.c(s))

    return K._turning_quad(F, model, math.sqrt(xi_r), r, 1.0, tol)


def interface_motion_derivative(profile, interface_index, dr_dtau):
    """Rate of change of the radial-geodesic length above a moving interface.

    With the speed frozen, the length l(tau) of the radial geodesic between
    r_k(tau) and the surface changes only through the endpoint:
    (l(0) - l(tau))/tau -> r_k'(0) / c(r_k^+).
    """
    if not 1 <= interface_index <= len(profile.interfaces):
        raise ValueError(f"invalid interface index {interface_index}")
    rk = profile.interfaces[interface_index - 1]
    c_above = float(profile.layers[interface_index - 1].c(rk))
    return dr_dtau / c_above


# ---------------------------------------------------------------------------
# gliding-ray approximating sequences
# ---------------------------------------------------------------------------

@dataclass
class GlidingApproximant:
    m: int                   # sub-interface dives
    theta: float             # incidence angle at the interface, from above
    p: float
    kappa: float             # transmitted-ray angle below, -> 0 at grazing
    length: float            # period T_m
    phi: float               # per-dive opening angle
    alpha_up: float
    t_up: float
    t_dive: float


@dataclass
class GlidingApproximation:
    records: list
    theta0: float
    p_critical: float
    glide_length: float      # T of the limiting gliding ray
    kappa_fit_exponent: float
    interface_index: int
    windows_widened: int = 0


def gliding_approximation(profile, interface_index, glide, n_max,
                          window=0.05, max_widenings=12):
    """Periodic nongliding rays converging to a gliding ray.

    glide: {"x": theta_x, "y": theta_y, "Theta_H": glide angle}; the
    limiting ray consists of one arc through the outermost region from
    interface point y to interface point x plus a glide of central angle
    Theta_H along the interface.  Approximant m replaces the glide by m
    just-critical dives below the interface, with incidence angle theta_m
    solving alpha(theta)/phi(theta) = m; kappa(theta_m) ~ (theta_m -
    theta0)^(1/2) is re-fit and reported.
    """
    if interface_index != 1:
        raise ValueError("gliding construction implemented for the outermost interface")
    if n_max == 0:
        return GlidingApproximation([], 0.0, 0.0, 0.0, float("nan"), interface_index)
    theta_h = float(glide["Theta_H"])
    if theta_h <= 0:
        raise ValueError("Theta_H must be positive")
    b = profile.interfaces[0]
    upper, lower = profile.layers[0], profile.layers[1]
    lo2 = profile.layer_bounds(2)[0]
    rho_up = b / float(upper.c(b))
    p_crit = b / float(lower.c(b))          # grazing-below slowness
    if p_crit >= rho_up:
        raise ValueError("no gliding regime: rho(b-) >= rho(b+)")
    # the upper arc must not turn above the interface
    rr = np.linspace(b, 1.0, 65)
    if np.any(np.asarray(upper.xi(rr), float) <= p_crit ** 2):
        raise ValueError("upper arc would turn above the interface at the "
                         "critical parameter")

    def arc_up(p):
        leg = K.leg_integrals(profile, 1, b, 1.0, p)
        return 2.0 * leg.alpha, 2.0 * leg.time

    def dive(p):
        rstar = K.smooth_turning_radius(lower, p, lo2, b)
        leg = K.leg_integrals(profile, 2, rstar, b, p)
        return 2.0 * leg.alpha, 2.0 * leg.time

    def total_angle_scan(p_arr, m):
        """alpha_up + m*phi on a p-grid, fixed-order (for bracketing only)."""
        au = 2.0 * K.alpha_scan_reflecting(upper, p_arr, b, 1.0)
        rst = K.turning_radius_scan(lower, p_arr, lo2, b)
        ad = 2.0 * K.alpha_scan_turning(lower, p_arr, rst, b)
        return au + m * ad

    def dG(p, m):
        dau = 2.0 * K.leg_alpha_derivative(profile, 1, b, 1.0, p)
        rstar = K.smooth_turning_radius(lower, p, lo2, b)
        dad = 2.0 * K.leg_alpha_derivative(profile, 2, rstar, b, p)
        return dau + m * dad

    alpha_up_crit, t_up_crit = arc_up(p_crit)
    theta0 = math.acos(p_crit / rho_up)
    glide_length = t_up_crit + p_crit * theta_h
    total_angle = alpha_up_crit + theta_h   # closure angle, constant along the family
    noise_floor = 1e-7   # ignore crossings indistinguishable from quadrature noise

    records = []
    widened = 0
    m = 1
    theta_win = window
    while len(records) < n_max:
        # bracket the sign change of G = alpha_up + m*phi - total_angle that
        # lies closest to the grazing parameter, on a scan grid
        found = None
        while True:
            p_lo = max(rho_up * math.cos(min(theta0 + theta_win, math.pi / 2)), 1e-9)
            ps = np.linspace(p_lo, p_crit * (1 - 1e-12), 400)
            gs = total_angle_scan(ps, m) - total_angle
            sign = np.sign(gs)
            idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
            for i in reversed(idx):
                if max(abs(gs[i]), abs(gs[i + 1])) < noise_floor:
                    continue
                found = brentq(
                    lambda p: float(total_angle_scan(np.array([p]), m)[0]) - total_angle,
                    ps[i], ps[i + 1], xtol=1e-14, rtol=8.9e-16)
                break
            if found is not None or p_lo <= 1e-9 or widened >= max_widenings:
                break
            theta_win *= 2.0
            widened += 1
            warnings.warn(f"gliding approximant m={m}: no root in window, "
                          f"widening to {theta_win:.3g}", UserWarning)
        if found is None:
            m += 1
            if m > 100 * max(1, n_max):
                break
            continue
        # Newton-polish on adaptive-quadrature values
        p_m = found
        for _ in range(4):
            au, _tu = arc_up(p_m)
            ad, _td = dive(p_m)
            g = au + m * ad - total_angle
            step = g / dG(p_m, m)
            if not 0 < p_m - step < p_crit:
                break
            p_m -= step
            if abs(step) < 1e-15:
                break
        au, tu = arc_up(p_m)
        ad, td = dive(p_m)
        records.append(GlidingApproximant(
            m=m, theta=math.acos(p_m / rho_up), p=p_m,
            kappa=math.acos(min(p_m / p_crit, 1.0)),
            length=tu + m * td, phi=ad, alpha_up=au, t_up=tu, t_dive=td))
        m += 1

    if len(records) >= 3:
        th = np.array([rec.theta - theta0 for rec in records])
        ka = np.array([rec.kappa for rec in records])
        tail = slice(-10, None) if len(records) >= 10 else slice(None)
        A = np.vstack([np.log(th[tail]), np.ones_like(th[tail])]).T
        exponent = float(np.linalg.lstsq(A, np.log(ka[tail]), rcond=None)[0][0])
    else:
        exponent = float("nan")
    return GlidingApproximation(records, theta0, p_crit, glide_length,
                                exponent, interface_index, widened)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def spectrum_to_json(entries, **meta):
    doc = dict(meta)
    doc["entries"] = [e.to_json() for e in entries]
    return json.dumps(doc, indent=2, sort_keys=True)


def spectrum_to_csv(entries):
    lines = ["length,layer,kind,p,N,m"]
    for e in entries:
        for r in e.rays:
            lines.append(f"{r.length!r},{r.layer},{r.kind},{r.p!r},{r.n_legs},{r.winding}")
    return "\n".join(lines) + "\n"
