"""Interface coefficients, reverberation combinatorics, and singularity
amplitudes.

At an interface radius b the leading-order high-frequency matching of a
scalar displacement field depends only on the one-sided impedances
Z = mu * beta, where beta = sqrt(xi - p^2)/r is the radial slowness.
Continuity of displacement and traction gives the reflection and
transmission coefficients

    R_pp = (Z+ - Z-)/(Z+ + Z-),   T_pm = 2 Z+/(Z+ + Z-),
    R_mm = -R_pp,                 T_mp = 2 Z-/(Z+ + Z-),

with "+" the side above the interface and "-" the side below; the wave is
incident from above.  When the lower side is evanescent (xi- < p^2) beta-
is replaced by i|beta-| and |R_pp| = 1: total internal reflection with the
phase carried exactly.

A radial reverberation class at one interface is a triple (m0, m1, m2):
m0 reflections off the top, m1 down-and-up transmission pairs, m2
reflections off the underside.  All orderings share the same coefficient
product and radial phase; their count has the closed form

    C(m0 + m1, m1) * C(m1 + m2 - 1, m2)      (m1 >= 1, and 1 for (m0,0,0))

which this module also re-derives by truncating the geometric reverberation
series E = sum_l (A h)^l, A = x + y (1 + z + z^2 + ...).

The coefficient of the leading (t - T + i0)^(-5/2) singularity contributed
by a periodic ray class is assembled from five factors: a quarter-turn
phase i^KMAH (one unit per smooth turning point, a reduced rational unit
for a grazing turn), the reverberation count, the coefficient product, the
one-way radial travel time, and the geometric-spreading factor
|p^-2 d(alpha)/dp|^(-1/2).  The class-independent normalization is never
fixed numerically; it is carried as an opaque token so that only ratios
between classes are meaningful.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import kinematics as K
from .kinematics import (GRAZE_TOL, GRAZING_TRANSMISSION,
                         TOTAL_INTERNAL_REFLECTION, TRANSMITTING,
                         TURNING_ABOVE, TURNING_AT_INTERFACE)
from .spectrum import (INTERFACE_REFLECTING, RADIAL, TURNING,
                       check_periodic_conjugacy)

EVANESCENT_BOTH_SIDES = "EvanescentBothSides"

# Grazing turning points contribute a reduced phase, expressed in units of
# the quarter turn pi/2.  The default pi/6 is Fraction(1, 3); the variant
# convention pi/12 corresponds to Fraction(1, 6).
GRAZING_PHASE = Fraction(1, 3)

# The class-independent prefactor of every singularity coefficient.  It is
# never pinned numerically; amplitudes below are in units of this token.
NORMALIZATION_TOKEN = "c_d * (2*pi*i)**(-3/2) * |SO(3)|"


# ---------------------------------------------------------------------------
# interface coefficients
# ---------------------------------------------------------------------------

@dataclass
class InterfaceCoefficients:
    """Leading-order reflection/transmission at one interface, one p."""

    interface_index: int
    p: float
    R_pp: complex            # reflection, incident from above
    T_pm: complex            # transmission downward
    R_mm: complex            # reflection, incident from below
    T_mp: complex            # transmission upward
    regime: str
    Z_above: complex
    Z_below: complex

    def to_json(self):
        def c2(z):
            return [z.real, z.imag]
        return {"interface": self.interface_index, "p": self.p,
                "regime": self.regime,
                "R_pp": c2(self.R_pp), "T_pm": c2(self.T_pm),
                "R_mm": c2(self.R_mm), "T_mp": c2(self.T_mp)}


def _impedance(mu, beta_val):
    if isinstance(beta_val, K.Evanescent):
        return complex(mu) * 1j * beta_val.magnitude
    return complex(mu * beta_val)


def interface_coefficients(profile, k, p, graze_tol=GRAZE_TOL):
    """Impedance-matching coefficients at interface k for parameter p.

    Evanescent sides enter through beta -> i|beta| (decay into the medium),
    which makes |R_pp| = 1 under total internal reflection.  At grazing
    transmission (beta- = 0) the formulas give R_pp = 1, T_pm = 2, T_mp = 0
    exactly.
    """
    if p < 0:
        raise ValueError("ray parameter p must be nonnegative")
    rk = profile.interfaces[k - 1]
    Z_a = _impedance(profile.mu(rk, "above"), K.beta(profile, rk, p, "above"))
    Z_b = _impedance(profile.mu(rk, "below"), K.beta(profile, rk, p, "below"))
    den = Z_a + Z_b
    if den == 0:
        raise ValueError(f"interface {k}: both one-sided impedances vanish at p={p}")
    R = (Z_a - Z_b) / den

    rho_above = rk / float(profile.layers[k - 1].c(rk))
    rho_below = rk / float(profile.layers[k].c(rk))
    lo, hi = sorted((rho_below, rho_above))
    if abs(p - rho_below) <= graze_tol:
        regime = GRAZING_TRANSMISSION
    elif abs(p - rho_above) <= graze_tol:
        regime = TURNING_AT_INTERFACE
    elif p < lo:
        regime = TRANSMITTING
    elif p < hi:
        regime = (TOTAL_INTERNAL_REFLECTION if rho_below < rho_above
                  else TURNING_ABOVE)
    else:
        regime = EVANESCENT_BOTH_SIDES

    return InterfaceCoefficients(
        interface_index=k, p=p, R_pp=R, T_pm=2 * Z_a / den,
        R_mm=-R, T_mp=2 * Z_b / den, regime=regime,
        Z_above=Z_a, Z_below=Z_b)


# ---------------------------------------------------------------------------
# reverberation combinatorics
# ---------------------------------------------------------------------------

def debye_count(M):
    """Number of orderings of the one-interface reverberation class M.

    M = (m0, m1, m2): top reflections, transmission pairs, underside
    reflections.  Underside reflections require at least one transmission
    pair; (m0, 0, 0) counts the single pure-reflection itinerary.
    """
    m0, m1, m2 = (int(v) for v in M)
    if min(m0, m1, m2) < 0:
        raise ValueError("reverberation counts must be nonnegative")
    if m1 == 0:
        if m2 > 0:
            raise ValueError("underside reflections require a transmission "
                             "pair (m1 >= 1)")
        return 1
    return comb(m0 + m1, m1) * comb(m1 + m2 - 1, m2)


def debye_series(max_order):
    """Coefficients of the truncated reverberation series, as a dict.

    Expands E = sum_{l>=0} (A h)^l with A = x + y (1 + z + z^2 + ...) as a
    polynomial in x (top reflection), y (transmission pair), z (underside
    reflection), truncated at total degree max_order, and returns
    {(m0, m1, m2): integer coefficient}.  Independent oracle for
    debye_count.
    """
    D = int(max_order)
    if D < 0:
        raise ValueError("max_order must be nonnegative")

    def trunc_mul(P, Q):
        out = {}
        for (a0, a1, a2), ca in P.items():
            for (b0, b1, b2), cb in Q.items():
                m = (a0 + b0, a1 + b1, a2 + b2)
                if sum(m) <= D:
                    out[m] = out.get(m, 0) + ca * cb
        return out

    A = {(1, 0, 0): 1}
    for j in range(D):
        A[(0, 1, j)] = 1
    E = {(0, 0, 0): 1}
    power = {(0, 0, 0): 1}
    for _ in range(D):
        power = trunc_mul(power, A)
        if not power:
            break
        for m, c in power.items():
            E[m] = E.get(m, 0) + c
    return E


def _normalize_multi_index(M, n_interfaces):
    """Accept a single (m0,m1,m2) triple or one triple per interface."""
    M = tuple(M)
    if len(M) == 3 and all(isinstance(v, (int, np.integer)) for v in M):
        M = (M,)
    triples = [tuple(int(v) for v in t) for t in M]
    if any(len(t) != 3 for t in triples):
        raise ValueError("each interface entry must be a (m0, m1, m2) triple")
    if len(triples) > n_interfaces:
        raise ValueError(f"{len(triples)} interface entries for a profile "
                         f"with {n_interfaces} interfaces")
    triples += [(0, 0, 0)] * (n_interfaces - len(triples))
    return triples


def q_product(profile, p, M):
    """Literal product of coefficient powers for the reverberation class M.

    M is a (m0, m1, m2) triple per interface (a bare triple means interface
    1).  Raises if the class requires propagation on an evanescent side.
    """
    triples = _normalize_multi_index(M, len(profile.interfaces))
    Q = complex(1.0)
    for j, (m0, m1, m2) in enumerate(triples, start=1):
        if (m0, m1, m2) == (0, 0, 0):
            continue
        debye_count((m0, m1, m2))      # validates admissibility
        rk = profile.interfaces[j - 1]
        if (m0 or m1) and isinstance(K.beta(profile, rk, p, "above"), K.Evanescent):
            raise ValueError(f"interface {j}: encounters from above at p={p} "
                             "where the upper side is evanescent")
        if (m1 or m2) and isinstance(K.beta(profile, rk, p, "below"), K.Evanescent):
            raise ValueError(f"interface {j}: transmission at p={p} where "
                             "the lower side is evanescent (total internal "
                             "reflection)")
        c = interface_coefficients(profile, j, p)
        Q *= c.R_pp ** m0 * (c.T_pm * c.T_mp) ** m1 * c.R_mm ** m2
    return Q


# ---------------------------------------------------------------------------
# KMAH phase bookkeeping
# ---------------------------------------------------------------------------

def kmah_index(events, grazing_phase=GRAZING_PHASE):
    """Total caustic phase of an itinerary, in units of pi/2.

    events: iterable of tags; each smooth "turn" contributes one unit, a
    "graze" (tangent turn at an interface) contributes the reduced
    grazing_phase, and "reflect"/"transmit"/"inner_reflect" contribute
    nothing (their signs live in the coefficient product).  Returns an
    exact Fraction; the total is invariant under cyclic rotation of the
    itinerary.
    """
    total = Fraction(0)
    for ev in events:
        if ev == "turn":
            total += 1
        elif ev == "graze":
            total += Fraction(grazing_phase)
        elif ev in ("reflect", "transmit", "inner_reflect"):
            continue
        else:
            raise ValueError(f"unknown itinerary event {ev!r}")
    return total


def _quarter_turn_phase(kmah):
    """i**kmah for a rational kmah, exact on the integer part."""
    k = Fraction(kmah)
    whole, frac = divmod(k, 1)
    out = 1j ** (int(whole) % 4)
    if frac:
        out *= cmath.exp(1j * (math.pi / 2) * float(frac))
    return out


# ---------------------------------------------------------------------------
# reverberation classes at fixed p
# ---------------------------------------------------------------------------

@dataclass
class ScatteringItinerary:
    """A radial reverberation class at fixed ray parameter.

    multi_index: one (m0, m1, m2) triple per interface; count: number of
    orderings sharing the class; coefficient_product: literal product of
    the interface coefficients; kmah: caustic phase in units of pi/2;
    radial_phase: total vertical travel time sum 2 m_j Phi_j, where Phi_j
    is the one-way integral of beta over the layer's radial extent.
    """

    multi_index: tuple
    p: float
    n_legs: int
    count: int
    coefficient_product: complex
    kmah: Fraction
    radial_phase: float

    def to_json(self):
        return {"multi_index": [list(t) for t in self.multi_index],
                "p": self.p, "n_legs": self.n_legs, "count": self.count,
                "coefficient_product": [self.coefficient_product.real,
                                        self.coefficient_product.imag],
                "kmah": [self.kmah.numerator, self.kmah.denominator],
                "radial_phase": self.radial_phase}


def _radial_phase_leg(profile, layer, r_lo, r_hi, p):
    """One-way integral of beta dr over [r_lo, r_hi]: time - p * alpha."""
    leg = K.leg_integrals(profile, layer, r_lo, r_hi, p)
    return leg.time - p * leg.alpha


def scattering_itinerary(profile, p, M, n_legs=None,
                         grazing_phase=GRAZING_PHASE):
    """Assemble count, coefficients, phase, and KMAH index for class M at p.

    n_legs is the number of surface returns; if omitted it is inferred from
    the interface-1 encounter count m0 + m1.  Pass counts must chain
    consistently layer by layer: every entry into a layer must leave it
    through the same interface events the multi-index claims.
    """
    triples = _normalize_multi_index(M, len(profile.interfaces))
    if n_legs is None:
        if not triples or not any(any(t) for t in triples):
            raise ValueError("cannot infer the surface-return count from an "
                             "empty multi-index; pass n_legs")
        n_legs = triples[0][0] + triples[0][1]
    n_legs = int(n_legs)
    if n_legs <= 0:
        raise ValueError("n_legs must be positive")

    info = K.turning_radius(profile, p)
    passes = n_legs
    phase = 0.0
    kmah = Fraction(0)
    count = 1
    consumed = 0
    for j in range(1, profile.n_layers + 1):
        if passes == 0:
            break
        lo_j, hi_j = profile.layer_bounds(j)
        deepest_here = info.layer == j
        if deepest_here and info.kind in ("smooth", "center"):
            phase += 2 * passes * _radial_phase_leg(
                profile, j, max(info.radius, lo_j), hi_j, p)
            kmah += passes * (Fraction(grazing_phase) if info.grazing
                              else Fraction(1))
            passes = 0
            break
        phase += 2 * passes * _radial_phase_leg(profile, j, lo_j, hi_j, p)
        if deepest_here and info.kind == "inner_boundary":
            # unit-coefficient reflection at the inner boundary
            passes = 0
            break
        if deepest_here and info.kind == "interface" and info.grazing \
                and info.grazing_side == "above":
            # tangent turn at the interface: reduced phase, no coefficient
            kmah += passes * Fraction(grazing_phase)
            passes = 0
            break
        # the wave exits layer j through interface j
        m0, m1, m2 = triples[j - 1]
        if m0 + m1 != passes:
            raise ValueError(
                f"multi-index is radially inconsistent at interface {j}: "
                f"{passes} passes arrive from above but m0 + m1 = {m0 + m1}")
        count *= debye_count((m0, m1, m2))
        consumed = j
        passes = m1 + m2
        if deepest_here and info.kind == "interface":
            # total internal reflection or grazing transmission: nothing
            # propagates radially below this interface
            passes = 0
            break
    for j in range(consumed + 1, len(triples) + 1):
        if any(triples[j - 1]):
            raise ValueError(f"multi-index assigns encounters to interface "
                             f"{j}, which the ray never reaches at p={p}")
    Q = q_product(profile, p, triples)
    return ScatteringItinerary(
        multi_index=tuple(triples), p=float(p), n_legs=n_legs, count=count,
        coefficient_product=Q, kmah=kmah, radial_phase=phase)


# ---------------------------------------------------------------------------
# singularity coefficients of the wave-trace expansion
# ---------------------------------------------------------------------------

@dataclass
class TraceSingularity:
    """Coefficient of one (t - T + i0)^(-5/2) singularity.

    amplitude is in units of NORMALIZATION_TOKEN; only ratios between
    classes are meaningful.  degenerate marks classes whose spreading
    factor vanishes identically (the p = 0 radial ray).
    """

    T: float
    order: Fraction
    amplitude: complex
    classes: list
    normalization: str = NORMALIZATION_TOKEN
    degenerate: bool = False
    factors: dict = field(default_factory=dict)

    def to_json(self):
        return {"T": self.T,
                "order": f"{self.order.numerator}/{self.order.denominator}",
                "amplitude_re": self.amplitude.real,
                "amplitude_im": self.amplitude.imag,
                "classes": self.classes,
                "normalization": self.normalization,
                "degenerate": self.degenerate}


def _class_descriptor(ray):
    return {"layer": ray.layer, "kind": ray.kind, "n_legs": ray.n_legs,
            "winding": ray.winding, "p": ray.p, "repetition": ray.repetition}


def _ray_multi_index(profile, ray):
    """Interface triples traversed by one period of a basic ray class."""
    n_int = len(profile.interfaces)
    N = ray.n_legs
    triples = [(0, 0, 0)] * n_int
    if ray.kind == TURNING:
        for j in range(1, ray.layer):
            triples[j - 1] = (0, N, 0)
    elif ray.kind == INTERFACE_REFLECTING:
        for j in range(1, ray.layer):
            triples[j - 1] = (0, N, 0)
        triples[ray.layer - 1] = (N, 0, 0)
    elif ray.kind == RADIAL:
        for j in range(n_int):
            triples[j] = (0, N, 0)
    else:
        raise ValueError(f"unknown ray kind {ray.kind!r}")
    return triples


def trace_amplitude(profile, ray, grazing_phase=GRAZING_PHASE):
    """Singularity coefficient contributed by one periodic basic ray class.

    amplitude = i^KMAH * count * coefficients * one-way time * spreading,
    with spreading = |p^-2 d(total angle)/dp|^(-1/2).  Refuses rays whose
    angle derivative vanishes (conjugate periodic orbits: the coefficient
    is not defined at this order).  The p = 0 radial class has spreading 0
    and is returned with amplitude 0 and degenerate=True.
    """
    if not check_periodic_conjugacy(ray):
        raise ValueError(
            f"ray class (layer {ray.layer}, {ray.kind}, N={ray.n_legs}, "
            f"m={ray.winding}) has vanishing angle derivative; its "
            "singularity coefficient is undefined")
    N = ray.n_legs
    itin = scattering_itinerary(profile, ray.p, _ray_multi_index(profile, ray),
                                n_legs=N, grazing_phase=grazing_phase)
    one_way_time = ray.length / (2 * N)
    if ray.p == 0.0:
        spreading = 0.0
        degenerate = True
    else:
        spreading = abs(ray.dalpha_dp / ray.p ** 2) ** -0.5
        degenerate = False
    amplitude = (_quarter_turn_phase(itin.kmah) * itin.count
                 * itin.coefficient_product * one_way_time * spreading)
    if degenerate:
        amplitude = 0j      # avoid signed zeros from the phase factor
    return TraceSingularity(
        T=ray.length, order=Fraction(-5, 2), amplitude=amplitude,
        classes=[_class_descriptor(ray)], degenerate=degenerate,
        factors={"kmah": itin.kmah, "count": itin.count,
                 "coefficient_product": itin.coefficient_product,
                 "one_way_time": one_way_time, "spreading": spreading,
                 "radial_phase": itin.radial_phase})


def trace_table(profile, rays, period_tol=1e-9, grazing_phase=GRAZING_PHASE):
    """Amplitude table for a list of ray classes, merged by period.

    Classes whose periods agree within period_tol are summed into one
    singularity.  Rays failing the nondegeneracy precondition are skipped
    with a warning rather than aborting the table.
    """
    singular = []
    for ray in rays:
        try:
            singular.append(trace_amplitude(profile, ray, grazing_phase))
        except ValueError as exc:
            warnings.warn(f"skipping ray class: {exc}", UserWarning)
    singular.sort(key=lambda s: s.T)
    merged = []
    for s in singular:
        if merged and abs(s.T - merged[-1].T) <= period_tol:
            prev = merged[-1]
            prev.amplitude += s.amplitude
            prev.classes.extend(s.classes)
            prev.degenerate = prev.degenerate and s.degenerate
            prev.factors = {}
        else:
            merged.append(s)
    return merged


def singularities_to_json(items, **meta):
    doc = dict(meta)
    doc["normalization"] = NORMALIZATION_TOKEN
    doc["singularities"] = [s.to_json() for s in items]
    return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# principal-amplitude injectivity
# ---------------------------------------------------------------------------

@dataclass
class InjectivityReport:
    """Coincident-period groups and their principal-amplitude comparison.

    A group is flagged when two rays of different classes share both the
    period (within period_tol) and the quantity count * coefficients *
    spreading (within amp_tol): such a pair would let distinct classes
    cancel or masquerade in the singularity expansion.
    """

    groups: list
    violations: list

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return json.dumps({"ok": self.ok, "groups": self.groups,
                           "violations": self.violations}, indent=2)


def _same_class(c1, c2, p_tol=1e-9):
    return (c1["layer"] == c2["layer"] and c1["kind"] == c2["kind"]
            and c1["n_legs"] == c2["n_legs"]
            and c1["winding"] == c2["winding"]
            and abs(c1["p"] - c2["p"]) <= p_tol * max(1.0, abs(c1["p"])))


def injectivity_check(singularities, period_tol, amp_tol=1e-9):
    """Group singularities by period and compare principal amplitudes.

    singularities: TraceSingularity items, one class each (as produced by
    trace_amplitude).  Same-class pairs (identical descriptors: rotations,
    reversals, and re-insertions of one class) are never violations.
    """
    items = sorted(singularities, key=lambda s: s.T)
    groups = []
    cur = []
    for s in items:
        if cur and s.T - cur[-1].T > period_tol:
            groups.append(cur)
            cur = []
        cur.append(s)
    if cur:
        groups.append(cur)

    out_groups = []
    violations = []
    for g in groups:
        members = []
        for s in g:
            f = s.factors
            q = f["count"] * f["coefficient_product"] * f["spreading"]
            members.append({"T": s.T, "class": s.classes[0],
                            "value": [q.real, q.imag]})
        viol = []
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                ci, cj = g[i].classes[0], g[j].classes[0]
                if _same_class(ci, cj):
                    continue
                qi = complex(*members[i]["value"])
                qj = complex(*members[j]["value"])
                if abs(qi - qj) <= amp_tol * max(1.0, abs(qi), abs(qj)):
                    viol.append((i, j))
        entry = {"period": float(np.mean([s.T for s in g])),
                 "members": members, "violation_pairs": viol}
        out_groups.append(entry)
        if viol:
            violations.append(entry)
    return InjectivityReport(groups=out_groups, violations=violations)


# ---------------------------------------------------------------------------
# amplitude decay along a gliding approximation
# ---------------------------------------------------------------------------

@dataclass
class GlidingDecay:
    """Singularity amplitudes along a near-gliding family and their decay.

    exponent is the least-squares slope of log|a_m| against log m.  The
    per-record components isolate the factors driving the decay: the
    transmission pair |T_pm T_mp| (vanishing like the underside radial
    slowness), the underside reflection power |R_mm|^(m-1), the spreading
    factor, and the one-way radial time (bounded).
    """

    m_values: list
    a_values: list
    amplitudes: list
    exponent: float
    intercept: float
    components: list

    def extrapolated_tail(self, n_from, n_to):
        """sum of the fitted power law C * k^exponent over (n_from, n_to]."""
        ks = np.arange(n_from + 1, n_to + 1, dtype=float)
        return float(np.sum(math.exp(self.intercept) * ks ** self.exponent))


def gliding_amplitude_decay(approx, profile, grazing_phase=GRAZING_PHASE):
    """Singularity amplitudes of gliding approximants and their decay rate.

    approx: the output of the near-gliding family construction (records of
    one upper arc plus m underside dives).  The m-th amplitude is
    |T_pm T_mp R_mm^(m-1)| * |p^-2 d(total angle)/dp|^(-1/2) * one-way
    radial time, with i^m carried as phase.
    """
    records = approx.records
    if len(records) < 8:
        raise ValueError("need at least 8 approximants for a decay fit")
    idx = approx.interface_index
    b = profile.interfaces[idx - 1]
    lo2 = profile.layer_bounds(idx + 1)[0]
    lower = profile.layers[idx]

    ms, avals, amps, comps = [], [], [], []
    for rec in records:
        p = rec.p
        c = interface_coefficients(profile, idx, p)
        Q = c.T_pm * c.T_mp * c.R_mm ** (rec.m - 1)
        rstar = K.smooth_turning_radius(lower, p, lo2, b)
        da = (2.0 * K.leg_alpha_derivative(profile, idx, b, 1.0, p)
              + rec.m * 2.0 * K.leg_alpha_derivative(profile, idx + 1,
                                                     rstar, b, p))
        spreading = abs(da / p ** 2) ** -0.5
        one_way = 0.5 * (rec.t_up + rec.t_dive)
        amp = _quarter_turn_phase(rec.m) * Q * spreading * one_way
        ms.append(rec.m)
        amps.append(amp)
        avals.append(abs(amp))
        comps.append({"m": rec.m,
                      "transmission": abs(c.T_pm * c.T_mp),
                      "underside_reflection": abs(c.R_mm) ** (rec.m - 1),
                      "spreading": spreading,
                      "one_way_time": one_way})
    a = np.asarray(avals)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("decay fit did not converge: nonpositive or "
                         "non-finite amplitudes in the family")
    slope, intercept = np.polyfit(np.log(ms), np.log(a), 1)
    return GlidingDecay(m_values=ms, a_values=avals, amplitudes=amps,
                        exponent=float(slope), intercept=float(intercept),
                        components=comps)
