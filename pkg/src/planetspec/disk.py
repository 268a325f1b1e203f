"""Exact arithmetic for the constant-speed disk's broken-ray lengths.

A periodic broken ray in the unit disk with q segments and winding
number p (in lowest terms) turns by the angle 2*pi*p/q between
reflections, so each segment is a chord of length 2*sin(pi*p/q) and the
total length is 2q*sin(pi*p/q).  Writing sin(pi*p/q) = sin(2*pi*r) with
r = p/(2q) in (0, 1/4], whether two such lengths have a rational ratio
is a question about ratios of sines at rational arguments.  This module
decides it exactly:

* the only rational values of cos(2*pi*s) for rational s in [0, 1/4)
  are cos(0) = 1 and cos(pi/3) = 1/2;
* a rational ratio of two irrational cosines forces their real
  cyclotomic fields Q(cos(2*pi/b)) to coincide, which happens only for
  equal denominators, a doubled odd denominator, or denominators with a
  degree-one cosine;
* within one field, multiplying the Galois-conjugate equations of
  cos1 = ratio * cos2 makes the ratio a root of unity, and positivity
  plus distinctness of the arguments rules out +1 and -1.

Everything runs on exact big-integer rationals; high-precision floats
appear only in advisory cross-checks and rendered decimal expansions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd

import mpmath

from ._threads import thread_map

LENGTH_RENDER_TOL = 1e-12     # float length vs 50-digit evaluation
PROBE_DENOMINATOR_BOUND = 10 ** 6
PROBE_DPS = 50

DEGREE_ONE_COSINES = frozenset({1, 2, 3, 4, 6})   # cos(2*pi/n) rational


# ---------------------------------------------------------------------------
# chords
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChordRay:
    """Periodic broken ray of the unit disk: q chords winding p times."""

    p: int
    q: int
    rotation: Fraction
    opening_angle: float
    exact_form: str
    length: float

    @classmethod
    def make(cls, p, q):
        p, q = int(p), int(q)
        if q < 2 or p < 1:
            raise ValueError("need q >= 2 and p >= 1")
        if gcd(p, q) != 1:
            raise ValueError(f"rotation number {p}/{q} not in lowest terms")
        if not (2 * p < q or (p, q) == (1, 2)):
            raise ValueError(f"rotation number {p}/{q} outside (0, 1/2]")
        length = float(2 * q * math.sin(math.pi * p / q))
        hp = cls._high_precision_length(p, q, dps=PROBE_DPS)
        if abs(length - float(hp)) > LENGTH_RENDER_TOL:
            raise AssertionError(f"float length for {p}/{q} off by more "
                                 f"than {LENGTH_RENDER_TOL}")
        return cls(p=p, q=q, rotation=Fraction(p, q),
                   opening_angle=2.0 * math.pi * p / q,
                   exact_form=f"2*{q}*sin({p}*pi/{q})",
                   length=length)

    @staticmethod
    def _high_precision_length(p, q, dps):
        with mpmath.workdps(dps):
            return 2 * q * mpmath.sin(mpmath.pi * p / q)

    @property
    def sine_argument(self):
        """The rational r with length = 2q * sin(2*pi*r); r in (0, 1/4]."""
        return Fraction(self.p, 2 * self.q)

    def decimal(self, dps=PROBE_DPS):
        with mpmath.workdps(dps):
            return mpmath.nstr(self._high_precision_length(self.p, self.q, dps),
                               dps, strip_zeros=False)

    def to_json(self):
        return {"p": self.p, "q": self.q,
                "rotation": f"{self.p}/{self.q}",
                "opening_angle": self.opening_angle,
                "exact_form": self.exact_form,
                "length": self.length,
                "decimal": self.decimal()}


def chord_rays(q_max):
    """All primitive chord rays with q <= q_max: the diameter plus every
    rotation number p/q in (0, 1/2) in lowest terms."""
    if q_max < 2:
        raise ValueError("q_max must be at least 2")
    rays = [ChordRay.make(1, 2)]
    for q in range(3, q_max + 1):
        for p in range(1, (q + 1) // 2):
            if 2 * p < q and gcd(p, q) == 1:
                rays.append(ChordRay.make(p, q))
    return rays


# ---------------------------------------------------------------------------
# totients and real cyclotomic fields
# ---------------------------------------------------------------------------

def euler_totient(n):
    """phi(n) by trial-division factorization."""
    n = int(n)
    if n < 1:
        raise ValueError("totient needs n >= 1")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


def phi_product_check(a, b):
    """Whether phi(a*b) == phi(b); true exactly when a = 2 and b is odd."""
    a, b = int(a), int(b)
    if a <= 1 or b <= 1:
        raise ValueError("need a > 1 and b > 1")
    return euler_totient(a * b) == euler_totient(b)


def cos_degree(n):
    """Algebraic degree of cos(2*pi/n): 1 on {1,2,3,4,6}, else phi(n)/2."""
    n = int(n)
    if n < 1:
        raise ValueError("need n >= 1")
    if n in DEGREE_ONE_COSINES:
        return 1
    return euler_totient(n) // 2


def real_cyclotomic_equal(a, b):
    """Whether Q(cos(2*pi/a)) and Q(cos(2*pi/b)) are the same field.

    True exactly for a = b, a = 2b with b odd, b = 2a with a odd, or both
    denominators carrying a rational cosine (a, b in {1,2,3,4,6}).
    """
    a, b = int(a), int(b)
    if a < 1 or b < 1:
        raise ValueError("need a, b >= 1")
    return (a == b
            or (a == 2 * b and b % 2 == 1)
            or (b == 2 * a and a % 2 == 1)
            or (a in DEGREE_ONE_COSINES and b in DEGREE_ONE_COSINES))


# ---------------------------------------------------------------------------
# rationality of sine ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SineRatioDecision:
    rational: bool
    case: str
    ratio: Fraction | None = None
    probe: Fraction | None = None
    probe_checked: bool = False

    def to_json(self):
        return {"rational": self.rational, "case": self.case,
                "ratio": None if self.ratio is None else str(self.ratio),
                "probe": None if self.probe is None else str(self.probe),
                "probe_checked": self.probe_checked}


def _exact_rational(x):
    if isinstance(x, float):
        raise TypeError("pass exact rationals (Fraction, int pair, or string), "
                        "not floats")
    return Fraction(x)


def _rational_cosine(s):
    """cos(2*pi*s) as a Fraction when it is rational, else None (s in [0,1/4))."""
    if s == 0:
        return Fraction(1)
    if s == Fraction(1, 6):
        return Fraction(1, 2)
    return None


def _rational_probe(r1, r2, dps=PROBE_DPS, bound=PROBE_DENOMINATOR_BOUND):
    """Continued-fraction rationality probe of sin(2*pi*r1)/sin(2*pi*r2)."""
    with mpmath.workdps(dps):
        value = mpmath.sin(2 * mpmath.pi * r1.numerator / r1.denominator) \
            / mpmath.sin(2 * mpmath.pi * r2.numerator / r2.denominator)
        x = value
        h0, h1 = 1, int(mpmath.floor(x))
        k0, k1 = 0, 1
        x -= h1
        while k1 <= bound:
            if abs(value - mpmath.mpf(h1) / k1) < mpmath.mpf(10) ** (-(dps - 10)):
                return Fraction(h1, k1)
            if x == 0:
                break
            x = 1 / x
            a = int(mpmath.floor(x))
            x -= a
            h0, h1 = h1, a * h1 + h0
            k0, k1 = k1, a * k1 + k0
    return None


def sine_ratio_rational(r1, r2, probe=True):
    """Decide exactly whether sin(2*pi*r1)/sin(2*pi*r2) is rational.

    Both arguments must be distinct exact rationals in (0, 1/4].  The
    decision substitutes s = 1/4 - r, reducing to a ratio of cosines on
    [0, 1/4): only s = 0 and s = 1/6 give rational cosines, a rational
    ratio of irrational cosines forces equal real cyclotomic fields, and
    the conjugate-product argument eliminates the equal-field cases.
    The optional high-precision continued-fraction probe is advisory: a
    disagreement warns but the exact decision is returned.
    """
    r1, r2 = _exact_rational(r1), _exact_rational(r2)
    if not (0 < r1 <= Fraction(1, 4)) or not (0 < r2 <= Fraction(1, 4)):
        raise ValueError("arguments must lie in (0, 1/4]")
    if r1 == r2:
        raise ValueError("arguments must be distinct")
    s1, s2 = Fraction(1, 4) - r1, Fraction(1, 4) - r2
    c1, c2 = _rational_cosine(s1), _rational_cosine(s2)

    if c1 is not None and c2 is not None:
        rational, ratio = True, c1 / c2
        case = "both cosines rational (1 and 1/2)"
    elif (c1 is None) != (c2 is None):
        rational, ratio = False, None
        case = "exactly one cosine rational, the other is a degree >= 2 algebraic"
    elif not real_cyclotomic_equal(s1.denominator, s2.denominator):
        rational, ratio = False, None
        case = (f"distinct real cyclotomic fields for denominators "
                f"{s1.denominator} and {s2.denominator}")
    else:
        rational, ratio = False, None
        case = ("equal fields: the conjugate product forces the ratio to "
                "+/-1, excluded by positivity and distinct arguments")

    probe_value = None
    if probe:
        probe_value = _rational_probe(r1, r2)
        if (probe_value is not None) != rational:
            warnings.warn(f"rationality probe disagrees with the exact case "
                          f"analysis for ({r1}, {r2}): probe={probe_value}, "
                          f"case={case!r}")
        elif rational and probe_value != ratio:
            warnings.warn(f"probe ratio {probe_value} differs from exact "
                          f"ratio {ratio} for ({r1}, {r2})")
    return SineRatioDecision(rational=rational, case=case, ratio=ratio,
                             probe=probe_value, probe_checked=probe)


# ---------------------------------------------------------------------------
# exhaustive simplicity scan
# ---------------------------------------------------------------------------

@dataclass
class HarmonicCoincidence:
    index_a: int
    index_b: int
    winding_a: int
    winding_b: int
    common_length: float

    def to_json(self):
        return {"index_a": self.index_a, "index_b": self.index_b,
                "winding_a": self.winding_a, "winding_b": self.winding_b,
                "common_length": self.common_length}


@dataclass
class LengthScanReport:
    q_max: int
    winding_max: int
    chords: list
    primitive_distinct: bool
    rational_pairs: list          # (index_a, index_b, Fraction length ratio)
    coincidences: list
    probed_pairs: int = 0
    probe_mismatches: list = field(default_factory=list)

    def to_json(self):
        return {
            "q_max": self.q_max,
            "winding_max": self.winding_max,
            "n_primitive": len(self.chords),
            "primitive_distinct": self.primitive_distinct,
            "rational_pairs": [
                {"index_a": i, "index_b": j, "length_ratio": str(rho),
                 "chord_a": self.chords[i].to_json(),
                 "chord_b": self.chords[j].to_json()}
                for i, j, rho in self.rational_pairs],
            "coincidences": [c.to_json() for c in self.coincidences],
            "probed_pairs": self.probed_pairs,
            "probe_mismatches": self.probe_mismatches,
            "chords": [c.to_json() for c in self.chords],
        }


def simple_lsp_scan(q_max, winding_max=4, probe_stride=500):
    """Exhaustively test simplicity of the disk's primitive basic lengths.

    Decides every pairwise sine ratio exactly, asserts the primitive
    lengths are pairwise distinct, collects all rational length ratios,
    and lists the harmonic coincidences those ratios generate up to
    winding_max.  Every probe_stride-th pair is additionally run through
    the advisory high-precision probe.
    """
    chords = chord_rays(q_max)
    pairs = list(combinations(range(len(chords)), 2))

    def decide_chunk(chunk):
        return [sine_ratio_rational(chords[i].sine_argument,
                                    chords[j].sine_argument, probe=False)
                for i, j in chunk]

    chunk_size = max(1, len(pairs) // 64)
    chunks = [pairs[a:a + chunk_size] for a in range(0, len(pairs), chunk_size)]
    decisions = [d for part in thread_map(decide_chunk, chunks) for d in part]

    probed = 0
    probe_mismatches = []
    for k in range(0, len(pairs), max(1, probe_stride)):
        i, j = pairs[k]
        d = sine_ratio_rational(chords[i].sine_argument,
                                chords[j].sine_argument, probe=True)
        probed += 1
        if (d.probe is not None) != d.rational:
            probe_mismatches.append((i, j, str(d.probe), d.case))

    rational_pairs = []
    distinct = True
    for (i, j), d in zip(pairs, decisions):
        if not d.rational:
            continue    # irrational sine ratio: lengths cannot coincide
        length_ratio = d.ratio * Fraction(chords[i].q, chords[j].q)
        rational_pairs.append((i, j, length_ratio))
        if length_ratio == 1:
            distinct = False

    coincidences = []
    for i, j, rho in rational_pairs:
        a, b = rho.numerator, rho.denominator    # L_i * b = L_j * a
        k = 1
        while k * b <= winding_max and k * a <= winding_max:
            coincidences.append(HarmonicCoincidence(
                index_a=i, index_b=j, winding_a=k * b, winding_b=k * a,
                common_length=k * b * chords[i].length))
            k += 1

    return LengthScanReport(q_max=q_max, winding_max=winding_max,
                            chords=chords, primitive_distinct=distinct,
                            rational_pairs=rational_pairs,
                            coincidences=coincidences,
                            probed_pairs=probed,
                            probe_mismatches=probe_mismatches)
