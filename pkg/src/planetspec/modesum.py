"""Toroidal eigenfrequency tables and smoothed spectral traces.

Substituting V = sqrt(mu) * r * U turns each angular order l of the
toroidal wave equation, at leading order in frequency, into a
one-dimensional Schrodinger problem with potential l(l+1)/r^2 measured
against omega^2/c(r)^2.  With the half-integer angular momentum
nu = l + 1/2 and slowness p = nu/omega, the oscillatory region of a
mode is the radial span of the ray with parameter p and the accumulated
radial phase is omega times the same integral of sqrt(xi - p^2)/r that
appears in ray travel times.  Counting phase between the two ends,

    omega * I(p(omega)) = pi * (n + eps(p)),

pins down the n-th overtone of order l.  The offset eps collects how the
mode closes off at depth: a quarter wave at a smooth turning point, zero
at a free (Neumann) boundary, and the reflection phase of the
underside-evanescent interface state for totally reflected modes.

Summing cos(omega t) over a table with degeneracy weights (2l + 1) and a
Gaussian frequency cutoff gives a smoothed trace whose local maxima sit
at the periods of periodic basic rays; `detect_peaks` scores that
alignment against a list of candidate lengths.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.signal import find_peaks

from . import kinematics as K
from ._threads import thread_map
from .spectrum import RootSolveWarning

TURNING_PHASE = 0.25        # quarter-wave loss at a smooth turning point
NEUMANN_PHASE = 0.0         # reflection off a free (Neumann) boundary
MODE_RESIDUAL_TOL = 1e-9    # |omega*I - pi(n+eps)| accepted as converged

MODE_CSV_HEADER = "n,l,omega"
TRACE_CSV_HEADER = "t,Z"


def profile_fingerprint(profile):
    """Canonical sha256 hex digest of a profile, for table and cache keys."""
    payload = json.dumps(profile.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# mode tables
# ---------------------------------------------------------------------------

@dataclass
class ModeTable:
    """Eigenfrequency table: parallel arrays (n, l, omega), sorted by (l, n)."""

    n: np.ndarray
    l: np.ndarray
    omega: np.ndarray
    profile_hash: str = ""
    omega_max: float = math.inf
    l_max: int = 0
    failures: list = field(default_factory=list)

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=int)
        self.l = np.asarray(self.l, dtype=int)
        self.omega = np.asarray(self.omega, dtype=float)
        if not (self.n.shape == self.l.shape == self.omega.shape):
            raise ValueError("n, l, omega must be parallel arrays")
        order = np.lexsort((self.n, self.l))
        self.n, self.l, self.omega = self.n[order], self.l[order], self.omega[order]
        if np.any(self.n < 0) or np.any(self.l < 0):
            raise ValueError("overtone and angular order must be >= 0")
        if np.any(self.omega > self.omega_max * (1 + 1e-12)):
            raise ValueError("table contains omega above omega_max")
        same_l = self.l[1:] == self.l[:-1]
        if np.any(same_l & (np.diff(self.omega) <= 0)):
            raise ValueError("omega must increase with n at fixed l")

    def __len__(self):
        return self.omega.size

    def count_below(self, omega):
        return int(np.count_nonzero(self.omega <= omega))

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write(MODE_CSV_HEADER + "\n")
            for n, l, w in zip(self.n, self.l, self.omega):
                f.write(f"{int(n)},{int(l)},{float(w)!r}\n")

    @classmethod
    def from_csv(cls, path, profile_hash="", omega_max=None, l_max=None):
        ns, ls, ws = [], [], []
        with open(path) as f:
            header = f.readline().strip()
            if header != MODE_CSV_HEADER:
                raise ValueError(f"expected header {MODE_CSV_HEADER!r}, got {header!r}")
            for line in f:
                if not line.strip():
                    continue
                a, b, c = line.split(",")
                ns.append(int(a))
                ls.append(int(b))
                ws.append(float(c))
        omega = np.asarray(ws, float)
        if omega_max is None:
            omega_max = float(omega.max()) if omega.size else 0.0
        if l_max is None:
            l_max = int(max(ls)) if ls else 0
        return cls(np.asarray(ns), np.asarray(ls), omega,
                   profile_hash=profile_hash, omega_max=omega_max, l_max=l_max)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------

@dataclass
class _ModeFamily:
    """One depth-closure regime: its slowness bracket and phase data.

    `radial_phase` and `angle` are interpolants in p of the one-way
    integrals of sqrt(xi - p^2)/r and p/(r sqrt(xi - p^2)) over the
    oscillatory span; `phase_offset` is eps (a float, or a callable of a
    p array for slowness-dependent reflection phases).
    """

    name: str
    p_lo: float
    p_hi: float
    phase_offset: object
    radial_phase: PchipInterpolator
    angle: PchipInterpolator
    skip_zero_level: bool = False

    def eps(self, p_arr):
        if callable(self.phase_offset):
            return self.phase_offset(p_arr)
        return np.full_like(np.asarray(p_arr, float), float(self.phase_offset))


def _chebyshev_grid(a, b, n):
    k = np.arange(n)
    return a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))


def _tir_phase_offset(profile):
    """eps(p) = atan(|Z_below|/Z_above)/pi at the first interface."""
    r1 = profile.interfaces[0]
    above, below = profile.layers[0], profile.layers[1]
    xi_a = float(above.xi(r1))
    xi_b = float(below.xi(r1))
    mu_a = profile.mu(r1, side="above")
    mu_b = profile.mu(r1, side="below")

    def offset(p_arr):
        p2 = np.asarray(p_arr, float) ** 2
        beta_a = np.sqrt(np.maximum(xi_a - p2, 0.0)) / r1
        beta_b = np.sqrt(np.maximum(p2 - xi_b, 0.0)) / r1
        return np.arctan2(mu_b * beta_b, mu_a * beta_a) / math.pi

    return offset


def _mode_families(profile, omega_max, p_grid_points):
    """Quantizable mode families of the outermost layer.

    Turning modes close at a smooth turning point inside layer 1;
    boundary modes (single-layer annulus) reflect off the free inner
    boundary; totally reflected modes bounce on an underside-evanescent
    first interface.  Slowness windows with a leaky (partially
    transmitting) underside are not quantized.
    """
    lay = profile.layers[0]
    r_lo, _ = profile.layer_bounds(1)
    p_surface = math.sqrt(float(lay.xi(1.0)))
    p_floor = min(0.25 / omega_max, 0.25 * p_surface)
    p_bottom = 0.0
    if r_lo > 0.0:
        p_bottom = math.sqrt(max(float(lay.xi(r_lo)), 0.0))

    families = []
    lo = max(p_bottom * (1 + 1e-13), p_floor)
    hi = p_surface * (1 - 1e-13)
    if lo < hi * (1 - 1e-12):
        grid = _chebyshev_grid(lo, hi, p_grid_points)
        rstar = K.turning_radius_scan(lay, grid, max(r_lo, 0.0), 1.0)
        ivals = K.phase_scan_turning(lay, grid, rstar, 1.0)
        avals = K.alpha_scan_turning(lay, grid, rstar, 1.0)
        families.append(_ModeFamily(
            "turning", lo, hi, TURNING_PHASE,
            PchipInterpolator(grid, ivals), PchipInterpolator(grid, avals)))

    if p_bottom * (1 - 1e-12) > p_floor:
        hi = p_bottom * (1 - 1e-13)
        grid = _chebyshev_grid(p_floor, hi, p_grid_points)
        ivals = K.phase_scan_reflecting(lay, grid, r_lo, 1.0)
        avals = K.alpha_scan_reflecting(lay, grid, r_lo, 1.0)
        if profile.n_layers == 1:
            families.append(_ModeFamily(
                "boundary", p_floor, hi, NEUMANN_PHASE,
                PchipInterpolator(grid, ivals), PchipInterpolator(grid, avals),
                skip_zero_level=True))
        else:
            xi_below = float(profile.layers[1].xi(r_lo))
            p_evanescent = math.sqrt(max(xi_below, 0.0))
            if p_evanescent < hi:
                tir_lo = max(p_evanescent * (1 + 1e-13), p_floor)
                keep = grid >= tir_lo
                if np.count_nonzero(keep) >= 4:
                    families.append(_ModeFamily(
                        "interface-tir", tir_lo, hi, _tir_phase_offset(profile),
                        PchipInterpolator(grid[keep], ivals[keep]),
                        PchipInterpolator(grid[keep], avals[keep])))
    return families


def _solve_family(fam, l, omega_max, newton_steps, coarse_points=192):
    """All overtone roots of omega*I(nu/omega) = pi(n + eps) in one family.

    Returns (n_array, omega_array, p_array, failures); failures are
    (n, l, reason) triples for levels whose root could not be placed.
    """
    nu = l + 0.5
    w_lo = nu / fam.p_hi
    w_hi = min(omega_max, nu / fam.p_lo)
    if w_hi <= w_lo:
        return None
    empty = (np.empty(0, int), np.empty(0, float), np.empty(0, float), [])

    def theta(omega):
        p = np.clip(nu / omega, fam.p_lo, fam.p_hi)
        return omega * fam.radial_phase(p), p

    th_lo, p_at_lo = theta(np.array([w_lo]))
    th_hi, p_at_hi = theta(np.array([w_hi]))
    eps_lo = float(fam.eps(p_at_lo)[0])
    eps_hi = float(fam.eps(p_at_hi)[0])
    n_lo = max(0, math.ceil(th_lo[0] / math.pi - eps_lo - 1e-12))
    n_hi = math.floor(th_hi[0] / math.pi - eps_hi + 1e-12)
    if fam.skip_zero_level and n_lo == 0:
        n_lo = 1
    if n_hi < n_lo:
        return empty

    n_arr = np.arange(n_lo, n_hi + 1)
    w_grid = np.linspace(w_lo, w_hi, coarse_points)
    th_grid, _ = theta(w_grid)
    # eps varies little across the window; seed with the midpoint value
    eps_mid = float(fam.eps(np.array([np.clip(2 * nu / (w_lo + w_hi),
                                              fam.p_lo, fam.p_hi)]))[0])
    omega = np.interp(math.pi * (n_arr + eps_mid), th_grid, w_grid)

    for _ in range(newton_steps):
        p = np.clip(nu / omega, fam.p_lo, fam.p_hi)
        ivals = fam.radial_phase(p)
        resid = omega * ivals - math.pi * (n_arr + fam.eps(p))
        slope = ivals + p * fam.angle(p)
        omega = np.clip(omega - resid / slope, w_lo, w_hi)

    p = np.clip(nu / omega, fam.p_lo, fam.p_hi)
    resid = omega * fam.radial_phase(p) - math.pi * (n_arr + fam.eps(p))
    ok = np.abs(resid) <= MODE_RESIDUAL_TOL * np.maximum(1.0, omega)
    failures = []
    if not np.all(ok):
        # Newton can stall where eps(p) varies steeply (grazing edge of a
        # totally reflecting window); the count is monotone, so bisect.
        for i in np.nonzero(~ok)[0]:
            n_i = int(n_arr[i])

            def level_gap(w, n_i=n_i):
                pp = np.array([np.clip(nu / w, fam.p_lo, fam.p_hi)])
                return float(w * fam.radial_phase(pp)[0]
                             - math.pi * (n_i + fam.eps(pp)[0]))

            if level_gap(w_lo) > 0.0 or level_gap(w_hi) < 0.0:
                failures.append((n_i, l, "no bracketed root in the regime window"))
                continue
            omega[i] = brentq(level_gap, w_lo, w_hi, xtol=1e-13, rtol=8.9e-16,
                              maxiter=200)
            ok[i] = abs(level_gap(omega[i])) <= MODE_RESIDUAL_TOL * max(1.0, omega[i])
            if not ok[i]:
                failures.append((n_i, l, "root iteration did not converge"))
    p = np.clip(nu / omega, fam.p_lo, fam.p_hi)
    return n_arr[ok], omega[ok], p[ok], failures


def wkb_eigenfrequencies(profile, l_max, omega_max, *, p_grid_points=2001,
                         newton_steps=12):
    """Quantized eigenfrequency table for all l <= l_max, omega <= omega_max.

    Requires a density model on the profile (the transformation to
    Schrodinger form and interface reflection phases involve the shear
    modulus).  Multi-layer profiles are quantized only over slowness
    windows confined to the outermost layer (smooth turning or total
    internal reflection); windows with a partially transmitting
    underside have no real quantization condition and are skipped.
    Unplaceable levels are reported per (n, l) in `failures` and warned.
    """
    if profile.density is None:
        raise ValueError("eigenfrequency quantization needs a density model "
                         "attached to the profile")
    if l_max < 0 or omega_max <= 0:
        raise ValueError("need l_max >= 0 and omega_max > 0")
    families = _mode_families(profile, omega_max, p_grid_points)

    def solve_l(l):
        per_family = []
        failures = []
        for fam in families:
            res = _solve_family(fam, l, omega_max, newton_steps)
            if res is None:
                continue
            n_arr, w_arr, p_arr, fails = res
            per_family.append((fam, n_arr, w_arr, p_arr))
            failures.extend(fails)
        # stitch families along increasing omega; adjacent regimes can
        # both claim the overtone nearest their shared edge (the phase
        # rule is discontinuous there) -- keep the root deeper inside
        # its own slowness window and report the duplicate.
        seen = {}
        for fam, n_arr, w_arr, p_arr in per_family:
            half_width = 0.5 * (fam.p_hi - fam.p_lo)
            for n, w, p in zip(n_arr, w_arr, p_arr):
                depth = min(p - fam.p_lo, fam.p_hi - p) / max(half_width, 1e-300)
                n = int(n)
                if n not in seen or depth > seen[n][1]:
                    if n in seen:
                        failures.append((n, l, "regime-edge duplicate dropped"))
                    seen[n] = (float(w), depth)
                else:
                    failures.append((n, l, "regime-edge duplicate dropped"))
        ns = sorted(seen)
        # a level that fell in the phase gap between two regimes has no
        # root in either window; report the hole in the overtone count
        first_expected = 1 if (profile.n_layers == 1
                               and profile.inner_radius > 0.0 and l == 0) else 0
        if ns:
            for miss in range(first_expected, ns[0]):
                failures.append((miss, l, "level lies in a regime-transition gap"))
        for a, b in zip(ns, ns[1:]):
            for miss in range(a + 1, b):
                failures.append((miss, l, "level lies in a regime-transition gap"))
        omegas = [seen[n][0] for n in ns]
        return ns, omegas, failures

    chunks = [range(a, min(a + 64, l_max + 1)) for a in range(0, l_max + 1, 64)]
    chunk_results = thread_map(lambda ch: [solve_l(l) for l in ch], chunks)

    all_n, all_l, all_w, failures = [], [], [], []
    for chunk, results in zip(chunks, chunk_results):
        for l, (ns, ws, fails) in zip(chunk, results):
            all_n.extend(ns)
            all_l.extend([l] * len(ns))
            all_w.extend(ws)
            failures.extend(fails)
    if failures:
        warnings.warn(f"{len(failures)} quantization levels were not placed "
                      f"(first: {failures[0]})", RootSolveWarning)
    return ModeTable(np.asarray(all_n), np.asarray(all_l), np.asarray(all_w),
                     profile_hash=profile_fingerprint(profile),
                     omega_max=float(omega_max), l_max=int(l_max),
                     failures=failures)


# ---------------------------------------------------------------------------
# smoothed trace
# ---------------------------------------------------------------------------

@dataclass
class SmoothedTrace:
    """Gaussian-smoothed spectral trace on a uniform time grid."""

    t: np.ndarray
    values: np.ndarray
    sigma: float

    def __post_init__(self):
        self.t = np.asarray(self.t, float)
        self.values = np.asarray(self.values, float)
        if self.t.ndim != 1 or self.t.size < 2 or self.t.shape != self.values.shape:
            raise ValueError("need matching 1-D t and values with >= 2 samples")
        steps = np.diff(self.t)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("time grid must be uniform")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write(TRACE_CSV_HEADER + "\n")
            for t, z in zip(self.t, self.values):
                f.write(f"{float(t)!r},{float(z)!r}\n")

    @classmethod
    def from_csv(cls, path, sigma):
        ts, zs = [], []
        with open(path) as f:
            header = f.readline().strip()
            if header != TRACE_CSV_HEADER:
                raise ValueError(f"expected header {TRACE_CSV_HEADER!r}, got {header!r}")
            for line in f:
                if not line.strip():
                    continue
                a, b = line.split(",")
                ts.append(float(a))
                zs.append(float(b))
        return cls(np.asarray(ts), np.asarray(zs), sigma)


def trace_series(modes, t, sigma, mode_chunk=20000, t_chunk=1024):
    """Z_sigma(t) = sum over modes of (2l+1) cos(omega t) exp(-(sigma*omega)^2/2).

    Evaluation is chunked over both the table and the time grid; time
    chunks may be distributed over threads, and every chunk accumulates
    modes in table order, so results are bit-reproducible for any thread
    count.
    """
    if len(modes) == 0:
        raise ValueError("empty mode table")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    t = np.asarray(t, float)
    weights = (2.0 * modes.l + 1.0) * np.exp(-0.5 * (sigma * modes.omega) ** 2)
    omega = modes.omega

    def eval_slice(sl):
        tt = t[sl]
        acc = np.zeros(tt.size)
        for a in range(0, omega.size, mode_chunk):
            b = min(a + mode_chunk, omega.size)
            acc += weights[a:b] @ np.cos(np.outer(omega[a:b], tt))
        return acc

    slices = [slice(a, min(a + t_chunk, t.size)) for a in range(0, t.size, t_chunk)]
    parts = thread_map(eval_slice, slices)
    return SmoothedTrace(t, np.concatenate(parts), sigma)


# ---------------------------------------------------------------------------
# peak detection
# ---------------------------------------------------------------------------

@dataclass
class PeakMatch:
    candidate: float
    covered: bool
    matched: bool
    peak_time: float = math.nan
    offset: float = math.nan
    prominence: float = math.nan

    def to_json(self):
        return dict(candidate=self.candidate, covered=self.covered,
                    matched=self.matched, peak_time=self.peak_time,
                    offset=self.offset, prominence=self.prominence)


@dataclass
class PeakReport:
    matches: list
    peak_times: np.ndarray
    peak_prominences: np.ndarray
    window: float

    def top(self, k):
        """The k most prominent local maxima of |Z| as (time, prominence)."""
        order = np.argsort(self.peak_prominences)[::-1][:k]
        return [(float(self.peak_times[i]), float(self.peak_prominences[i]))
                for i in order]

    def to_json(self):
        return dict(window=self.window,
                    matches=[m.to_json() for m in self.matches],
                    peaks=[{"t": float(t), "prominence": float(q)}
                           for t, q in zip(self.peak_times, self.peak_prominences)])


def detect_peaks(trace, candidates, window):
    """Match candidate singular times against local maxima of |Z_sigma|.

    For each candidate T the report carries the nearest peak of |Z|
    within T +/- window (offset and prominence); candidates whose window
    is not fully covered by the trace grid are flagged uncovered rather
    than unmatched.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    absz = np.abs(trace.values)
    idx, props = find_peaks(absz, prominence=0.0)
    peak_t = trace.t[idx]
    peak_q = props["prominences"]

    matches = []
    t0, t1 = float(trace.t[0]), float(trace.t[-1])
    for cand in candidates:
        cand = float(cand)
        covered = (cand - window >= t0) and (cand + window <= t1)
        if not covered:
            matches.append(PeakMatch(cand, covered=False, matched=False))
            continue
        near = np.abs(peak_t - cand) <= window
        if not np.any(near):
            matches.append(PeakMatch(cand, covered=True, matched=False))
            continue
        cand_t = peak_t[near]
        cand_q = peak_q[near]
        j = np.argmin(np.abs(cand_t - cand))
        matches.append(PeakMatch(cand, covered=True, matched=True,
                                 peak_time=float(cand_t[j]),
                                 offset=float(cand_t[j] - cand),
                                 prominence=float(cand_q[j])))
    return PeakReport(matches, peak_t, peak_q, float(window))
