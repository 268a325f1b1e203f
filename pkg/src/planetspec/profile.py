"""Radially symmetric layered speed profiles on the unit ball/annulus.

A profile is a finite stack of layers (r_k, r_{k-1}] with r_0 = 1 (the outer
surface) and r_K = inner_radius.  Each layer carries a smooth wave-speed model
c(r) > 0; adjacent layers meet at interface radii where c genuinely jumps.
The quantity doing most of the work downstream is

    rho(r) = r / c(r)          (angular slowness)
    xi(r)  = rho(r)**2

A profile is "well behaved" for ray enumeration when rho is strictly
increasing inside every layer (the smooth monotonicity condition checked by
:func:`check_smooth_herglotz`); the stronger distributional variant
additionally requires rho to jump *upwards* across every interface.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

JUMP_TOL = 1e-12
DENSITY_CONSISTENCY_TOL = 1e-12


# ---------------------------------------------------------------------------
# speed / density models
# ---------------------------------------------------------------------------

class ConstantSpeed:
    """c(r) = c0."""

    model = "constant"

    def __init__(self, c: float):
        if c <= 0:
            raise ValueError(f"speed must be positive, got {c}")
        self.c0 = float(c)

    def c(self, r):
        return self.c0 if np.isscalar(r) else np.full_like(np.asarray(r, float), self.c0)

    def dc_dr(self, r):
        return 0.0 if np.isscalar(r) else np.zeros_like(np.asarray(r, float))

    def xi(self, r):
        r = np.asarray(r, float) if not np.isscalar(r) else r
        return (r / self.c0) ** 2

    def dxi_dr(self, r):
        return 2.0 * r / self.c0 ** 2

    def d2xi_dr2(self, r):
        return 2.0 / self.c0 ** 2 if np.isscalar(r) else np.full_like(np.asarray(r, float), 2.0 / self.c0 ** 2)

    def to_json(self):
        return {"model": "constant", "c": self.c0}


class LogSpeed:
    """rho(r)**2 = a + b*log(r), i.e. c(r) = r / sqrt(a + b*log r).

    The closed-form family for which one-leg epicentral distances have an
    elementary antiderivative; b > 0 gives a monotone rho.
    """

    model = "log"

    def __init__(self, a: float, b: float):
        self.a = float(a)
        self.b = float(b)

    def xi(self, r):
        return self.a + self.b * np.log(r)

    def dxi_dr(self, r):
        return self.b / r

    def d2xi_dr2(self, r):
        return -self.b / (np.asarray(r, float) ** 2) if not np.isscalar(r) else -self.b / r ** 2

    def c(self, r):
        x = self.xi(r)
        return r / np.sqrt(x)

    def dc_dr(self, r):
        # c = r * xi^{-1/2}
        x = self.xi(r)
        return 1.0 / np.sqrt(x) - 0.5 * r * self.dxi_dr(r) / x ** 1.5

    def to_json(self):
        return {"model": "log", "a": self.a, "b": self.b}


class PolyLnSpeed:
    """rho(r)**2 = P(log r) for a polynomial P; generalizes :class:`LogSpeed`."""

    model = "polyln"

    def __init__(self, coeffs):
        self.coeffs = [float(v) for v in coeffs]
        self._p = np.polynomial.Polynomial(self.coeffs)
        self._dp = self._p.deriv()
        self._d2p = self._dp.deriv()

    def xi(self, r):
        return self._p(np.log(r))

    def dxi_dr(self, r):
        return self._dp(np.log(r)) / r

    def d2xi_dr2(self, r):
        u = np.log(r)
        return (self._d2p(u) - self._dp(u)) / (np.asarray(r, float) ** 2 if not np.isscalar(r) else r ** 2)

    def c(self, r):
        return r / np.sqrt(self.xi(r))

    def dc_dr(self, r):
        x = self.xi(r)
        return 1.0 / np.sqrt(x) - 0.5 * r * self.dxi_dr(r) / x ** 1.5

    def to_json(self):
        return {"model": "polyln", "coeffs": list(self.coeffs)}


class SplineSpeed:
    """Sampled speed fallback: cubic spline through (r, c) knots.

    Interior smoothness of the spline is C^2, but knot data only pins the
    underlying function to C^1-with-Lipschitz-derivative at best; profile
    validation attaches a note rather than rejecting such layers.
    """

    model = "spline"

    def __init__(self, knots):
        knots = sorted((float(r), float(c)) for r, c in knots)
        if len(knots) < 4:
            raise ValueError("spline speed model needs at least 4 knots")
        self._r = np.array([k[0] for k in knots])
        self._c = np.array([k[1] for k in knots])
        if np.any(self._c <= 0):
            raise ValueError("spline speed knots must be positive")
        self._spl = CubicSpline(self._r, self._c)
        self._dspl = self._spl.derivative()
        self._d2spl = self._dspl.derivative()

    def c(self, r):
        return self._spl(r)

    def dc_dr(self, r):
        return self._dspl(r)

    def xi(self, r):
        return (r / self._spl(r)) ** 2

    def dxi_dr(self, r):
        c = self._spl(r)
        dc = self._dspl(r)
        return 2.0 * r / c ** 2 - 2.0 * r ** 2 * dc / c ** 3

    def d2xi_dr2(self, r):
        c = self._spl(r)
        dc = self._dspl(r)
        d2c = self._d2spl(r)
        return (2.0 / c ** 2 - 8.0 * r * dc / c ** 3
                - 2.0 * r ** 2 * d2c / c ** 3 + 6.0 * r ** 2 * dc ** 2 / c ** 4)

    def to_json(self):
        return {"model": "spline", "knots": [[float(r), float(c)] for r, c in zip(self._r, self._c)]}


_SPEED_MODELS = {"constant": ConstantSpeed, "log": LogSpeed, "polyln": PolyLnSpeed, "spline": SplineSpeed}


def speed_model_from_json(d):
    kind = d.get("model")
    if kind == "constant":
        return ConstantSpeed(d["c"])
    if kind == "log":
        return LogSpeed(d["a"], d["b"])
    if kind == "polyln":
        return PolyLnSpeed(d["coeffs"])
    if kind == "spline":
        return SplineSpeed(d["knots"])
    raise ValueError(f"unknown speed model {kind!r}")


class ScalarModel:
    """Scalar radial field (density or shear modulus) for one layer.

    Accepts a plain number (constant) or {"model": "constant", "value": v} /
    {"model": "spline", "knots": [[r, v], ...]}-style dicts.
    """

    def __init__(self, spec):
        if isinstance(spec, (int, float)):
            self._kind = "constant"
            self._value = float(spec)
            if self._value <= 0:
                raise ValueError("density-type fields must be positive")
        elif isinstance(spec, dict) and spec.get("model") == "constant":
            self._kind = "constant"
            self._value = float(spec["value"])
        elif isinstance(spec, dict) and spec.get("model") == "spline":
            knots = sorted((float(r), float(v)) for r, v in spec["knots"])
            self._kind = "spline"
            self._spl = CubicSpline([k[0] for k in knots], [k[1] for k in knots])
            self._knots = knots
        else:
            raise ValueError(f"unsupported scalar model {spec!r}")

    def __call__(self, r):
        if self._kind == "constant":
            return self._value if np.isscalar(r) else np.full_like(np.asarray(r, float), self._value)
        return self._spl(r)

    def to_json(self):
        if self._kind == "constant":
            return self._value
        return {"model": "spline", "knots": [[r, v] for r, v in self._knots]}


# ---------------------------------------------------------------------------
# layered profile
# ---------------------------------------------------------------------------

@dataclass
class LayerDensity:
    rho: ScalarModel
    mu: ScalarModel


class LayeredProfile:
    """Piecewise-smooth radial speed profile on (inner_radius, 1].

    Parameters
    ----------
    layers : sequence of speed models, outermost first (layer 1 = (r_1, 1]).
    interfaces : strictly decreasing interface radii inside (inner_radius, 1);
        one fewer than the number of layers.
    inner_radius : inner boundary radius R in [0, 1); R = 0 means a full ball.
    density : optional per-layer (rho, mu) scalar models; when present the
        consistency c = sqrt(mu/rho) is enforced on a validation grid.
    """

    def __init__(self, layers, interfaces=(), inner_radius=0.0, density=None,
                 jump_tol=JUMP_TOL):
        interfaces = [float(r) for r in interfaces]
        if len(layers) != len(interfaces) + 1:
            raise ValueError("need exactly one more layer than interfaces")
        if not 0.0 <= inner_radius < 1.0:
            raise ValueError(f"inner_radius must lie in [0, 1), got {inner_radius}")
        if any(i2 >= i1 for i1, i2 in zip(interfaces, interfaces[1:])):
            raise ValueError("interface radii must be strictly decreasing")
        if interfaces and not (inner_radius < interfaces[-1] and interfaces[0] < 1.0):
            raise ValueError("interfaces must lie strictly inside (inner_radius, 1)")
        self.layers = list(layers)
        self.interfaces = interfaces
        self.inner_radius = float(inner_radius)
        self.jump_tol = jump_tol
        # radii bounding layer k (1-based): bounds[k-1] = (r_k, r_{k-1})
        rs = [1.0] + interfaces + [self.inner_radius]
        self._bounds = [(rs[k + 1], rs[k]) for k in range(len(self.layers))]
        self.density = None
        if density is not None:
            if len(density) != len(self.layers):
                raise ValueError("density must have one entry per layer")
            self.density = [d if isinstance(d, LayerDensity)
                            else LayerDensity(ScalarModel(d["rho"]), ScalarModel(d["mu"]))
                            for d in density]
        self._validate()

    # -- structure ---------------------------------------------------------

    @property
    def n_layers(self):
        return len(self.layers)

    def layer_bounds(self, k):
        """(r_lo, r_hi) of layer k, 1-based from the surface down."""
        return self._bounds[k - 1]

    def layer_of(self, r, side="above"):
        """Index (1-based) of the layer containing r; `side` breaks interface ties.

        side="above" returns the outer layer at an interface radius,
        side="below" the inner one.
        """
        if not self.inner_radius <= r <= 1.0:
            raise ValueError(f"radius {r} outside profile domain")
        for k, (lo, hi) in enumerate(self._bounds, start=1):
            if lo < r < hi:
                return k
            if r == hi:  # interface r_{k-1} or the surface
                return k if (k == 1 or side == "below") else k - 1
            if r == lo == self.inner_radius:
                return k
        raise ValueError(f"could not locate radius {r}")

    def model_at(self, r, side="above"):
        return self.layers[self.layer_of(r, side) - 1]

    # -- pointwise fields ---------------------------------------------------

    def c(self, r, side="above"):
        return float(self.model_at(r, side).c(r))

    def rho(self, r, side="above"):
        return r / self.c(r, side)

    def xi(self, r, side="above"):
        return float(self.model_at(r, side).xi(r))

    def mu(self, r, side="above"):
        """Shear modulus; defaults to 1 when no density model is attached."""
        if self.density is None:
            return 1.0
        return float(self.density[self.layer_of(r, side) - 1].mu(r))

    def rho_density(self, r, side="above"):
        if self.density is None:
            return 1.0
        return float(self.density[self.layer_of(r, side) - 1].rho(r))

    # -- validation ----------------------------------------------------------

    def _validate(self):
        for k, (lo, hi) in enumerate(self._bounds, start=1):
            mdl = self.layers[k - 1]
            grid = np.linspace(max(lo, 1e-9), hi, 16)
            cvals = np.atleast_1d(mdl.c(grid))
            if not np.all(np.isfinite(cvals)) or np.any(cvals <= 0):
                raise ValueError(f"layer {k} speed not positive/finite on ({lo}, {hi}]")
        for j, rk in enumerate(self.interfaces, start=1):
            c_above = float(self.layers[j - 1].c(rk))
            c_below = float(self.layers[j].c(rk))
            if abs(c_above - c_below) <= self.jump_tol:
                raise ValueError(
                    f"interface {j} at r={rk} is not a genuine jump: "
                    f"|c+ - c-| = {abs(c_above - c_below):.3e} <= {self.jump_tol}")
        if self.density is not None:
            for k, (lo, hi) in enumerate(self._bounds, start=1):
                grid = np.linspace(max(lo, 1e-9) + 1e-12, hi, 64)
                c_direct = np.atleast_1d(self.layers[k - 1].c(grid))
                c_from_density = np.sqrt(self.density[k - 1].mu(grid) / self.density[k - 1].rho(grid))
                err = np.max(np.abs(c_direct - c_from_density))
                if err > DENSITY_CONSISTENCY_TOL:
                    raise ValueError(
                        f"layer {k}: c and sqrt(mu/rho) disagree by {err:.3e}")

    # -- serialization -------------------------------------------------------

    def to_json(self):
        out = {
            "inner_radius": self.inner_radius,
            "interfaces": list(self.interfaces),
            "layers": [m.to_json() for m in self.layers],
        }
        if self.density is not None:
            out["density"] = [{"rho": d.rho.to_json(), "mu": d.mu.to_json()}
                              for d in self.density]
        return out

    @classmethod
    def from_json(cls, d):
        return cls(
            layers=[speed_model_from_json(m) for m in d["layers"]],
            interfaces=d.get("interfaces", []),
            inner_radius=d.get("inner_radius", 0.0),
            density=d.get("density"),
        )

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)
            f.write("\n")


def make_log_profile(params, interfaces=(), inner_radius=0.0, density=None):
    """Build a profile whose layers all have rho^2 = a_k + b_k log r.

    params : sequence of (a, b) pairs, outermost layer first.  Raises if the
    radicand a + b log r fails to stay positive anywhere in its layer.
    """
    params = list(params)
    layers = [LogSpeed(a, b) for a, b in params]
    rs = [1.0] + [float(r) for r in interfaces] + [float(inner_radius)]
    for k, (a, b) in enumerate(params):
        lo, hi = rs[k + 1], rs[k]
        lo_eff = max(lo, 1e-12)
        worst = min(a + b * math.log(lo_eff), a + b * math.log(hi))
        if worst <= 0:
            raise ValueError(
                f"layer {k + 1}: radicand a + b*log(r) = {worst:.3e} <= 0 "
                f"on ({lo}, {hi}] with (a, b) = ({a}, {b})")
    return LayeredProfile(layers, interfaces, inner_radius, density=density)


# ---------------------------------------------------------------------------
# monotone-slowness checks
# ---------------------------------------------------------------------------

@dataclass
class HerglotzReport:
    """Result of a monotone-slowness validation pass.

    passed is True exactly when violations is empty, which (on the sampled
    grid) is equivalent to min_margin > 0.
    """

    passed: bool
    min_margin: float
    violations: list = field(default_factory=list)
    interface_jumps: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    grid_points: int = 0

    def to_json(self):
        return {
            "passed": self.passed,
            "min_margin": self.min_margin,
            "violations": self.violations,
            "interface_jumps": self.interface_jumps,
            "notes": self.notes,
            "grid_points": self.grid_points,
        }


def _drho_dr(model, r):
    c = np.asarray(model.c(r), float)
    dc = np.asarray(model.dc_dr(r), float)
    return (c - r * dc) / c ** 2


def check_smooth_herglotz(profile, grid_points=512):
    """Check d(r/c)/dr > 0 inside every layer on a per-layer grid.

    grid_points is the total budget; every layer gets at least 2 points.
    """
    per_layer = max(2, grid_points // profile.n_layers)
    violations = []
    notes = []
    min_margin = math.inf
    for k, (lo, hi) in enumerate((profile.layer_bounds(k) for k in range(1, profile.n_layers + 1)), start=1):
        mdl = profile.layers[k - 1]
        if mdl.model == "spline":
            notes.append(f"layer {k}: spline model is C^2 as interpolant but only "
                         "C^1 information is pinned by knot data (smoothness not verified)")
        eps = 1e-9 * (hi - lo)
        grid = np.linspace(max(lo, 1e-9) + eps, hi - eps, per_layer)
        margins = _drho_dr(mdl, grid)
        min_margin = min(min_margin, float(np.min(margins)))
        bad = np.nonzero(margins <= 0)[0]
        for i in bad:
            violations.append({"layer": k, "r": float(grid[i]), "drho_dr": float(margins[i])})
    return HerglotzReport(passed=not violations, min_margin=min_margin,
                          violations=violations, notes=notes,
                          grid_points=per_layer * profile.n_layers)


def check_distributional_herglotz(profile, grid_points=512):
    """Smooth check plus the sign of the slowness jump at every interface.

    The distributional condition additionally requires rho(r_k^-) < rho(r_k^+);
    a downward jump traps rays just below the interface and fails the check.
    """
    rep = check_smooth_herglotz(profile, grid_points)
    jumps = []
    min_margin = rep.min_margin
    for j, rk in enumerate(profile.interfaces, start=1):
        rho_above = rk / float(profile.layers[j - 1].c(rk))
        rho_below = rk / float(profile.layers[j].c(rk))
        jump = rho_above - rho_below  # > 0 required
        jumps.append({"interface": j, "r": rk, "rho_below": rho_below,
                      "rho_above": rho_above, "jump": jump, "ok": jump > 0})
        min_margin = min(min_margin, jump)
        if jump <= 0:
            rep.violations.append({"interface": j, "r": rk, "rho_jump": jump})
    return HerglotzReport(passed=not rep.violations, min_margin=min_margin,
                          violations=rep.violations, interface_jumps=jumps,
                          notes=rep.notes, grid_points=rep.grid_points)


def emit_phase_space(profile, samples_per_layer=128):
    """Tabulate (r, rho(r)) per layer, for plots of the slowness profile.

    Returns a list of dicts {"layer": k, "r": array, "rho": array}.
    """
    out = []
    for k in range(1, profile.n_layers + 1):
        lo, hi = profile.layer_bounds(k)
        grid = np.linspace(max(lo, 1e-9) + 1e-12, hi, samples_per_layer)
        mdl = profile.layers[k - 1]
        out.append({"layer": k, "r": grid, "rho": grid / np.asarray(mdl.c(grid), float)})
    return out
