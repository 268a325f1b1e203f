"""Command-line front end: bind a profile file to the core computations.

Every subcommand is deterministic for a given (flags, profile file) pair:
JSON is emitted with sorted keys and repr-exact floats, CSV rows are
rendered with repr-exact floats, so reruns are byte-identical.  JSON
documents carry the numeric tolerances that produced them.

Exit codes: 0 success, 1 domain failure (an assumption check fails, a
root search does not converge, simplicity is violated), 2 usage or I/O
errors (bad flags, unreadable profile, malformed JSON).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import disk as disk_mod
from . import modesum, profile, scattering, spectrum

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_CUTOFF = 7.0
DEFAULT_TOL = 1e-9


class UsageError(Exception):
    pass


def _load_profile(path):
    try:
        return profile.LayeredProfile.load(path)
    except FileNotFoundError as exc:
        raise UsageError(f"profile file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed profile JSON in {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid profile schema in {path}: {exc}") from exc


def _dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write_text(path, text):
    try:
        if path is None:
            sys.stdout.write(text)
        else:
            with open(path, "w") as fh:
                fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _out_stem(out):
    stem, ext = os.path.splitext(out)
    return stem if ext.lower() in (".json", ".csv") else out


def _tolerances(args, **extra):
    tols = {"tol": args.tol}
    tols.update(extra)
    return tols


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_profile_check(args):
    prof = _load_profile(args.profile)
    rep = profile.check_smooth_herglotz(prof, grid_points=args.grid_points)
    if args.distributional:
        rep = profile.check_distributional_herglotz(prof,
                                                    grid_points=args.grid_points)
    doc = rep.to_json()
    doc["profile"] = args.profile
    doc["tolerances"] = _tolerances(args, grid_points=args.grid_points)
    _write_text(args.out, _dump_json(doc))
    return EXIT_OK if rep.passed else EXIT_DOMAIN


def cmd_blsp(args):
    if args.cutoff <= 0:
        raise UsageError("--cutoff must be positive")
    prof = _load_profile(args.profile)
    meta = {"profile": args.profile, "cutoff": args.cutoff,
            "max_legs": args.max_legs, "max_winding": args.max_winding,
            "tolerances": _tolerances(args, closure_tol=spectrum.CLOSURE_TOL)}
    try:
        if args.two_speed_profile:
            prof_s = _load_profile(args.two_speed_profile)
            two = spectrum.blsp_two_speeds(prof, prof_s, args.cutoff,
                                           max_legs=args.max_legs,
                                           max_winding=args.max_winding)
            doc = dict(meta)
            doc["entries_p"] = [e.to_json() for e in two.entries_p]
            doc["entries_s"] = [e.to_json() for e in two.entries_s]
            doc["merged"] = [{"length": t, "source": tag, "entry": e.to_json()}
                             for t, tag, e in two.merged]
            doc["collisions"] = [[a.to_json(), b.to_json()]
                                 for a, b in two.collisions]
            json_text = _dump_json(doc)
            csv_text = "length,source\n" + "".join(
                f"{float(t)!r},{tag}\n" for t, tag, _ in two.merged)
        else:
            entries = spectrum.blsp(prof, args.cutoff, max_legs=args.max_legs,
                                    max_winding=args.max_winding)
            json_text = spectrum.spectrum_to_json(entries, **meta) + "\n"
            csv_text = spectrum.spectrum_to_csv(entries)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.out is None:
        _write_text(None, csv_text if args.format == "csv" else json_text)
    else:
        stem = _out_stem(args.out)
        _write_text(stem + ".json", json_text)
        _write_text(stem + ".csv", csv_text)
    return EXIT_OK


def cmd_trace_amplitudes(args):
    if args.cutoff <= 0:
        raise UsageError("--cutoff must be positive")
    prof = _load_profile(args.profile)
    flagged = []
    try:
        entries = spectrum.blsp(prof, args.cutoff, max_legs=args.max_legs,
                                max_winding=args.max_winding)
        rays = [r for e in entries for r in e.rays]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = scattering.trace_table(prof, rays, period_tol=args.tol)
        flagged = [str(w.message) for w in caught
                   if "skipping ray class" in str(w.message)]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    doc = json.loads(scattering.singularities_to_json(
        table, profile=args.profile, cutoff=args.cutoff,
        tolerances=_tolerances(args, period_tol=args.tol)))
    doc["flagged"] = flagged
    json_text = _dump_json(doc)
    csv_lines = ["T,order,amplitude_re,amplitude_im,degenerate,n_classes"]
    for s in table:
        csv_lines.append(f"{float(s.T)!r},{s.order},{float(s.amplitude.real)!r},"
                         f"{float(s.amplitude.imag)!r},{int(s.degenerate)},"
                         f"{len(s.classes)}")
    csv_text = "\n".join(csv_lines) + "\n"
    _write_text(args.out, csv_text if args.format == "csv" else json_text)
    return EXIT_DOMAIN if flagged else EXIT_OK


def _mode_table_cached(args, prof):
    """Build the mode table, reusing a cached CSV keyed by profile hash."""
    key = {"profile_hash": modesum.profile_fingerprint(prof),
           "l_max": args.lmax, "omega_max": args.omegamax}
    stem = _out_stem(args.out)
    csv_path, meta_path = stem + "-modes.csv", stem + "-modes.meta.json"
    if os.path.exists(csv_path) and os.path.exists(meta_path):
        try:
            with open(meta_path) as fh:
                if json.load(fh) == key:
                    return modesum.ModeTable.from_csv(
                        csv_path, profile_hash=key["profile_hash"],
                        omega_max=args.omegamax, l_max=args.lmax), True
        except (OSError, ValueError):
            pass
    table = modesum.wkb_eigenfrequencies(prof, args.lmax, args.omegamax)
    try:
        table.to_csv(csv_path)
    except OSError as exc:
        raise UsageError(f"cannot write {csv_path}: {exc}") from exc
    _write_text(meta_path, _dump_json(key))
    return table, False


def cmd_modesum(args):
    if args.sigma <= 0:
        raise UsageError("--sigma must be positive")
    if args.lmax < 0 or args.omegamax <= 0:
        raise UsageError("--lmax must be >= 0 and --omegamax positive")
    if args.out is None:
        raise UsageError("modesum writes multiple files; --out is required")
    prof = _load_profile(args.profile)
    hard_failures = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table, cached = _mode_table_cached(args, prof)
    for _l, _n, msg in table.failures:
        if "did not converge" in msg or "no bracketed root" in msg:
            hard_failures.append([_l, _n, msg])

    candidates = [e.length for e in spectrum.blsp(prof, args.cutoff)]
    t_lo = min(candidates) - 20 * args.sigma if candidates else 8 * args.sigma
    t_lo = max(t_lo, 8 * args.sigma)
    grid = np.arange(t_lo, args.cutoff, args.sigma / 2.0)
    trace = modesum.trace_series(table, grid, args.sigma)
    report = modesum.detect_peaks(trace, candidates, window=5 * args.sigma)

    stem = _out_stem(args.out)
    try:
        trace.to_csv(stem + "-trace.csv")
    except OSError as exc:
        raise UsageError(f"cannot write {stem}-trace.csv: {exc}") from exc
    doc = report.to_json()
    doc.update(profile=args.profile, profile_hash=table.profile_hash,
               l_max=args.lmax, omega_max=args.omegamax, cached_table=cached,
               n_modes=len(table), candidates=candidates,
               failures=[list(f) for f in table.failures],
               tolerances=_tolerances(args, sigma=args.sigma,
                                      window=5 * args.sigma,
                                      residual_tol=modesum.MODE_RESIDUAL_TOL))
    _write_text(stem + "-peaks.json", _dump_json(doc))
    return EXIT_DOMAIN if hard_failures else EXIT_OK


def cmd_disk(args):
    if args.qmax < 2:
        raise UsageError("--qmax must be at least 2")
    report = disk_mod.simple_lsp_scan(q_max=args.qmax,
                                      winding_max=args.winding_max)
    doc = report.to_json()
    doc["tolerances"] = _tolerances(
        args, float_render_tol=disk_mod.LENGTH_RENDER_TOL)
    json_text = _dump_json(doc)
    csv_lines = ["p,q,length,exact_form"]
    for c in report.chords:
        csv_lines.append(f"{c.p},{c.q},{float(c.length)!r},{c.exact_form}")
    csv_text = "\n".join(csv_lines) + "\n"
    _write_text(args.out, csv_text if args.format == "csv" else json_text)
    bad = (not report.primitive_distinct) or report.probe_mismatches
    return EXIT_DOMAIN if bad else EXIT_OK


def cmd_gliding(args):
    prof = _load_profile(args.profile)
    if not prof.interfaces:
        print("error: profile has no interface to glide along", file=sys.stderr)
        return EXIT_DOMAIN
    glide = {"x": 0.0, "y": args.glide_angle, "Theta_H": args.glide_angle}
    try:
        approx = spectrum.gliding_approximation(prof, 1, glide, args.count)
        decay = None
        if len(approx.records) >= 8:
            decay = scattering.gliding_amplitude_decay(approx, prof)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    doc = {
        "profile": args.profile,
        "glide_angle": args.glide_angle,
        "count": args.count,
        "p_critical": approx.p_critical,
        "theta0": approx.theta0,
        "glide_length": approx.glide_length,
        "kappa_fit_exponent": approx.kappa_fit_exponent,
        "records": [{"m": r.m, "theta": r.theta, "p": r.p, "kappa": r.kappa,
                     "length": r.length, "phi": r.phi} for r in approx.records],
        "tolerances": _tolerances(args),
    }
    if decay is not None:
        doc["decay"] = {"exponent": decay.exponent,
                        "intercept": decay.intercept,
                        "m_values": list(decay.m_values),
                        "amplitude_moduli": [abs(a) for a in decay.amplitudes]}
    json_text = _dump_json(doc)
    csv_lines = ["m,theta,p,kappa,length"]
    for r in approx.records:
        csv_lines.append(f"{r.m},{float(r.theta)!r},{float(r.p)!r},"
                         f"{float(r.kappa)!r},{float(r.length)!r}")
    csv_text = "\n".join(csv_lines) + "\n"
    _write_text(args.out, csv_text if args.format == "csv" else json_text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    top = argparse.ArgumentParser(
        prog="planetspec",
        description="ray-geometric and spectral computations for radially "
                    "symmetric layered planets")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(p, needs_profile=True):
        if needs_profile:
            p.add_argument("--profile", required=True,
                           help="path to a layered-profile JSON file")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="generic numeric tolerance carried into outputs")
        p.add_argument("--out", default=None,
                       help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("profile-check", help="validate monotone slowness")
    common(p)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--distributional", action="store_true")
    p.set_defaults(func=cmd_profile_check)

    p = sub.add_parser("blsp", help="basic length spectrum")
    common(p)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    p.add_argument("--max-legs", type=int, default=24)
    p.add_argument("--max-winding", type=int, default=4)
    p.add_argument("--two-speed-profile", default=None,
                   help="second profile for a tagged two-speed spectrum")
    p.set_defaults(func=cmd_blsp)

    p = sub.add_parser("trace-amplitudes", help="singularity amplitude table")
    common(p)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    p.add_argument("--max-legs", type=int, default=24)
    p.add_argument("--max-winding", type=int, default=4)
    p.set_defaults(func=cmd_trace_amplitudes)

    p = sub.add_parser("modesum", help="WKB mode table, smoothed trace, peaks")
    common(p)
    p.add_argument("--lmax", type=int, default=200)
    p.add_argument("--omegamax", type=float, default=200.0)
    p.add_argument("--sigma", type=float, default=1e-2)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF,
                   help="upper end of the trace window / candidate lengths")
    p.set_defaults(func=cmd_modesum)

    p = sub.add_parser("disk", help="exact disk length-spectrum simplicity scan")
    common(p, needs_profile=False)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--winding-max", type=int, default=4)
    p.set_defaults(func=cmd_disk)

    p = sub.add_parser("gliding", help="approximants of a gliding ray")
    common(p)
    p.add_argument("--glide-angle", type=float, default=0.7,
                   help="central angle of the glide along the interface")
    p.add_argument("--count", type=int, default=12,
                   help="number of approximants")
    p.set_defaults(func=cmd_gliding)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
