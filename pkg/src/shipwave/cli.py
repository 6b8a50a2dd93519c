"""Command-line driver: experiments, sweeps, and reproduction recipes.

Every run writes flat CSV artifacts plus a manifest (inputs, versions,
tolerances, checksums).  All algorithms are deterministic, so identical
configs reproduce byte-identical CSVs.  Exit codes: 0 success, 2 config
error, 3 numerical failure, 4 measurement rejected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .collocation import CollocationGrid, amplitude_full, solve_full_continued
from .config import ConfigError, RunConfig, load_hull_spec
from .divergence import omega
from .errors import MeasurementRejected, NoSingulantError, ShipwaveError
from .hull import Hull, HullSpec, normalize
from .simplified import measure_waves, solve_simplified, sweep_corner
from .stokes import active_corners, emergence_angles, trace_stokes_line
from .svgchart import line_chart
from .waves import dominance_analysis, downstream_amplitude

__all__ = ["main", "canonical_hull"]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    if value is None:
        return ""
    return str(value)


def _write_csv(path: Path, header, rows) -> Path:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _manifest(cfg: RunConfig, artifacts, extra=None) -> Path:
    listing = []
    for p in sorted(artifacts, key=lambda q: q.name):
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        listing.append({"file": p.name, "sha256": digest, "bytes": p.stat().st_size})
    doc = {
        "command": cfg.command,
        "hull": str(cfg.hull_path) if cfg.hull_path else None,
        "parameters": {k: v for k, v in sorted(cfg.params.items())},
        "versions": {
            "shipwave": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "deterministic": cfg.deterministic,
        "artifacts": listing,
    }
    if extra:
        doc.update(extra)
    out = cfg.outdir / "manifest.json"
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def canonical_hull(name: str) -> HullSpec:
    """Built-in geometries used by the reproduction recipes.

    The multi-corner strengths are documented synthetic values (the source
    figures draw the shapes without printing coordinates); the two-corner
    hulls use the quoted a = (0.8, 0.2).
    """
    catalog = {
        # rectangular one-corner stern
        "one-corner": (((1.0, 0.5),), "one-corner"),
        # the Fig. 5 workhorse: [1/4,1/4]-hull, corners at 0.8/0.2
        "two-corner": (((0.8, 0.25), (0.2, 0.25)), "two-corner"),
        # stern with a downward step (bulb): no wave from the bulb corners
        "farrow-tuck": (((0.6, -0.5), (0.3, 0.5), (0.1, 0.5)), "farrow-tuck"),
        # equally spaced staircase, nine rectangular corners
        "staircase-9": (
            tuple((float(9 - i), 0.5 if i % 2 == 0 else -0.5) for i in range(9)),
            "staircase-9",
        ),
        "fig2-steep": (((0.8, 0.5), (0.2, 0.125)), "fig2-steep"),
        "fig2-quarter": (((0.8, 0.25), (0.2, 0.25)), "fig2-quarter"),
    }
    if name not in catalog:
        raise ConfigError(f"unknown canonical hull {name!r}; choices: {sorted(catalog)}")
    corners, label = catalog[name]
    return HullSpec(corners=corners, label=label)


def _hull_from_args(args) -> tuple[Hull, HullSpec, Path | None]:
    if str(args.hull).startswith("@"):
        spec = canonical_hull(str(args.hull)[1:])
        return normalize(spec), spec, None
    spec = load_hull_spec(args.hull)
    return normalize(spec), spec, Path(args.hull)


def _eps_from_args(args, spec: HullSpec) -> float:
    eps = getattr(args, "eps", None)
    if eps is None:
        eps = spec.froude_param
    if eps is None:
        raise ConfigError("no epsilon given (flag --eps or hull-file key)")
    if eps <= 0:
        raise ConfigError(f"epsilon must be positive, got {eps}")
    return float(eps)


def cmd_trace_stokes(args) -> int:
    hull, spec, path = _hull_from_args(args)
    cfg = RunConfig("trace-stokes", Path(args.out), hull_path=path, params={"hull": spec.label})
    cfg.ensure_outdir()
    census = active_corners(hull)
    artifacts = []
    summary = []
    for k in hull.corners:
        if not hull.has_singulant(k):
            summary.append((k, None, "no-singulant", None))
            continue
        try:
            nus = emergence_angles(hull, k)
        except NoSingulantError:
            summary.append((k, None, "no-singulant", None))
            continue
        for nu in nus:
            trace = trace_stokes_line(hull, k, nu)
            rows = [
                (p.real, p.imag, c.real, c.imag)
                for p, c in zip(trace.points, trace.chi_along)
            ]
            art = _write_csv(
                cfg.outdir / f"trace_corner{k}_nu{nu:.6f}.csv",
                ("re_w", "im_w", "re_chi", "im_chi"),
                rows,
            )
            artifacts.append(art)
            summary.append((k, nu, trace.termination, trace.phi_hit))
    artifacts.append(
        _write_csv(cfg.outdir / "summary.csv", ("corner", "nu", "termination", "phi_hit"), summary)
    )
    if args.svg:
        series = [
            (f"corner {k}", [r[0] for r in _read_trace(a)], [r[1] for r in _read_trace(a)])
            for k, a in [(a.name.split("_")[1], a) for a in artifacts if a.name.startswith("trace")]
        ]
        svg = cfg.outdir / "traces.svg"
        line_chart(series, svg, title=f"Stokes lines: {spec.label}", x_label="Re w", y_label="Im w")
        artifacts.append(svg)
    _manifest(cfg, artifacts, extra={"active_set": sorted(census.active)})
    print(f"active corners: {sorted(census.active)}")
    return 0


def _read_trace(path: Path):
    rows = []
    for line in path.read_text().splitlines()[1:]:
        parts = line.split(",")
        rows.append((float(parts[0]), float(parts[1])))
    return rows


def cmd_predict(args) -> int:
    hull, spec, path = _hull_from_args(args)
    eps = _eps_from_args(args, spec)
    cfg = RunConfig(
        "predict",
        Path(args.out),
        hull_path=path,
        params={"eps": eps, "model": args.model, "hull": spec.label},
    )
    cfg.ensure_outdir()
    artifacts = []
    pred = downstream_amplitude(hull, eps, model=args.model)
    rows = [
        (c.corner, c.amplitude, c.phase, c.gamma, c.exponential_rate)
        for c in pred.components
    ]
    artifacts.append(
        _write_csv(
            cfg.outdir / "components.csv",
            ("corner", "amplitude", "phase", "gamma", "exponential_rate"),
            rows,
        )
    )
    artifacts.append(
        _write_csv(
            cfg.outdir / "resultant.csv",
            ("amplitude", "phase", "model", "eps"),
            [(pred.amplitude, pred.phase, pred.model, pred.eps)],
        )
    )
    if args.dominance:
        rep = dominance_analysis(hull, eps)
        artifacts.append(
            _write_csv(
                cfg.outdir / "dominance.csv",
                ("corner", "exponent_integral", "gamma", "log_prefactor"),
                rep.rows,
            )
        )
        (cfg.outdir / "dominance.txt").write_text(
            f"verdict: {rep.verdict}\n"
            + (f"dominant: {rep.dominant}\n" if rep.dominant else "")
            + (f"pair: {rep.pair}\n" if rep.pair else "")
            + rep.detail
            + "\n",
            encoding="utf-8",
        )
        artifacts.append(cfg.outdir / "dominance.txt")
        print(f"dominance verdict: {rep.verdict}")
    _manifest(cfg, artifacts)
    print(f"downstream amplitude ({args.model}): {pred.amplitude!r}")
    return 0


def cmd_omega_table(args) -> int:
    cfg = RunConfig(
        "omega-table",
        Path(args.out),
        params={
            "sigma_min": args.sigma_min,
            "sigma_max": args.sigma_max,
            "step": args.step,
            "tol": args.tol,
        },
    )
    cfg.ensure_outdir()
    rows = []
    sigma = args.sigma_min
    while sigma <= args.sigma_max + 1e-12:
        d = omega(sigma, tol=args.tol)
        rows.append((sigma, d.gamma, d.omega, d.omega_error_est, d.n_used))
        sigma = round(sigma + args.step, 12)
    art = _write_csv(
        cfg.outdir / "omega.csv", ("sigma", "gamma", "omega", "error_est", "n_used"), rows
    )
    _manifest(cfg, [art])
    print(f"wrote {art}")
    return 0


def cmd_solve_simplified(args) -> int:
    hull, spec, path = _hull_from_args(args)
    eps = _eps_from_args(args, spec)
    cfg = RunConfig(
        "solve-simplified",
        Path(args.out),
        hull_path=path,
        params={"eps": eps, "phi_max": args.phi_max, "tol": args.tol, "hull": spec.label},
    )
    cfg.ensure_outdir()
    sol = solve_simplified(hull, eps, phi_max=args.phi_max, tol=args.tol)
    artifacts = []
    meas = measure_waves(sol)
    artifacts.append(
        _write_csv(
            cfg.outdir / "measurement.csv",
            ("amplitude", "wavelength", "phase", "fit_residual", "window_lo", "window_hi"),
            [
                (
                    meas.amplitude,
                    meas.wavelength,
                    meas.phase,
                    meas.fit_residual,
                    meas.window[0],
                    meas.window[1],
                )
            ],
        )
    )
    if args.dump_profile:
        prof = Path(args.dump_profile)
        if not prof.is_absolute():
            prof = cfg.outdir / prof
        artifacts.append(
            _write_csv(
                prof,
                ("phi", "re_u", "im_u", "q"),
                zip(sol.phi, sol.u.real, sol.u.imag, sol.q),
            )
        )
    _manifest(cfg, artifacts)
    print(f"measured amplitude {meas.amplitude!r}, wavelength {meas.wavelength!r}")
    return 0


def cmd_solve_full(args) -> int:
    hull, spec, path = _hull_from_args(args)
    eps = _eps_from_args(args, spec)
    grid = CollocationGrid(n=args.n, dphi=args.dphi)
    cfg = RunConfig(
        "solve-full",
        Path(args.out),
        hull_path=path,
        params={"eps": eps, "n": args.n, "dphi": args.dphi, "hull": spec.label},
    )
    cfg.ensure_outdir()
    theta0 = None
    if args.continue_from:
        prev = np.genfromtxt(args.continue_from, delimiter=",", names=True)
        theta0 = np.interp(grid.nodes, prev["phi"], prev["theta"])
    if theta0 is not None:
        from .collocation import solve_full

        sol = solve_full(hull, eps, grid, theta0=theta0)
    else:
        sol = solve_full_continued(hull, eps, grid)
    artifacts = [
        _write_csv(cfg.outdir / "profile.csv", ("phi", "q", "theta"), zip(sol.phi, sol.q, sol.theta))
    ]
    try:
        meas = measure_waves(sol)
        artifacts.append(
            _write_csv(
                cfg.outdir / "measurement.csv",
                ("amplitude", "wavelength", "phase", "fit_residual"),
                [(meas.amplitude, meas.wavelength, meas.phase, meas.fit_residual)],
            )
        )
        print(f"measured amplitude {meas.amplitude!r}")
    except MeasurementRejected as exc:
        (cfg.outdir / "measurement_rejected.txt").write_text(str(exc) + "\n", encoding="utf-8")
        artifacts.append(cfg.outdir / "measurement_rejected.txt")
        print(f"measurement rejected: {exc}")
    _manifest(cfg, artifacts)
    return 0


def cmd_sweep_corner(args) -> int:
    cfg = RunConfig(
        "sweep-corner",
        Path(args.out),
        params={
            "sigma1": args.sigma1,
            "sigma2": args.sigma2,
            "a1_min": args.a1_min,
            "a1_max": args.a1_max,
            "step": args.step,
            "eps": args.eps,
            "phi_max": args.phi_max,
            "tol": args.tol,
        },
    )
    cfg.ensure_outdir()
    a1 = np.arange(args.a1_min, args.a1_max + 1e-12, args.step)
    res = sweep_corner(
        (args.sigma1, args.sigma2),
        a1,
        args.eps,
        phi_max=args.phi_max,
        tol=args.tol,
        workers=args.workers,
    )
    rows = [
        (p.a1, p.numerical_amplitude, p.asymptotic_amplitude, p.merged_amplitude, p.wavelength, p.flag)
        for p in res.points
    ]
    art = _write_csv(
        cfg.outdir / "sweep.csv",
        ("a1", "num_amp", "asym_amp", "merged_amp", "wavelength", "flags"),
        rows,
    )
    artifacts = [art]
    if args.svg:
        ok = [p for p in res.points if p.numerical_amplitude is not None]
        svg = cfg.outdir / "sweep.svg"
        line_chart(
            [
                ("numerical", [p.a1 for p in ok], [p.numerical_amplitude for p in ok]),
                ("asymptotic", [p.a1 for p in res.points], [p.asymptotic_amplitude for p in res.points]),
                ("merged", [p.a1 for p in res.points], [p.merged_amplitude for p in res.points]),
            ],
            svg,
            title=f"corner sweep eps={args.eps}",
            x_label="a1",
            y_label="amplitude",
            log_y=True,
        )
        artifacts.append(svg)
    _manifest(cfg, artifacts)
    print(f"wrote {art}")
    return 0


def cmd_sweep_epsilon(args) -> int:
    hull, spec, path = _hull_from_args(args)
    cfg = RunConfig(
        "sweep-epsilon",
        Path(args.out),
        hull_path=path,
        params={
            "eps_min": args.eps_min,
            "eps_max": args.eps_max,
            "step": args.step,
            "model": args.model,
            "hull": spec.label,
        },
    )
    cfg.ensure_outdir()
    rows = []
    eps = args.eps_min
    while eps <= args.eps_max + 1e-12:
        pred = downstream_amplitude(hull, eps, model=args.model)
        num = None
        flag = "ok"
        try:
            sol = solve_simplified(hull, eps, phi_max=args.phi_max, tol=args.tol)
            num = measure_waves(sol).amplitude
        except (MeasurementRejected, ShipwaveError) as exc:
            flag = f"rejected: {exc}"
        rows.append((eps, num, pred.amplitude, flag))
        eps = round(eps + args.step, 12)
    art = _write_csv(cfg.outdir / "sweep_eps.csv", ("eps", "num_amp", "asym_amp", "flags"), rows)
    _manifest(cfg, [art])
    print(f"wrote {art}")
    return 0


def cmd_repro(args) -> int:
    out = Path(args.out)
    if args.figure == "fig3":
        return _repro_fig3(out, svg=args.svg)
    if args.figure == "fig4":
        return _repro_fig4(out, svg=args.svg)
    if args.figure == "fig5":
        return _repro_fig5(out, svg=args.svg)
    raise ConfigError(f"unknown reproduction target {args.figure!r}")


def _repro_fig3(out: Path, svg: bool = False) -> int:
    cfg = RunConfig("repro-fig3", out, params={})
    cfg.ensure_outdir()
    artifacts = []
    summary = []
    for name in ("one-corner", "farrow-tuck", "staircase-9"):
        hull = normalize(canonical_hull(name))
        census = active_corners(hull)
        for k in hull.corners:
            for trace in census.traces[k - 1]:
                rows = [
                    (p.real, p.imag, c.real, c.imag)
                    for p, c in zip(trace.points, trace.chi_along)
                ]
                artifacts.append(
                    _write_csv(
                        cfg.outdir / f"{name}_corner{k}_nu{trace.emergence_angle:.6f}.csv",
                        ("re_w", "im_w", "re_chi", "im_chi"),
                        rows,
                    )
                )
                summary.append(
                    (name, k, trace.emergence_angle, trace.termination, trace.phi_hit)
                )
        summary.append((name, "active-set-size", len(census.active), "", None))
    artifacts.append(
        _write_csv(
            cfg.outdir / "summary.csv",
            ("hull", "corner", "nu", "termination", "phi_hit"),
            summary,
        )
    )
    _manifest(cfg, artifacts)
    print(f"wrote {cfg.outdir / 'summary.csv'}")
    return 0


def _repro_fig4(out: Path, svg: bool = False) -> int:
    """Numerical vs asymptotic downstream amplitudes over eps for three
    hull inclinations at corners (0.8, 0.2); synthetic inclination set."""
    cfg = RunConfig("repro-fig4", out, params={})
    cfg.ensure_outdir()
    artifacts = []
    inclinations = ((0.25, 0.25), (0.35, 0.15), (0.5, 0.125))
    eps_grid = (0.45, 0.55, 0.65)
    for s1, s2 in inclinations:
        hull = normalize(HullSpec(corners=((0.8, s1), (0.2, s2)), label=f"[{s1},{s2}]"))
        rows = []
        for eps in eps_grid:
            dphi = 0.015
            n = int(np.ceil(max(15.0, 1.0 + 12 * 2 * np.pi * eps) / dphi))
            flag = "ok"
            num = None
            try:
                meas = amplitude_full(hull, eps, CollocationGrid(n=n, dphi=dphi))
                num = meas.amplitude
            except (MeasurementRejected, ShipwaveError) as exc:
                flag = f"rejected: {exc}"
            pred = downstream_amplitude(hull, eps, model="full")
            rows.append((eps, num, pred.amplitude, flag))
        artifacts.append(
            _write_csv(
                cfg.outdir / f"amplitudes_{s1}_{s2}.csv",
                ("eps", "num_amp", "asym_amp", "flags"),
                rows,
            )
        )
    _manifest(cfg, artifacts)
    print(f"wrote {len(artifacts)} amplitude tables")
    return 0


def _repro_fig5(out: Path, svg: bool = False, eps: float = 0.15) -> int:
    """Corner sweep of the [1/4,1/4]-hull: 25 points graded to resolve the
    cancellation dip near a1 = 0.96."""
    cfg = RunConfig("repro-fig5", out, params={"eps": eps})
    cfg.ensure_outdir()
    coarse = np.arange(0.52, 0.92, 0.025)
    fine = np.arange(0.9225, 0.9825, 0.0075)
    a1 = np.concatenate([coarse, fine])[:25]
    res = sweep_corner((0.25, 0.25), a1, eps, phi_max=60.0)
    rows = [
        (p.a1, p.numerical_amplitude, p.asymptotic_amplitude, p.merged_amplitude, p.wavelength, p.flag)
        for p in res.points
    ]
    art = _write_csv(
        cfg.outdir / "sweep.csv",
        ("a1", "num_amp", "asym_amp", "merged_amp", "wavelength", "flags"),
        rows,
    )
    artifacts = [art]
    if svg:
        ok = [p for p in res.points if p.numerical_amplitude is not None]
        svgp = cfg.outdir / "sweep.svg"
        line_chart(
            [
                ("numerical", [p.a1 for p in ok], [p.numerical_amplitude for p in ok]),
                ("asymptotic", [p.a1 for p in res.points], [p.asymptotic_amplitude for p in res.points]),
                ("merged", [p.a1 for p in res.points], [p.merged_amplitude for p in res.points]),
            ],
            svgp,
            title=f"corner sweep eps={eps}",
            x_label="a1",
            y_label="amplitude",
            log_y=True,
        )
        artifacts.append(svgp)
    _manifest(cfg, artifacts)
    dip = min(
        (p for p in res.points if p.numerical_amplitude is not None),
        key=lambda p: p.numerical_amplitude,
    )
    print(f"numerical dip at a1={dip.a1!r}, amplitude {dip.numerical_amplitude!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shipwave-cli",
        description="Exponentially small ship waves: predictions and numerical checks. "
        "Hull arguments take a TOML file path or @name for a built-in geometry.",
    )
    ap.add_argument("--workers", type=int, default=int(os.environ.get("SHIPWAVE_WORKERS", "1")))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace-stokes", help="trace every corner's Stokes lines")
    p.add_argument("hull")
    p.add_argument("--out", default="out-trace")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_trace_stokes)

    p = sub.add_parser("predict", help="asymptotic downstream wave prediction")
    p.add_argument("hull")
    p.add_argument("--eps", type=float)
    p.add_argument("--model", choices=("full", "simplified"), default="full")
    p.add_argument("--dominance", action="store_true")
    p.add_argument("--out", default="out-predict")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("omega-table", help="divergence-limit table over sigma")
    p.add_argument("--sigma-min", type=float, required=True)
    p.add_argument("--sigma-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default="out-omega")
    p.set_defaults(func=cmd_omega_table)

    p = sub.add_parser("solve-simplified", help="integrate the simplified surface ODE")
    p.add_argument("hull")
    p.add_argument("--eps", type=float)
    p.add_argument("--phi-max", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--dump-profile", default=None)
    p.add_argument("--out", default="out-simplified")
    p.set_defaults(func=cmd_solve_simplified)

    p = sub.add_parser("solve-full", help="collocation solve of the full system")
    p.add_argument("hull")
    p.add_argument("--eps", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dphi", type=float, required=True)
    p.add_argument("--continue-from", default=None)
    p.add_argument("--out", default="out-full")
    p.set_defaults(func=cmd_solve_full)

    p = sub.add_parser("sweep-corner", help="corner-position sweep of a 2-hull")
    p.add_argument("--sigma1", type=float, default=0.25)
    p.add_argument("--sigma2", type=float, default=0.25)
    p.add_argument("--a1-min", type=float, required=True)
    p.add_argument("--a1-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--phi-max", type=float, default=60.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", default="out-sweep")
    p.set_defaults(func=cmd_sweep_corner)

    p = sub.add_parser("sweep-epsilon", help="Froude-parameter sweep on one hull")
    p.add_argument("hull")
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--model", choices=("full", "simplified"), default="simplified")
    p.add_argument("--phi-max", type=float, default=60.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default="out-sweep-eps")
    p.set_defaults(func=cmd_sweep_epsilon)

    p = sub.add_parser("repro", help="canned reproduction recipes")
    p.add_argument("figure", choices=("fig3", "fig4", "fig5"))
    p.add_argument("--out", default="out-repro")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MeasurementRejected as exc:
        print(f"measurement rejected: {exc}", file=sys.stderr)
        return 4
    except ShipwaveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
