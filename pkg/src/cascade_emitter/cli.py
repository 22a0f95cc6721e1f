"""Batch command-line front end.

    cascade-emitter <command> [--config FILE] [--out DIR] [--format csv|json]
                              [--threads N] [--ratio R] [--phi RAD]

Each command writes one data artifact plus manifest.json into --out. On
failure a single JSON line {"error": {...}} goes to stderr.

Exit codes: 0 success, 2 configuration/usage error, 3 compute error,
4 validation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import amplitudes as amp
from . import correlations as corr
from . import io
from . import schmidt as sch
from . import spectra as spec
from ._parallel import default_threads
from .params import (Config, ConfigError, FrequencyGrid, TimeGrid, default_grid_k, default_grid_q,
                     load_config)
from .polarization import (DEFAULT_SPLIT, DEFAULT_TAU_E, PolarizedCascadeParams,
                           default_polarized_grids, polarized_jsd)

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_VALIDATION = 0, 2, 3, 4

COMMANDS = ("spectrum", "g1", "g2-time", "g2-tau", "g2-freq", "jsa", "jsd", "schmidt",
            "schmidt-sweep", "polarized-jsd", "validate")

DEFAULT_SWEEP = (1.0, 2.0, 5.0, 10.0, 20.0, 40.0)


class UsageError(ConfigError):
    pass


class ValidationFailed(RuntimeError):
    pass


# -- helpers ---------------------------------------------------------------


def _check_writable(out: Path):
    try:
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=out):
            pass
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc.strerror}") from None


def _spectrum_grid(cfg: Config) -> FrequencyGrid:
    if cfg.grid_k is not None:
        return cfg.grid_k
    p = cfg.params
    return FrequencyGrid(p.omega_alpha - 40 * (p.gamma_alpha + p.gamma_beta),
                         p.omega_beta + 40 * p.gamma_beta, 2001)


def _grids_kq(cfg: Config, n_points: int):
    p = cfg.params
    return (cfg.grid_k or default_grid_k(p, n_points), cfg.grid_q or default_grid_q(p, n_points))


def _tau_grid(cfg: Config, default: TimeGrid) -> TimeGrid:
    return cfg.tau_grid or default


def _polarized(cfg: Config, phi: float | None) -> PolarizedCascadeParams:
    h = cfg.params
    pol = cfg.polarization
    v = replace(h,
                gamma_alpha=float(pol.get("gamma_alpha_v", h.gamma_alpha)),
                gamma_beta=float(pol.get("gamma_beta_v", h.gamma_beta)),
                omega_alpha=float(pol.get("omega_alpha_v", h.omega_alpha - DEFAULT_SPLIT)),
                omega_beta=float(pol.get("omega_beta_v", h.omega_beta + DEFAULT_SPLIT)))
    tau_e = float(pol.get("tau_e", DEFAULT_TAU_E))
    if phi is None and "phi" in pol:
        phi = float(pol["phi"])
    if phi is not None:
        if "delta_fss" in pol:
            raise ConfigError("give either phi or polarization.delta_fss, not both")
        return PolarizedCascadeParams.from_phase(h, v, phi, tau_e)
    return PolarizedCascadeParams(h, v, float(pol.get("delta_fss", math.pi / 4 / tau_e)), tau_e)


def _surface_header(surface, p, axis_names):
    return {"domain": surface.domain_tag, "axes": axis_names, "log_scale_hint": surface.log_scale_hint,
            "params": p.to_dict(), "layout": "row-major, x outer"}


def _write_surface(out, name, fmt, surface, p, axis_names):
    header = _surface_header(surface, p, axis_names)
    if fmt == "csv":
        io.write_columns(out / f"{name}.csv", io.long_format(surface.axis1, surface.axis2, surface.values))
        io.write_json(out / f"{name}.header.json", header)
        return [f"{name}.csv", f"{name}.header.json"]
    doc = dict(header, x=surface.axis1.tolist(), y=surface.axis2.tolist(), values=surface.values.tolist())
    io.write_json(out / f"{name}.json", doc)
    return [f"{name}.json"]


def _write_table(out, name, fmt, columns):
    if fmt == "csv":
        io.write_columns(out / f"{name}.csv", columns)
        return [f"{name}.csv"]
    io.write_json(out / f"{name}.json", {k: np.asarray(v).tolist() for k, v in columns.items()})
    return [f"{name}.json"]


# -- commands --------------------------------------------------------------
# each returns (output file names, grids used, summary)


def cmd_spectrum(cfg, args, out):
    p = cfg.params
    grid = _spectrum_grid(cfg)
    table = spec.spectrum_table(grid, p)
    files = _write_table(out, "spectrum", args.format, table)
    summary = {
        "fwhm_alpha": spec.power_spectrum("alpha", grid, p).fwhm(),
        "fwhm_beta": spec.power_spectrum("beta", grid, p).fwhm(),
    }
    return files, {"omega": grid.to_dict()}, summary


def cmd_g1(cfg, args, out):
    p = cfg.params
    tg = _tau_grid(cfg, TimeGrid(-10 / p.gamma_beta, 10 / p.gamma_beta, 2001))
    tau = tg.points
    a, b = spec.g1(tau, "alpha", p), spec.g1(tau, "beta", p)
    table = {"tau_ns": tau, "g1_alpha_re": a.real, "g1_alpha_im": a.imag,
             "g1_beta_re": b.real, "g1_beta_im": b.imag}
    return _write_table(out, "g1", args.format, table), {"tau": tg.to_dict()}, {}


def cmd_g2_time(cfg, args, out):
    p = cfg.params
    tg = cfg.time_grid or TimeGrid(0.0, 800.0, 201)
    ug = _tau_grid(cfg, TimeGrid(-300.0, 300.0, 241))
    surf = corr.g2_time_surface(tg.points, ug.points, p, threads=args.threads)
    files = _write_surface(out, "g2-time", args.format, surf, p, ["t_ns", "tau_ns"])
    return files, {"t": tg.to_dict(), "tau": ug.to_dict()}, {"max": float(surf.values.max())}


def cmd_g2_tau(cfg, args, out):
    p = cfg.params
    tg = _tau_grid(cfg, TimeGrid(-300.0, 300.0, 601))
    table = {"tau_ns": tg.points, "g2_cross": corr.g2_cross_tau(tg.points, p)}
    summary = {"g2_cross_zero": float(corr.g2_cross_tau(0.0, p))}
    return _write_table(out, "g2-tau", args.format, table), {"tau": tg.to_dict()}, summary


def cmd_g2_freq(cfg, args, out):
    p = cfg.params
    gk, gq = _grids_kq(cfg, 201)
    surf = corr.g2_freq_surface(gk.points, gq.points, p, threads=args.threads)
    files = _write_surface(out, "g2-freq", args.format, surf, p, ["omega_ghz", "omega_prime_ghz"])
    summary = {"on_resonance": float(corr.g2_cross_freq(p.omega_alpha, p.omega_beta, p))}
    return files, {"omega": gk.to_dict(), "omega_prime": gq.to_dict()}, summary


def cmd_jsa(cfg, args, out):
    gk, gq = _grids_kq(cfg, 256)
    jsa = amp.build_jsa(cfg.params, gk, gq, threads=args.threads)
    if args.format == "csv":
        io.write_columns(out / "jsa.csv", io.jsa_columns(jsa))
        files = ["jsa.csv"]
    else:
        io.write_json(out / "jsa.json", io.jsa_envelope(jsa))
        files = ["jsa.json"]
    return files, {"k": gk.to_dict(), "q": gq.to_dict()}, {"grid_norm": jsa.norm()}


def cmd_jsd(cfg, args, out):
    p = cfg.params
    gk, gq = _grids_kq(cfg, 256)
    jsa = amp.build_jsa(p, gk, gq, threads=args.threads)
    dens = sch.joint_spectral_density(jsa)
    surf = corr.G2Surface(gk.points, gq.points, dens, "freq_k_q")
    files = _write_surface(out, "jsd", args.format, surf, p, ["omega_k", "omega_q"])
    summary = {"grid_norm": jsa.norm(),
               "antidiagonal_fraction_6ga": sch.antidiagonal_fraction(jsa, p, 6 * p.gamma_alpha)}
    return files, {"k": gk.to_dict(), "q": gq.to_dict()}, summary


def _schmidt_for(cfg, params, threads):
    opts = cfg.schmidt
    method = opts.get("method", "conditional")
    n = int(opts.get("n", 512))
    if method == "conditional":
        return sch.cascade_schmidt(params, n)
    if method == "grid":
        span = float(opts.get("span", 40.0))
        gk = cfg.grid_k or default_grid_k(params, n, span)
        gq = cfg.grid_q or default_grid_q(params, n, span)
        return sch.schmidt_decompose(amp.build_jsa(params, gk, gq, threads=threads))
    raise ConfigError(f"schmidt.method must be 'conditional' or 'grid', got {method!r}")


def cmd_schmidt(cfg, args, out):
    p = cfg.params
    res = _schmidt_for(cfg, p, args.threads)
    if args.format == "csv":
        io.write_columns(out / "schmidt.csv", {"index": np.arange(res.coefficients.size),
                                               "lambda": res.coefficients})
        files = ["schmidt.csv"]
    else:
        io.write_json(out / "schmidt.json", res.to_dict())
        files = ["schmidt.json"]
    exact = sch.schmidt_number_analytic(p)
    summary = {"schmidt_number": res.schmidt_number, "kappa_analytic": exact, "purity": res.purity,
               "rank_effective": res.rank_effective, "rel_error": abs(res.schmidt_number / exact - 1)}
    return files, res.grid_meta, summary


def schmidt_sweep(ratios, cfg: Config, threads=1) -> list[dict]:
    """One row per ratio; a failing ratio is recorded in its row and the sweep continues."""
    ratios = list(ratios)
    if not ratios:
        raise UsageError("schmidt-sweep needs at least one ratio")
    if any(not (r > 0) for r in ratios):
        raise UsageError("all sweep ratios must be > 0")
    rows = []
    for r in ratios:
        p = cfg.params.with_ratio(r)
        exact = sch.schmidt_number_analytic(p)
        try:
            res = _schmidt_for(cfg, p, threads)
            rows.append({"ratio": r, "kappa_numeric": res.schmidt_number, "kappa_analytic": exact,
                         "purity": res.purity, "rel_error": abs(res.schmidt_number / exact - 1),
                         "status": "ok"})
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            rows.append({"ratio": r, "kappa_numeric": math.nan, "kappa_analytic": exact,
                         "purity": math.nan, "rel_error": math.nan, "status": f"error: {exc}"})
    return rows


def cmd_schmidt_sweep(cfg, args, out):
    ratios = cfg.ratios if cfg.ratios is not None else DEFAULT_SWEEP
    rows = schmidt_sweep(ratios, cfg, args.threads)
    if args.format == "csv":
        io.write_rows(out / "schmidt-sweep.csv", rows)
        files = ["schmidt-sweep.csv"]
    else:
        io.write_json(out / "schmidt-sweep.json", {"rows": [_json_safe(r) for r in rows]})
        files = ["schmidt-sweep.json"]
    ok = [r for r in rows if r["status"] == "ok"]
    summary = {"rows": len(rows), "failed": len(rows) - len(ok),
               "max_rel_error": max((r["rel_error"] for r in ok), default=None)}
    return files, {"schmidt": dict(cfg.schmidt) or {"method": "conditional", "n": 512}}, summary


def _json_safe(row):
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in row.items()}


def cmd_polarized_jsd(cfg, args, out):
    pp = _polarized(cfg, args.phi)
    if cfg.grid_k is not None or cfg.grid_q is not None:
        d_xx, d_x = default_polarized_grids(pp)
        gxx, gx = cfg.grid_k or d_xx, cfg.grid_q or d_x
    else:
        gxx, gx = default_polarized_grids(pp)
    vals = polarized_jsd(gxx, gx, pp, threads=args.threads)
    surf = corr.G2Surface(gxx.points, gx.points, vals, "freq_xx_x")
    files = _write_surface(out, "polarized-jsd", args.format, surf, pp.branch_h, ["omega_xx", "omega_x"])
    return files, {"xx": gxx.to_dict(), "x": gx.to_dict()}, {"polarized": pp.to_dict()}


def cmd_validate(cfg, args, out):
    from .validation import run_suite

    results = run_suite()
    for r in results:
        print(r.line())
    io.write_json(out / "validate.json", {"checks": [r.to_dict() for r in results]})
    failed = [r for r in results if not r.passed]
    summary = {"checks": len(results), "failed": len(failed)}
    if failed:
        raise ValidationFailed(f"{len(failed)} of {len(results)} checks failed",
                               ["validate.json"], summary)
    return ["validate.json"], {}, summary


HANDLERS = {
    "spectrum": cmd_spectrum, "g1": cmd_g1, "g2-time": cmd_g2_time, "g2-tau": cmd_g2_tau,
    "g2-freq": cmd_g2_freq, "jsa": cmd_jsa, "jsd": cmd_jsd, "schmidt": cmd_schmidt,
    "schmidt-sweep": cmd_schmidt_sweep, "polarized-jsd": cmd_polarized_jsd, "validate": cmd_validate,
}


# -- entry point -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cascade-emitter", description="Cascade emitter spectra, correlations and Schmidt analysis.")
    ap.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (default: available CPUs)")
    ap.add_argument("--ratio", type=float, help="set gamma_beta = ratio * gamma_alpha")
    ap.add_argument("--phi", type=float, help="path phase in rad for polarized-jsd")
    return ap


def manifest(command, cfg: Config, args, files, grids, summary) -> dict:
    return {
        "command": command,
        "library": "cascade_emitter",
        "version": __version__,
        "format": args.format,
        "params": cfg.params.to_dict(),
        "config": dict(cfg.raw),
        "overrides": {"ratio": args.ratio, "phi": args.phi},
        "grids": grids,
        "outputs": files,
        "summary": summary,
    }


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": {"code": code, "kind": kind, "message": str(message)}}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command not in HANDLERS:
            raise UsageError(f"unknown command {args.command!r}")
        if args.threads is None:
            args.threads = default_threads()
        elif args.threads < 1:
            raise UsageError("--threads must be >= 1")
        cfg = load_config(args.config, ratio=args.ratio)
        out = Path(args.out)
        _check_writable(out)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc)

    try:
        files, grids, summary = HANDLERS[args.command](cfg, args, out)
    except ValidationFailed as exc:
        msg, files, summary = exc.args
        io.write_json(out / "manifest.json", manifest(args.command, cfg, args, files, {}, summary))
        return _fail(EXIT_VALIDATION, "validation", msg)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError, OSError) as exc:
        return _fail(EXIT_COMPUTE, "compute", f"{type(exc).__name__}: {exc}")

    io.write_json(out / "manifest.json", manifest(args.command, cfg, args, files, grids, summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
