"""halo2d command line front end.

    halo2d <subcommand> --config <file> [--out <dir>] [--workers N]

Subcommands: two-body, angular-scan, zero-range-lambda, efimov3d, fig1,
spectrum, fig2-sweep, borromean-scan, no-third-state.

Config files are flat key=value text ('#' comments allowed); every key
must be known to the subcommand.  Output is CSV with '#' metadata
headers, or JSON for scalar result sets; no timestamps, so identical
configs give byte-identical files.  Exit codes: 0 ok, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import (
    build_channel_table,
    effective_potential,
    rms_distance,
    solve_bound_states,
)
from .errors import ConfigError, NumericalError
from .potentials import potential_from_config, zero_range
from .sweeps import borromean_scan, fig2_sweep, no_third_state_report
from .twobody import solve_two_body
from .zerorange import efimov3d_lowest, solve_lambda_zero_range

__all__ = ["main"]


def _load_config(path: str | None) -> dict[str, str]:
    cfg: dict[str, str] = {}
    if path is None:
        return cfg
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    for ln, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ConfigError(f"{path}:{ln}: empty key or value")
        if key in cfg:
            raise ConfigError(f"{path}:{ln}: duplicate key {key!r}")
        cfg[key] = val
    return cfg


def _take(cfg: dict[str, str], key: str, conv, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    raw = cfg.pop(key)
    try:
        return conv(raw)
    except ConfigError:
        raise
    except Exception:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None


def _float_list(raw: str) -> list[float]:
    vals = [float(tok) for tok in raw.replace(",", " ").split()]
    if not vals:
        raise ConfigError("empty list")
    return vals


def _reject_unknown(cfg: dict[str, str], sub: str):
    if cfg:
        raise ConfigError(f"unknown config keys for {sub}: {sorted(cfg)}")


def _pop_potential(cfg: dict[str, str]):
    keys = {k: cfg.pop(k) for k in list(cfg) if k.startswith("potential.")}
    if not keys:
        raise ConfigError("missing potential.* config keys")
    return potential_from_config(keys)


def _header(sub: str, cfg_hash: str, units: str) -> list[str]:
    return [
        f"# halo2d {__version__} {sub}",
        f"# config_hash: {cfg_hash}",
        f"# units: hbar = m = 1; {units}",
    ]


def _json_meta(sub: str, cfg_hash: str) -> dict:
    return {
        "tool": f"halo2d {__version__}",
        "subcommand": sub,
        "config_hash": cfg_hash,
        "units": "hbar = m = 1",
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    return str(v)


def _write_csv(path: Path, header: list[str], cols: list[str], rows) -> None:
    lines = list(header)
    lines.append(",".join(cols))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, meta: dict, payload: dict) -> None:
    doc = dict(meta)
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, allow_nan=True) + "\n")


# ------------------------------------------------------------ subcommands


def _cmd_two_body(cfg, out, workers, chash):
    spec = _pop_potential(cfg)
    _reject_unknown(cfg, "two-body")
    sol = solve_two_body(spec)
    path = out / "two_body.json"
    _write_json(path, _json_meta("two-body", chash),
                {"a": sol.a, "bound_energies": sol.bound_energies, "k": sol.k})
    return [path]


def _cmd_angular_scan(cfg, out, workers, chash):
    spec = _pop_potential(cfg)
    rho_min = _take(cfg, "rho_min", float)
    rho_max = _take(cfg, "rho_max", float)
    n_rho = _take(cfg, "n_rho", int, 24)
    n_ch = _take(cfg, "n_channels", int, 4)
    grid_n = _take(cfg, "grid_n", int, 320)
    _reject_unknown(cfg, "angular-scan")
    from .angular import AngularGrid, solve_angular

    grid = AngularGrid(n=grid_n)
    rows = []
    for r in np.geomspace(rho_min, rho_max, n_rho):
        sp = solve_angular(spec, float(r), grid, n_channels=n_ch)
        rows.append([float(r)] + [float(v) for v in sp.lam])
    cols = ["rho"] + [f"lambda_{i + 1}" for i in range(n_ch)]
    path = out / "angular_scan.csv"
    _write_csv(path, _header("angular-scan", chash, "lambda dimensionless"), cols, rows)
    return [path]


def _cmd_zero_range_lambda(cfg, out, workers, chash):
    a = _take(cfg, "a", float, 1.0)
    lo = _take(cfg, "rho_min_over_a", float, 1e-2)
    hi = _take(cfg, "rho_max_over_a", float, 1e2)
    n_rho = _take(cfg, "n_rho", int, 60)
    n_ch = _take(cfg, "n_channels", int, 1)
    _reject_unknown(cfg, "zero-range-lambda")
    rows = []
    for x in np.geomspace(lo, hi, n_rho):
        roots = solve_lambda_zero_range(float(x) * a, a, n_ch)
        rows.append([float(x)] + [b.lam for b in roots])
    cols = ["rho_over_a"] + [f"lambda_{i + 1}" for i in range(n_ch)]
    path = out / "zero_range_lambda.csv"
    _write_csv(path, _header("zero-range-lambda", chash, "lambda dimensionless"), cols, rows)
    return [path]


def _cmd_efimov3d(cfg, out, workers, chash):
    lo = _take(cfg, "rho_min_over_a", float, 0.0)
    hi = _take(cfg, "rho_max_over_a", float, 1e3)
    n_rho = _take(cfg, "n_rho", int, 80)
    _reject_unknown(cfg, "efimov3d")
    if lo < 0.0:
        raise ConfigError("rho_min_over_a must be >= 0")
    # log-spaced, with an exact rho = 0 head point when lo = 0
    xs = np.geomspace(lo, hi, n_rho) if lo > 0.0 \
        else np.concatenate(([0.0], np.geomspace(1e-3, hi, n_rho - 1)))
    rows = [[float(x), efimov3d_lowest(float(x))] for x in xs]
    path = out / "efimov3d.csv"
    _write_csv(path, _header("efimov3d", chash, "lambda dimensionless; 3D companion curve"),
               ["rho_over_a", "lambda"], rows)
    return [path]


def _cmd_fig1(cfg, out, workers, chash):
    a = _take(cfg, "a", float, 1.0)
    lo = _take(cfg, "rho_min_over_a", float, 1e-4)
    hi = _take(cfg, "rho_max_over_a", float, 20.0)
    n_rho = _take(cfg, "n_rho", int, 400)
    _reject_unknown(cfg, "fig1")
    table = build_channel_table(zero_range(a))
    states = solve_bound_states(table)
    xs = np.geomspace(lo, hi, n_rho)
    u = effective_potential(table, xs * a)
    profs = []
    for st in states[:2]:
        # f carries units 1/sqrt(length); sqrt(a) makes the column dimensionless
        profs.append(np.interp(xs * a, st.rho, st.f, left=0.0, right=0.0) * math.sqrt(a))
    while len(profs) < 2:
        profs.append(np.zeros_like(xs))
    rows = [[float(x), float(uu * a * a), float(fg), float(fe)]
            for x, uu, fg, fe in zip(xs, u, profs[0], profs[1])]
    path = out / "fig1.csv"
    _write_csv(path, _header("fig1", chash, "U in the 2E convention, times a^2"),
               ["rho_over_a", "U_times_a2", "f_ground", "f_excited"], rows)
    return [path]


def _cmd_spectrum(cfg, out, workers, chash):
    spec = _pop_potential(cfg)
    n_points = _take(cfg, "n_points", int, 64)
    grid_n = _take(cfg, "grid_n", int, 0)
    _reject_unknown(cfg, "spectrum")
    from .angular import AngularGrid

    grid = AngularGrid(n=grid_n) if grid_n else None
    table = build_channel_table(spec, grid=grid, n_points=n_points,
                                workers=workers if workers and workers > 1 else None)
    states = solve_bound_states(table)
    payload = {
        "E2": table.e_thr / 2.0,
        "states": [{"E3": st.energy, "nodes": st.nodes,
                    "rms_over_a": rms_distance(st) / table.length_scale}
                   for st in states],
    }
    path = out / "spectrum.json"
    _write_json(path, _json_meta("spectrum", chash), payload)
    return [path]


def _cmd_fig2_sweep(cfg, out, workers, chash):
    family = _take(cfg, "family", str)
    targets = _take(cfg, "e2_targets", _float_list)
    b = _take(cfg, "b", float, 1.0)
    fixed = _take(cfg, "fixed_strength", float, math.nan)
    n_points = _take(cfg, "n_points", int, 48)
    grid_n = _take(cfg, "grid_n", int, 0)
    _reject_unknown(cfg, "fig2-sweep")
    rows = fig2_sweep(family, targets, b=b,
                      fixed=None if math.isnan(fixed) else fixed,
                      n_points=n_points, grid_n=grid_n or None, workers=workers)
    cols = ["family", "S1", "S2", "E2", "state_index", "E3", "ratio", "flag"]
    path = out / "fig2_sweep.csv"
    _write_csv(path, _header("fig2-sweep", chash, "energies in hbar=m=1; ratio=(E3-E2)/E2"),
               cols, [[r[c] for c in cols] for r in rows])
    return [path]


def _cmd_borromean_scan(cfg, out, workers, chash):
    s1s = _take(cfg, "s1_values", _float_list)
    s2s = _take(cfg, "s2_values", _float_list)
    b = _take(cfg, "b", float, 1.0)
    n_points = _take(cfg, "n_points", int, 40)
    grid_n = _take(cfg, "grid_n", int, 0)
    _reject_unknown(cfg, "borromean-scan")
    res = borromean_scan(s1s, s2s, b=b, n_points=n_points,
                         grid_n=grid_n or None, workers=workers)
    cols = ["S1", "S2", "E2", "E3", "label", "n_two_body", "n_three_body"]
    path = out / "borromean_scan.csv"
    hdr = _header("borromean-scan", chash, "energies in hbar=m=1")
    hdr.append("# borromean_window: " + json.dumps(res["window"], sort_keys=True))
    _write_csv(path, hdr, cols, [[c[k] for k in cols] for c in res["cells"]])
    return [path]


def _cmd_no_third_state(cfg, out, workers, chash):
    rho_max = _take(cfg, "rho_max_over_a", float, 1e3)
    a = _take(cfg, "a", float, 1.0)
    _reject_unknown(cfg, "no-third-state")
    rep = no_third_state_report(rho_max, a)
    path = out / "no_third_state.json"
    _write_json(path, _json_meta("no-third-state", chash), rep)
    return [path]


_SUBCOMMANDS = {
    "two-body": _cmd_two_body,
    "angular-scan": _cmd_angular_scan,
    "zero-range-lambda": _cmd_zero_range_lambda,
    "efimov3d": _cmd_efimov3d,
    "fig1": _cmd_fig1,
    "spectrum": _cmd_spectrum,
    "fig2-sweep": _cmd_fig2_sweep,
    "borromean-scan": _cmd_borromean_scan,
    "no-third-state": _cmd_no_third_state,
}

_NEEDS_CONFIG = {"two-body", "angular-scan", "spectrum", "fig2-sweep", "borromean-scan"}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="halo2d", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=sorted(_SUBCOMMANDS))
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--out", default=".", help="output directory (default: cwd)")
    ap.add_argument("--workers", type=int, default=None,
                    help="parallel workers; never changes output values")
    ns = ap.parse_args(argv)
    try:
        if ns.subcommand in _NEEDS_CONFIG and ns.config is None:
            raise ConfigError(f"{ns.subcommand} requires --config")
        cfg = _load_config(ns.config)
        canonical = "\n".join(f"{k}={v}" for k, v in sorted(cfg.items()))
        chash = hashlib.sha256(canonical.encode()).hexdigest()[:12]
        out = Path(ns.out)
        out.mkdir(parents=True, exist_ok=True)
        paths = _SUBCOMMANDS[ns.subcommand](cfg, out, ns.workers, chash)
    except ConfigError as exc:
        print(f"halo2d: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"halo2d: numerical failure: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
