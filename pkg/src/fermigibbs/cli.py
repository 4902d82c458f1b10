"""Command-line harness: single computations, parameter sweeps, CSV/JSON output.

Configuration comes from an optional JSON file with flat keys matching the
result-row columns; every key can be overridden on the command line. Sweep
subcommands dispatch grid points to a process pool and write rows in grid
order, so reruns with the same configuration are byte-identical except for
the wall-time column.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .atomic import atomic_reduced_matrix, gap_symmetry_deviation
from .filters import DEFAULT_METROPOLIS_SUPPORT, filter_spec
from .fock import LatticeModel, single_particle_matrix
from .free import (
    covariance_trajectory,
    equilibrium_covariance,
    exact_free_spectrum,
    extract_covariance,
    free_mixing_bound,
    free_partition,
    solve_free,
)
from .lindblad import fit_decay_slope, lindblad_set_for_model, locality_decay_probe
from .partition import dense_partition, telescoping_partition, uniform_schedule
from .spectral import evolve, gap_slope, model_gap_report

RESULT_COLUMNS = (
    "n",
    "spinful",
    "t",
    "u",
    "beta",
    "filter",
    "support",
    "jumps",
    "delta",
    "zero_mult",
    "stat_residual",
    "method",
    "status",
    "wall_time_s",
)

DEFAULTS = {
    "n": 2,
    "spinful": False,
    "t": 1.0,
    "u": 0.0,
    "beta": 1.0,
    "filter": "gaussian",
    "support": None,
    "jumps": "majorana",
    "method": "auto",
    "out": "results",
    "seed": 1234,
    "threads": None,
    "shots": 10000,
    "site": None,
    "h_fd": 1e-4,
    "times": [0.1, 1.0, 10.0],
    "u_grid": None,
    "n_grid": None,
}


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    """Serialise one CSV cell; floats at 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def parse_grid(text: str) -> list[float]:
    """Parse "start:stop:count" or a comma-separated list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("grid count must be positive")
        return [float(x) for x in np.linspace(start, stop, count)]
    return [float(x) for x in text.split(",")]


def load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg.update(file_cfg)
    overrides = {
        "n": args.n,
        "beta": args.beta,
        "u": args.u,
        "t": args.t_hop,
        "filter": args.filter,
        "jumps": args.jumps,
        "out": args.out,
        "support": getattr(args, "support", None),
        "threads": getattr(args, "threads", None),
        "seed": getattr(args, "seed", None),
        "spinful": getattr(args, "spinful", None),
        "method": getattr(args, "method", None),
        "u_grid": getattr(args, "u_grid", None),
        "n_grid": getattr(args, "n_grid", None),
        "site": getattr(args, "site", None),
        "shots": getattr(args, "shots", None),
        "h_fd": getattr(args, "h_fd", None),
    }
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    if int(cfg["n"]) < 1:
        raise ConfigError(f"n must be positive, got {cfg['n']}")
    if float(cfg["beta"]) < 0:
        raise ConfigError(f"beta must be nonnegative, got {cfg['beta']}")
    if cfg["filter"] not in ("gaussian", "metropolis"):
        raise ConfigError(f"unknown filter {cfg['filter']!r}")
    if cfg["jumps"] not in ("majorana", "pauli"):
        raise ConfigError(f"unknown jump set {cfg['jumps']!r}")


def model_from_config(cfg: dict, **overrides) -> LatticeModel:
    return LatticeModel(
        n_sites=int(overrides.get("n", cfg["n"])),
        spinful=bool(cfg["spinful"]),
        t=float(cfg["t"]),
        u=float(overrides.get("u", cfg["u"])),
        beta=float(cfg["beta"]),
    )


def effective_support(cfg: dict):
    """Support actually used by the filter (resolves the metropolis default)."""
    if cfg["filter"] != "metropolis":
        return None
    support = cfg.get("support")
    return DEFAULT_METROPOLIS_SUPPORT if support is None else float(support)


def filter_from_config(cfg: dict):
    return filter_spec(cfg["filter"], float(cfg["beta"]), effective_support(cfg))


def gap_row(cfg: dict, n: int, u: float) -> dict:
    """One sweep point: build the sampler, extract the gap, tag the row."""
    row = {
        "n": n,
        "spinful": bool(cfg["spinful"]),
        "t": float(cfg["t"]),
        "u": u,
        "beta": float(cfg["beta"]),
        "filter": cfg["filter"],
        "support": effective_support(cfg),
        "jumps": cfg["jumps"],
        "delta": float("nan"),
        "zero_mult": 0,
        "stat_residual": float("nan"),
        "method": "",
        "status": "failed",
        "wall_time_s": 0.0,
    }
    start = time.perf_counter()
    try:
        model = model_from_config(cfg, n=n, u=u)
        report = model_gap_report(
            model, filter_from_config(cfg), cfg["jumps"], method=cfg.get("method", "auto")
        )
        row.update(
            delta=float(report.mixing_gap),
            zero_mult=int(report.zero_multiplicity),
            stat_residual=float(report.stationarity_residual),
            method=report.method,
            status="ok",
        )
    except Exception as exc:  # noqa: BLE001 - row-level fault isolation
        row["status"] = f"failed: {type(exc).__name__}"
    row["wall_time_s"] = time.perf_counter() - start
    return row


def _gap_row_star(payload):
    cfg, n, u = payload
    return gap_row(cfg, n, u)


def default_workers() -> int:
    try:
        import psutil

        physical = psutil.cpu_count(logical=False)
    except ImportError:
        physical = None
    return physical or max(1, (os.cpu_count() or 2) // 2)


def run_grid(cfg: dict, points: list[tuple[int, float]]) -> list[dict]:
    threads = cfg.get("threads")
    workers = int(threads) if threads else default_workers()
    payloads = [(cfg, n, u) for n, u in points]
    if workers == 1 or len(points) == 1:
        return [_gap_row_star(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_gap_row_star, payloads))


def write_rows(out_base: str, columns, rows: list[dict], cfg: dict, extra: dict | None = None) -> None:
    csv_path, json_path = f"{out_base}.csv", f"{out_base}.json"
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(row.get(c)) for c in columns))
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    payload = {"version": __version__, "config": jsonable(cfg), "rows": [jsonable(r) for r in rows]}
    if extra:
        payload.update(jsonable(extra))
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")


def write_payload(out_base: str, payload: dict, cfg: dict) -> None:
    with open(f"{out_base}.json", "w") as fh:
        json.dump(
            {"version": __version__, "config": jsonable(cfg), **jsonable(payload)},
            fh,
            indent=2,
            default=str,
        )
        fh.write("\n")


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def cmd_gap(cfg: dict) -> int:
    rows = run_grid(cfg, [(int(cfg["n"]), float(cfg["u"]))])
    write_rows(cfg["out"], RESULT_COLUMNS, rows, cfg)
    return 0 if all(r["status"] == "ok" for r in rows) else 1


def cmd_usweep(cfg: dict) -> int:
    if not cfg.get("u_grid"):
        raise ConfigError("usweep needs --u-grid")
    grid = cfg["u_grid"] if isinstance(cfg["u_grid"], list) else parse_grid(cfg["u_grid"])
    if not grid:
        raise ConfigError("empty u grid")
    rows = run_grid(cfg, [(int(cfg["n"]), float(u)) for u in grid])
    write_rows(cfg["out"], RESULT_COLUMNS, rows, cfg)
    return 0 if all(r["status"] == "ok" for r in rows) else 1


def cmd_nsweep(cfg: dict) -> int:
    if not cfg.get("n_grid"):
        raise ConfigError("nsweep needs --n-grid")
    grid = cfg["n_grid"] if isinstance(cfg["n_grid"], list) else parse_grid(cfg["n_grid"])
    if not grid:
        raise ConfigError("empty n grid")
    rows = run_grid(cfg, [(int(n), float(cfg["u"])) for n in grid])
    write_rows(cfg["out"], RESULT_COLUMNS, rows, cfg)
    return 0 if all(r["status"] == "ok" for r in rows) else 1


SLOPE_COLUMNS = ("n", "spinful", "t", "beta", "filter", "support", "jumps", "h_fd", "d_plus", "d_minus")


def cmd_slope(cfg: dict) -> int:
    grid = cfg.get("n_grid") or [cfg["n"]]
    if not isinstance(grid, list):
        grid = parse_grid(grid)
    filt = filter_from_config(cfg)
    rows = []
    for n in grid:
        report = gap_slope(
            model_from_config(cfg, n=int(n), u=0.0),
            filt,
            cfg["jumps"],
            h_fd=float(cfg["h_fd"]),
            method=cfg.get("method", "auto"),
        )
        rows.append(
            {
                "n": int(n),
                "spinful": bool(cfg["spinful"]),
                "t": float(cfg["t"]),
                "beta": float(cfg["beta"]),
                "filter": cfg["filter"],
                "support": effective_support(cfg),
                "jumps": cfg["jumps"],
                "h_fd": float(cfg["h_fd"]),
                "d_plus": report.d_plus,
                "d_minus": report.d_minus,
            }
        )
    write_rows(cfg["out"], SLOPE_COLUMNS, rows, cfg)
    return 0


def cmd_free_exact(cfg: dict) -> int:
    model = model_from_config(cfg, u=0.0)
    h = single_particle_matrix(model)
    filt = filter_from_config(cfg)
    sol = solve_free(h, filt)
    spectrum = exact_free_spectrum(h, filt)
    bound = free_mixing_bound(h, filt, epsilon=1e-3)
    payload = {
        "delta0": sol.gap,
        "spectrum_size": int(spectrum.size),
        "spectrum": spectrum,
        "rates": sol.rates,
        "h_norm": float(np.abs(sol.epsilons).max()),
        "mixing_bound": bound.time,
        "mixing_certificate": bound.certificate,
        "partition_free": free_partition(h, model.beta),
    }
    write_payload(cfg["out"], payload, cfg)
    return 0


ATOMIC_COLUMNS = ("u", "beta", "filter", "support", "delta")


def cmd_atomic(cfg: dict) -> int:
    grid = cfg.get("u_grid") or "-20:20:81"
    if not isinstance(grid, list):
        grid = parse_grid(grid)
    filt = filter_from_config(cfg)
    rows = []
    for u in grid:
        sol = atomic_reduced_matrix(float(u), filt)
        rows.append(
            {
                "u": float(u),
                "beta": float(cfg["beta"]),
                "filter": cfg["filter"],
                "support": effective_support(cfg),
                "delta": sol.gap,
            }
        )
    write_rows(
        cfg["out"],
        ATOMIC_COLUMNS,
        rows,
        cfg,
        extra={"symmetry_deviation": gap_symmetry_deviation(grid, filt)},
    )
    return 0


COVARIANCE_COLUMNS = ("t", "max_deviation", "distance_to_equilibrium")


def cmd_covariance(cfg: dict) -> int:
    model = model_from_config(cfg, u=0.0)
    filt = filter_from_config(cfg)
    h = single_particle_matrix(model)
    lset = lindblad_set_for_model(model, filt, "majorana")
    rho0 = np.eye(model.dim, dtype=complex) / model.dim
    times = [float(t) for t in cfg["times"]]
    states = evolve(lset, rho0, times)
    gamma_eq = equilibrium_covariance(h, model.beta)
    rows = []
    for t, rho_t in zip(times, states):
        closed = covariance_trajectory(h, filt, t).gamma
        extracted = extract_covariance(rho_t, model.n_modes)
        rows.append(
            {
                "t": t,
                "max_deviation": float(np.abs(closed - extracted).max()),
                "distance_to_equilibrium": float(
                    0.5 * np.linalg.svd(extracted - gamma_eq, compute_uv=False).sum()
                ),
            }
        )
    write_rows(cfg["out"], COVARIANCE_COLUMNS, rows, cfg)
    return 0


PARTITION_COLUMNS = ("step", "coupling", "ratio", "stderr")


def cmd_partition(cfg: dict) -> int:
    model = model_from_config(cfg)
    schedule = uniform_schedule(model.u, size_hint=model.n_sites)
    exact = telescoping_partition(model, schedule, mode="exact")
    sampled = telescoping_partition(
        model, schedule, mode="sampled", shots=int(cfg["shots"]), seed=int(cfg["seed"])
    )
    rows = [
        {"step": i, "coupling": schedule.couplings[i], "ratio": r, "stderr": s}
        for i, (r, s) in enumerate(zip(sampled.ratios, sampled.ratio_stderrs))
    ]
    payload = {
        "exact": exact.value,
        "sampled": sampled.value,
        "sampled_stderr": sampled.stderr,
        "dense_reference": dense_partition(model),
        "z_free": exact.z_free,
        "rows": rows,
    }
    write_payload(cfg["out"], payload, cfg)
    lines = [",".join(PARTITION_COLUMNS)]
    lines += [",".join(fmt(r[c]) for c in PARTITION_COLUMNS) for r in rows]
    with open(f"{cfg['out']}.csv", "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


LOCALITY_COLUMNS = ("r", "deviation")


def cmd_locality(cfg: dict) -> int:
    model = model_from_config(cfg, u=0.0)
    site = cfg.get("site")
    site = model.n_sites // 2 if site is None else int(site)
    pairs = locality_decay_probe(model, site, filter_from_config(cfg))
    rows = [{"r": r, "deviation": dev} for r, dev in pairs]
    write_rows(cfg["out"], LOCALITY_COLUMNS, rows, cfg)
    payload = {"rows": rows, "slope": fit_decay_slope(pairs)}
    write_payload(cfg["out"], payload, cfg)
    return 0


COMMANDS = {
    "gap": cmd_gap,
    "usweep": cmd_usweep,
    "nsweep": cmd_nsweep,
    "slope": cmd_slope,
    "free-exact": cmd_free_exact,
    "atomic": cmd_atomic,
    "covariance": cmd_covariance,
    "partition": cmd_partition,
    "locality": cmd_locality,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermigibbs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--u", type=float, default=None)
        p.add_argument("--t-hop", dest="t_hop", type=float, default=None)
        p.add_argument("--filter", type=str, default=None, choices=("gaussian", "metropolis"))
        p.add_argument("--jumps", type=str, default=None, choices=("majorana", "pauli"))
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--support", type=float, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--spinful", action="store_const", const=True, default=None)
        p.add_argument("--method", type=str, default=None, choices=("auto", "dense", "iterative"))
        if name in ("usweep", "atomic"):
            p.add_argument("--u-grid", dest="u_grid", type=str, default=None)
        if name in ("nsweep", "slope"):
            p.add_argument("--n-grid", dest="n_grid", type=str, default=None)
        if name == "slope":
            p.add_argument("--h-fd", dest="h_fd", type=float, default=None)
        if name == "locality":
            p.add_argument("--site", type=int, default=None)
        if name == "partition":
            p.add_argument("--shots", type=int, default=None)
    return parser


def _merge_grid_values(argv):
    """Join grid flags with '=' so values like -20:20:81 parse as values."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--u-grid", "--n-grid") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_merge_grid_values(argv))
    except SystemExit as exc:
        # argparse exits with 2 on unknown flags, which is also our contract
        return int(exc.code) if exc.code else 0
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
