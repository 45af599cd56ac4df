"""Command-line front end.

::

    su4lindblad run <config.toml>
    su4lindblad validate <config.toml>
    su4lindblad oracle-check --n 3 --seed 42

Sweep points are distributed over ``SU4LINDBLAD_THREADS`` worker processes
(default 1); rows are collected in sweep order, so the output does not
depend on the worker count.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import QUANTITIES, estimate, load_config
from .dynamics import EvolveConfig, boundary_population, initial_state, sample, steady_state
from .errors import SU4Error, TruncationError
from .liouvillian import build_generator
from .observables import correlation, expectations, fwhm, photon_distribution, spectrum
from .projection import entropy, project_blocks, purity, sm_populations
from .results import Table, fmt

ENV_THREADS = "SU4LINDBLAD_THREADS"
ORACLE_TOL = 1e-6

_RATE_LIKE = ("delta", "omega", "kappa", "gamma_decay", "w", "dephasing")


def _evolve_cfg(run):
    return EvolveConfig(t_final=run["t_final"], dt_init=run["dt_init"], rel_tol=run["rel_tol"],
                        abs_tol=run["abs_tol"], trunc_tol=run["trunc_tol"])


def _threads():
    raw = os.environ.get(ENV_THREADS, "1")
    try:
        n = int(raw)
    except ValueError:
        raise SU4Error(f"{ENV_THREADS}={raw!r} is not an integer") from None
    return max(1, n)


def quantity_columns(quantities):
    cols, units = [], []
    for q in quantities:
        unit, is_complex = QUANTITIES[q]
        if is_complex:
            cols += [q + "_re", q + "_im"]
            units += [unit, unit]
        else:
            cols.append(q)
            units.append(unit)
    return cols, units


def quantity_values(state, quantities):
    """Values in :func:`quantity_columns` order; undefined entries are nan."""
    rep = expectations(state).as_dict()
    n1, n2 = rep["mean_photon"], rep["photon_moment2"]
    rep["fano"] = (n2 + n1 - n1**2) / n1 if n1 > 1e-8 else float("nan")
    rep["boundary_population"] = boundary_population(state)
    if {"purity", "entropy"} & set(quantities):
        blocks = project_blocks(state)
        rep["purity"] = purity(blocks)
        rep["entropy"] = entropy(blocks)
    out = []
    for q in quantities:
        v = rep[q]
        if QUANTITIES[q][1]:
            v = complex(np.nan) if v is None else complex(v)
            out += [v.real, v.imag]
        else:
            out.append(float("nan") if v is None else float(v))
    return out


def _checked_steady(params, run, sectors=(0,)):
    L = build_generator(params, sectors=list(sectors))
    cfg = _evolve_cfg(run)
    ss = steady_state(L, cfg=replace(cfg, abs_tol=max(cfg.abs_tol, 1e-9)))
    b = boundary_population(ss)
    if b > cfg.trunc_tol:
        raise TruncationError(params.n_max, b, cfg.trunc_tol)
    return ss, L


def _param_unit(name, sweep_unit="absolute"):
    if sweep_unit == "gamma_c":
        return "Gamma_c"
    return "rate" if name in _RATE_LIKE else "1"


def _sweep_task(args):
    value, params, run, quantities = args
    ss, _ = _checked_steady(params, run)
    row = [value] + quantity_values(ss, quantities)
    dist = photon_distribution(ss)
    pops = sm_populations(project_blocks(ss))
    return row, dist, pops


def _spin_tables(lead, lead_unit):
    pre_c = [lead] if lead else []
    pre_u = [lead_unit] if lead else []
    dist = Table(pre_c + ["n", "probability"], pre_u + ["1", "1"])
    pops = Table(pre_c + ["S", "M", "population"], pre_u + ["1", "1", "1"])
    return dist, pops


def _append_spin(dist_t, pops_t, lead_vals, dist, pops):
    for n, p in enumerate(dist):
        dist_t.add(lead_vals + [n, float(p)])
    for (two_s, two_m), p in pops.items():
        pops_t.add(lead_vals + [two_s / 2, two_m / 2, p])


def run_pipeline(cfg):
    """Execute a parsed :class:`~su4lindblad.config.RunConfig`.

    Returns ``({file stem: Table}, summary lines)``.
    """
    run, qs = cfg.run, cfg.output["quantities"]
    cols, units = quantity_columns(qs)
    tables, summary = {}, []
    mode = cfg.mode
    if mode == "sweep":
        name = run["sweep_parameter"]
        obs = Table([name] + cols, [_param_unit(name, run["sweep_unit"])] + units)
        dist_t, pops_t = _spin_tables(name, obs.units[0])
        tasks = [(v, p, run, qs) for v, p in cfg.sweep_points()]
        n_workers = min(_threads(), len(tasks))
        if n_workers > 1:
            with ProcessPoolExecutor(max_workers=n_workers) as pool:
                results = list(pool.map(_sweep_task, tasks))
        else:
            results = [_sweep_task(t) for t in tasks]
        for (v, *_), (row, dist, pops) in zip(tasks, results):
            obs.add(row)
            _append_spin(dist_t, pops_t, [v], dist, pops)
        tables.update(observables=obs, photon_distribution=dist_t, populations=pops_t)
    elif mode == "steady":
        ss, _ = _checked_steady(cfg.model, run)
        obs = Table(cols, units)
        obs.add(quantity_values(ss, qs))
        dist_t, pops_t = _spin_tables(None, None)
        _append_spin(dist_t, pops_t, [], photon_distribution(ss), sm_populations(project_blocks(ss)))
        tables.update(observables=obs, photon_distribution=dist_t, populations=pops_t)
    elif mode == "evolve":
        L = build_generator(cfg.model, sectors=[0])
        st0 = initial_state(run["initial"], cfg.model)
        times = np.linspace(0.0, run["t_final"], run["t_points"])
        rows = sample(st0, L, times, lambda s: quantity_values(s, qs), _evolve_cfg(run))
        obs = Table(["t"] + cols, ["1/rate"] + units)
        for t, r in zip(times, rows):
            obs.add([float(t)] + r)
        tables["observables"] = obs
    elif mode == "correlate":
        kind = run["correlation"]
        sectors = (0, -1) if kind in ("first-order", "spin-first") else (0,)
        ss, _ = _checked_steady(cfg.model, run)
        L = build_generator(cfg.model, sectors=list(sectors))
        taus = np.linspace(0.0, run["tau_max"], run["tau_points"])
        ecfg = EvolveConfig(rel_tol=min(run["rel_tol"], 1e-8), abs_tol=min(run["abs_tol"], 1e-12))
        series = correlation(ss, L, kind, taus, cfg=ecfg)
        corr = Table(["tau", "value_re", "value_im"], ["1/rate", "1", "1"])
        for t, v in zip(series.tau_grid, series.values):
            corr.add([float(t), v.real, v.imag])
        tables["correlation"] = corr
        if kind in ("first-order", "spin-first"):
            omega, power = spectrum(series)
            spec = Table(["omega", "power"], ["rate", "1"])
            for o, pw in zip(omega, power):
                spec.add([float(o), float(pw)])
            tables["spectrum"] = spec
            summary.append(f"fwhm = {fmt(fwhm(omega, power))}")
    elif mode == "oracle-check":
        from .check import oracle_check
        _, dev = oracle_check(cfg.model.N, run["seed"], n_max=cfg.model.n_max or 3)
        tables["oracle_check"] = _deviation_table(dev)
        summary.append(_oracle_verdict(dev))
    return tables, summary


def _deviation_table(dev):
    names = sorted(dev)
    t = Table(names, ["1"] * len(names))
    t.add([dev[k] for k in names])
    return t


def _oracle_verdict(dev):
    worst = max(dev, key=dev.get)
    ok = dev[worst] < ORACLE_TOL
    return f"oracle-check {'PASS' if ok else 'FAIL'}: max deviation {dev[worst]:.3e} ({worst})"


def print_table(table, stream, limit=40):
    widths = [max(12, len(h)) for h in table.header()]
    stream.write("  ".join(h.rjust(w) for h, w in zip(table.header(), widths)) + "\n")
    for r in table.rows[:limit]:
        stream.write("  ".join(f"{v:.6g}".rjust(w) for v, w in zip(r, widths)) + "\n")
    if len(table.rows) > limit:
        stream.write(f"... {len(table.rows) - limit} more rows\n")


def cmd_run(args):
    cfg = load_config(args.config)
    tables, summary = run_pipeline(cfg)
    out = Path(cfg.output["directory"])
    if not out.is_absolute():
        out = Path(args.config).resolve().parent / out
    out.mkdir(parents=True, exist_ok=True)
    ext = cfg.output["format"]
    for stem, table in tables.items():
        table.write(out / f"{stem}.{ext}", ext)
    main_table = tables.get("observables") or tables.get("correlation") or tables.get("oracle_check")
    print_table(main_table, sys.stdout)
    for line in summary:
        print(line)
    print(f"wrote {', '.join(f'{s}.{ext}' for s in tables)} to {out}")
    if cfg.mode == "oracle-check" and "FAIL" in summary[-1]:
        return 1
    return 0


def cmd_validate(args):
    cfg = load_config(args.config)
    models = [p for _, p in cfg.sweep_points()] if cfg.mode == "sweep" else [cfg.model]
    biggest = max(models, key=lambda p: (p.N, p.n_max))
    est = estimate(biggest)
    print(f"config OK: mode={cfg.mode}, N={biggest.N}, n_max={biggest.n_max}")
    print(f"basis dimension: {est['basis_size']}")
    print(f"state entries: {est['state_entries']} complex")
    print(f"state memory: {est['state_bytes']} bytes ({est['state_bytes'] / 2**20:.1f} MiB)")
    return 0


def cmd_oracle_check(args):
    from .check import oracle_check
    params, dev = oracle_check(args.n, args.seed, n_max=args.n_max)
    print(f"parameters: {params}")
    width = max(len(k) for k in dev)
    for k in sorted(dev):
        print(f"{k.ljust(width)}  {dev[k]:.3e}")
    verdict = _oracle_verdict(dev)
    print(verdict)
    return 0 if "PASS" in verdict else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="su4lindblad", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute a configured pipeline and write result files")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a config and report size estimates")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    o = sub.add_parser("oracle-check", help="compare against the full-space reference")
    o.add_argument("--n", type=int, required=True, help="number of atoms (full space is 2^N)")
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--n-max", type=int, default=3, help="Fock cutoff (default 3)")
    o.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SU4Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
