"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, engine, meanfield, rng as rngs
from .config import ConfigError, PRESETS, SimConfig, load_config, preset_path
from .network import write_edgelist

log = logging.getLogger("affectsim")

DEFAULT_P_ABSTAIN = 0.015


class UsageError(Exception):
    pass


def _resolve_config(arg: str) -> Path:
    path = Path(arg)
    if not path.exists() and arg.removesuffix(".toml") in PRESETS:
        return preset_path(arg.removesuffix(".toml"))
    if not path.exists():
        raise ConfigError("<file>", f"config file not found: {arg}")
    return path


def _load(args) -> SimConfig:
    cfg = load_config(_resolve_config(args.config))
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _write_manifest(out: Path, cfg: SimConfig, seeds: list[int], outputs: dict) -> Path:
    manifest = {
        "tool": "affectsim",
        "tool_version": __version__,
        "config_name": cfg.name,
        "config_hash": cfg.config_hash(),
        "seeds": seeds,
        "output_dir": str(out),
        "outputs": outputs,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("simulating %s (seed %d, N=%d, T=%d)", cfg.name, cfg.seed, cfg.num_all, cfg.total_rounds)
    trace = engine.run(cfg)
    files = {
        "trace_csv": analysis.write_timeseries(trace, out / "trace.csv", "csv"),
        "trace_json": analysis.write_timeseries(trace, out / "trace.json", "json"),
        "bands": analysis.write_bands(trace, out / "bands.csv"),
        "beta": analysis.write_beta(trace, out / "beta.csv"),
        "final_etvs": analysis.write_final_etvs(trace, out / "final_etvs.csv"),
        "graph": out / "graph.edgelist",
        "graph_dot": analysis.export_colored_graph(trace.graph, trace.final_etvs, out / "graph_final.dot",
                                                   "dot", cfg.m),
        "graph_graphml": analysis.export_colored_graph(trace.graph, trace.final_etvs,
                                                       out / "graph_final.graphml", "graphml", cfg.m),
    }
    write_edgelist(trace.graph, files["graph"])
    _write_manifest(out, cfg, [cfg.seed], {k: p.name for k, p in files.items()})
    print(f"wrote {len(files)} files to {out}")
    return 0


def _beta_source(spec: list[str]):
    if spec[0] == "from-trace":
        if len(spec) != 2:
            raise UsageError("--beta from-trace needs exactly one path")
        path = Path(spec[1])
        if path.is_dir():
            path = path / "beta.csv"
        try:
            series = analysis.read_column(path, "beta_mean")
        except KeyError:
            sibling = path.with_name("beta.csv")
            if sibling == path or not sibling.exists():
                raise UsageError(f"{path} has no beta_mean column and no sibling beta.csv") from None
            series = analysis.read_column(sibling, "beta_mean")
        except FileNotFoundError:
            raise UsageError(f"no such file: {path}") from None
        return meanfield.piecewise_beta(series), float(len(series))
    if len(spec) != 1:
        raise UsageError("--beta takes a number or 'from-trace PATH'")
    try:
        value = float(spec[0])
    except ValueError:
        raise UsageError(f"--beta: not a number: {spec[0]!r}") from None
    if not 0.0 <= value <= 1.0:
        raise UsageError("--beta must lie in [0, 1]")
    return meanfield.constant_beta(value), None


def cmd_meanfield(args) -> int:
    cfg = _load(args)
    beta_fn, trace_horizon = _beta_source(args.beta)
    gamma = cfg.gamma_forget if args.gamma is None else args.gamma
    horizon = args.horizon or trace_horizon or float(cfg.total_rounds)
    dt = args.dt or cfg.meanfield_dt
    i0 = args.i0 or cfg.meanfield_i0
    traj = meanfield.integrate(beta_fn, gamma, i0, horizon, dt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = analysis.write_csv(out / "meanfield.csv", ["t", "s", "i"],
                              ([f"{p.t:.6f}", repr(p.s), repr(p.i)] for p in traj))
    print(f"final s={traj[-1].s:.6f} i={traj[-1].i:.6f} ({len(traj)} points) -> {path}")
    return 0


def _read_etvs(arg: str) -> np.ndarray:
    path = Path(arg)
    if path.is_dir():
        path = path / "final_etvs.csv"
    if not path.exists():
        raise UsageError(f"no such file: {path}")
    try:
        return analysis.read_column(path, "etv").astype(np.int64)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def cmd_vote(args) -> int:
    etvs = _read_etvs(args.input)
    if not 0.0 <= args.p_abstain <= 1.0:
        raise UsageError("--p-abstain must lie in [0, 1]")
    tallies = [
        analysis.simulate_vote(etvs, args.p_abstain, rngs.stream(args.seed, rngs.VOTE, k))
        for k in range(args.repeats)
    ]
    result = {
        "n": int(len(etvs)),
        "p_abstain": args.p_abstain,
        "seed": args.seed,
        "repeats": args.repeats,
        "votes_a": [t.votes_a for t in tallies],
        "votes_b": [t.votes_b for t in tallies],
        "abstained": [t.abstained for t in tallies],
        "mean_abstain_fraction": float(np.mean([t.abstain_fraction for t in tallies])),
    }
    text = json.dumps(result, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _sweep_one(job: tuple[SimConfig, int, str]) -> tuple[int, np.ndarray]:
    cfg, index, out = job
    trace = engine.run(cfg)
    analysis.write_timeseries(trace, Path(out) / f"run_{index:04d}.csv")
    return index, trace.phi


def cmd_sweep(args) -> int:
    cfg = load_config(_resolve_config(args.config))
    if args.seeds < 1 or args.jobs < 1:
        raise UsageError("--seeds and --jobs must be >= 1")
    out = Path(args.out)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    seeds = [rngs.derive_seed(cfg.seed, k) for k in range(args.seeds)]
    jobs = [(cfg.with_seed(s), k, str(out / "runs")) for k, s in enumerate(seeds)]
    if args.jobs == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    phis = np.stack([phi for _, phi in sorted(results, key=lambda r: r[0])])
    mean, std = phis.mean(axis=0), phis.std(axis=0)
    analysis.write_csv(out / "sweep_phi.csv", ["t", "phi_mean", "phi_std", "n_runs"],
                       ([t, f"{mu:.6f}", f"{sd:.6f}", len(seeds)] for t, (mu, sd) in enumerate(zip(mean, std))))
    outputs = {"aggregate": "sweep_phi.csv"}
    outputs.update({f"run_{k:04d}": f"runs/run_{k:04d}.csv" for k in range(len(seeds))})
    _write_manifest(out, cfg, seeds, outputs)
    print(f"{len(seeds)} runs: phi(0)={mean[0]:.4f} phi(T)={mean[-1]:.4f} -> {out / 'sweep_phi.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="affectsim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"affectsim {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation and export everything")
    p.add_argument("config", help="TOML file or preset name (" + ", ".join(PRESETS) + ")")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("meanfield", help="integrate the mean-field equations")
    p.add_argument("config")
    p.add_argument("--beta", nargs="+", required=True, metavar="VALUE|from-trace PATH")
    p.add_argument("--gamma", type=float, help="forgetting probability (default: config gamma_forget)")
    p.add_argument("--i0", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("vote", help="tally a ballot from final ETVs")
    p.add_argument("input", help="CSV with an 'etv' column, or a simulate output directory")
    p.add_argument("--p-abstain", type=float, default=DEFAULT_P_ABSTAIN)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("sweep", help="run many seeds and aggregate phi(t)")
    p.add_argument("config")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
