"""Batch experiment driver. Every subcommand writes CSV tables with a provenance header."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from . import __version__
from . import graphs, metrics, optimize, problems, qva

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, dict] = {
    "graph-report": {
        "graphs": list(graphs.table_graphs()),
        "fingerprint_samples": 7,
        "fingerprint_tol": 1e-9,
        "n_grid": 1024,
    },
    "sweep-variance": {"graph": "complete_128", "sigma2": [0.0, 0.01, 0.05, 0.1], "seeds": 20, "starts": 32},
    "run-qva": {
        "algorithm": "qmoa",
        "instance": "ScheduleB",
        "p": [1, 2, 3, 4, 5],
        "repeats": 5,
        "max_iter": 1000,
        "tol": 1e-9,
        "scale": None,
        "engine": "spectral",
        "hybrid_times": None,
        "protocol": "multistart",
        "dump_states": 16,
    },
    "msv": {"algorithm": "qmoa", "instance": "ScheduleA", "mode": "exact", "k": 512, "scale": True},
    "hamming-scaling": {"n": [1, 2, 3, 4, 5, 6], "m": [2, 3, 4, 5, 6, 7, 8], "n_grid": 1024},
    "ingest-prices": {"eta": 0.5, "A": 0, "long_sign": -1},
}


def load_config(command: str, path: str | None) -> dict:
    cfg = dict(DEFAULTS[command])
    if path:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(user) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.update(user)
    return cfg


def config_hash(command: str, cfg: dict, seed: int) -> str:
    doc = json.dumps({"command": command, "config": cfg, "seed": seed}, sort_keys=True, default=str)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def write_csv(path: Path, header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for key in sorted(header):
            fh.write(f"# {key}={header[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (tuple, list)):
        return " ".join(str(v) for v in x)
    return str(x)


def parse_graph(item) -> tuple[str, graphs.GraphSpec]:
    table = graphs.table_graphs()
    if isinstance(item, str):
        if item not in table:
            raise ConfigError(f"unknown graph name {item!r}; known: {', '.join(table)}")
        return item, table[item]
    if not isinstance(item, dict) or "type" not in item:
        raise ConfigError(f"graph spec must be a name or an object with 'type': {item!r}")
    kind = item["type"]
    try:
        if kind == "hamming":
            spec = graphs.Hamming(int(item["n"]), int(item["m"]))
        elif kind == "complete":
            spec = graphs.Complete(int(item["N"]))
        elif kind == "constrained_permutation":
            spec = graphs.ConstrainedPermutation(tuple(item["counts"]))
        elif kind == "kpartite":
            spec = graphs.KPartite(tuple(item["sizes"]))
        elif kind == "move_closure":
            moves = tuple(tuple(mv) for mv in item["moves"])
            spec = graphs.MoveClosure(tuple(item["seed"]), moves, item.get("kind", "swap"))
        else:
            raise ConfigError(f"unknown graph type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad graph spec {item!r}: {exc}") from exc
    return item.get("name", kind), spec


def coefficient_model(spec: graphs.GraphSpec, samples: int = 7, tol: float = 1e-9) -> metrics.CoefficientModel:
    if isinstance(spec, graphs.Hamming) and graphs.vertex_count(spec) > graphs.DENSE_LIMIT:
        return metrics.hamming_model(spec.n, spec.m)
    if graphs.vertex_count(spec) > graphs.DENSE_LIMIT:
        raise ConfigError(f"graph with {graphs.vertex_count(spec)} vertices exceeds the dense limit")
    part = graphs.subshell_partition(spec, 0, samples, tol)
    return metrics.graph_model(spec, 0, part)


def parse_instance(item, seed: int):
    builtin = problems.builtin_instances()
    if isinstance(item, str):
        if item in builtin:
            return builtin[item]
        path = Path(item)
        if path.exists():
            return problems.load_instance(path)
        raise ConfigError(f"unknown instance {item!r}")
    if isinstance(item, dict) and "synthetic" in item:
        opts = dict(item["synthetic"])
        return problems.synthetic_portfolio(int(opts.get("n", 6)), int(opts.get("A", 2)), int(opts.get("seed", seed)))
    raise ConfigError(f"bad instance entry {item!r}")


def cmd_graph_report(cfg: dict, seed: int, workers: int) -> tuple[list[str], list[list]]:
    rows = []
    for item in cfg["graphs"]:
        name, spec = parse_graph(item)
        N = graphs.vertex_count(spec)
        if N > graphs.DENSE_LIMIT:
            raise ConfigError(f"{name}: {N} vertices exceeds the dense limit")
        if N == 1:
            rows.append([name, 1, 0, 0, 1, 1.0, 0.0])
            continue
        part = graphs.subshell_partition(spec, 0, cfg["fingerprint_samples"], cfg["fingerprint_tol"], seed)
        model = metrics.graph_model(spec, 0, part)
        t_star, best = metrics.maximize_time(metrics.population_weighted_sum(model), cfg["n_grid"])
        rows.append([name, N, graphs.degree_bfs(spec), graphs.diameter_bfs(spec), len(part.subshells),
                     best**2 / N, t_star])
    return ["graph", "vertices", "degree", "diameter", "subshells", "prob_star", "t_star"], rows


def cmd_sweep_variance(cfg: dict, seed: int, workers: int) -> tuple[list[str], list[list]]:
    name, spec = parse_graph(cfg["graph"])
    model = coefficient_model(spec)
    t_star = metrics.optimal_walk_time(model)
    seeds = cfg["seeds"]
    seed_list = list(range(seed, seed + seeds)) if isinstance(seeds, int) else list(seeds)
    rows = []
    for s2 in cfg["sigma2"]:
        for s in seed_list:
            r = metrics.variance_adjusted_convergence(model, float(s2), int(s), cfg["starts"], t_star)
            rows.append([name, float(s2), int(s), r.probability, r.discrepancy, r.t, r.gamma])
    return ["graph", "sigma2", "seed", "prob", "phi", "t", "gamma"], rows


def cmd_run_qva(cfg: dict, seed: int, workers: int, out: Path) -> tuple[list[str], list[list]]:
    try:
        alg = qva.Algorithm(cfg["algorithm"])
    except ValueError:
        names = ", ".join(a.value for a in qva.Algorithm)
        raise ConfigError(f"unknown algorithm {cfg['algorithm']!r}; choose one of {names}") from None
    inst = parse_instance(cfg["instance"], seed)
    depths = sorted(int(p) for p in (cfg["p"] if isinstance(cfg["p"], list) else [cfg["p"]]))
    if cfg["protocol"] not in ("multistart", "ladder"):
        raise ConfigError("protocol must be 'multistart' or 'ladder'")
    if cfg["protocol"] == "ladder" and cfg["hybrid_times"] is not None:
        raise ConfigError("the ladder protocol optimises every parameter; drop hybrid_times")
    rows = []
    ladder = None
    for p in depths:
        try:
            ansatz = qva.build_ansatz(alg, inst, p, scale=cfg["scale"], engine=cfg["engine"])
        except qva.IncompatibleProblem as exc:
            raise ConfigError(str(exc)) from exc
        times = cfg["hybrid_times"]
        if cfg["protocol"] == "ladder":
            if ladder is None:
                top = qva.build_ansatz(alg, inst, depths[-1], scale=cfg["scale"], engine=cfg["engine"])
                ladder = optimize.depth_ladder(top, cfg["repeats"], seed, cfg["max_iter"], cfg["tol"], workers)
            res = ladder[p]
        elif times is None:
            res = optimize.multistart(ansatz, cfg["repeats"], seed, cfg["max_iter"], cfg["tol"], workers)
        else:
            if times == "subshell":
                if alg is qva.Algorithm.QMOA:
                    times = optimize.subshell_optimal_times(metrics.hamming_model(inst.n, inst.m))
                elif alg is qva.Algorithm.QAOA:
                    times = optimize.subshell_optimal_times(metrics.hamming_model(ansatz.info["qubits"], 2))
                else:
                    raise ConfigError("subshell-optimal times are available for qmoa and qaoa only")
            res = optimize.hybrid_optimize(ansatz, times, cfg["repeats"], seed, cfg["max_iter"], cfg["tol"], workers)
        for run in res.runs:
            rows.append([alg.value, int(p), run.repeat, run.seed, run.ratio, run.optimum_probability,
                         run.objective, run.result.nfev, " ".join(repr(float(x)) for x in run.theta)])
        best = res.incumbent
        state = ansatz.evolve(best.theta)
        report = qva.measurement_report(state, ansatz.costs, cfg["dump_states"], ansatz.decode)
        write_csv(
            out / f"run-qva-states-p{p}.csv",
            {"algorithm": alg.value, "p": p, "seed": seed, "version": __version__},
            ["index", "solution", "real", "imag", "probability", "cost", "phase"],
            ([r["index"], r["solution"], state[r["index"]].real, state[r["index"]].imag, r["probability"],
              r["cost"], r["phase"]] for r in report),
        )
    cols = ["algorithm", "p", "repeat", "seed", "ratio", "optimum_probability", "objective", "nfev", "theta"]
    return cols, rows


def cmd_msv(cfg: dict, seed: int, workers: int) -> tuple[list[str], list[list]]:
    inst = parse_instance(cfg["instance"], seed)
    if not isinstance(inst, problems.PmsInstance):
        raise ConfigError("msv runs on scheduling instances")
    if cfg["algorithm"] == "qmoa":
        costs, n, m = problems.pms_cost_table(inst), inst.n, inst.m
    elif cfg["algorithm"] == "qaoa":
        costs, _ = problems.pms_binary_cost_table(inst)
        n, m = inst.n * inst.bits, 2
    else:
        raise ConfigError("msv algorithm must be 'qmoa' or 'qaoa'")
    if cfg["scale"]:
        costs = problems.scale_by_mean(costs)
    if cfg["mode"] not in ("exact", "sampled"):
        raise ConfigError("mode must be 'exact' or 'sampled'")
    res = metrics.msv_hamming(costs, n, m, cfg["mode"], cfg["k"], seed)
    rows = [[cfg["algorithm"], str(d), int(res.shell_sizes[d]), float(v), res.seed if res.seed is not None else ""]
            for d, v in enumerate(res.per_shell)]
    rows.append([cfg["algorithm"], "mean", "", res.msv, res.seed if res.seed is not None else ""])
    return ["algorithm", "d", "shell_size", "shell_variance", "sample_seed"], rows


def cmd_hamming_scaling(cfg: dict, seed: int, workers: int) -> tuple[list[str], list[list]]:
    rows = []
    single = {m: metrics.hamming_convergence_potential(1, m, cfg["n_grid"]) for m in cfg["m"]}
    for n in cfg["n"]:
        for m in cfg["m"]:
            amp = metrics.amplification(int(n), int(m))
            rows.append([n, m, amp["prob"], amp["amplification"], amp["approx"], abs(amp["prob"] - single[m] ** n)])
    return ["n", "m", "prob_star", "amplification", "closed_form", "power_law_gap"], rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctqwva", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file overriding the defaults for this command")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        if name == "ingest-prices":
            p.add_argument("prices", help="CSV with a date column followed by one column per asset")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = load_config(args.command, args.config)
        header = {
            "command": args.command,
            "config_hash": config_hash(args.command, cfg, args.seed),
            "seed": args.seed,
            "version": __version__,
        }
        if args.command == "ingest-prices":
            inst = problems.ingest_prices(args.prices, cfg["eta"], cfg["A"], cfg["long_sign"])
            out.mkdir(parents=True, exist_ok=True)
            problems.save_instance(inst, out / f"{inst.name}.json")
            print(out / f"{inst.name}.json")
            return EXIT_OK
        handlers = {
            "graph-report": cmd_graph_report,
            "sweep-variance": cmd_sweep_variance,
            "msv": cmd_msv,
            "hamming-scaling": cmd_hamming_scaling,
        }
        if args.command == "run-qva":
            cols, rows = cmd_run_qva(cfg, args.seed, args.workers, out)
        else:
            cols, rows = handlers[args.command](cfg, args.seed, args.workers)
        target = out / f"{args.command}.csv"
        write_csv(target, header, cols, rows)
        print(target)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, FileNotFoundError) as exc:
        if args.command == "ingest-prices":
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FloatingPointError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
