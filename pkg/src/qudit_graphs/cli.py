"""Config-driven experiment runner.

    qudit-graphs run config.json [--seed N] [--out report.json] [--csv-dir DIR] [--no-timing]
    qudit-graphs emit report.json fig3d [--out fig3d.csv]
    qudit-graphs list

Exit codes: 0 success, 1 experiment failure (partial report with an error
block), 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__

THREADS_ENV = "QUDIT_GRAPHS_THREADS"
DEFAULT_SEED = 42

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiment"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"type": "string"},
        "parameters": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"report": {"type": "string"}, "csv_dir": {"type": "string"}},
        },
    },
}


class ConfigError(ValueError):
    pass


# experiments ----------------------------------------------------------------------

def _state_fidelity(p, seed):
    from .core.pauli import PauliString, pauli_expectation
    from .device import fusion_postselect, four_p_four_d_config, ghz8_config
    from .graphs import stabilizer_generators
    from .recipes import FOUR_P_FOUR_D, check_recipe, named_recipes, recipe_state
    from .verification import direct_fidelity_from_rho, theta_fidelity_of_state

    recs = named_recipes()
    names = p.get("names", sorted(recs))
    eps = float(p.get("epsilon", 0.0))
    rows = []
    for name in names:
        if name not in recs:
            raise ConfigError(f"unknown state {name!r}")
        r = recs[name]
        state = recipe_state(name)
        gens = stabilizer_generators(r.target) if r.target is not None else []
        vals = [pauli_expectation(state, g) if isinstance(g, PauliString) else g.expectation(state)
                for g in gens]
        rows.append([name, check_recipe(r), min(vals) if vals else None])
    amps = {k: np.exp(1j * ph) / np.sqrt(len(FOUR_P_FOUR_D)) for k, ph in FOUR_P_FOUR_D.items()}
    rho4, p4 = fusion_postselect(four_p_four_d_config(), eps)
    ghz, pg = fusion_postselect(ghz8_config(), eps)
    summary = {
        "four_p_four_d_direct_fidelity": direct_fidelity_from_rho(rho4, amps),
        "four_p_four_d_success": p4,
        "ghz8_theta_fidelity": theta_fidelity_of_state(ghz),
        "ghz8_success": pg,
        "epsilon": eps,
    }
    return summary, {"states": {"columns": ["name", "recipe_fidelity", "min_generator"], "rows": rows}}


def _graph_zoo(p, seed):
    from .recipes import recipe_state
    from .tables import CRAZY6_PLAN, CRAZY6_SIGN_ERRATA, L3_PLAN, L4_PLAN, L5_PLAN, STAR4_PLAN
    from .verification import (
        bootstrap_errorbar, expectation_from_counts, plan_from_table, simulate_counts,
    )

    shots = int(p.get("shots", 1000))
    rounds = int(p.get("rounds", 200))
    plans = {"star4": STAR4_PLAN, "L3": L3_PLAN, "L4": L4_PLAN, "L5": L5_PLAN, "crazy6": CRAZY6_PLAN}
    names = p.get("names", list(plans))
    ss = np.random.SeedSequence(seed)
    rows = []
    for name, child in zip(names, ss.spawn(len(names))):
        if name not in plans:
            raise ConfigError(f"no measurement plan for {name!r}")
        state = recipe_state(name)
        plan = plan_from_table(plans[name])
        means, vars_ = [], []
        for (setting, derived), sub in zip(plan, child.spawn(len(plan))):
            rec = simulate_counts(state, setting, shots, seed=int(sub.generate_state(1)[0]))
            derived = [_fix_sign(d, name, CRAZY6_SIGN_ERRATA) for d in derived]
            if not derived:
                continue
            stat = lambda c, s=setting, ds=derived: float(np.mean(
                [expectation_from_counts(c, s, d) for d in ds]))
            m, sd = bootstrap_errorbar(rec, stat, rounds=rounds, seed=int(sub.generate_state(2)[1]))
            means.append((m, len(derived)))
            vars_.append((sd, len(derived)))
        total = sum(k for _, k in means)
        f = sum(m * k for m, k in means) / total
        err = float(np.sqrt(sum((sd * k) ** 2 for sd, k in vars_)) / total)
        rows.append([name, len(plan), total, f, err])
    return {"shots": shots}, {"zoo": {"columns": ["name", "settings", "stabilizers", "F", "stderr"],
                                      "rows": rows}}


def _fix_sign(s, name, errata):
    if name == "crazy6" and s in errata:
        return s[1:] if s.startswith("-") else "-" + s
    return s


def _mbqc_gates(p, seed):
    from .mbqc import EULER_ANGLES, RX_ANGLES, process_tomography, run_gate

    rows = []
    policies = p.get("policies", ["post-select-zero", "track-and-correct"])
    rng = np.random.default_rng(seed)
    for policy in policies:
        for gate, angles in EULER_ANGLES.items():
            _, f = process_tomography(lambda psi: run_gate(angles, psi, "physical", policy, rng), gate)
            rows.append(["L5", gate, policy, f])
        for enc, tag in (("physical", "L3"), ("logical", "crazy6")):
            for gate, a in RX_ANGLES.items():
                _, f = process_tomography(lambda psi: run_gate([a], psi, enc, policy, rng), gate)
                rows.append([tag, gate, policy, f])
    return {}, {"gates": {"columns": ["pattern", "gate", "policy", "F"], "rows": rows}}


def _grid(p, key="ps", default=None):
    if key in p:
        return [float(x) for x in p[key]]
    return default if default is not None else [round(0.05 * k, 2) for k in range(21)]


def _teleport_sweep(p, seed):
    from .mbqc import teleport_sweep

    ps = _grid(p)
    method = p.get("method", "analytic")
    kw = {"seed": seed, "shots": int(p.get("shots", 2000))} if method == "sampled" else {}
    rows = [list(r) for r in teleport_sweep(ps, method=method, tie=p.get("tie", "half"), **kw)]
    by = {(r[0], r[1], r[2]): r[3] for r in rows}
    fig = [[q, by[("B3", "all", q)], by[("B5", "all", q)], by[("B7", "all", q)]] for q in ps]
    return {"method": method}, {
        "sweep": {"columns": ["code", "mode", "p", "F", "stderr"], "rows": rows},
        "fig3d": {"columns": ["p", "F_B3", "F_B5", "F_B7"], "rows": fig},
    }


def _loss_sweep(p, seed):
    from .mbqc import loss_formula, loss_teleport

    ps = _grid(p)
    rows = []
    for photon in p.get("photons", ["A", "C", "D"]):
        for q in ps:
            rows.append([photon, q, loss_teleport(photon, q), loss_formula(photon, q)])
    return {}, {"loss": {"columns": ["lost", "p", "F", "F_formula"], "rows": rows}}


def _pea(p, seed):
    from .pea import bootstrap_confidence, correct_counts, pea_table

    m = int(p.get("bits", 3))
    rows, runs = pea_table(m=m, samples=int(p.get("samples", 17)), p=float(p.get("p", 0.0)),
                           seed=seed, exact=bool(p.get("exact", False)))
    phys = [c for r in runs if r.encoding == "physical" for c in correct_counts(r)]
    logi = [c for r in runs if r.encoding == "logical" for c in correct_counts(r)]
    summary = {"correct_bits": {enc: sum(r.correct_bits for r in runs if r.encoding == enc)
                                for enc in ("physical", "logical")}}
    if not p.get("exact", False):
        summary["confidence_logical_better"] = bootstrap_confidence(
            phys, logi, rounds=int(p.get("rounds", 10_000)), seed=seed)
    return summary, {"fig4c": {"columns": ["phi0", "bit", "encoding", "P1", "correct"],
                               "rows": [list(r) for r in rows]}}


def _noise_map(p, seed):
    from .noise_map import SIGMA_SWEEP, noise_map

    sig = tuple(float(x) for x in p.get("sigmas", SIGMA_SWEEP))
    eps = tuple(float(x) for x in p.get("epsilons", (0.0, 0.05, 0.1, 0.15, 0.2)))
    rows = noise_map(sig, eps, trials=int(p.get("trials", 500)), seed=seed)
    return {"sigma_unit": "V"}, {"figS11": {"columns": ["noise", "encoding", "level", "infidelity", "ci95"],
                                            "rows": [list(r) for r in rows]}}


def _explore(p, seed):
    from .explorer import DeviceRuleset, exhaustive, explore, qubit_baseline

    rules = qubit_baseline() if p.get("ruleset", "device") == "qubit" else DeviceRuleset()
    kw = {"convention": p.get("convention", "connected"), "min_vertices": int(p.get("min_vertices", 2))}
    if p.get("exhaustive", False):
        res = exhaustive(rules, **kw)
    else:
        res = explore(rules, budget=int(p.get("budget", 1_000_000)), seed=seed,
                      window=int(p.get("window", 100_000)), **kw)
    data = res.to_json()
    rows = [[k, v["n"], v["members"], json.dumps(v["recipe"])] for k, v in data["per_class"].items()]
    summary = {k: data[k] for k in ("classes", "graphs", "steps", "saturated")}
    summary["per_class"] = data["per_class"]
    return summary, {"figS12": {"columns": ["class", "n", "members", "recipe"], "rows": rows}}


def _rates(p, seed):
    from .rates import RateParams, compare_encodings, params_dict

    fields = set(params_dict())
    extra = set(p) - fields - {"n_min", "n_max"}
    if extra:
        raise ConfigError(f"unknown rate parameters {sorted(extra)}")
    params = RateParams(**{k: v for k, v in p.items() if k in fields})
    rows = compare_encodings(range(int(p.get("n_min", 2)), int(p.get("n_max", 40)) + 1), params)
    return {"params": params_dict(params)}, {
        "figS13": {"columns": ["n", "qubit_rate", "qudit_rate", "d_opt"], "rows": [list(r) for r in rows]}}


def _hypergraph(p, seed):
    from .core.states import fidelity
    from .graphs import CLOVER_CENTER, Hypergraph, apply_byproducts, build_state, clover, z_measure_vertex
    from .recipes import check_recipe, named_recipes

    g = clover()
    state = build_state(g)
    expect = {0: [(0, 1), (2, 3)], 1: [(0, 3), (1, 2)]}
    rows = []
    for outcome in (0, 1):
        post, residual, byp = z_measure_vertex(state, g, CLOVER_CENTER, outcome)
        target = build_state(Hypergraph(4, expect[outcome]))
        rows.append([f"centre={outcome}", sorted(residual.edges) == expect[outcome],
                     fidelity(apply_byproducts(post, byp), target)])
    recs = named_recipes()
    for name in ("clover", "toffoli", "fc_toffoli"):
        rows.append([name, True, check_recipe(recs[name])])
    return {}, {"hypergraph": {"columns": ["case", "residual_ok", "F"], "rows": rows}}


EXPERIMENTS = {
    "state-fidelity": _state_fidelity,
    "graph-zoo": _graph_zoo,
    "mbqc-gates": _mbqc_gates,
    "teleport-sweep": _teleport_sweep,
    "loss-sweep": _loss_sweep,
    "pea": _pea,
    "noise-map": _noise_map,
    "explore": _explore,
    "rates": _rates,
    "hypergraph": _hypergraph,
}


# reports --------------------------------------------------------------------------

def artifact_version():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True,
                             cwd=Path(__file__).resolve().parent, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def validate_config(config):
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(exc.message) from exc
    if config["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {config['experiment']!r}; choose from {sorted(EXPERIMENTS)}")


def resolve_seed(cli_seed, config):
    if cli_seed is not None:
        return int(cli_seed)
    return int(config.get("seed", DEFAULT_SEED))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def run_experiment(config, seed=None, timing=True):
    """Validate, run and return ``(report, exit_code)``."""
    validate_config(config)
    seed = resolve_seed(seed, config)
    report = {"experiment": config["experiment"], "version": artifact_version(), "seed": seed,
              "config": config, "threads": _threads()}
    t0 = time.perf_counter()
    try:
        summary, figures = EXPERIMENTS[config["experiment"]](dict(config.get("parameters", {})), seed)
        report["summary"] = _jsonable(summary)
        report["figures"] = _jsonable(figures)
        code = 0
    except ConfigError:
        raise
    except Exception as exc:  # experiment failure: partial report
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
    if timing:
        report["wall_time_s"] = time.perf_counter() - t0
    return report, code


def _threads():
    v = os.environ.get(THREADS_ENV)
    if v is None:
        return 1
    try:
        n = int(v)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer")
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive")
    return n


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def emit_plot_data(report, figure):
    """CSV text for one figure block, numbers at 12 significant digits."""
    figs = report.get("figures", {})
    if figure not in figs:
        raise KeyError(f"report has no figure block {figure!r}; available: {sorted(figs)}")
    block = figs[figure]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(block["columns"])
    for row in block["rows"]:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def dumps_report(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# entry point ----------------------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(prog="qudit-graphs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="report path (default: config output.report or stdout)")
    r.add_argument("--csv-dir", help="write every figure block as CSV here")
    r.add_argument("--no-timing", action="store_true", help="omit wall time for byte-identical reports")
    e = sub.add_parser("emit", help="write a figure block of a report as CSV")
    e.add_argument("report")
    e.add_argument("figure")
    e.add_argument("--out")
    sub.add_parser("list", help="list experiments")
    return ap


def main(argv=None):
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cmd == "list":
        print("\n".join(sorted(EXPERIMENTS)))
        return 0
    if args.cmd == "emit":
        try:
            report = json.loads(Path(args.report).read_text())
            text = emit_plot_data(report, args.figure)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        _write(text, args.out)
        return 0
    try:
        config = json.loads(Path(args.config).read_text())
        report, code = run_experiment(config, args.seed, timing=not args.no_timing)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out or config.get("output", {}).get("report")
    _write(dumps_report(report), out)
    csv_dir = args.csv_dir or config.get("output", {}).get("csv_dir")
    if csv_dir and code == 0:
        Path(csv_dir).mkdir(parents=True, exist_ok=True)
        for fig in report["figures"]:
            (Path(csv_dir) / f"{fig}.csv").write_text(emit_plot_data(report, fig))
    if code:
        print(f"experiment failed: {report['error']['message']}", file=sys.stderr)
    return code


def _write(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
