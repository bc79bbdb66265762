"""Command-line runner: simulate, estimate, check bounds and emit tables.

Every output carries a metadata header (config hash, seeds, versions, RNG and
kernel backend) and no timestamps, so reruns with the same arguments write
identical bytes. Replication ``r`` under master seed ``s`` draws from
``Philox(SeedSequence(s, spawn_key=(r,)))``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as bd
from . import hardness as hd
from . import mixing as mx
from . import ope
from . import policies as pol
from . import presets
from ._backend import BACKEND
from .estimate import count, estimate, estimate_from, estimation_error
from .model import CmcModel, ModelError, load_model
from .simulate import RNG_ALGORITHM, load_trajectory, save_trajectory, simulate, trajectory_header

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_MODEL = 4

EXPERIMENTS = ("error-curve", "pac-validation", "mixing-report", "cover-time", "ope-eval", "greedy-pipeline")


class ConfigError(ValueError):
    pass


class IoError(OSError):
    pass


# ---- output ----

def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return None if math.isnan(f) else f
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def config_hash(config: dict) -> str:
    blob = json.dumps(_plain(config), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def metadata(config: dict, seeds) -> dict:
    return {"config_hash": config_hash(config), "config": _plain(config), "seeds": list(seeds),
            "versions": {"cmcest": __version__, "numpy": np.__version__, "python": platform.python_version()},
            "rng": RNG_ALGORITHM, "backend": BACKEND}


def render(meta: dict, rows: list[dict] | None, payload: dict | None, fmt: str) -> str:
    """CSV: a ``# {json}`` header line then the rows. JSON: ``{"meta", "result"}``."""
    if fmt == "json":
        body = payload if payload is not None else {"rows": rows}
        return json.dumps(_plain({"meta": meta, "result": body}), indent=1, sort_keys=True) + "\n"
    if rows is None:
        rows = [{"key": k, "value": json.dumps(_plain(v), sort_keys=True) if isinstance(v, (dict, list)) else _plain(v)}
                for k, v in sorted(payload.items())]
    buf = io.StringIO()
    buf.write("# " + json.dumps(_plain(meta), sort_keys=True) + "\n")
    if rows:
        fields = list(rows[0].keys())
        for r in rows[1:]:
            fields += [f for f in r if f not in fields]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if _plain(v) is None else _plain(v)) for k, v in r.items()})
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {out}: {exc}") from exc


# ---- inputs ----

def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise IoError(f"missing file {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _load_vector(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except FileNotFoundError as exc:
        raise IoError(f"missing file {path}") from exc
    if path.endswith(".json"):
        return np.asarray(json.loads(text), dtype=np.float64)
    rows = [r for r in csv.reader(line for line in text.splitlines() if line and not line.startswith("#"))]
    vals = []
    for r in rows:
        try:
            vals.append([float(x) for x in r])
        except ValueError:
            continue  # header line
    return np.asarray(vals, dtype=np.float64).squeeze()


def resolve_instance(args) -> tuple[CmcModel, pol.LoggingPolicy, object, str]:
    """Model, policy and initial law from ``--preset`` or ``--model``/``--policy``."""
    if getattr(args, "model", None):
        try:
            model = load_model(args.model)
        except FileNotFoundError as exc:
            raise IoError(f"missing file {args.model}") from exc
        if not getattr(args, "policy", None):
            raise ConfigError("--model needs --policy")
        policy = pol.policy_from_dict(_read_json(args.policy))
        return model, policy, None, f"file:{args.model}"
    name = getattr(args, "preset", None) or "stationary-d3k2"
    try:
        model, policy, d0 = presets.model_preset(name)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(presets.PRESET_NAMES)}") from exc
    return model, policy, d0, name


def constants_for(name: str, model: CmcModel, policy) -> dict | None:
    """Per-class constants when the instance has known ones."""
    if name.startswith("class-"):
        return presets.class_constants_for(name[len("class-"):])
    if name.startswith("block-d"):
        return hd.block_class_constants(model.d, model.k, presets.BLOCK_IOTA)
    if isinstance(policy, pol.StationaryRandomized):
        c = bd.stationary_constants(model, policy.table)
        c["pi"] = c["pi"].tolist()
        return c
    return None


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _config(args, drop=("func", "out", "threads", "format")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in drop}


# ---- subcommands ----

def cmd_simulate(args) -> None:
    model, policy, d0, name = resolve_instance(args)
    traj = simulate(model, policy, d0, args.m, args.seed, rep=args.rep)
    if args.out and args.out.endswith(".npz"):
        try:
            save_trajectory(traj, args.out)
        except OSError as exc:
            raise IoError(str(exc)) from exc
        return
    meta = metadata(_config(args), [args.seed])
    meta.update(trajectory_header(traj))
    cols = {"i": np.arange(traj.m + 1), "X_i": traj.states, "a_i": traj.controls}
    if traj.omega is not None:
        cols["omega_i"] = traj.omega
    if args.format == "json":
        payload = {k: v.tolist() for k, v in cols.items()}
        emit(render(meta, None, payload, "json"), args.out)
        return
    rows = [dict(zip(cols, vals)) for vals in zip(*(v.tolist() for v in cols.values()))]
    emit(render(meta, rows, None, "csv"), args.out)


def cmd_estimate(args) -> None:
    try:
        traj = load_trajectory(args.trajectory)
    except FileNotFoundError as exc:
        raise IoError(f"missing file {args.trajectory}") from exc
    est = estimate(count(traj))
    payload = est.to_dict()
    if args.truth:
        truth = load_model(args.truth)
        sup, row = estimation_error(est, truth)
        payload["sup_error"] = sup
        payload["row_l1"] = row.tolist()
    meta = metadata(_config(args), [traj.seed] if traj.seed is not None else [])
    if args.format == "json":
        emit(render(meta, None, payload, "json"), args.out)
        return
    und = set(map(tuple, est.undefined_rows))
    rows = [{"l": l, "s": s, "t": t, "M_hat": float(est.matrices[l, s, t]), "undefined": int((s, l) in und)}
            for l in range(est.k) for s in range(est.d) for t in range(est.d)]
    emit(render(meta, rows, None, "csv"), args.out)


def cmd_mixing(args) -> None:
    model, policy, d0, _ = resolve_instance(args)
    rep = mx.mixing_report(model, policy, d0, args.m, exact=args.exact)
    C, C_theta = mx.mixing_constants(rep.gamma, rep.theta_bar, args.m)
    meta = metadata(_config(args), [])
    payload = rep.to_dict()
    payload.update(C=C, C_theta=C_theta, violations=rep.sandwich_violations(),
                   violations_any_history=rep.sandwich_violations(any_history=True))
    emit(render(meta, None if args.format == "json" else rep.rows(), payload, args.format), args.out)


def _bound_inputs(args, consts: dict, d: int, k: int) -> bd.BoundInputs:
    kw = dict(eps=args.eps, delta=args.delta, c=args.c, C_pel=args.C_pel)
    # without a computed peak marginal, fall back on the bound rho <= max(zeta1, 1 - zeta2)
    kw["rho_star"] = consts.get("rho_star", max(consts["zeta1"], 1 - consts["zeta2"]))
    try:
        return bd.inputs_from(consts, d, k, **kw)
    except bd.InvalidParameter as exc:
        raise ConfigError(str(exc)) from exc


def bounds_row(name: str, inputs: bd.BoundInputs, consts: dict) -> dict:
    return {"class": consts.get("class", name), "T": inputs.T, "zeta1": inputs.zeta1, "zeta2": inputs.zeta2,
            "C_delta": inputs.C_delta, "rho_star": inputs.rho_star,
            "m_star_thm1": bd.theorem1_threshold(inputs), "m_star_thm2": bd.theorem2_threshold(inputs)}


def cmd_bounds(args) -> None:
    meta = metadata(_config(args), [])
    if args.all_classes:
        rows = []
        for kind in presets.CLASSES:
            model, policy = presets.class_instance(kind)
            consts = presets.class_constants_for(kind)
            rows.append(bounds_row(kind, _bound_inputs(args, consts, model.d, model.k), consts))
        emit(render(meta, rows, {"rows": rows}, args.format), args.out)
        return
    model, policy, _, name = resolve_instance(args)
    consts = constants_for(name, model, policy)
    if consts is None:
        raise ConfigError(f"no closed-form constants for {name}")
    inputs = _bound_inputs(args, consts, model.d, model.k)
    row = bounds_row(name, inputs, consts)
    payload = {"constants": consts, "table": row, "theorem1_terms": list(bd.theorem1_terms(inputs)),
               "theorem2": bd.theorem2_terms(inputs)}
    if args.m:
        try:
            payload["visit_bracket"] = list(bd.expected_visit_bracket(inputs, args.m))
        except bd.MTooSmall as exc:
            payload["visit_bracket"] = str(exc)
    emit(render(meta, [row], payload, args.format), args.out)


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(v) for v in str(text).split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_hardness(args) -> None:
    try:
        if args.family == "sigma":
            sigma = _int_list(args.sigma) or [1] * (args.d // 2)
            model = hd.build_sigma_instance(args.d, args.p_star, args.eps, sigma)
            payload = {"family": "sigma", "model": model.to_dict(),
                       "stationary": hd.sigma_stationary_closed_form(args.d, args.p_star, args.eps, sigma)}
        else:
            xi = None
            if args.xi:
                xi = np.array(_int_list(args.xi)).reshape(args.k, args.d // 3)
            inst = hd.build_block_instance(args.d, args.k, args.iota, args.eps, xi)
            model = inst.model
            payload = {"family": "block", "model": model.to_dict(), "xi": inst.xi,
                       "stationary_pairs": inst.stationary_pairs(),
                       "constants": hd.block_class_constants(args.d, args.k, args.iota),
                       "cover_threshold": hd.cover_time_threshold(args.d, args.k, args.iota)}
    except bd.InvalidParameter as exc:
        raise ConfigError(str(exc)) from exc
    if args.emit:
        emit(json.dumps(_plain(model.to_dict()), indent=1) + "\n", args.emit)
    meta = metadata(_config(args), [args.seed])
    if args.family == "block" and args.cover_n:
        rows = cover_rows(inst, _int_list(args.cover_n), args.replications, args.seed)
        emit(render(meta, rows, {"rows": rows, **payload}, args.format), args.out)
        return
    emit(render(meta, None, payload, args.format), args.out)


def cover_rows(inst, ns, replications: int, seed: int) -> list[dict]:
    thr = hd.cover_time_threshold(inst.d, inst.k, inst.iota)
    rows = []
    for n in ns:
        r = hd.cover_time_experiment(inst, n, replications, seed)
        rows.append({"n": n, "p": r["p"], "ci_low": r["ci_low"], "ci_high": r["ci_high"],
                     "bound": r["bound"], "threshold": thr, "replications": replications})
    return rows


def cmd_ope(args) -> None:
    model, policy, d0, name = resolve_instance(args)
    Pi = _load_vector(args.policy_matrix) if args.policy_matrix else np.full((model.d, model.k), 1.0 / model.k)
    Pi = Pi.reshape(model.d, model.k)
    g_t = _load_vector(args.cost) if args.cost else np.arange(model.d * model.k, dtype=float)
    g_t = np.broadcast_to(g_t.reshape(model.d, -1), (model.d, model.k)) if g_t.size in (model.d, model.d * model.k) \
        else None
    if g_t is None:
        raise ConfigError(f"cost vector must have {model.d} or {model.d * model.k} entries")
    rows = ope_rows(model, policy, d0, Pi, g_t, args.alpha, args.m, [args.seed], args.replications, name,
                    args.eps, args.delta)
    emit(render(metadata(_config(args), [args.seed]), rows, {"rows": rows}, args.format), args.out)


def ope_rows(model, policy, d0, Pi, g_t, alpha, m, seeds, replications, name, eps=0.1, delta=0.05, threads=1):
    prob = ope.compose_policy(model, Pi, g_t, alpha)
    V = ope.solve_value(prob)
    consts = constants_for(name, model, policy)

    def one(job):
        seed, r = job
        est = estimate_from(simulate(model, policy, d0, m, seed, rep=r))
        hat = ope.compose_policy(est.to_model(), Pi, g_t, alpha)
        res = ope.plug_in_value(hat.M, hat.g, alpha)
        err = float(np.abs(res.V_hat - V).max())
        row = {"seed": seed, "rep": r, "m": m, "alpha": alpha, "V_inf": float(np.abs(V).max()), "error": err,
               "bound": ope.perturbation_bound(prob.M, hat.M, prob.g, alpha), "residual": res.residual,
               "undefined_rows": len(est.undefined_rows)}
        if consts is not None:
            inputs = bd.inputs_from(consts, model.d, model.k, eps=eps, delta=delta)
            row["T_alpha"] = ope.T_alpha(prob.g, model.d, alpha, consts["T"])
            row["value_threshold"] = ope.value_threshold(inputs, prob.g, alpha)
        return row

    return _pmap(one, [(s, r) for s in seeds for r in range(replications)], threads)


# ---- experiments ----

DEFAULTS = {
    "preset": "stationary-d3k2", "m_grid": [1000, 4000, 16000], "replications": 20, "seed": 0,
    "eps": 0.15, "delta": 0.1, "c": 1.0, "C_pel": 1.0, "calibrate": False, "m": 3,
    "cover_n": None, "iota": 0.3, "d": 6, "k": 2, "alpha": 0.9, "upsilons": [0.3], "exact": False,
}


def experiment_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(_read_json(args.config))
    for key in ("preset", "replications", "eps", "delta", "c", "m", "alpha", "iota", "d", "k"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.m_grid:
        cfg["m_grid"] = _int_list(args.m_grid)
    if args.kind:
        cfg["kind"] = args.kind
    if cfg.get("kind") not in EXPERIMENTS:
        raise ConfigError(f"experiment kind must be one of {', '.join(EXPERIMENTS)}")
    if not cfg["m_grid"] or int(cfg["replications"]) < 1:
        raise ConfigError("m_grid must be nonempty and replications >= 1")
    for key in ("model", "policy"):
        if cfg.get(key) and not Path(cfg[key]).exists():
            raise IoError(f"missing file {cfg[key]}")
    return cfg


def _instance_from_cfg(cfg: dict):
    ns = argparse.Namespace(model=cfg.get("model"), policy=cfg.get("policy"), preset=cfg["preset"])
    return resolve_instance(ns)


def run_experiment(cfg: dict, threads: int = 1) -> tuple[list[dict] | None, dict | None]:
    kind = cfg["kind"]
    seed, reps = int(cfg["seed"]), int(cfg["replications"])
    if kind == "error-curve":
        model, policy, d0, name = _instance_from_cfg(cfg)
        consts = constants_for(name, model, policy) or {}
        extra = {k: consts[k] for k in ("T", "zeta1", "zeta2", "C_delta") if k in consts}

        def one(job):
            m, r = job
            err = estimation_error(estimate_from(simulate(model, policy, d0, m, seed, rep=r)), model)[0]
            return {"m": m, "seed": seed, "rep": r, "sup_error": err, **extra}

        return _pmap(one, [(m, r) for m in cfg["m_grid"] for r in range(reps)], threads), None
    if kind == "pac-validation":
        model, policy, d0, name = _instance_from_cfg(cfg)
        consts = constants_for(name, model, policy)
        if consts is None:
            raise ConfigError(f"no closed-form constants for {name}")
        inputs = bd.inputs_from(consts, model.d, model.k, eps=cfg["eps"], delta=cfg["delta"], c=cfg["c"],
                                C_pel=cfg["C_pel"])
        res = bd.pac_validation(model, policy, d0, inputs, reps, seed)
        if not res["pass"] and cfg.get("calibrate"):
            cal = bd.calibrate_c(model, policy, d0, inputs, reps, seed)
            res["calibrated_c"] = cal["c"]
            res["calibrated"] = cal["result"]
        return None, res
    if kind == "mixing-report":
        model, policy, d0, _ = _instance_from_cfg(cfg)
        rep = mx.mixing_report(model, policy, d0, int(cfg["m"]), exact=bool(cfg.get("exact")))
        payload = rep.to_dict()
        payload["violations"] = rep.sandwich_violations()
        return rep.rows(), payload
    if kind == "cover-time":
        inst = hd.build_block_instance(int(cfg["d"]), int(cfg["k"]), float(cfg["iota"]))
        thr = hd.cover_time_threshold(inst.d, inst.k, inst.iota)
        ns = cfg.get("cover_n") or [0, thr, 10 * thr]
        return cover_rows(inst, ns, reps, seed), None
    if kind == "ope-eval":
        model, policy, d0, name = _instance_from_cfg(cfg)
        Pi = np.full((model.d, model.k), 1.0 / model.k)
        g_t = np.arange(model.d * model.k, dtype=float).reshape(model.d, model.k)
        rows = []
        for m in cfg["m_grid"]:
            rows += ope_rows(model, policy, d0, Pi, g_t, float(cfg["alpha"]), m, [seed], reps, name,
                             cfg["eps"], cfg["delta"], threads)
        return rows, None
    if kind == "greedy-pipeline":
        model = presets.class_instance("greedy")[0]
        base = presets.BASE_D3K2

        def one(job):
            u, m, r = job
            res = ope.greedy_pipeline(model, base, u, m, seed, rep=r)
            return {"upsilon": u, "m": m, "seed": seed, "rep": r,
                    **{key: res[key] for key in ("raw_error", "renormalized_error", "top_left_dev", "flagged_rows")}}

        jobs = [(float(u), m, r) for u in cfg["upsilons"] for m in cfg["m_grid"] for r in range(reps)]
        return _pmap(one, jobs, threads), None
    raise ConfigError(kind)


def cmd_experiment(args) -> None:
    cfg = experiment_config(args)
    rows, payload = run_experiment(cfg, args.threads)
    meta = metadata(cfg, [int(cfg["seed"])])
    if rows is None and args.format == "csv":
        rows = [{k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
    emit(render(meta, rows, payload, args.format), args.out)


# ---- parser ----

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1, help="replication-level worker cap")
    return p


def _instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default=None, help=f"one of {', '.join(presets.PRESET_NAMES)}")
    p.add_argument("--model", default=None, help="model JSON")
    p.add_argument("--policy", default=None, help="policy JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmcest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cmcest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("simulate", parents=[common], help="sample one path")
    _instance_flags(p)
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--rep", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="estimate transition matrices from a path")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--truth", default=None, help="model JSON to score against")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mixing", parents=[common], help="exact mixing coefficients on a small instance")
    _instance_flags(p)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("bounds", parents=[common], help="sample-size thresholds for an instance")
    _instance_flags(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--C-pel", dest="C_pel", type=float, default=1.0)
    p.add_argument("--m", type=int, default=None, help="also report the expected-visit bracket at m")
    p.add_argument("--all-classes", dest="all_classes", action="store_true",
                   help="one row per policy-class preset")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("hardness", parents=[common], help="lower-bound instances and touring times")
    p.add_argument("--family", choices=("sigma", "block"), default="block")
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p-star", dest="p_star", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--iota", type=float, default=0.3)
    p.add_argument("--sigma", default=None, help="comma-separated +-1 entries")
    p.add_argument("--xi", default=None, help="comma-separated 0/1 entries, k rows of d/3")
    p.add_argument("--emit", default=None, help="write the model JSON here")
    p.add_argument("--cover-n", dest="cover_n", default=None, help="comma-separated n for P(T > n)")
    p.add_argument("--replications", type=int, default=10_000)
    p.set_defaults(func=cmd_hardness)

    p = sub.add_parser("ope", parents=[common], help="plug-in policy evaluation")
    _instance_flags(p)
    p.add_argument("--policy-matrix", dest="policy_matrix", default=None, help="(d, k) target policy, JSON or CSV")
    p.add_argument("--cost", default=None, help="cost vector, JSON or CSV (d or d*k entries)")
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--m", type=int, default=100_000)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.set_defaults(func=cmd_ope)

    p = sub.add_parser("experiment", parents=[common], help="run a preset experiment")
    p.add_argument("kind", nargs="?", choices=EXPERIMENTS, default=None)
    p.add_argument("--config", default=None, help="experiment JSON; flags override it")
    p.add_argument("--preset", default=None)
    p.add_argument("--m-grid", dest="m_grid", default=None, help="comma-separated m values")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--m", type=int, default=None, help="horizon for mixing reports")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--iota", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "experiment" and args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ModelError, bd.InvalidParameter, ope.InvalidUpsilon, mx.TooLarge) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    return 0


if __name__ == "__main__":
    sys.exit(main())
