"""Run one configured experiment and build its report."""

from __future__ import annotations

import io as _io

import numpy as np

from . import __version__
from . import chaos, mca, recurrence
from .config import ExperimentConfig, describe_state, parse_state
from .density import CheckpointPolicy, TimeSet, density, hitting_times, ball, scale, write_rle_csv
from .errors import ConfigError, UnsupportedOperationError
from .io import dumps
from .partition import BoxPartition
from .systems import sample_orbit

SCHEMA_VERSION = 1

#: How the chaos operations probe the horizon (tail half of 20 even checkpoints).
PAIR_POLICY = CheckpointPolicy("linear", 20, 0.5)


def _policy(p, default):
    if "checkpoints" not in p and "m" not in p and "tail_fraction" not in p:
        return default
    return CheckpointPolicy(
        p.get("checkpoints", default.kind), p.get("m", default.m), p.get("tail_fraction", default.tail_fraction)
    )


def _partition(cfg):
    res = cfg.params.get("resolution", 64 if not cfg.system.is_symbolic else 8)
    return BoxPartition.for_system(cfg.system, res)


def _orbit(cfg, horizon=None, delta=None):
    return sample_orbit(cfg.system, cfg.x0, delta, horizon or cfg.params.get("horizon", 10**5))


def _states(cfg, text):
    return [parse_state(cfg.system, t) for t in text.split(";") if t.strip()]


def run_mca(cfg, artifacts, workers):
    p = cfg.params
    policy = _policy(p, mca.MCA_POLICY)
    part = _partition(cfg)
    orbit = _orbit(cfg)
    est = mca.estimate_mca(orbit, part, p.get("delta_pos"), policy)
    tol = p.get("tol", 1e-2)
    center = mca.verify_center(orbit, est, p.get("epsilon"), tol, policy)
    minimal = mca.verify_minimality(orbit, est, None, tol, policy)
    invariant = mca.check_invariance(cfg.system, est, p.get("steps", 50)) if len(est) else False
    dens = est.densities
    result = {
        "n_cells": len(est),
        "cells": est.cells.tolist(),
        "density_min": float(dens.min()) if len(dens) else 0.0,
        "density_max": float(dens.max()) if len(dens) else 0.0,
        "delta_pos": est.delta_pos,
        "center": {"ok": center.ok, "lower": center.estimate.lower, "upper": center.estimate.upper},
        "minimal": {"ok": minimal.ok, "removable": minimal.removable},
        "invariant": invariant,
    }
    if "thetas" in p:
        t1, t2 = p["thetas"][:2]
        t_max = orbit.t_max
        a = sample_orbit(cfg.system, cfg.x0, t1, round(t_max / t1))
        b = sample_orbit(cfg.system, cfg.x0, t2, round(t_max / t2))
        th = mca.theta_robustness(a, b, part, p.get("delta_pos"), policy, p.get("warn_below", 0.98))
        result["theta"] = {"thetas": [t1, t2], "score": th.score, "resonance_warning": th.resonance_warning}
    buf = _io.StringIO()
    est.write_plot_csv(buf)
    artifacts["cells.csv"] = buf.getvalue()
    artifacts["mca.json"] = dumps(est.to_dict())
    return result, policy


def _density_set(cfg):
    p = cfg.params
    kind = p.get("set", "ball")
    if kind == "evens":
        return TimeSet.evens(p.get("horizon", 10**4))
    if kind == "blocks":
        period, duty = p.get("period", 2.0), p.get("duty", 1.0)
        return TimeSet.from_time_predicate(
            lambda t: np.mod(t, period) < duty - 1e-12, p.get("delta", 0.01), p.get("t_max", 1000.0)
        )
    if kind == "ball":
        if cfg.x0 is None:
            raise ConfigError("a ball time set needs x0", None, "x0")
        orbit = _orbit(cfg)
        center = p.get("center")
        center = cfg.x0 if center is None else np.array(center)
        return hitting_times(orbit, ball(cfg.system, center, p.get("radius", 0.1)))
    raise ConfigError(f"unknown time set {kind!r}; use evens, blocks or ball", None, "set")


def run_density(cfg, artifacts, workers):
    from .density import DEFAULT_POLICY

    p = cfg.params
    policy = _policy(p, DEFAULT_POLICY)
    ts = _density_set(cfg)
    est = density(ts, policy)
    result = {"lower": est.lower, "upper": est.upper, "n_members": len(ts), "mode": ts.mode}
    scaled = []
    for tau in p.get("taus", []):
        try:
            s = density(scale(ts, tau), policy)
            scaled.append({"tau": tau, "lower": s.lower, "upper": s.upper, "rejected": False,
                           "shift": abs(s.upper - est.upper)})
        except UnsupportedOperationError as exc:
            scaled.append({"tau": tau, "rejected": True, "reason": str(exc)})
    if scaled:
        result["scaled"] = scaled
        shifts = [s["shift"] for s in scaled if not s["rejected"]]
        result["max_scale_shift"] = max(shifts) if shifts else None
    buf = _io.StringIO()
    write_rle_csv(ts, buf)
    artifacts["timeset.csv"] = buf.getvalue()
    artifacts["density.json"] = dumps({"lower": est.lower, "upper": est.upper,
                                       "checkpoints": list(est.checkpoints), "values": list(est.values)})
    return result, policy


def run_chaos(cfg, artifacts, workers):
    p = cfg.params
    horizon = p.get("horizon", 10**5)
    zero_tol = p.get("zero_tol", chaos.DEFAULT_ZERO_TOL)
    pos_tol = p.get("pos_tol")
    result = {}
    if p.get("y") == "random":
        if "seed" not in p:
            raise ConfigError("random pairs need a seed", None, "seed")
        if cfg.system.is_symbolic:
            raise ConfigError("random pairs are only drawn for numeric systems", None, "y")
        rng = np.random.default_rng(p["seed"])
        n = p.get("n_samples", 1000)
        lo = np.array([b[0] for b in cfg.system.bounds])
        hi = np.array([b[1] for b in cfg.system.bounds])
        xs = rng.uniform(lo, hi, size=(n, cfg.system.dimension))
        ys = rng.uniform(lo, hi, size=(n, cfg.system.dimension))
        diags = chaos.pair_diagnostics_batch(cfg.system, xs, ys, horizon)
        result["n_pairs"] = n
        result["li_yorke_count"] = sum(chaos.is_li_yorke(d, zero_tol, pos_tol) for d in diags)
        return result, PAIR_POLICY
    if "y" in p:
        y = parse_state(cfg.system, p["y"])
        d = chaos.pair_diagnostics(cfg.system, cfg.x0, y, horizon)
        result.update(d.as_dict())
        result["li_yorke"] = chaos.is_li_yorke(d, zero_tol, pos_tol)
        result["chaotic"] = chaos.chaotic_diagnostics(d, zero_tol, pos_tol)
    if "candidates" in p:
        cands = _states(cfg, p["candidates"])
        r = chaos.find_li_yorke_partner(cfg.system, cfg.x0, cands, horizon, zero_tol, pos_tol, workers=workers)
        result["partner"] = {
            "found": r.found,
            "index": r.index,
            "diagnostics": r.diagnostics.as_dict() if r.diagnostics else None,
        }
        if "resolution" in p and r.diagnostics is not None:
            part = _partition(cfg)
            est = mca.estimate_mca(_orbit(cfg, horizon), part, p.get("delta_pos"))
            diam = chaos.diameter(est)
            bound = 0.5 * diam - part.cell_width
            result["estimate_cells"] = est.cells.tolist()
            result["diameter"] = diam
            result["half_diameter_bound"] = bound
            result["bound_ok"] = r.diagnostics.limsup_point >= bound
    if not result:
        raise ConfigError("chaos-scan needs y or candidates", None, "y")
    return result, PAIR_POLICY


def run_qwap(cfg, artifacts, workers):
    p = cfg.params
    orbit = _orbit(cfg)
    part = _partition(cfg) if "resolution" in p or "epsilon" not in p else None
    eps = p.get("epsilon", 2 * part.cell_width if part else None)
    q = recurrence.qwap_test(orbit, eps, p.get("N_max", 1000))
    ps = bool(recurrence.poisson_stable_test(orbit, eps, p.get("n_returns", 3)))
    b = recurrence.birkhoff_recurrent_test(orbit, eps, p.get("gap_bound"))
    chain = (not b.ok or ps) and (not ps or q.ok)
    result = {
        "epsilon": eps,
        "qwap": {"ok": q.ok, "N": q.N, "n": list(q.n), "counts": list(q.counts), "n_returns": len(q.returns)},
        "poisson": ps,
        "birkhoff": {"ok": b.ok, "max_gap": b.max_gap},
        "chain_ok": chain,
    }
    if part is not None:
        est = mca.estimate_mca(orbit, part, p.get("delta_pos"))
        cell = int(part.locate(orbit.states[:1])[0])
        inside = bool(np.isin(cell, est.cells))
        result["crosscheck"] = {"ok": q.ok == inside, "in_estimate": inside, "cell": cell}
    artifacts["qwap.json"] = q.to_json() + "\n"
    return result, mca.MCA_POLICY


def run_multi(cfg, artifacts, workers):
    p = cfg.params
    policy = _policy(p, mca.MCA_POLICY)
    part = _partition(cfg)
    horizon = p.get("horizon", 10**5)
    est = mca.estimate_mca(_orbit(cfg, horizon), part, p.get("delta_pos"), policy)
    times = p.get("times", [1.0, 2.0])
    d = mca.multi_attraction_density(
        cfg.system, cfg.x0, est, times, p.get("epsilon"), horizon, None, policy, p.get("budget", mca.DEFAULT_BUDGET)
    )
    return {"times": times, "lower": d.lower, "upper": d.upper, "n_cells": len(est)}, policy


def run_genericity(cfg, artifacts, workers):
    p = cfg.params
    policy = _policy(p, mca.MCA_POLICY)
    part = _partition(cfg)
    horizon = p.get("horizon", 10**4)
    ref = mca.estimate_mca(_orbit(cfg, horizon), part, p.get("delta_pos"), policy)
    g = mca.genericity_probe(
        cfg.system, ref, None, p.get("n_samples", 100), horizon, None, p["seed"],
        p.get("threshold", 0.95), p.get("delta_pos"), policy, workers,
    )
    return {
        "fraction": g.fraction,
        "n_samples": g.n_samples,
        "escaped": g.escaped,
        "min_score": min(g.scores),
        "reference_cells": len(ref),
    }, policy


def run_sensitivity(cfg, artifacts, workers):
    p = cfg.params
    part = _partition(cfg)
    horizon = p.get("horizon", 10**4)
    if "cells" in p:
        est = mca.CellSet(part, [int(c) for c in p["cells"]])
    else:
        est = mca.estimate_mca(_orbit(cfg, horizon), part, p.get("delta_pos"))
    n_anchor = p.get("n_anchor")
    rep = chaos.sensitivity_scan(
        cfg.system, est, n_anchor, p.get("n_probe", 4), horizon, tuple(p.get("radii", (1e-2, 1e-4, 1e-6))),
        p["seed"], p.get("closure_seeds", "centers"),
    )
    artifacts["witnesses.csv"] = rep.witness_csv()
    artifacts["sensitivity.json"] = rep.summary_json() + "\n"
    return {
        "delta_hat": rep.delta_hat,
        "epsilon_hat": rep.epsilon_hat,
        "n_anchors": len(rep.anchors),
        "all_witnessed": rep.sensitive,
        "none_witnessed": rep.no_sensitivity,
    }, PAIR_POLICY


RUNNERS = {
    "mca": run_mca,
    "density": run_density,
    "chaos-scan": run_chaos,
    "qwap": run_qwap,
    "multi": run_multi,
    "genericity": run_genericity,
    "sensitivity": run_sensitivity,
}


def lookup(result, path):
    """Follow a dotted path (list indices allowed) into ``result``."""
    cur = result
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            return None
    if isinstance(cur, bool):
        return 1.0 if cur else 0.0
    return cur


def run(cfg: ExperimentConfig, workers=1):
    """Run ``cfg``; returns ``(report dict, artifacts dict)``.

    Artifacts map a suffix such as ``cells.csv`` to file contents.
    """
    artifacts = {}
    result, policy = RUNNERS[cfg.kind](cfg, artifacts, max(1, int(workers)))
    checks = []
    for pred in cfg.acceptance:
        actual = lookup(result, pred.path)
        checks.append({"path": pred.path, "predicate": pred.text, "actual": actual, "pass": pred.check(actual)})
    s = cfg.system
    system = None
    if s is not None:
        system = {"family": s.family, "kind": s.kind, "metric": s.metric, "delta": s.delta, "params": dict(s.params)}
    report = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "config_hash": cfg.config_hash,
        "name": cfg.name,
        "kind": cfg.kind,
        "system": system,
        "x0": describe_state(cfg.x0) if cfg.x0 is not None else None,
        "parameters": {k: v for k, v in cfg.params.items() if k != "threads"},
        "checkpoint_policy": policy.as_dict(),
        "result": result,
        "acceptance": checks,
        "passed": all(c["pass"] for c in checks),
    }
    return report, artifacts

