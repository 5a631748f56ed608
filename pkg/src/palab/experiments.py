"""Config-driven experiment sweeps, scaling fits, and verification suites.

A sweep config (INI) fixes a grid of (model, m, delta) cells, a
geometric t grid, and seeds per cell.  ``run`` grows every replicate,
measures the requested metrics, and emits:

* ``replicates.csv`` with the fixed schema model,m,delta,t,seed,metric,value,method
* ``summary.json`` with per-cell aggregates and the config hash
* per-figure data CSVs plus rendered PNGs

Replicate seeds derive from (master_seed, cell, replicate) by hashing,
so reruns of the same config are byte-identical.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import enumeration, growth, metrics, structure, theory
from .graph import PAGraph
from .params import PAParams, as_fraction, make_params
from .sampler import AttachmentSampler

CSV_FIELDS = ("model", "m", "delta", "t", "seed", "metric", "value", "method")
VERIFY_SUITES = ("negcorr", "connection", "degree-law", "fk", "polya",
                 "multinomial", "layers", "sampler")


# -- configuration -------------------------------------------------------------


@dataclass
class ExperimentConfig:
    models: list
    m_values: list
    deltas: list                    # Fractions
    t_values: list
    seeds: int
    master_seed: int
    diameter_method: str
    typical_pairs: int
    sigma: float
    layer_D: float
    depth: int
    structure_enabled: bool
    outdir: Path
    raw_text: str

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.raw_text.encode()).hexdigest()[:16]

    def cells(self):
        for model in self.models:
            for m in self.m_values:
                for delta in self.deltas:
                    if delta <= -m:
                        continue  # outside the parameter domain
                    yield make_params(model, m, delta)


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_string(text)
    if "grid" not in cp:
        raise ValueError("config needs a [grid] section")
    grid = cp["grid"]
    models = grid.get("models", "b").split()
    m_values = [int(x) for x in grid.get("m", "1").split()]
    deltas = [as_fraction(x) for x in grid.get("delta", "0").split()]
    t_values = [int(x) for x in grid.get("t", "").split()]
    if not t_values:
        raise ValueError("empty t grid")
    if any(t <= 0 for t in t_values):
        raise ValueError("t values must be positive")
    seeds = grid.getint("seeds", 3)
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    master_seed = grid.getint("master_seed", 0)
    met = cp["metrics"] if "metrics" in cp else {}
    out = cp["output"] if "output" in cp else {}
    cfg = ExperimentConfig(
        models=models,
        m_values=m_values,
        deltas=deltas,
        t_values=sorted(t_values),
        seeds=seeds,
        master_seed=master_seed,
        diameter_method=met.get("diameter", "auto"),
        typical_pairs=int(met.get("typical_pairs", "500")),
        sigma=float(met.get("sigma", "2.5")),
        layer_D=float(met.get("layer_d", "1.0")),
        depth=int(met.get("depth", "1")),
        structure_enabled=str(met.get("structure", "false")).lower() in ("1", "true", "yes"),
        outdir=Path(out.get("dir", "palab_out")),
        raw_text=text,
    )
    for model in cfg.models:
        make_params(model, cfg.m_values[0], cfg.deltas[0])  # validates names early
    return cfg


def derive_seed(master_seed: int, params: PAParams, t: int, rep: int) -> int:
    """Deterministic 63-bit replicate seed from the cell coordinates."""
    key = f"{master_seed}|{params.variant}|{params.m}|{params.delta}|{t}|{rep}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big") >> 1


# -- sweep runner --------------------------------------------------------------


def _replicate_rows(cfg: ExperimentConfig, params: PAParams, t: int, seed: int):
    g = growth.generate(params, t, seed)
    base = (params.variant, params.m, str(params.delta), t, seed)
    rows = [base + ("max_degree", int(g.degrees.max()), "event-log")]
    d = metrics.diameter(g, method=cfg.diameter_method)
    rows.append(base + ("diameter_lower", d.lower, d.method))
    rows.append(base + ("diameter_upper", d.upper, d.method))
    rows.append(base + ("diameter_mid", (d.lower + d.upper) / 2.0, d.method))
    if d.exact:
        rows.append(base + ("diameter", d.value, d.method))
    if cfg.typical_pairs > 0:
        tr = metrics.typical_distance(g, cfg.typical_pairs, seed ^ 0x5EED)
        rows.append(base + ("typical_mean", tr.mean, "bfs-pairs"))
        rows.append(base + ("typical_median", tr.median, "bfs-pairs"))
        rows.append(base + ("typical_max", tr.max, "bfs-pairs"))
    if params.variant == "a":
        count, _ = metrics.components(g)
        rows.append(base + ("components", count, "bfs"))
    rows.append(base + ("core_size", structure.core(g, cfg.sigma).size,
                        f"sigma={cfg.sigma:g}"))
    if params.tau < 3:
        u1v = theory.u1(params, t)
        rows.append(base + ("n_geq_u1", metrics.n_geq(g, u1v), "threshold"))
    if cfg.structure_enabled and params.m >= 2 and t % 2 == 0:
        z = structure.count_proper_trees(g, cfg.depth)
        rows.append(base + ("proper_trees", z, f"k={cfg.depth}"))
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run(cfg: ExperimentConfig) -> Path:
    """Execute the sweep; returns the artifact directory."""
    outdir = cfg.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    failures = []
    for params in cfg.cells():
        for t in cfg.t_values:
            for rep in range(cfg.seeds):
                seed = derive_seed(cfg.master_seed, params, t, rep)
                try:
                    rows.extend(_replicate_rows(cfg, params, t, seed))
                except Exception as exc:  # record and keep sweeping
                    failures.append({"model": params.variant, "m": params.m,
                                     "delta": str(params.delta), "t": t,
                                     "seed": seed, "error": f"{type(exc).__name__}: {exc}"})
    with open(outdir / "replicates.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    summary = _summarize(cfg, rows, failures)
    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    (outdir / "config_echo.ini").write_text(cfg.raw_text)
    from . import plotting  # matplotlib import deferred until needed
    plotting.sweep_figures(cfg, rows, outdir)
    return outdir


def _summarize(cfg: ExperimentConfig, rows, failures) -> dict:
    from . import __version__
    cells = {}
    for (model, m, delta, t, seed, metric, value, method) in rows:
        key = (model, m, delta, t)
        cells.setdefault(key, {}).setdefault(metric, []).append(float(value))
    cell_list = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], str(k[2]), k[3])):
        model, m, delta, t = key
        mstats = {}
        for metric in sorted(cells[key]):
            vals = np.array(cells[key][metric])
            mstats[metric] = {"mean": float(vals.mean()),
                              "sd": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                              "n": int(vals.size)}
        cell_list.append({"model": model, "m": m, "delta": delta, "t": t,
                          "metrics": mstats})
    return {"config_hash": cfg.config_hash, "version": __version__,
            "master_seed": cfg.master_seed, "cells": cell_list,
            "failures": failures}


# -- scaling fits --------------------------------------------------------------


@dataclass
class ScalingFit:
    regressor: str            # "log" or "loglog"
    metric: str
    slope: float
    intercept: float
    r2: float
    r2_competing: float
    t_values: np.ndarray
    means: np.ndarray
    sds: np.ndarray
    ns: np.ndarray


def _regress(x: np.ndarray, y: np.ndarray):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0:
        return float(slope), float(intercept), 1.0
    return float(slope), float(intercept), 1.0 - float((resid ** 2).sum()) / ss_tot


def read_metric(csv_path, metric: str, model=None, m=None, delta=None):
    """(t, seed, value) triples for one metric, with optional cell filters."""
    out = []
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["metric"] != metric:
                continue
            if model is not None and row["model"] != model:
                continue
            if m is not None and int(row["m"]) != m:
                continue
            if delta is not None and as_fraction(row["delta"]) != as_fraction(delta):
                continue
            out.append((int(row["t"]), int(row["seed"]), float(row["value"])))
    return out


def fit_scaling(csv_path, regressor: str, metric: str = "diameter_mid",
                model=None, m=None, delta=None) -> ScalingFit:
    """Least squares of per-t mean metric against ln t or ln ln t.

    regressor is "log" or "loglog"; the competing regressor's R^2 is
    reported alongside for model comparison.
    """
    if regressor not in ("log", "loglog"):
        raise ValueError("regressor must be 'log' or 'loglog'")
    triples = read_metric(csv_path, metric, model=model, m=m, delta=delta)
    byt = {}
    for t, _seed, v in triples:
        byt.setdefault(t, []).append(v)
    if len(byt) < 4:
        raise ValueError(f"need >= 4 distinct t values, found {len(byt)}")
    ts = np.array(sorted(byt))
    means = np.array([np.mean(byt[t]) for t in ts])
    sds = np.array([np.std(byt[t], ddof=1) if len(byt[t]) > 1 else 0.0 for t in ts])
    ns = np.array([len(byt[t]) for t in ts])
    if ts[0] < 3:
        raise ValueError("t < 3 breaks the loglog regressor")
    xs = {"log": np.log(ts), "loglog": np.log(np.log(ts))}
    for x in xs.values():
        if np.ptp(x) <= 0:
            raise ValueError("degenerate x-range")
    slope, intercept, r2 = _regress(xs[regressor], means)
    other = "loglog" if regressor == "log" else "log"
    _, _, r2_other = _regress(xs[other], means)
    return ScalingFit(regressor=regressor, metric=metric, slope=slope,
                      intercept=intercept, r2=r2, r2_competing=r2_other,
                      t_values=ts, means=means, sds=sds, ns=ns)


# -- oracle cross-checks -------------------------------------------------------


def marginal_tv(params: PAParams, T: int, n_runs: int, seed: int,
                use_kernel: bool = False) -> dict:
    """Max per-slot total-variation gap: empirical process vs enumeration.

    Runs the real generator n_runs times and tallies the drawn target of
    every random log slot; compares each slot's frequencies against the
    exact marginal.  use_kernel skips the per-run graph packaging (same
    draw stream) when only throughput matters.
    """
    dist = enumeration.enumerate_process(params, T)
    slots = dist.random_slots
    counts = np.zeros((len(slots), T + 2), dtype=np.int64)
    if use_kernel:
        p_, q_ = params.delta_as_ratio()
        rng_master = random.Random(seed)
        for _ in range(n_runs):
            rng = random.Random(rng_master.getrandbits(64))
            if params.variant == "c":
                tg, _ = growth._grow_c(T, params.m, p_, q_, rng)
            elif params.variant == "a":
                tg, _ = growth._grow_a(T, p_, q_, rng)
            else:
                tg, _ = growth._grow_b(T, p_, q_, rng)
            for k, slot in enumerate(slots):
                counts[k, tg[slot]] += 1
    else:
        rng_master = random.Random(seed)
        for _ in range(n_runs):
            g = growth.generate(params, T, rng_master.getrandbits(60))
            tg = g.targets
            for k, slot in enumerate(slots):
                counts[k, tg[slot]] += 1
    worst = 0.0
    worst_slot = None
    per_slot = []
    for k, slot in enumerate(slots):
        exact = dist.marginal(slot)
        support = sorted(set(exact) | set(np.flatnonzero(counts[k]).tolist()))
        tv = 0.5 * sum(abs(counts[k, s] / n_runs - float(exact.get(s, 0)))
                       for s in support)
        per_slot.append(tv)
        if tv > worst:
            worst, worst_slot = tv, slot
    return {"params": params.label(), "T": T, "n_runs": n_runs,
            "max_tv": worst, "worst_slot": worst_slot, "per_slot": per_slot}


def fk_sweep(pairs=((0.4, 0.5), (0.3, 0.6), (0.45, 0.5)), t_max: int = 50,
             k_max: int = 3, s_max: int = 200) -> dict:
    """Path-sum values against the closed-form bound over a full grid.

    Returns the violation count and the worst value/bound ratio.
    """
    violations = 0
    worst = 0.0
    worst_at = None
    cells = 0
    for a, b in pairs:
        c_ab = theory.fk_bound_constant(a, b)
        for k in range(1, k_max + 1):
            for t in range(2, t_max + 1):
                for i in range(1, t):
                    val = theory.fk_bruteforce(a, i, t, k, s_max).total
                    bound = c_ab ** k / (i ** b * t ** (1 - b))
                    cells += 1
                    ratio = val / bound
                    if ratio > worst:
                        worst, worst_at = ratio, (a, b, k, i, t)
                    if val > bound:
                        violations += 1
    return {"cells": cells, "violations": violations,
            "worst_ratio": worst, "worst_at": worst_at}


# -- verification suites -------------------------------------------------------


def _suite_negcorr() -> dict:
    cases = [("b", 1, Fraction(0), 6), ("c", 2, Fraction(-1), 5)]
    details = {}
    ok = True
    for variant, m, delta, T in cases:
        dist = enumeration.enumerate_process(make_params(variant, m, delta), T)
        rep = enumeration.verify_negative_correlation(dist)
        details[f"{variant},m={m},delta={delta},T={T}"] = {
            "families": rep.n_families, "checked": rep.n_checked,
            "violations": rep.n_violations,
            "tightest_ratio_multi": rep.tightest_ratio_multi,
        }
        ok = ok and rep.passed
    return {"passed": ok, "details": details}


def _suite_connection() -> dict:
    params = make_params("b", 1, 0)
    m1s, m2s = [], []
    for T in range(4, 8):
        rep = enumeration.verify_connection_bounds(
            enumeration.enumerate_process(params, T))
        m1s.append(rep.m1)
        m2s.append(rep.m2)
    eps = 1e-12
    mono1 = all(m1s[i + 1] <= m1s[i] + eps for i in range(len(m1s) - 1))
    mono2 = all(m2s[i + 1] <= m2s[i] + eps for i in range(len(m2s) - 1))
    finite = all(math.isfinite(x) for x in m1s + m2s)
    return {"passed": mono1 and mono2 and finite,
            "details": {"T": list(range(4, 8)), "m1": m1s, "m2": m2s,
                        "m1_nonincreasing": mono1, "m2_nonincreasing": mono2}}


def _suite_degree_law(t: int = 10 ** 4, n_seeds: int = 5, seed: int = 1234) -> dict:
    cases = [("b", 1, Fraction(0)), ("c", 2, Fraction(0))]
    ok = True
    details = {}
    for variant, m, delta in cases:
        params = make_params(variant, m, delta)
        acc = np.zeros(m + 12, dtype=np.float64)
        for rep in range(n_seeds):
            g = growth.generate(params, t, derive_seed(seed, params, t, rep))
            h = metrics.degree_histogram(g)
            upto = min(len(h), len(acc))
            acc[:upto] += h[:upto] / t
        acc /= n_seeds
        worst = 0.0
        for k in range(m, m + 11):
            pk = theory.degree_law_pmf(params, k)
            tol = max(0.01, 6.0 * math.sqrt(pk / (n_seeds * t)))
            gap = abs(float(acc[k]) - pk)
            worst = max(worst, gap / tol)
        details[params.label()] = {"worst_gap_over_tol": worst}
        ok = ok and worst <= 1.0
    return {"passed": ok, "details": details}


def _suite_fk() -> dict:
    rep = fk_sweep(t_max=30)  # the acceptance run goes to t_max=50
    return {"passed": rep["violations"] == 0, "details": rep}


def _suite_polya() -> dict:
    cases = [("c", 1, Fraction(0), 5), ("c", 2, Fraction(0), 3),
             ("c", 2, Fraction(1), 3), ("c", 1, Fraction(-1, 2), 6),
             ("c", 2, Fraction(-1), 3)]
    ok = True
    details = {}
    for variant, m, delta, t in cases:
        params = make_params(variant, m, delta)
        dp = theory.polya_urn_exact_pmf(params, t)
        bb = theory.beta_binomial_pmf_all(m * t, m, m * (t - 2))
        gap = max(abs(float(x - y)) for x, y in zip(dp, bb))
        details[params.label() + f",t={t}"] = {"max_abs_diff": gap}
        ok = ok and gap <= 1e-10
    return {"passed": ok, "details": details}


def _suite_multinomial(seed: int = 99) -> dict:
    n_t = 100
    e_t = n_t * (n_t - 1) // 2
    q = 1e-4
    trials = 10 ** 4
    reps = 10 ** 4
    samples = theory.multinomial_edge_count_samples(n_t, q, trials, reps, seed)
    expected = theory.multinomial_expected_edges(n_t, q, trials)
    mean = float(samples.mean())
    sd = float(samples.std(ddof=1))
    var = sd * sd
    mean_ok = abs(mean - expected) <= 4.0 * sd / math.sqrt(reps)
    var_ok = var <= 1.1 * mean
    return {"passed": mean_ok and var_ok,
            "details": {"mean": mean, "expected": expected, "var": var,
                        "mean_ok": mean_ok, "var_ok": var_ok}}


def _suite_layers() -> dict:
    worst = 0.0
    for tau in (2.2, 2.5, 2.8):
        for t in (10 ** 4, 10 ** 6):
            u_rec, u_closed = structure.layer_thresholds(tau, t, 1.0, 25)
            rel = np.max(np.abs(u_rec - u_closed) / u_closed)
            worst = max(worst, float(rel))
    return {"passed": worst <= 1e-10, "details": {"worst_rel_err": worst}}


def _suite_sampler(n_draws: int = 10 ** 6, seed: int = 7) -> dict:
    degrees = (3, 1, 2, 4)
    ok = True
    details = {}
    for delta in (Fraction(0), Fraction(1, 2), Fraction(-1, 2)):
        s = AttachmentSampler(delta, degrees)
        rng = random.Random(seed)
        counts = np.zeros(len(degrees) + 1, dtype=np.int64)
        for _ in range(n_draws):
            counts[s.sample(rng)] += 1
        tw = s.total_weight
        tv = 0.5 * sum(abs(int(counts[i]) / n_draws - float((d + delta) / tw))
                       for i, d in enumerate(degrees, start=1))
        details[f"delta={delta}"] = {"tv": tv}
        ok = ok and tv <= 0.005
    return {"passed": ok, "details": details}


def verify(suite: str) -> dict:
    """Run one named verification suite; returns a JSON-ready report."""
    table = {
        "negcorr": _suite_negcorr,
        "connection": _suite_connection,
        "degree-law": _suite_degree_law,
        "fk": _suite_fk,
        "polya": _suite_polya,
        "multinomial": _suite_multinomial,
        "layers": _suite_layers,
        "sampler": _suite_sampler,
    }
    if suite not in table:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(table)}")
    out = table[suite]()
    out["suite"] = suite
    return out
