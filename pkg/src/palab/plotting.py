"""File-backed figure rendering for sweep reports.

Everything draws to disk (Agg backend); each figure also gets a small
CSV with the plotted numbers so the points survive without matplotlib.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import metrics, theory  # noqa: E402


def _slug(model, m, delta) -> str:
    d = str(delta).replace("-", "m").replace("/", "q")
    return f"{model}_m{m}_d{d}"


def diameter_scaling_figure(ts, means, sds, title, png_path, csv_path=None):
    ts = np.asarray(ts, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    sds = np.asarray(sds, dtype=np.float64)
    order = np.argsort(ts)
    ts, means, sds = ts[order], means[order], sds[order]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(ts, means, yerr=sds, fmt="o-", capsize=3, label="mean diameter")
    if len(ts) >= 4 and np.ptp(means) > 0 and ts.min() >= 3:
        for x, lbl, style in ((np.log(ts), "ln t fit", "--"),
                              (np.log(np.log(ts)), "ln ln t fit", ":")):
            s, b = np.polyfit(x, means, 1)
            ax.plot(ts, s * x + b, style, label=f"{lbl} (slope {s:.2f})")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("diameter")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mean", "sd"])
            for row in zip(ts, means, sds):
                w.writerow([f"{row[0]:g}", repr(float(row[1])), repr(float(row[2]))])


def degree_histogram_figure(graph, png_path, csv_path=None):
    """Empirical N_k(t)/t on log-log axes with the limit pmf overlaid."""
    hist = metrics.degree_histogram(graph)
    t, m = graph.t, graph.params.m
    ks = np.flatnonzero(hist)
    ks = ks[ks >= m]
    emp = hist[ks] / t
    kk = np.arange(m, int(ks.max()) + 1)
    pk = np.array([theory.degree_law_pmf(graph.params, int(k)) for k in kk])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(ks, emp, "o", ms=3, label=f"observed, t={t}")
    ax.loglog(kk, pk, "-", lw=1, label="limit pmf")
    ax.set_xlabel("degree k")
    ax.set_ylabel("fraction of vertices")
    ax.set_title(f"degree law, {graph.params.label()}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "observed", "limit"])
            pmap = dict(zip(kk.tolist(), pk.tolist()))
            for k, e in zip(ks.tolist(), emp.tolist()):
                w.writerow([k, repr(e), repr(pmap.get(k, 0.0))])


def sweep_figures(cfg, rows, outdir) -> list:
    """Render the per-cell figures for a finished sweep; returns paths."""
    outdir = Path(outdir)
    made = []
    curves = {}
    for (model, m, delta, t, _seed, metric, value, _method) in rows:
        if metric == "diameter_mid":
            curves.setdefault((model, m, delta), {}).setdefault(t, []).append(float(value))
    for key in sorted(curves, key=lambda k: (k[0], k[1], str(k[2]))):
        byt = curves[key]
        if len(byt) < 2:
            continue
        ts = sorted(byt)
        means = [float(np.mean(byt[t])) for t in ts]
        sds = [float(np.std(byt[t], ddof=1)) if len(byt[t]) > 1 else 0.0 for t in ts]
        slug = _slug(*key)
        png = outdir / f"diameter_{slug}.png"
        dat = outdir / f"diameter_{slug}.csv"
        diameter_scaling_figure(ts, means, sds,
                                f"model {key[0]}, m={key[1]}, delta={key[2]}",
                                png, dat)
        made.extend([png, dat])
    from .experiments import derive_seed  # local: avoids import-order knots
    from . import growth
    t_big = max(cfg.t_values)
    for params in cfg.cells():
        if params.m * t_big > 2 ** 24:
            continue  # not worth regrowing a huge graph just for a figure
        g = growth.generate(params, t_big, derive_seed(cfg.master_seed, params, t_big, 0))
        slug = _slug(params.variant, params.m, str(params.delta))
        png = outdir / f"degree_{slug}.png"
        dat = outdir / f"degree_{slug}.csv"
        degree_histogram_figure(g, png, dat)
        made.extend([png, dat])
    return made
