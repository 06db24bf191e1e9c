"""Report figures: PNG renderings alongside the delimited output.

Only the report path imports this module.  Each renderer recomputes the
light data it draws (seconds, not minutes), writes a TSV twin next to the
image so the curves stay greppable, and returns the written paths.  The
Agg backend is forced; nothing here opens a window.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from . import oscillator  # noqa: E402
from .assocfn import (  # noqa: E402
    associated,
    omega_of_sequence,
    power,
    sequence_of_omega,
    shifted_log,
    trunc_log,
)
from .config import DEFAULT_CONFIG, RunConfig  # noqa: E402
from .conjugate import conjugate_table  # noqa: E402
from .seqcore import make_gevrey  # noqa: E402
from .specio import tsv_text  # noqa: E402
from .suites import CRITICAL_BAND, GEVREY_GRID, _BAND_TRUNCATION  # noqa: E402

_DPI = 150


def _save(fig, outdir: str, stem: str) -> str:
    path = os.path.join(outdir, f"{stem}.png")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _write_tsv(outdir: str, stem: str, rows, header: tuple) -> str:
    path = os.path.join(outdir, f"{stem}.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tsv_text(rows, header=header))
    return path


def render_roundtrip_errors(outdir: str, *,
                            config: RunConfig = DEFAULT_CONFIG) -> list:
    """Entry-wise recovery error per index for the factorial-power family."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    rows = []
    p = np.arange(1, 513)
    for s in GEVREY_GRID:
        M = make_gevrey(s, max(4096, config.truncation))
        R = sequence_of_omega(associated(M), 600, config=config)
        err = np.abs(R.logm[1:513] - M.logm[1:513])
        ax.semilogy(p, np.maximum(err, 1e-17), label=f"s = {s:g}")
        rows.append(err)
    ax.axhline(config.roundtrip_tol, color="k", linestyle="--", linewidth=1,
               label="tolerance")
    ax.set_xlabel("index p")
    ax.set_ylabel("|recovered - original| (log values)")
    ax.set_title("Sequence recovery through the associated function")
    ax.legend()
    tsv = _write_tsv(outdir, "roundtrip_errors",
                     zip(p, *rows),
                     header=("p",) + tuple(f"err_s{s:g}" for s in GEVREY_GRID))
    return [_save(fig, outdir, "roundtrip_errors"), tsv]


def render_critical_band(outdir: str, *,
                         config: RunConfig = DEFAULT_CONFIG) -> list:
    """Ratio of the root-factorial weight to t^2 with the frozen band."""
    G = make_gevrey(0.5, _BAND_TRUNCATION)
    t = config.t_grid(10.0, 1e3)
    r = omega_of_sequence(G, t) / np.square(t)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogx(t, r, color="tab:blue")
    for edge in CRITICAL_BAND:
        ax.axhline(edge, color="k", linestyle="--", linewidth=1)
    ax.set_ylim(CRITICAL_BAND[0] - 0.01, CRITICAL_BAND[1] + 0.01)
    ax.set_xlabel("t")
    ax.set_ylabel("weight(t) / t^2")
    ax.set_title("Critical ratio band of the root-factorial weight")
    tsv = _write_tsv(outdir, "critical_band", zip(t, r),
                     header=("t", "ratio"))
    return [_save(fig, outdir, "critical_band"), tsv]


def render_anchor_ladder(outdir: str, *,
                         config: RunConfig = DEFAULT_CONFIG) -> list:
    """Planned vs achieved log gaps at the oscillator anchors."""
    G = make_gevrey(0.5, config.truncation)
    pl = oscillator.plan(G, 3, 8, config=config)
    res = oscillator.build(pl, G, config=config)
    js, planned, achieved = [], [], []
    for row in res.trace:
        j = row["j"]
        js.append(j)
        achieved.append(row["log_mu"] - row["log_nu"])
        if j == 1:
            planned.append(math.log(4.0) - 0.5 * row["log_nu"])
        elif j == 2:
            planned.append(-math.log(4.0))
        elif j % 2 == 1:
            planned.append(j * math.log(2.0))
        else:
            planned.append(-math.log(j))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.axhline(0.0, color="0.7", linewidth=1)
    ax.plot(js, planned, "o", markersize=10, fillstyle="none",
            color="tab:blue", label="planned")
    ax.plot(js, achieved, "x", markersize=8, color="tab:red",
            label="achieved")
    ax.set_xlabel("anchor stage j")
    ax.set_ylabel("log mu - log nu at the anchor")
    ax.set_title("Anchor gap ladder against the root-factorial target")
    ax.legend()
    tsv = _write_tsv(outdir, "anchor_ladder",
                     zip(js, [row["k"] for row in res.trace], planned,
                         achieved),
                     header=("j", "k", "planned_gap", "achieved_gap"))
    return [_save(fig, outdir, "anchor_ladder"), tsv]


def render_conjugate_curves(outdir: str, *,
                            config: RunConfig = DEFAULT_CONFIG) -> list:
    """Conjugate tables for the stock weights; finite parts only."""
    weights = (power(2), power(1.5), shifted_log(), trunc_log())
    fig, ax = plt.subplots(figsize=(7, 4.5))
    tables = [(w, conjugate_table(w, config=config)) for w in weights]
    s_grid = tables[0][1].s_grid
    cols = []
    for w, table in tables:
        fin = np.isfinite(table.values)
        ax.plot(table.s_grid[fin], table.values[fin], label=w.spec or w.name)
        if not fin.all():
            edge = table.finite_threshold
            ax.axvline(edge, color="0.8", linestyle=":", linewidth=1)
        cols.append(table.values)
    ax.set_xscale("log")
    ax.set_yscale("symlog")
    ax.set_xlabel("coefficient s")
    ax.set_ylabel("conjugate value")
    ax.set_title("Young conjugates (curves stop at their finiteness edge)")
    ax.legend()
    tsv = _write_tsv(outdir, "conjugate_curves", zip(s_grid, *cols),
                     header=("s",) + tuple(w.spec or w.name for w in weights))
    return [_save(fig, outdir, "conjugate_curves"), tsv]


def render_suite_grid(doc: dict, outdir: str) -> list:
    """Pass/fail matrix of one suite document."""
    entries = doc["entries"]
    ids = [e["id"] for e in entries]
    grades = [e["grade"] for e in entries]
    colors = {"pass": "#2e7d32", "fail": "#c62828", "open": "#f9a825"}
    fig, ax = plt.subplots(figsize=(6, 0.42 * len(ids) + 1.2))
    for i, (eid, grade) in enumerate(zip(ids, grades)):
        y = len(ids) - 1 - i
        ax.barh(y, 1.0, color=colors[grade], edgecolor="white")
        ax.text(0.02, y, eid, va="center", ha="left", color="white",
                fontsize=9)
        ax.text(0.98, y, grade, va="center", ha="right", color="white",
                fontsize=9)
    ax.set_xlim(0, 1)
    ax.set_ylim(-0.6, len(ids) - 0.4)
    ax.set_xticks([])
    ax.set_yticks([])
    summary = doc["summary"]
    ax.set_title(f"suite {doc['suite']}: {summary['pass']}/{summary['total']} "
                 "pass")
    return [_save(fig, outdir, "suite_grid")]


def render_report(doc: dict, outdir: str, *,
                  config: RunConfig = DEFAULT_CONFIG) -> list:
    """All report figures for one suite document; returns written paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    paths += render_suite_grid(doc, outdir)
    paths += render_roundtrip_errors(outdir, config=config)
    paths += render_critical_band(outdir, config=config)
    paths += render_anchor_ladder(outdir, config=config)
    paths += render_conjugate_curves(outdir, config=config)
    return paths
