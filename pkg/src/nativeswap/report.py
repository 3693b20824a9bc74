"""
Deterministic report files: CSV rows, JSON with config echo, PNG figures.

A report is written as <stem>.csv, <stem>.json and <stem>_<figure>.png in
one directory. Figures are rendered with the Agg backend and no timestamp
metadata so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import __version__  # noqa: E402


class ReportError(RuntimeError):
    pass


@dataclass
class Report:
    kind: str  # selects the figures: speedups, irb, bench, ledger
    rows: list[dict]
    config: dict = field(default_factory=dict)
    seed: int = 0
    extra: dict = field(default_factory=dict)  # nested data kept out of the CSV


def _columns(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=_columns(rows), lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def report_json(report: Report) -> str:
    doc = {
        "kind": report.kind,
        "toolkit_version": __version__,
        "seed": report.seed,
        "config": report.config,
        "rows": report.rows,
        **report.extra,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fig_speedups(report: Report):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    vals = [r["optimized_speedup"] for r in report.rows]
    ax.hist(vals, bins=max(5, len(vals)), color="tab:blue", edgecolor="black")
    mean = sum(vals) / len(vals)
    ax.axvline(mean, linestyle="--", color="black", label=f"mean {mean:.3f}")
    ax.set_xlabel("Optimized / Standard speedup")
    ax.set_ylabel("edges")
    ax.legend(frameon=False)
    return {"speedup_hist": fig}


def _fig_irb(report: Report):
    figs = {}
    for key, res in sorted(report.extra.get("irb", {}).items()):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ms = [t["m"] for t in res["table"]]
        ax.plot(ms, [t["survival_rb"] for t in res["table"]], "o", color="tab:gray", label="reference")
        ax.plot(ms, [t["survival_int"] for t in res["table"]], "s", color="tab:red", label="interleaved")
        for name, color in (("alpha_rb", "tab:gray"), ("alpha_int", "tab:red")):
            f = res[name]
            grid = [ms[0] + (ms[-1] - ms[0]) * i / 100 for i in range(101)]
            ax.plot(grid, [f["A"] * f["alpha"] ** m + f["B"] for m in grid], "-", color=color, lw=1)
        ax.set_xlabel("Clifford sequence length m")
        ax.set_ylabel("P(00)")
        ax.set_title(f"{key}: error {res['gate_error']:.4f}")
        ax.legend(frameon=False)
        figs[f"decay_{key}"] = fig
    return figs


def _fig_bench(report: Report):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    by_strategy: dict[str, list[tuple[int, float]]] = {}
    for r in report.rows:
        by_strategy.setdefault(r["strategy"], []).append((r["n"], r["success"]))
    for s, pts in sorted(by_strategy.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=s)
    ax.set_xlabel("qubits n")
    ax.set_ylabel("success probability")
    ax.legend(frameon=False)
    return {"success": fig}


def _fig_ledger(report: Report):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    edges = sorted({(r["control"], r["target"]) for r in report.rows})
    stages = list(dict.fromkeys(r["stage"] for r in report.rows))
    width = 0.8 / max(len(edges), 1)
    for i, e in enumerate(edges):
        vals = [next(r["duration_dt"] for r in report.rows if (r["control"], r["target"]) == e and r["stage"] == s)
                for s in stages]
        ax.bar([j + i * width for j in range(len(stages))], vals, width, label=f"{e[0]}->{e[1]}")
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(stages))])
    ax.set_xticklabels(stages, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("duration (dt)")
    ax.legend(frameon=False, fontsize=6)
    return {"durations": fig}


_FIGURES = {"speedups": _fig_speedups, "irb": _fig_irb, "bench": _fig_bench, "ledger": _fig_ledger}


def emit_report(report: Report, out_dir, stem: str, figures: bool = True) -> list[Path]:
    """Write the report files and return their paths (CSV, JSON, then PNGs)."""
    if not report.rows:
        raise ReportError("nothing to report: results are empty")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [out_dir / f"{stem}.csv", out_dir / f"{stem}.json"]
        paths[0].write_text(rows_to_csv(report.rows), encoding="utf-8")
        paths[1].write_text(report_json(report), encoding="utf-8")
        if figures and report.kind in _FIGURES:
            for name, fig in _FIGURES[report.kind](report).items():
                p = out_dir / f"{stem}_{name}.png"
                fig.tight_layout()
                fig.savefig(p, dpi=120, metadata={"Software": None})
                plt.close(fig)
                paths.append(p)
    except OSError as exc:
        raise ReportError(f"cannot write report to {out_dir}: {exc}") from None
    return paths
