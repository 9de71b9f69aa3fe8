"""Chart rendering. Every plotted number is copied from the exported files;
nothing is recomputed here."""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .runs import PlotError, load_strategies, load_summaries, sweep_dirs  # noqa: E402

KINDS = ("delay-vs-load", "ccdf", "strategy-convergence")


@dataclass
class PlotSpec:
    in_dir: Path
    kind: str
    out: Path
    policies: list = field(default_factory=list)  # empty: every policy in the run
    flow: int = 0  # strategy-convergence only

    def validate(self):
        if self.kind not in KINDS:
            raise PlotError(f"{self.in_dir}: unknown chart kind {self.kind!r}")


def table_path(out):
    return Path(out).with_suffix(".csv")


def _pick(path, by_policy, wanted):
    names = wanted or sorted(by_policy)
    missing = [p for p in names if p not in by_policy]
    if missing:
        raise PlotError(f"{path}: no rows for policy {', '.join(missing)}")
    return names


def _delay_vs_load(spec, ax):
    series = {}
    for d in sweep_dirs(spec.in_dir):
        path, rows = load_summaries(d)
        for pol in _pick(path, rows, spec.policies):
            r = rows[pol]
            series.setdefault(pol, []).append((r["arrival_gbps"], r["mean_one_hop_delay_ms"]))
    table = []
    for pol, pts in series.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=pol)
        table += [(pol, x, y) for x, y in pts]
    ax.set_xlabel("mean arrival rate (Gbps)")
    ax.set_ylabel("average one-hop delay (ms)")
    return ["policy", "arrival_gbps", "mean_one_hop_delay_ms"], table


def _ccdf(spec, ax):
    dirs = sweep_dirs(spec.in_dir)
    if len(dirs) != 1:
        raise PlotError(f"{spec.in_dir}: ccdf needs a single run directory, found a sweep")
    path, rows = load_summaries(dirs[0])
    table = []
    for pol in _pick(path, rows, spec.policies):
        r = rows[pol]
        xs, ys = r["ccdf_thresholds_ms"], r["ccdf"]
        if not xs or len(xs) != len(ys):
            raise PlotError(f"{path}: empty or ragged ccdf for policy {pol}")
        # zero tail mass has no place on a log axis; it stays in the table
        shown = [(x, y) for x, y in zip(xs, ys) if y > 0]
        ax.plot([p[0] for p in shown], [p[1] for p in shown], marker=".", label=pol)
        table += [(pol, x, y) for x, y in zip(xs, ys)]
    ax.set_yscale("log")
    ax.set_xlabel("one-hop latency threshold (ms)")
    ax.set_ylabel("P(delay > threshold)")
    return ["policy", "threshold_ms", "ccdf"], table


def _strategy_convergence(spec, ax):
    dirs = sweep_dirs(spec.in_dir)
    if len(dirs) != 1:
        raise PlotError(f"{spec.in_dir}: strategy-convergence needs a single run directory")
    path, rows = load_strategies(dirs[0])
    rows = [r for r in rows if r[3] == spec.flow]
    if not rows:
        raise PlotError(f"{path}: no strategy rows for flow {spec.flow}")
    by_policy = {}
    for r in rows:
        by_policy.setdefault(r[2], []).append(r)
    table = []
    for pol in _pick(path, by_policy, spec.policies):
        lines = {}
        for slot, seed, _, _, p, prob in by_policy[pol]:
            lines.setdefault((seed, p), []).append((slot, prob))
        for (seed, p), pts in sorted(lines.items()):
            ax.plot([s for s, _ in pts], [v for _, v in pts], label=f"{pol} seed {seed} path {p}")
            table += [(pol, seed, p, s, v) for s, v in pts]
    ax.set_xlabel("slot")
    ax.set_ylabel("path probability")
    return ["policy", "seed", "path", "slot", "probability"], table


_RENDER = {"delay-vs-load": _delay_vs_load, "ccdf": _ccdf, "strategy-convergence": _strategy_convergence}


def render(spec):
    """Write the chart to spec.out and the plotted points next to it as CSV.
    Returns the table rows."""
    spec.validate()
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    try:
        header, table = _RENDER[spec.kind](spec, ax)
        if not table:
            raise PlotError(f"{spec.in_dir}: nothing to plot")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize="small")
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    with table_path(out).open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        # repr round-trips doubles exactly
        w.writerows([[repr(v) if isinstance(v, float) else v for v in row] for row in table])
    return table
