"""Report files: delimited tables plus rendered matplotlib figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import MetricsReport, render_full_report, render_report  # noqa: E402

METRIC_COLUMNS = ("ema", "sma", "precision", "recall", "f1")


def write_metrics_report(rows: list[tuple[str, MetricsReport]],
                         out_dir: str | Path) -> dict[str, Path]:
    """Write report.tsv, report.md and report.png for labeled metric rows."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tsv = out / "report.tsv"
    with tsv.open("w", encoding="utf-8") as fh:
        fh.write("label\t" + "\t".join(METRIC_COLUMNS) +
                 "\ttrue_positives\tpredicted\tgold\tn_instances\n")
        for label, rep in rows:
            cells = [f"{getattr(rep, c):.6f}" for c in METRIC_COLUMNS]
            cells += [str(rep.true_positives), str(rep.predicted),
                      str(rep.gold), str(rep.n_instances)]
            fh.write(label + "\t" + "\t".join(cells) + "\n")

    md = out / "report.md"
    with md.open("w", encoding="utf-8") as fh:
        if len(rows) == 1:
            fh.write(render_full_report(rows[0][1], rows[0][0]))
        else:
            fh.write(render_report(list(rows)))

    png = out / "report.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(rows), 1)
    xs = range(len(METRIC_COLUMNS))
    for i, (label, rep) in enumerate(rows):
        values = [getattr(rep, c) for c in METRIC_COLUMNS]
        ax.bar([x + i * width for x in xs], values, width=width, label=label)
    ax.set_xticks([x + width * (len(rows) - 1) / 2 for x in xs])
    ax.set_xticklabels([c.upper() for c in METRIC_COLUMNS])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("punchline detection")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return {"tsv": tsv, "md": md, "png": png}


def write_scores_report(summary: dict[str, tuple[float, int]],
                        out_dir: str | Path) -> dict[str, Path]:
    """Write scores.tsv, scores.md and scores.png for per-approach means."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tsv = out / "scores.tsv"
    with tsv.open("w", encoding="utf-8") as fh:
        fh.write("approach\tmean\tcount\n")
        for approach, (mean, count) in summary.items():
            fh.write(f"{approach}\t{mean:.6f}\t{count}\n")

    md = out / "scores.md"
    rows = [(approach, mean) for approach, (mean, _n) in summary.items()]
    with md.open("w", encoding="utf-8") as fh:
        fh.write(render_report(rows))

    png = out / "scores.png"
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = list(summary)
    means = [summary[a][0] for a in labels]
    ax.bar(labels, means)
    ax.set_ylim(0, 100)
    ax.set_ylabel("mean human score")
    ax.set_title("humor understanding by approach")
    for i, mean in enumerate(means):
        ax.text(i, mean + 1, f"{mean:.1f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return {"tsv": tsv, "md": md, "png": png}
