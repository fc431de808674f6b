"""Mean-SD figure for a frontier run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import IoError  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "ptload",
}


def frontier_figure(report):
    """Two panels: the portfolio cloud on the mean-SD plane with the frontier,
    single-band allocations and the max-mean points marked; and the frontier
    weights as a function of SD."""
    f = report.frontier
    baseline_ids = report.baseline_ids
    cloud = [e for e in f.cloud if e.id not in baseline_ids]
    mbps = 1e-6

    with plt.rc_context(_STYLE):
        fig, (ax, axw) = plt.subplots(1, 2, figsize=(8.0, 3.4), constrained_layout=True)
        if cloud:
            ax.scatter(
                [e.sd * mbps for e in cloud], [e.mean * mbps for e in cloud],
                s=3, c="0.7", linewidths=0, rasterized=True, label="random portfolios",
            )
        ax.plot(
            [e.sd * mbps for e in f.frontier], [e.mean * mbps for e in f.frontier],
            "-", color="k", lw=1.2, label="efficient frontier",
        )
        ax.plot(
            [b.sd * mbps for b in report.baselines], [b.mean * mbps for b in report.baselines],
            "^", color="tab:red", ms=7, ls="none", label="single sub-band",
        )
        ax.plot(
            f.max_mean.sd * mbps, f.max_mean.mean * mbps,
            "o", mfc="none", mec="tab:green", mew=1.5, ms=9, label="max mean (sampled)",
        )
        ax.plot(
            report.refined.sd * mbps, report.refined.mean * mbps,
            "s", color="tab:blue", ms=5, label="max mean (refined)",
        )
        ax.set_xlabel("throughput SD (Mbps)")
        ax.set_ylabel("mean throughput (Mbps)")
        ax.grid(alpha=0.3, ls=":")
        ax.legend(loc="lower right", frameon=False)

        sd = np.array([e.sd * mbps for e in f.frontier])
        w = np.array([e.portfolio.weights for e in f.frontier])
        for i in range(w.shape[1]):
            axw.plot(sd, w[:, i], ".-", ms=3, lw=0.8, label=f"band {i + 1}")
        axw.set_xlabel("throughput SD (Mbps)")
        axw.set_ylabel("frontier power weight")
        axw.set_ylim(-0.02, 1.02)
        axw.grid(alpha=0.3, ls=":")
        axw.legend(frameon=False)
    return fig


def save_frontier_figure(report, path: str | Path) -> None:
    """Render to ``path``; the format follows the suffix (png, svg, pdf)."""
    path = Path(path)
    fig = frontier_figure(report)
    fmt = path.suffix.lstrip(".").lower() or "png"
    metadata = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(fmt)
    try:
        with plt.rc_context(_STYLE):
            fig.savefig(path, dpi=150, metadata=metadata, format=fmt)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from None
    finally:
        plt.close(fig)
