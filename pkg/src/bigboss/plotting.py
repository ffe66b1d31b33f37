"""Static SVG figure: normalised rho histogram with the fitted log-normal density."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .stats import Histogram, LogNormalFit, lognormal_pdf


def histogram_svg(h: Histogram, fit: LogNormalFit | None, path: str | Path, title: str = "") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "bigboss", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(h.edges[:-1], h.densities, width=h.widths, align="edge",
               color="#9ecae1", edgecolor="#3182bd", linewidth=0.5, label="sample")
        if fit is not None:
            xs = np.linspace(max(h.edges[0], 1e-9), h.edges[-1], 400)
            ax.plot(xs, lognormal_pdf(xs, fit.mu_hat, fit.sigma_hat), color="#d62728",
                    label=f"log-normal (mu={fit.mu_hat:.4f}, sigma={fit.sigma_hat:.4f})")
        ax.set_xlabel("rho")
        ax.set_ylabel("density")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
