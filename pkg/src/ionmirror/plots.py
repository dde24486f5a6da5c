"""Static SVG plots for scenario outputs (presentation only)."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def plot_record(record, title: str = "") -> str:
    fig, (ax_pop, ax_n) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    for name, series in record.observables.items():
        if name.startswith("population"):
            ax_pop.plot(record.times, series, label=name)
        elif name.startswith("mean_n"):
            ax_n.plot(record.times, series, label=name)
    ax_pop.set_ylabel("population")
    ax_pop.legend(fontsize="small")
    ax_n.set_ylabel("<n>")
    ax_n.set_xlabel("time (us)")
    ax_n.legend(fontsize="small")
    ax_pop.set_title(title)
    fig.tight_layout()
    return _svg(fig)


def plot_bars(values: dict[str, float], title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(max(4, 0.3 * len(values)), 3.5))
    ax.bar(range(len(values)), list(values.values()))
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(list(values), rotation=90, fontsize="x-small")
    ax.set_ylabel("fidelity")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    fig.tight_layout()
    return _svg(fig)
