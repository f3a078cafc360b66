"""Optional SVG plot emission for sweeps and reports. matplotlib is
imported lazily so headless metric runs never touch it."""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path):
    # Date metadata stripped so repeated runs emit identical files.
    fig.savefig(path, format="svg", metadata={"Date": None})


def histogram(samples, path, xlabel: str, bins: int = 80, label: str = "",
              value_range=None) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(samples, bins=bins, range=value_range, color="tab:blue", alpha=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("samples")
    if label:
        ax.set_title(label)
    _save(fig, path)
    plt.close(fig)


def cos_theta_histogram(samples, path, bins: int = 80, label: str = "") -> None:
    """Distribution of input/weight-direction alignment over a corpus."""
    histogram(samples, path, "cos theta", bins=bins, label=label,
              value_range=(-1.0, 1.0))


def ballast_direction_plot(phi, cd_pos, cd_neg, path) -> None:
    """Ballast size against weight direction for a two-input neuron."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(phi, cd_pos, label="ballast pos (fF)", color="tab:red")
    ax.plot(phi, cd_neg, label="ballast neg (fF)", color="tab:green")
    ax.set_xlabel("weight direction phi (deg)")
    ax.set_ylabel("ballast capacitance (fF)")
    ax.legend()
    _save(fig, path)
    plt.close(fig)
