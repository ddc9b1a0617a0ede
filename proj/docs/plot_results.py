#!/usr/bin/env python3
"""Plot the CSV artifacts written by the expfun CLI.

Usage:
    python3 docs/plot_results.py RUN_DIR [-o OUT.png]

RUN_DIR is an --out directory from one of the subcommands; whichever of
samples.csv, density.csv, pide_density.csv, pide_cdf.csv, stationary.csv it
contains gets a panel.
"""

import argparse
import json
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load_field(path):
    """s,y,value table -> (times, y, value matrix of shape (len(times), len(y)))."""
    raw = np.genfromtxt(path, delimiter=",", names=True)
    times = np.unique(raw[raw.dtype.names[0]])
    y = np.unique(raw["y"])
    val = raw[raw.dtype.names[2]].reshape(len(times), len(y))
    return times, y, val


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("run_dir", type=pathlib.Path)
    ap.add_argument("-o", "--out", type=pathlib.Path, default=None)
    args = ap.parse_args()
    d = args.run_dir

    panels = []
    if (d / "samples.csv").exists():
        panels.append("samples")
    if (d / "density.csv").exists():
        panels.append("density")
    if (d / "pide_density.csv").exists():
        panels.append("pide_density")
    if (d / "pide_cdf.csv").exists():
        panels.append("pide_cdf")
    if (d / "stationary.csv").exists():
        panels.append("stationary")
    if not panels:
        sys.exit(f"no known CSV artifacts in {d}")

    fig, axes = plt.subplots(1, len(panels), figsize=(5.2 * len(panels), 4.0), squeeze=False)
    axes = axes[0]

    for ax, panel in zip(axes, panels):
        if panel == "samples":
            s = np.genfromtxt(d / "samples.csv", delimiter=",", names=True)["I_t"]
            ax.hist(s, bins=120, density=True, alpha=0.75)
            ax.set_xlabel("$I_t$")
            ax.set_ylabel("frequency density")
            ax.set_title(f"functional samples (n={len(s)})")
        elif panel == "density":
            t = np.genfromtxt(d / "density.csv", delimiter=",", names=True)
            ax.plot(t["y"], t["p"])
            ax.set_xscale("log")
            ax.set_xlabel("y")
            ax.set_ylabel("kernel density")
            ax.set_title("simulation density estimate")
        elif panel == "pide_density":
            times, y, p = load_field(d / "pide_density.csv")
            for i in np.linspace(0, len(times) - 1, 6, dtype=int):
                ax.plot(y, p[i], label=f"s={times[i]:.2f}")
            ax.set_xscale("log")
            ax.set_xlim(y[1], np.minimum(y[-1], 50.0))
            ax.set_xlabel("y")
            ax.set_ylabel("p(s, y)")
            ax.set_title("density evolution")
            ax.legend(fontsize=8)
        elif panel == "pide_cdf":
            times, y, F = load_field(d / "pide_cdf.csv")
            for i in np.linspace(0, len(times) - 1, 6, dtype=int):
                ax.plot(y, F[i], label=f"s={times[i]:.2f}")
            ax.set_xscale("log")
            ax.set_xlabel("y")
            ax.set_ylabel("F(s, y)")
            ax.set_title("cumulative evolution")
            ax.legend(fontsize=8)
        elif panel == "stationary":
            t = np.genfromtxt(d / "stationary.csv", delimiter=",", names=True)
            ax.plot(t["y"], t["p_inf"], label="$p_\\infty$")
            ax.plot(t["y"], t["F_inf"], label="$F_\\infty$", linestyle="--")
            ax.set_xscale("log")
            ax.set_xlim(t["y"][0], min(t["y"][-1], 50.0))
            ax.set_xlabel("y")
            ax.set_title("long-run law")
            ax.legend()

    manifest = d / "manifest.json"
    if manifest.exists():
        meta = json.loads(manifest.read_text())
        fig.suptitle(f"{meta.get('command', '?')}  (config {meta.get('config_hash', '?')})",
                     fontsize=10)

    fig.tight_layout()
    out = args.out or (d / "plot.png")
    fig.savefig(out, dpi=130)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
