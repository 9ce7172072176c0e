"""Plot FER/BER curves from a `polarpunct simulate` or `compare` CSV.

    python python/plot_curves.py curves.csv -o curves.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="curves.png")
    ap.add_argument("--xlabel", default="Eb/N0 (dB)")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    if "scheme" not in df:
        df["scheme"] = "run"
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for scheme, part in df.groupby("scheme", sort=False):
        for ax, col in zip(axes, ("FER", "BER")):
            ax.semilogy(part["sweep_param"], part[col], marker="o", label=scheme.upper())
    for ax, col in zip(axes, ("FER", "BER")):
        ax.set_xlabel(args.xlabel)
        ax.set_ylabel(col)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
