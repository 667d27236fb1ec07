#!/usr/bin/env python3
"""Plot an exponent-sweep CSV on the concentration axis.

    spherecover exponent-sweep --model models/fig1.json --D 0.3 --grid 0.6:0.645:0.0005 --out sweep.csv
    python3 tools/plot_figure.py sweep.csv figure.png
"""
import argparse
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_sweep(path):
    meta, rows = {}, []
    with open(path, newline="") as f:
        lines = f.read().splitlines()
    if lines and lines[0].startswith("#"):
        meta = dict(kv.split("=", 1) for kv in lines[0][1:].split())
        lines = lines[1:]
    for row in csv.DictReader(line for line in lines if line.strip()):
        rows.append(row)
    return meta, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("out")
    args = ap.parse_args()

    meta, rows = read_sweep(args.csv)
    axis = "r" if rows and "r" in rows[0] else "R"
    x = [float(r[axis]) for r in rows]
    y = [float(r["exponent"]) for r in rows]
    finite = [(a, b) for a, b in zip(x, y) if math.isfinite(b)]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([a for a, _ in finite], [b for _, b in finite], lw=1.5, label="exponent")
    top = max((b for _, b in finite), default=1.0) * 1.2 or 1.0
    for key, style in (("r_infinite", ":"), ("r_zero", "--")):
        if key in meta:
            ax.axvline(float(meta[key]), color="gray", ls=style, lw=1, label=key)
    infinite = [a for a, b in zip(x, y) if not math.isfinite(b)]
    if infinite:
        ax.axvspan(min(infinite), max(infinite), color="0.9", label="infinite")
    units = meta.get("units", "nats")
    ax.set_xlabel(f"{axis} ({units})")
    ax.set_ylabel(f"exponent ({units})")
    ax.set_ylim(0, top)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
