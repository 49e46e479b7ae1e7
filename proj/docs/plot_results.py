#!/usr/bin/env python3
"""Plot cascade outputs: size distributions, master curves, density scans.

Examples:
    python3 docs/plot_results.py hist out/hist/*.csv
    python3 docs/plot_results.py master master.csv
    python3 docs/plot_results.py scan scan.csv
"""

import csv
import sys

import matplotlib.pyplot as plt


def read_csv(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            rows.append(line.strip().split(","))
    header, data = rows[0], rows[1:]
    return header, data


def plot_hist(paths):
    for path in paths:
        header, data = read_csv(path)
        mid = [float(r[2]) for r in data if int(r[3]) > 0]
        den = [float(r[4]) for r in data if int(r[3]) > 0]
        plt.loglog(mid, den, "o-", ms=3, label=path.split("/")[-1])
    plt.xlabel("avalanche size s")
    plt.ylabel("P(s)")


def plot_master(paths):
    for path in paths:
        header, data = read_csv(path)
        by_key = {}
        for r in data:
            by_key.setdefault((r[2], r[3]), ([], []))
            by_key[(r[2], r[3])][0].append(float(r[0]))
            by_key[(r[2], r[3])][1].append(float(r[1]))
        for (nodes, region), (x, y) in sorted(by_key.items()):
            plt.loglog(x, y, ".", ms=4, label=f"N={nodes} {region}")
    plt.xlabel("rescaled size x")
    plt.ylabel("rescaled density y")


def plot_scan(paths):
    for path in paths:
        header, data = read_csv(path)
        q = [float(r[0]) for r in data]
        rho = [float(r[1]) for r in data]
        err = [float(r[2]) for r in data]
        plt.errorbar(q, rho, yerr=[2 * e for e in err], fmt="o-", capsize=3)
        plt.xscale("log")
    plt.xlabel("q")
    plt.ylabel("pre-shock density")


def main():
    if len(sys.argv) < 3 or sys.argv[1] not in ("hist", "master", "scan"):
        sys.exit(__doc__)
    kind, paths = sys.argv[1], sys.argv[2:]
    {"hist": plot_hist, "master": plot_master, "scan": plot_scan}[kind](paths)
    plt.legend(fontsize=8)
    plt.tight_layout()
    out = f"{kind}.png"
    plt.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
