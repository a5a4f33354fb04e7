"""Random-allocation baseline over many seeds: per-category mean of each metric.

    python3 scripts/random_baseline.py --seeds 20
"""

from __future__ import annotations

import argparse
from collections import defaultdict
from fractions import Fraction

from mrplan.bench import Planner, load_dataset, run_benchmark
from mrplan.metrics import CATEGORIES, METRIC_NAMES


def sweep(seeds: int, dataset=None) -> dict[str, dict[str, Fraction]]:
    manifest = load_dataset(dataset)
    per_cat: dict[str, list[dict[str, Fraction]]] = defaultdict(list)
    for seed in range(seeds):
        report = run_benchmark(manifest, Planner("random", seed=seed)).report
        for row in report.rows:
            per_cat[row.label].append(row.means)
    return {cat: {m: sum(r[m] for r in rows) / len(rows) for m in METRIC_NAMES}
            for cat, rows in per_cat.items()}


def main(argv=None) -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--dataset", default=None)
    args = ap.parse_args(argv)
    means = sweep(args.seeds, args.dataset)
    print(f"random allocation, {args.seeds} seeds")
    print("| Category | " + " | ".join(METRIC_NAMES) + " |")
    print("|---" * (len(METRIC_NAMES) + 1) + "|")
    for cat in CATEGORIES:
        if cat in means:
            print(f"| {cat} | " + " | ".join(f"{float(means[cat][m]):.2f}" for m in METRIC_NAMES) + " |")


if __name__ == "__main__":
    main()
