"""Sweep random product-state document pairs and report the largest statistics.

Each sample draws two documents with random amplitudes in every dimension and
a random standard basis, then evaluates the CHSH trace and probability forms on
a random dimension pair and the n-settings form on all dimensions. The phi_plus
oracle is printed alongside for contrast.

Usage: python scripts/classical_bound_sweep.py [--samples 100000] [--seed 0]
"""

import argparse
import math
import time

import numpy as np

from relbell import DEFAULT_DIMENSIONS, AmplitudePair, DocumentState
from relbell.bell import (
    chsh_composite,
    chsh_probability,
    chsh_trace,
    n_settings,
    n_settings_bound,
    optimal_chsh_observables,
)
from relbell.composite import bell_state


def random_doc(rng, doc_id, dims):
    thetas = rng.uniform(0.0, math.pi / 2, len(dims)).tolist()
    amps = {d: AmplitudePair(math.cos(t), math.sin(t)) for d, t in zip(dims, thetas)}
    return DocumentState(doc_id, dims[int(rng.integers(len(dims)))], amps)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    dims = DEFAULT_DIMENSIONS
    stats = {"chsh_trace": [], "chsh_probability": [], "n_settings": []}
    start = time.perf_counter()
    for _ in range(args.samples):
        d1, d2 = random_doc(rng, "a", dims), random_doc(rng, "b", dims)
        i, j = rng.choice(len(dims), 2, replace=False).tolist()
        stats["chsh_trace"].append(chsh_trace(d1, d2, (dims[i], dims[j])).statistic)
        stats["chsh_probability"].append(chsh_probability(d1, d2, (dims[i], dims[j])).statistic)
        stats["n_settings"].append(n_settings(d1, d2, dims).statistic)
    elapsed = time.perf_counter() - start

    bounds = {
        "chsh_trace": "<= 2",
        "chsh_probability": "in [1, 3]",
        "n_settings": f"<= {n_settings_bound(len(dims))}",
    }
    print(f"{args.samples} samples in {elapsed:.1f}s")
    for form, values in stats.items():
        v = np.asarray(values)
        print(f"{form:17s} min={v.min():.6f} max={v.max():.6f} mean={v.mean():.6f}  bound {bounds[form]}")
    oracle = chsh_composite(bell_state(), *optimal_chsh_observables())
    print(f"{'phi_plus oracle':17s} S={oracle.statistic:.12f} violated={oracle.violated}")


if __name__ == "__main__":
    main()
