"""Time the pure-Python and compiled subset-union kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from shortlists import kernels
from shortlists.bits import UniverseSpec
from shortlists.combinators import PipelineConfig, build_hk
from shortlists.graph import RandomGraphSeed, random_regular_graph
from shortlists.verify import neighbor_masks, sample_subsets


def cases():
    g = random_regular_graph(UniverseSpec.single(6), UniverseSpec.single(6), RandomGraphSeed(1, 8))
    masks = neighbor_masks(g)
    yield "exhaustive min, |L|=64 K=3", masks, ("search", 3, 0)
    yield "exhaustive min, |L|=64 K=4", masks, ("search", 4, 0)
    h3 = build_hk(PipelineConfig(k=3, seed=42, certify=False))
    m3 = neighbor_masks(h3)
    yield f"H_3 exhaustive min, |L|={len(m3)} K=3", m3, ("search", 3, 0)
    h4 = build_hk(PipelineConfig(k=4, seed=42, certify=False))
    m4 = neighbor_masks(h4)
    yield f"H_4 100k sampled 4-subsets, |L|={len(m4)}", m4, ("sizes", sample_subsets(len(m4), 4, 10**5, 0))
    yield f"H_4 greedy x200, |L|={len(m4)}", m4, ("greedy", 4, 200)


def run(be, masks, job):
    packed = be.prepare(masks)
    if job[0] == "search":
        return be.search_union(packed, job[1], job[2])[:2]
    if job[0] == "sizes":
        return min(be.union_sizes(packed, job[1]))
    size, starts = job[1], job[2]
    return min(be.greedy_union(packed, size, s)[1] for s in range(starts))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = kernels.available()
    print(f"{'case':44s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for title, masks, job in cases():
        times, results = [], []
        for n in names:
            be = kernels.get_backend(n)
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                r = run(be, masks, job)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            results.append(tuple(r) if isinstance(r, tuple) else r)
        if len(set(map(str, results))) != 1:
            raise SystemExit(f"backends disagree on {title}: {results}")
        row = f"{title:44s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
