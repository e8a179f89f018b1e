"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 1024] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from rhoda import _kernels
from rhoda.model import LogicalTopology


def random_digraph(rng, n, degree):
    order = rng.permutation(n) + 1
    edges = {(int(order[i]), int(order[(i + 1) % n])) for i in range(n)}
    while len(edges) < n * degree:
        u, v = rng.integers(1, n + 1, size=2)
        if u != v:
            edges.add((int(u), int(v)))
    return LogicalTopology.from_edges(n, edges)


def cases(n, rng):
    topo = random_digraph(rng, n, 4)
    ip, ix = topo.csr
    demand = rng.random((n, n))
    np.fill_diagonal(demand, 0)
    cost = rng.random((64, 64))
    rates = rng.random((n, n))
    np.fill_diagonal(rates, -1)
    order = np.argsort(-rates.ravel(), kind="stable").astype(np.int64)

    def greedy(mod):
        adj = np.zeros((n, n), np.uint8)
        return mod.greedy_add_edges(order, n, 4, np.zeros(n, np.int32), np.zeros(n, np.int32), adj)

    # dist / next-hop inputs are computed once per backend so each case
    # times a single kernel
    def prepared(mod):
        d = mod.bfs_all_pairs(ip, ix, n)
        return d, mod.next_hops(ip, ix, d)

    return [
        ("bfs_all_pairs", lambda mod, _: mod.bfs_all_pairs(ip, ix, n)),
        ("next_hops", lambda mod, pre: mod.next_hops(ip, ix, pre[0])),
        ("push_loads", lambda mod, pre: mod.push_loads(pre[0], pre[1], demand)),
        ("hungarian 64x64", lambda mod, _: mod.hungarian(cost)),
        (f"greedy_add_edges {n * n:,} pairs", lambda mod, _: greedy(mod)),
    ], prepared


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1024, help="graph size")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.compiled is None:
        raise SystemExit("compiled kernels not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    table, prepared = cases(args.n, rng)
    backends = {"compiled": _kernels.compiled, "numpy": _kernels.python}
    pre = {name: prepared(mod) for name, mod in backends.items()}
    print(f"n={args.n}, best of {args.repeat}")
    print(f"{'kernel':<34}{'compiled s':>12}{'numpy s':>12}{'speedup':>10}")
    for label, fn in table:
        t = {}
        for name, mod in backends.items():
            t[name] = min(timeit.repeat(lambda: fn(mod, pre[name]), number=1, repeat=args.repeat))
        print(f"{label:<34}{t['compiled']:>12.4f}{t['numpy']:>12.4f}{t['numpy'] / t['compiled']:>9.1f}x")


if __name__ == "__main__":
    main()
