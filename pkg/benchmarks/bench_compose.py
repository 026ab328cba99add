"""Time the embedding composition kernel: numba vs pure numpy.

    python benchmarks/bench_compose.py [--d 1024] [--length 512] [--batch 64] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from lpformulate import _accel
from lpformulate.embed import N_TAGS, compose_numba, compose_numpy


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--d", type=int, default=1024)
    parser.add_argument("--length", type=int, default=512)
    parser.add_argument("--vocab", type=int, default=50265)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    tok = rng.normal(size=(args.vocab, args.d))
    pos = rng.normal(size=(args.length, args.d))
    tag = rng.normal(size=(N_TAGS, args.d))
    seqs = [(rng.integers(0, args.vocab, size=args.length), rng.integers(0, N_TAGS, size=args.length))
            for _ in range(args.batch)]

    def run(fn):
        for tokens, tags in seqs:
            fn(tok, pos, tag, tokens, tags, 5.0)

    backends = {"numpy": compose_numpy}
    if _accel.HAVE_NUMBA:
        compose_numba(tok, pos, tag, seqs[0][0], seqs[0][1], 5.0)  # compile outside the timer
        backends["numba"] = compose_numba
        tokens, tags = seqs[0]
        assert np.array_equal(compose_numba(tok, pos, tag, tokens, tags, 5.0),
                              compose_numpy(tok, pos, tag, tokens, tags, 5.0))
    else:
        print("numba disabled or unavailable; timing numpy only")

    print(f"d={args.d} L={args.length} batch={args.batch}")
    for name, fn in backends.items():
        best = min(timeit.repeat(lambda: run(fn), number=1, repeat=args.repeat))
        print(f"{name:>6}: {best * 1e3:8.2f} ms/batch  ({best / args.batch * 1e6:8.1f} us/seq)")


if __name__ == "__main__":
    main()
