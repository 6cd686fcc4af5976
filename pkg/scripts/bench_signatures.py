"""Wall time of the signature sweep on white noise for doubling n."""

import argparse
import time

import numpy as np

from modehunt.kolmsig import signature_array


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--min-exp", type=int, default=14)
    p.add_argument("--max-exp", type=int, default=21)
    p.add_argument("--repeats", type=int, default=3)
    a = p.parse_args()
    rng = np.random.default_rng(0)
    signature_array(rng.standard_normal(64))
    prev = None
    for e in range(a.min_exp, a.max_exp + 1):
        x = rng.standard_normal(2**e)
        best = min(_clock(x) for _ in range(a.repeats))
        ratio = f"{best / prev:5.2f}" if prev else "    -"
        print(f"n=2^{e:<3d} {best:8.3f}s  ratio {ratio}")
        prev = best


def _clock(x):
    t0 = time.perf_counter()
    signature_array(x)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
