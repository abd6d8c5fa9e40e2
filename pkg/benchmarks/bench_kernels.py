"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--size PX]
"""
import argparse
import timeit

import numpy as np

from fairlens import _backend
from fairlens.saliency import effective_radii, to_grayscale


def cases(size, rng):
    gray = to_grayscale(rng.integers(0, 256, (size, size, 3), dtype=np.uint8))
    radii = effective_radii(None, size, size)
    mask = rng.random((size, size)) < 0.45
    a = rng.normal(size=(400, 48))
    b = rng.normal(size=(300, 48))
    return {
        "integral_image": lambda k: k.integral_image(gray),
        "center_surround": lambda k: k.center_surround(gray, k.integral_image(gray), radii),
        "label_components": lambda k: k.label_components(mask),
        "pairwise_within_sum": lambda k: k.pairwise_within_sum(a),
        "pairwise_cross_sum": lambda k: k.pairwise_cross_sum(a, b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--size", type=int, default=128)
    args = parser.parse_args()

    backends = {name: _backend.get(name) for name in _backend.available()}
    if len(backends) < 2:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}" + "".join(f"{n + ' ms':>14}" for n in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.size, rng).items():
        times = {}
        for bname, k in backends.items():
            fn(k)  # warm-up
            times[bname] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) * 1e3
        line = f"{name:<22}" + "".join(f"{t:>14.3f}" for t in times.values())
        if "cython" in times:
            line += f"{times['python'] / times['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
