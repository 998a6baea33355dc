"""Compare the compiled split-scan kernels against the pure NumPy fallback.

Measures the raw per-scan cost and the end-to-end effect on forest training
(the LOO evaluation hot path).  Run from the repo root:

    python benchmarks/bench_kernels.py
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from engineid import _kernels  # noqa: E402
from engineid._kernels import available_backends  # noqa: E402
from engineid.classifiers import default_spec, train_model  # noqa: E402
from engineid.classifiers import tree as tree_mod  # noqa: E402
from engineid.dataset import Dataset, DatasetRow  # noqa: E402


def timeit(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_raw_scans(backend, n=500, n_classes=5, calls=2000):
    rng = np.random.default_rng(0)
    x = np.sort(rng.normal(size=n))
    y = rng.integers(0, n_classes, n).astype(np.int64)
    r = rng.normal(size=n)

    def gini():
        for _ in range(calls):
            backend.scan_split_gini(x, y, n_classes)

    def sse():
        for _ in range(calls):
            backend.scan_split_sse(x, r)

    return timeit(gini) / calls * 1e6, timeit(sse) / calls * 1e6


def engine_like_dataset(n_rows=400, dim=644, n_classes=5, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_rows):
        c = i % n_classes
        center = np.zeros(dim)
        center[c * 8 : c * 8 + 8] = 1.0
        rows.append(DatasetRow(f"r{i}", 0, f"M{c}", "m", 2000, 1,
                               center + 0.3 * rng.standard_normal(dim)))
    return Dataset(rows, variant=(2000, 1), layout=(("f", dim),))


def bench_forest(backend_module):
    tree_mod._kernels.scan_split_gini = backend_module.scan_split_gini
    tree_mod._kernels.scan_split_sse = backend_module.scan_split_sse
    dataset = engine_like_dataset()
    spec = default_spec("random_forest", seed=1)
    return timeit(lambda: train_model(dataset, spec), repeats=3)


def main():
    backends = available_backends()
    print(f"active backend: {_kernels.get_backend()}")
    print(f"available: {', '.join(backends)}")
    print()
    print(f"{'benchmark':34s}" + "".join(f"{name:>12s}" for name in backends))

    raw = {name: bench_raw_scans(mod) for name, mod in backends.items()}
    print(f"{'gini scan, n=500 (us/call)':34s}"
          + "".join(f"{raw[name][0]:12.1f}" for name in backends))
    print(f"{'sse scan, n=500 (us/call)':34s}"
          + "".join(f"{raw[name][1]:12.1f}" for name in backends))

    forest = {name: bench_forest(mod) for name, mod in backends.items()}
    print(f"{'random forest, 400x644 (s)':34s}"
          + "".join(f"{forest[name]:12.2f}" for name in backends))

    if "compiled" in backends and "pure" in backends:
        print()
        print(f"speedup (pure/compiled): gini {raw['pure'][0] / raw['compiled'][0]:.1f}x, "
              f"sse {raw['pure'][1] / raw['compiled'][1]:.1f}x, "
              f"forest {forest['pure'] / forest['compiled']:.1f}x")
    # restore the import-time backend
    tree_mod._kernels.scan_split_gini = _kernels.scan_split_gini
    tree_mod._kernels.scan_split_sse = _kernels.scan_split_sse


if __name__ == "__main__":
    main()
