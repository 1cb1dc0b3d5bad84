"""Timing comparison of the hot kernels across available backends.

Runs each kernel on a representative workload for every implementation the
package can load (compiled and pure-numpy), prints a per-kernel table of
best-of-repeats wall times, and verifies the backends agree on the outputs
before timing them. Run as: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from zetalab import _kernels


def _workloads(rng):
    ts = np.linspace(5.0, 1200.0, 480)
    f = rng.integers(1, 50, size=200_001).astype(np.int64)
    f[0] = 0
    d4 = rng.integers(1, 200, size=200_001).astype(np.int64)
    dl = rng.integers(1, 40, size=200_001).astype(np.int64)
    d4[0] = dl[0] = 0
    x = rng.standard_normal(400_001)
    return {
        "line_zeta": lambda impl: impl.line_zeta(0.5, ts),
        "conv_with_ones": lambda impl: impl.conv_with_ones(f),
        "weighted_combine": lambda impl: impl.weighted_combine(d4, dl, 0.35),
        "running_sum": lambda impl: impl.running_sum(x),
    }


def _check_agreement(name, outputs):
    ref_name, ref = outputs[0]
    for other_name, out in outputs[1:]:
        err = float(np.max(np.abs(np.asarray(out) - np.asarray(ref))))
        scale = float(np.max(np.abs(np.asarray(ref)))) or 1.0
        if err / scale > 1e-10:
            raise AssertionError(
                f"{name}: {other_name} disagrees with {ref_name} by {err:g}"
            )


def main():
    rng = np.random.default_rng(20240817)
    impls = _kernels.implementations()
    print(f"backends available: {', '.join(impls)}  (active: {_kernels.BACKEND})")
    work = _workloads(rng)
    repeats = 5
    header = f"{'kernel':<18}" + "".join(f"{n:>14}" for n in impls)
    print(header)
    print("-" * len(header))
    for kernel_name, call in work.items():
        outputs = [(n, call(impl)) for n, impl in impls.items()]
        _check_agreement(kernel_name, outputs)
        row = f"{kernel_name:<18}"
        for impl in impls.values():
            call(impl)  # warm (JIT compile / cache touch)
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                call(impl)
                times.append(time.perf_counter() - t0)
            row += f"{min(times) * 1e3:>12.2f}ms"
        print(row)


if __name__ == "__main__":
    main()
