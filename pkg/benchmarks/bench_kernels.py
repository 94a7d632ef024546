"""Compiled vs numpy gate kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload runs once per backend, the timings are compared, and the
outputs are checked against each other.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qxai import _pykernels
from qxai.encode import FeatureMapSpec, zz_ops
from qxai.qsim import zero_batch

try:
    from qxai import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _run(kern, states, ops):
    for kind, target, control, angles in ops:
        if kind == "H":
            kern.h(states, target)
        elif kind == "CX":
            kern.cx(states, control, target)
        else:
            getattr(kern, kind.lower())(states, target, angles)
    return states


def feature_map_workload(rows: int, reps: int):
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, (rows, 4))
    spec = FeatureMapSpec(4, reps, "full")
    return 4, zz_ops(spec, X)


def wide_workload(num_qubits: int, rows: int, layers: int):
    rng = np.random.default_rng(1)
    ops = []
    for _ in range(layers):
        for q in range(num_qubits):
            ops.append(("H", q, None, None))
            ops.append(("RY", q, None, rng.uniform(-np.pi, np.pi, rows)))
            ops.append(("RZ", q, None, rng.uniform(-np.pi, np.pi, rows)))
        for q in range(num_qubits - 1):
            ops.append(("CX", q + 1, q, None))
    return num_qubits, ops


def bench(name, n, ops, rows, repeat):
    timings = {}
    outputs = {}
    backends = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    for label, kern in backends:
        best = float("inf")
        for _ in range(repeat):
            states = zero_batch(n, rows)
            t0 = time.perf_counter()
            _run(kern, states, ops)
            best = min(best, time.perf_counter() - t0)
        timings[label] = best
        outputs[label] = states
    line = f"{name:34s} numpy {timings['numpy'] * 1e3:9.2f} ms"
    if "cython" in timings:
        diff = np.abs(outputs["numpy"] - outputs["cython"]).max()
        speed = timings["numpy"] / timings["cython"]
        line += f"   cython {timings['cython'] * 1e3:9.2f} ms   x{speed:5.2f}   max|diff| {diff:.1e}"
    print(line)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; numpy timings only")
    for rows in (120, 4800):
        n, ops = feature_map_workload(rows, 2)
        bench(f"ZZ map, 4 qubits, {rows} rows", n, ops, rows, args.repeat)
    for n, rows in ((8, 256), (12, 16), (16, 1)):
        _, ops = wide_workload(n, rows, 3)
        bench(f"dense layers, {n} qubits, {rows} rows", n, ops, rows, args.repeat)


if __name__ == "__main__":
    main()
