"""Benchmark the compiled reception kernels against the numpy fallback.

Times the two hot kernels on synthetic event batches shaped like real
traffic (a handful of frames x a few hundred receivers), then times a full
default-scenario replication under each backend. Run:

    python3 benchmarks/bench_kernels.py [--events 20000] [--runs 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from d2dcast import _kernels
from d2dcast.engine import SimConfig, run_once


def synth_events(rng, n_events, n_frames=4, n_rx=400, n_ext=2):
    events = []
    for _ in range(n_events):
        events.append(
            (
                rng.normal(0.0, 5.0, (n_frames, n_rx)),
                rng.uniform(40.0, 120.0, (n_frames, n_rx)),
                rng.normal(0.0, 8.0, (n_frames, n_rx)),
                rng.normal(-110.0, 15.0, (n_ext, n_rx)),
                rng.uniform(-20.0, 6.0, n_ext),
            )
        )
    return events


def bench_kernels(backend, events):
    _kernels.select_backend(backend)
    start = time.perf_counter()
    sink = 0
    for fade, pl, shadow, ext_p, ext_xi in events:
        powers = _kernels.assemble_powers(-62.0, fade, pl, shadow)
        codes = _kernels.resolve_event(powers, -132.0, 1.0, ext_p, ext_xi)
        sink += int(codes[0, 0])
    return time.perf_counter() - start, sink


def bench_run(backend, n_runs):
    _kernels.select_backend(backend)
    cfg = SimConfig(n_ed=400, scheme="d2d")
    start = time.perf_counter()
    for seed in range(n_runs):
        run_once(cfg, seed)
    return (time.perf_counter() - start) / n_runs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--events", type=int, default=20_000)
    parser.add_argument("--runs", type=int, default=3)
    args = parser.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; benchmarking the fallback only")

    events = synth_events(np.random.default_rng(0), args.events)
    print(f"\nkernel micro-benchmark ({args.events} events, 4 frames x 400 rx):")
    times = {}
    checks = {}
    for backend in backends:
        times[backend], checks[backend] = bench_kernels(backend, events)
        rate = args.events / times[backend]
        print(f"  {backend:7s} {times[backend]:7.3f} s   {rate:9.0f} events/s")
    if len(backends) == 2:
        assert checks["python"] == checks["cython"], "backends disagree"
        print(f"  speedup: {times['python'] / times['cython']:.2f}x")

    print(f"\nend-to-end run_once, default scenario ({args.runs} runs each):")
    run_times = {}
    for backend in backends:
        run_times[backend] = bench_run(backend, args.runs)
        print(f"  {backend:7s} {run_times[backend]:7.3f} s/run")
    if len(backends) == 2:
        print(f"  speedup: {run_times['python'] / run_times['cython']:.2f}x")
    _kernels.select_backend(backends[-1])


if __name__ == "__main__":
    main()
