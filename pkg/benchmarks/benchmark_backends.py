"""Times the compiled trial kernel against the reference Python loop.

Run from the repository root:

    python3 benchmarks/benchmark_backends.py [trials] [seed]

Both backends replay the same random stream, so the summaries must agree
exactly; the script asserts that before printing timings.
"""

import sys
import time

import numpy as np

from akqubits.backend import available_backends, run_teleport_trials


def time_backend(name, trials, seed):
    start = time.perf_counter()
    batch = run_teleport_trials(trials, +1, seed=seed, backend=name)
    elapsed = time.perf_counter() - start
    return batch, elapsed


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"trials: {trials}, seed: {seed}")

    results = {}
    for name in backends:
        batch, elapsed = time_backend(name, trials, seed)
        results[name] = (batch, elapsed)
        rate = trials / elapsed
        print(
            f"{name:>8}: {elapsed:8.3f} s  ({rate:10.0f} trials/s)  "
            f"mean rounds {batch.rounds.mean():.4f}  "
            f"min fidelity {np.nanmin(batch.fidelities):.15f}"
        )

    if len(backends) == 2:
        a, b = results["compiled"][0], results["python"][0]
        assert np.array_equal(a.rounds, b.rounds), "round counts diverged"
        assert np.array_equal(a.path_codes, b.path_codes), "paths diverged"
        assert np.allclose(
            a.fidelities, b.fidelities, atol=1e-12, equal_nan=True
        ), "fidelities diverged"
        speedup = results["python"][1] / results["compiled"][1]
        print(f"speedup: {speedup:.1f}x (identical trajectories confirmed)")


if __name__ == "__main__":
    main()
