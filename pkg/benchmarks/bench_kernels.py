"""Throughput of the per-span NLI kernel: numba fast path vs numpy fallback.

The twin's hot path evaluates small per-link channel plans (a handful of
co-propagating channels) thousands of times per what-if sweep, so the sweep
over plan sizes is the comparison that matters; the numpy path only
catches up once the O(n^2) pair matrix is large enough to amortize its
call overhead.

Usage:
    python benchmarks/bench_kernels.py [--spans 2000] [--whatif]

Set ONTWIN_DISABLE_NUMBA=1 to force the whole package onto the numpy path
(e.g. to time the test suite both ways).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ontwin import kernels


def _plan(n_channels: int, rng: np.random.Generator):
    bauds = rng.choice([32e9, 64e9, 130e9], size=n_channels)
    gaps = np.empty(n_channels)
    gaps[0] = 0.0
    for i in range(1, n_channels):
        gaps[i] = (bauds[i - 1] + bauds[i]) / 2.0 * 1.25
    freqs = 191.6e12 + np.cumsum(gaps)
    powers = 1e-3 * np.ones(n_channels)
    beta2 = np.full(n_channels, 2.13e-26)
    return powers, freqs, bauds, beta2, 1.3e-3, 2.1e4, 2.17e4


def _per_call_us(fn, args, budget_s: float = 0.3) -> float:
    fn(*args)  # warm (and compile, for the numba path)
    reps = 50
    while True:
        start = time.perf_counter()
        for _ in range(reps):
            fn(*args)
        elapsed = time.perf_counter() - start
        if elapsed > budget_s or reps >= 200_000:
            return elapsed / reps * 1e6
        reps *= 4


def kernel_sweep() -> None:
    rng = np.random.default_rng(1)
    have_numba = kernels.span_nli_powers_numba is not None
    print(f"{'channels':>8s} {'numpy us':>10s} {'numba us':>10s} {'speedup':>8s}")
    for n in (1, 2, 4, 8, 16, 32, 64, 96):
        args = _plan(n, rng)
        t_np = _per_call_us(kernels.span_nli_powers_numpy, args)
        if have_numba:
            t_nb = _per_call_us(kernels.span_nli_powers_numba, args)
            print(f"{n:>8d} {t_np:>10.1f} {t_nb:>10.1f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{n:>8d} {t_np:>10.1f} {'-':>10s} {'-':>8s}")
    if have_numba:
        args = _plan(32, rng)
        a = kernels.span_nli_powers_numpy(*args)
        b = kernels.span_nli_powers_numba(*args)
        print(f"max rel deviation between backends: {np.max(np.abs(a - b) / a):.2e}")


def whatif_sweep() -> None:
    """End-to-end: repeated what-if provisioning on the DCX mesh."""
    from ontwin.fixtures import build_dcx_store
    from ontwin.pathfinder import ProvisionRequest, commit_provision, whatif_provision

    store = build_dcx_store()
    rng = np.random.default_rng(7)
    sites = sorted(n for n in store.topology.nodes if n.startswith("D"))
    start = time.perf_counter()
    accepts = 0
    for _ in range(60):
        src, dst = (str(s) for s in rng.choice(sites, size=2, replace=False))
        report = whatif_provision(store, ProvisionRequest(src, dst, 400.0))
        if report.verdict == "accept":
            commit_provision(store, report, timestamp=float(accepts + 1))
            accepts += 1
    elapsed = time.perf_counter() - start
    print(
        f"what-if sweep [{kernels.ACTIVE_BACKEND}]: 60 requests, {accepts} commits, "
        f"{len(store.lightpaths)} LPs resident: {elapsed:.2f}s "
        f"({elapsed / 60 * 1e3:.1f} ms/request)"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description="NLI kernel benchmark: numba vs numpy")
    parser.add_argument("--whatif", action="store_true", help="also run the end-to-end sweep")
    args = parser.parse_args()
    print(f"active backend: {kernels.ACTIVE_BACKEND}")
    kernel_sweep()
    if args.whatif:
        whatif_sweep()


if __name__ == "__main__":
    main()
