"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The per-span nonlinear-interference evaluation is O(n_channels^2) and sits
inside every link evaluation, so it dominates what-if sweeps and scenario
batches.  Set ``ONTWIN_DISABLE_NUMBA=1`` to force the numpy path (the
same flag the benchmark uses to compare both).

Both implementations are importable for equivalence tests and benchmarks:
``span_nli_powers_numpy`` and, when numba is usable, ``span_nli_powers_numba``.
``span_nli_powers`` is the selected backend.
"""

from __future__ import annotations

import math
import os

import numpy as np

#: Overall scale of the adopted closed-form single-span NLI expression.
NLI_PREFACTOR = 16.0 / 27.0


def _numba_disabled() -> bool:
    return os.environ.get("ONTWIN_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


def _span_nli_loops(powers_w, freqs_hz, bauds_hz, abs_beta2, gamma, leff_m, leff_asym_m):
    """Reference loop implementation; compiled by numba on the fast path.

    Per channel under test i, with channel PSD g = P/B and |beta2| taken at
    the channel's own frequency:
      self term   g_i^3 * asinh(pi^2/2 * |b2_i| * La * B_i^2)
      cross terms g_i * g_j^2 * ln((df + B_j/2) / (df - B_j/2))     per j != i
    all scaled by (16/27) * gamma^2 * Leff^2 / (pi * |b2_i| * La), then
    converted from PSD to power over B_i.
    """
    n = powers_w.shape[0]
    out = np.empty(n, dtype=np.float64)
    scale = NLI_PREFACTOR * gamma * gamma * leff_m * leff_m / (math.pi * leff_asym_m)
    for i in range(n):
        g_i = powers_w[i] / bauds_hz[i]
        acc = g_i * g_i * g_i * math.asinh(
            0.5 * math.pi * math.pi * abs_beta2[i] * leff_asym_m * bauds_hz[i] * bauds_hz[i]
        )
        for j in range(n):
            if j == i:
                continue
            g_j = powers_w[j] / bauds_hz[j]
            df = abs(freqs_hz[j] - freqs_hz[i])
            acc += g_i * g_j * g_j * math.log(
                (df + 0.5 * bauds_hz[j]) / (df - 0.5 * bauds_hz[j])
            )
        out[i] = scale / abs_beta2[i] * acc * bauds_hz[i]
    return out


def span_nli_powers_numpy(powers_w, freqs_hz, bauds_hz, abs_beta2, gamma, leff_m, leff_asym_m):
    """Vectorized numpy implementation of :func:`_span_nli_loops`."""
    powers_w = np.asarray(powers_w, dtype=np.float64)
    freqs_hz = np.asarray(freqs_hz, dtype=np.float64)
    bauds_hz = np.asarray(bauds_hz, dtype=np.float64)
    abs_beta2 = np.asarray(abs_beta2, dtype=np.float64)
    g = powers_w / bauds_hz
    eta = NLI_PREFACTOR * gamma**2 * leff_m**2 / (np.pi * abs_beta2 * leff_asym_m)
    sci = g**3 * np.arcsinh(0.5 * np.pi**2 * abs_beta2 * leff_asym_m * bauds_hz**2)
    df = np.abs(freqs_hz[None, :] - freqs_hz[:, None])
    np.fill_diagonal(df, bauds_hz)  # placeholder keeping the ratio positive; masked below
    ratio = (df + 0.5 * bauds_hz[None, :]) / (df - 0.5 * bauds_hz[None, :])
    log_terms = np.log(ratio)
    np.fill_diagonal(log_terms, 0.0)
    xci = g * (log_terms @ g**2)
    return eta * (sci + xci) * bauds_hz


ACTIVE_BACKEND = "numpy"
span_nli_powers = span_nli_powers_numpy
span_nli_powers_numba = None

if not _numba_disabled():
    try:
        from numba import njit

        span_nli_powers_numba = njit(cache=True)(_span_nli_loops)
        span_nli_powers = span_nli_powers_numba
        ACTIVE_BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is an install-time dependency
        pass
