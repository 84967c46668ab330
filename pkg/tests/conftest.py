from __future__ import annotations

import pytest

from ontwin import kernels
from ontwin.fixtures import build_dcx_store, build_ring_store, build_two_operator_store, populate_ring


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger the one-off numba compile before any timed assertion runs."""
    import numpy as np

    kernels.span_nli_powers(
        np.array([1e-3, 1e-3]),
        np.array([193.0e12, 193.1e12]),
        np.array([32e9, 32e9]),
        np.array([2.1e-26, 2.1e-26]),
        1.3e-3,
        2.0e4,
        2.1e4,
    )


@pytest.fixture()
def ring_store():
    return build_ring_store()


@pytest.fixture()
def populated_ring():
    store = build_ring_store()
    lp_ids = populate_ring(store, 12)
    return store, lp_ids


@pytest.fixture()
def dcx_store():
    return build_dcx_store()


@pytest.fixture()
def two_operator_store():
    return build_two_operator_store()
