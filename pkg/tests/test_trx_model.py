"""BER <-> GSNR algebra against stdlib-erfc oracles.

Expected values are frozen from independent evaluation (``math.erfc`` and
bisection on it, not the scipy implementation under test).
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontwin.errors import InvalidBer, NoFeasibleTrx, NoIntersection, RxPowerOutOfRange
from ontwin.trx_model import (
    FecProfile,
    TrxType,
    btb_ber,
    estimate_gsnr_from_ber,
    floor_ber,
    gsnr_at_fec_limit,
    load_catalog,
    margin,
    q_factor,
    select_trx,
    total_snr_db,
    trx_from_dict,
    trx_to_dict,
)

OFEC = FecProfile("ofec", 2.0e-2, 15.0)


def _ideal(modulation: str, baud=32.0, bitrate=100.0) -> TrxType:
    # snr_trx 200 dB: the intrinsic-noise term is numerically negligible
    if modulation == "16qam":
        baud, bitrate = 64.0, 400.0
    return TrxType("ideal", modulation, baud, bitrate, 200.0, OFEC)


def _oracle_qpsk_ber(snr_lin: float) -> float:
    return 0.5 * math.erfc(math.sqrt(snr_lin / 2.0))


def _oracle_16qam_ber(snr_lin: float) -> float:
    return (3.0 / 8.0) * math.erfc(math.sqrt(snr_lin / 10.0))


def test_qpsk_ber_matches_erfc_oracle():
    gsnr_db = 10 * math.log10(2.0)  # "3.01 dB" exactly: linear 2
    assert btb_ber(_ideal("qpsk"), gsnr_db) == pytest.approx(_oracle_qpsk_ber(2.0), rel=1e-9)
    assert _oracle_qpsk_ber(2.0) == pytest.approx(7.86496035e-2, rel=1e-8)


def test_16qam_ber_matches_erfc_oracle():
    gsnr_db = 10 * math.log10(50.0)  # 16.99 dB
    assert btb_ber(_ideal("16qam"), gsnr_db) == pytest.approx(_oracle_16qam_ber(50.0), rel=1e-9)
    assert _oracle_16qam_ber(50.0) == pytest.approx(5.87025847e-4, rel=1e-8)


def test_trx_noise_floor_asymptote():
    trx = TrxType("t20", "qpsk", 32.0, 100.0, 20.0, OFEC)
    assert btb_ber(trx, math.inf) == pytest.approx(_oracle_qpsk_ber(100.0), rel=1e-12)
    assert floor_ber(trx) == btb_ber(trx, math.inf)
    # far above the floor the curve flattens onto it
    assert btb_ber(trx, 60.0) == pytest.approx(floor_ber(trx), rel=1e-3)


def test_rx_power_window_enforced():
    trx = TrxType("t", "qpsk", 32.0, 100.0, 24.0, OFEC, min_rx_power_dbm=-18.0, max_rx_power_dbm=0.0)
    with pytest.raises(RxPowerOutOfRange):
        btb_ber(trx, 15.0, rx_power_dbm=2.0)
    btb_ber(trx, 15.0, rx_power_dbm=-5.0)  # in range: no raise


def test_estimate_roundtrip_examples():
    ideal = _ideal("qpsk")
    est = estimate_gsnr_from_ber(ideal, 7.86496035e-2)
    assert est == pytest.approx(10 * math.log10(2.0), abs=2e-4)
    trx = TrxType("t20", "qpsk", 32.0, 100.0, 20.0, OFEC)
    est = estimate_gsnr_from_ber(trx, btb_ber(trx, 20.0))
    assert est == pytest.approx(20.0, abs=0.01)


def test_estimate_below_floor_is_no_intersection():
    trx = TrxType("t15", "qpsk", 32.0, 100.0, 15.0, OFEC)
    with pytest.raises(NoIntersection):
        estimate_gsnr_from_ber(trx, 1e-15)


def test_estimate_rejects_out_of_domain_ber():
    for bad in (0.0, 0.5, 0.7, -1e-3):
        with pytest.raises(InvalidBer):
            estimate_gsnr_from_ber(_ideal("qpsk"), bad)


def test_margin_against_erfc_inversion_oracle():
    """Ideal QPSK, FEC limit 2e-2: the stated formula inverts to 6.2509 dB,
    so the margin at 10 dB GSNR is 3.7491 dB (oracle: bisection on
    math.erfc, independent of the scipy path under test)."""
    lo, hi = 0.0, 4.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if 0.5 * math.erfc(mid) > 2.0e-2:
            lo = mid
        else:
            hi = mid
    snr_fec_db = 10 * math.log10(2.0 * ((lo + hi) / 2.0) ** 2)
    assert snr_fec_db == pytest.approx(6.25094692, abs=1e-6)
    ideal = _ideal("qpsk")
    assert gsnr_at_fec_limit(ideal) == pytest.approx(snr_fec_db, abs=2e-4)
    assert margin(ideal, 10.0) == pytest.approx(10.0 - snr_fec_db, abs=2e-4)


def test_margin_zero_at_fec_limit_gsnr():
    trx = load_catalog()[1]
    at_limit = gsnr_at_fec_limit(trx)
    assert margin(trx, at_limit) == 0.0
    assert btb_ber(trx, at_limit) == pytest.approx(trx.fec.pre_fec_ber_limit, rel=1e-3)


def test_margin_strictly_increasing():
    trx = load_catalog()[0]
    points = [5.0 + 25.0 * i / 99 for i in range(100)]
    margins = [margin(trx, g) for g in points]
    assert all(b > a for a, b in zip(margins, margins[1:]))


def test_margin_no_intersection_when_fec_unreachable():
    # floor BER above the FEC limit: the curve never crosses it
    weak = TrxType("weak", "qpsk", 32.0, 100.0, 5.0, FecProfile("sc-fec", 1e-4, 7.0))
    with pytest.raises(NoIntersection):
        margin(weak, 20.0)


def test_q_factor_values():
    assert q_factor(1e-3) == pytest.approx(9.79982257, abs=1e-6)
    with pytest.raises(InvalidBer):
        q_factor(0.5)
    with pytest.raises(InvalidBer):
        q_factor(0.0)


def test_q_decreases_as_gsnr_decreases():
    trx = load_catalog()[0]
    qs = [q_factor(btb_ber(trx, g)) for g in (25.0, 20.0, 15.0, 10.0)]
    assert all(b < a for a, b in zip(qs, qs[1:]))


def test_total_snr_inverse_sum_consistency():
    trx = TrxType("t", "qpsk", 32.0, 100.0, 21.0, OFEC)
    total = total_snr_db(trx, 17.0)
    recomputed = 1.0 / (1.0 / 10**2.1 + 1.0 / 10**1.7)
    assert 10 ** (total / 10.0) == pytest.approx(recomputed, rel=1e-12)


# ------------------------------------------------------------------- catalog


def test_shipped_catalog_is_the_three_generations():
    catalog = load_catalog()
    assert [t.id for t in catalog] == [
        "trx-100g-qpsk-32gbd",
        "trx-400g-16qam-64gbd",
        "trx-800g-16qam-130gbd",
    ]
    by_id = {t.id: t for t in catalog}
    assert by_id["trx-100g-qpsk-32gbd"].modulation == "qpsk"
    assert by_id["trx-100g-qpsk-32gbd"].fec.name == "sc-fec"
    assert by_id["trx-400g-16qam-64gbd"].baud_gbd == 64.0
    assert by_id["trx-400g-16qam-64gbd"].fec.name == "ofec"
    assert by_id["trx-800g-16qam-130gbd"].bitrate_gbps == 800.0
    assert by_id["trx-800g-16qam-130gbd"].fec.name == "proprietary"


def test_select_highest_bitrate_at_high_gsnr():
    catalog = load_catalog()
    assert select_trx(catalog, 35.0, 2.0).id == "trx-800g-16qam-130gbd"


def test_select_infeasible_below_every_intersection():
    with pytest.raises(NoFeasibleTrx):
        select_trx(load_catalog(), 2.0, 1.0)


def test_select_tie_breaks_on_lower_baud():
    a = TrxType("b-high-baud", "16qam", 72.0, 400.0, 22.0, OFEC)
    b = TrxType("a-low-baud", "16qam", 56.0, 400.0, 22.0, OFEC)
    chosen = select_trx((a, b), 30.0, 1.0)
    assert chosen.id == "a-low-baud"


def test_bitrate_consistency_invariant_enforced():
    with pytest.raises(ValueError):
        TrxType("bogus", "qpsk", 32.0, 500.0, 20.0, OFEC)


def test_catalog_roundtrip():
    catalog = load_catalog()
    assert all(trx_from_dict(trx_to_dict(t)) == t for t in catalog)


# ----------------------------------------------------------------- btb curve


def test_sampled_curve_consistent_with_analytic():
    analytic = TrxType("a", "qpsk", 32.0, 100.0, 22.0, OFEC)
    grid = [(-5.0 + 0.25 * i) for i in range(181)]
    table = tuple((g, btb_ber(analytic, g)) for g in grid)
    tabulated = TrxType("t", "qpsk", 32.0, 100.0, 22.0, OFEC, btb_curve=table)
    for g in (1.7, 6.3, 11.05, 17.9, 24.4, 29.7):
        est_a = estimate_gsnr_from_ber(analytic, btb_ber(analytic, g))
        est_t = estimate_gsnr_from_ber(tabulated, btb_ber(analytic, g))
        assert abs(est_a - est_t) < 0.02


def test_curve_must_decrease():
    with pytest.raises(ValueError):
        TrxType("t", "qpsk", 32.0, 100.0, 22.0, OFEC, btb_curve=((0.0, 1e-2), (1.0, 2e-2)))


@settings(max_examples=150, deadline=None)
@given(st.floats(min_value=5.0, max_value=30.0))
def test_roundtrip_property(gsnr_db):
    trx = load_catalog()[1]
    assert abs(estimate_gsnr_from_ber(trx, btb_ber(trx, gsnr_db)) - gsnr_db) < 0.01
