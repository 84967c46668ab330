"""Transceiver catalog and the BER <-> SNR algebra.

The back-to-back characteristic maps a line GSNR to a pre-FEC BER after
combining the transceiver's intrinsic noise by inverse sum.  Its monotone
inverse backs a GSNR estimate out of a measured BER, and the distance to
the GSNR at the FEC limit is the margin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from scipy.special import erfc, erfcinv

from .errors import InvalidBer, NoFeasibleTrx, NoIntersection, RxPowerOutOfRange
from .units import db_to_lin, lin_to_db

#: Bisection bracket and tolerance for curve inversion, dB.
GSNR_BRACKET_DB = (-5.0, 40.0)
GSNR_TOLERANCE_DB = 1e-4

BITS_PER_SYMBOL = {"qpsk": 2, "16qam": 4}

#: Representative pre-FEC thresholds per FEC family (catalog defaults,
#: overridable per transceiver record).
FEC_DEFAULTS = {
    "sc-fec": (4.5e-3, 7.0),
    "ofec": (2.0e-2, 15.0),
    "proprietary": (2.5e-2, 25.0),
}


@dataclass(frozen=True)
class FecProfile:
    name: str
    pre_fec_ber_limit: float
    overhead_percent: float

    def __post_init__(self):
        if not 0.0 < self.pre_fec_ber_limit < 0.5:
            raise ValueError("pre-FEC BER limit must be in (0, 0.5)")
        if self.overhead_percent < 0:
            raise ValueError("FEC overhead must be >= 0")


@dataclass(frozen=True)
class TrxType:
    """One transceiver generation; immutable and hashable for caching."""

    id: str
    modulation: str
    baud_gbd: float
    bitrate_gbps: float
    snr_trx_db: float
    fec: FecProfile
    min_rx_power_dbm: float = -22.0
    max_rx_power_dbm: float = 5.0
    btb_curve: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.modulation not in BITS_PER_SYMBOL:
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if db_to_lin(self.snr_trx_db) <= 0:
            raise ValueError("snr_trx must be positive")
        net = (
            BITS_PER_SYMBOL[self.modulation]
            * 2.0
            * self.baud_gbd
            * (1.0 - self.fec.overhead_percent / 100.0)
        )
        if abs(self.bitrate_gbps - net) / net > 0.20:
            raise ValueError(
                f"bitrate {self.bitrate_gbps} inconsistent with "
                f"{self.modulation} x {self.baud_gbd} GBd x 2 pol x FEC overhead "
                f"(expected about {net:.0f} Gb/s)"
            )
        if self.btb_curve is not None:
            curve = tuple((float(o), float(b)) for o, b in self.btb_curve)
            object.__setattr__(self, "btb_curve", curve)
            for (o1, b1), (o2, b2) in zip(curve, curve[1:]):
                if not (o2 > o1 and b2 < b1):
                    raise ValueError("btb_curve must be strictly decreasing in OSNR")


@dataclass(frozen=True)
class QotPoint:
    """One operating point: GSNR plus everything derived from it."""

    gsnr_db: float
    total_snr_db: float
    ber: float
    q_db: float
    margin_db: float
    rx_power_dbm: float | None


def _modulation_ber(modulation: str, snr_linear: float) -> float:
    """Gray-mapped analytic BER at a dual-polarization symbol SNR."""
    if snr_linear <= 0.0:
        return 0.5
    if modulation == "qpsk":
        return 0.5 * float(erfc(math.sqrt(snr_linear / 2.0)))
    return (3.0 / 8.0) * float(erfc(math.sqrt(snr_linear / 10.0)))


def total_snr_db(trx: TrxType, gsnr_db: float) -> float:
    """Line GSNR combined with the intrinsic TRx SNR by inverse sum."""
    inv = 1.0 / db_to_lin(trx.snr_trx_db) + 1.0 / db_to_lin(gsnr_db)
    return lin_to_db(1.0 / inv)


def _curve_ber(trx: TrxType, gsnr_db: float) -> float:
    """Log-linear interpolation on a sampled back-to-back table."""
    curve = trx.btb_curve
    if gsnr_db <= curve[0][0]:
        return curve[0][1]
    if gsnr_db >= curve[-1][0]:
        return curve[-1][1]
    for (o1, b1), (o2, b2) in zip(curve, curve[1:]):
        if o1 <= gsnr_db <= o2:
            t = (gsnr_db - o1) / (o2 - o1)
            return 10.0 ** (math.log10(b1) + t * (math.log10(b2) - math.log10(b1)))
    raise AssertionError("unreachable: curve spans checked above")


def btb_ber(trx: TrxType, gsnr_db: float, rx_power_dbm: float | None = None) -> float:
    """Pre-FEC BER at a line GSNR (dB); strictly decreasing in GSNR.

    ``rx_power_dbm=None`` skips the receiver-power window check (used when
    the received power is not part of the question, e.g. curve inversion).
    """
    if rx_power_dbm is not None and not (
        trx.min_rx_power_dbm <= rx_power_dbm <= trx.max_rx_power_dbm
    ):
        raise RxPowerOutOfRange(
            f"rx power {rx_power_dbm:.1f} dBm outside "
            f"[{trx.min_rx_power_dbm}, {trx.max_rx_power_dbm}] dBm for {trx.id}"
        )
    if trx.btb_curve is not None:
        return _curve_ber(trx, gsnr_db)
    inv = 1.0 / db_to_lin(trx.snr_trx_db)
    if not math.isinf(gsnr_db):
        inv += 1.0 / db_to_lin(gsnr_db)
    return _modulation_ber(trx.modulation, 1.0 / inv)


def floor_ber(trx: TrxType) -> float:
    """BER asymptote when the line is noiseless (total SNR = snr_trx)."""
    return btb_ber(trx, math.inf)


def estimate_gsnr_from_ber(trx: TrxType, measured_ber: float) -> float:
    """Invert the back-to-back curve by bisection on the dB axis.

    Raises NoIntersection when the measured BER lies below what the
    transceiver can produce at any line GSNR in the bracket.
    """
    if not 0.0 < measured_ber < 0.5:
        raise InvalidBer(f"BER {measured_ber} outside (0, 0.5)")
    lo, hi = GSNR_BRACKET_DB
    ber_hi = btb_ber(trx, hi)
    if measured_ber <= ber_hi:
        raise NoIntersection(
            f"BER {measured_ber:.3g} at or below the TRx floor curve of {trx.id}"
        )
    ber_lo = btb_ber(trx, lo)
    if measured_ber >= ber_lo:
        raise NoIntersection(
            f"BER {measured_ber:.3g} above the back-to-back curve at {lo} dB GSNR"
        )
    while hi - lo > GSNR_TOLERANCE_DB:
        mid = 0.5 * (lo + hi)
        if btb_ber(trx, mid) > measured_ber:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=256)
def gsnr_at_fec_limit(trx: TrxType) -> float:
    """GSNR (dB) at which the back-to-back curve crosses the FEC limit."""
    return estimate_gsnr_from_ber(trx, trx.fec.pre_fec_ber_limit)


def margin(trx: TrxType, gsnr_db: float) -> float:
    """dB headroom above the FEC-limit GSNR; positive means operable."""
    return gsnr_db - gsnr_at_fec_limit(trx)


def q_factor(ber: float) -> float:
    """Q (dB) from BER: 20*log10(sqrt(2)*erfcinv(2*ber))."""
    if not 0.0 < ber < 0.5:
        raise InvalidBer(f"BER {ber} outside (0, 0.5)")
    return 20.0 * math.log10(math.sqrt(2.0) * float(erfcinv(2.0 * ber)))


def select_trx(catalog, gsnr_db: float, required_margin_db: float) -> TrxType:
    """Highest-bitrate type meeting the margin; ties to lower baud, then id."""
    feasible = []
    for trx in catalog:
        try:
            m = margin(trx, gsnr_db)
        except NoIntersection:
            continue
        if m >= required_margin_db:
            feasible.append(trx)
    if not feasible:
        raise NoFeasibleTrx(
            f"no transceiver reaches margin {required_margin_db} dB at GSNR {gsnr_db:.2f} dB"
        )
    return sorted(feasible, key=lambda t: (-t.bitrate_gbps, t.baud_gbd, t.id))[0]


def make_qot_point(trx: TrxType, gsnr_db: float, rx_power_dbm: float | None = None) -> QotPoint:
    ber = btb_ber(trx, gsnr_db, rx_power_dbm)
    return QotPoint(
        gsnr_db=gsnr_db,
        total_snr_db=total_snr_db(trx, gsnr_db),
        ber=ber,
        q_db=q_factor(ber),
        margin_db=margin(trx, gsnr_db),
        rx_power_dbm=rx_power_dbm,
    )


def trx_from_dict(doc: dict) -> TrxType:
    fec_doc = doc["fec"]
    fec = FecProfile(
        name=fec_doc["name"],
        pre_fec_ber_limit=float(fec_doc["pre_fec_ber_limit"]),
        overhead_percent=float(fec_doc["overhead_percent"]),
    )
    curve = doc.get("btb_curve")
    return TrxType(
        id=doc["id"],
        modulation=doc["modulation"],
        baud_gbd=float(doc["baud_gbd"]),
        bitrate_gbps=float(doc["bitrate_gbps"]),
        snr_trx_db=float(doc["snr_trx_db"]),
        fec=fec,
        min_rx_power_dbm=float(doc.get("min_rx_power_dbm", -22.0)),
        max_rx_power_dbm=float(doc.get("max_rx_power_dbm", 5.0)),
        btb_curve=tuple((float(o), float(b)) for o, b in curve) if curve else None,
    )


def trx_to_dict(trx: TrxType) -> dict:
    doc = {
        "id": trx.id,
        "modulation": trx.modulation,
        "baud_gbd": trx.baud_gbd,
        "bitrate_gbps": trx.bitrate_gbps,
        "snr_trx_db": trx.snr_trx_db,
        "fec": {
            "name": trx.fec.name,
            "pre_fec_ber_limit": trx.fec.pre_fec_ber_limit,
            "overhead_percent": trx.fec.overhead_percent,
        },
        "min_rx_power_dbm": trx.min_rx_power_dbm,
        "max_rx_power_dbm": trx.max_rx_power_dbm,
    }
    if trx.btb_curve is not None:
        doc["btb_curve"] = [list(pair) for pair in trx.btb_curve]
    return doc


def load_catalog(path=None) -> tuple[TrxType, ...]:
    """Load a TRx catalog JSON; defaults to the shipped three generations."""
    if path is None:
        text = resources.files("ontwin.data").joinpath("trx_catalog.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    docs = json.loads(text)
    return tuple(trx_from_dict(doc) for doc in docs)
