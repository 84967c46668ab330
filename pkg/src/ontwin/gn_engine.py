"""Physical-layer evaluator for amplified fiber links.

Propagates per-channel power element by element and derives, per element,
the ASE and NLI SNR contributions that accumulate into the link GSNR by
inverse sum.  Everything here is a pure function over immutable inputs;
power bookkeeping is done in dB (additive, exact for the loss/gain
ledger), noise physics in linear units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPlan, GainOutOfRange
from .kernels import span_nli_powers
from .units import (
    PLANCK_H,
    alpha_power_per_m,
    beta2_from_dispersion,
    db_to_lin,
    dbm_to_watt,
    ghz_to_hz,
    thz_to_hz,
    watt_to_dbm,
)


@dataclass(frozen=True)
class FiberSpan:
    """Passive fiber span.

    Units: length km, loss dB/km, dispersion ps/(nm*km), gamma 1/(W*km).
    ``loss_offsets`` holds optional (frequency THz, delta dB) pairs applied
    by nearest-point lookup for frequency-dependent loss.
    """

    length_km: float
    loss_db_per_km: float
    dispersion_ps_nm_km: float
    gamma_per_w_km: float
    extra_loss_db: float = 0.0
    loss_offsets: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.length_km <= 0:
            raise ValueError("span length must be > 0 km")
        if self.loss_db_per_km <= 0:
            raise ValueError("loss coefficient must be > 0 dB/km")
        if self.gamma_per_w_km < 0:
            raise ValueError("gamma must be >= 0")
        if self.gamma_per_w_km > 0 and self.dispersion_ps_nm_km == 0:
            raise ValueError("dispersion must be nonzero when gamma > 0")
        object.__setattr__(self, "loss_offsets", tuple(tuple(p) for p in self.loss_offsets))

    def loss_db(self, frequency_thz: float) -> float:
        """Total span loss seen by a channel at ``frequency_thz``."""
        base = self.loss_db_per_km * self.length_km + self.extra_loss_db
        if not self.loss_offsets:
            return base
        nearest = min(self.loss_offsets, key=lambda p: abs(p[0] - frequency_thz))
        return base + nearest[1]


@dataclass(frozen=True)
class Edfa:
    """EDFA with a cubic noise-figure polynomial in gain (dB)."""

    gain_target_db: float
    gain_min_db: float
    gain_max_db: float
    nf_poly: tuple[float, float, float, float] = (5.0, 0.0, 0.0, 0.0)
    p_out_max_dbm: float = 23.0

    def __post_init__(self):
        if not self.gain_min_db <= self.gain_target_db <= self.gain_max_db:
            raise ValueError("gain_target must lie within [gain_min, gain_max]")
        object.__setattr__(self, "nf_poly", tuple(self.nf_poly))
        if len(self.nf_poly) != 4:
            raise ValueError("nf_poly must have exactly four coefficients c0..c3")
        worst = self._min_nf_in_range()
        if not math.isfinite(worst) or worst < 3.0:
            raise ValueError(f"NF polynomial dips to {worst:.2f} dB within gain range; must stay >= 3.0 dB")

    def _nf_db(self, gain_db: float) -> float:
        c0, c1, c2, c3 = self.nf_poly
        return c0 + c1 * gain_db + c2 * gain_db**2 + c3 * gain_db**3

    def _min_nf_in_range(self) -> float:
        # cubic: minimum over the closed interval is at an endpoint or a
        # stationary point of the derivative quadratic
        candidates = [self.gain_min_db, self.gain_max_db]
        _, c1, c2, c3 = self.nf_poly
        if c3 != 0.0:
            disc = 4.0 * c2**2 - 12.0 * c3 * c1
            if disc >= 0.0:
                for sign in (-1.0, 1.0):
                    g = (-2.0 * c2 + sign * math.sqrt(disc)) / (6.0 * c3)
                    if self.gain_min_db < g < self.gain_max_db:
                        candidates.append(g)
        elif c2 != 0.0:
            g = -c1 / (2.0 * c2)
            if self.gain_min_db < g < self.gain_max_db:
                candidates.append(g)
        return min(self._nf_db(g) for g in candidates)


@dataclass(frozen=True)
class RoadmNode:
    """ROADM: per-traversal insertion loss plus the managed-mode set-point."""

    id: str
    insertion_loss_db: float = 6.0
    target_per_channel_power_dbm: float = 0.0

    def __post_init__(self):
        if self.insertion_loss_db < 0:
            raise ValueError("insertion loss must be >= 0 dB")


Element = FiberSpan | Edfa | RoadmNode


@dataclass(frozen=True)
class Channel:
    center_thz: float
    baud_gbd: float
    power_dbm: float

    def __post_init__(self):
        if self.baud_gbd <= 0:
            raise ValueError("symbol rate must be positive")


@dataclass(frozen=True)
class ChannelPlan:
    """Set of co-propagating channels entering an element chain."""

    channels: tuple[Channel, ...]
    reference_bandwidth_ghz: float = 12.5

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if self.reference_bandwidth_ghz <= 0:
            raise ValueError("reference bandwidth must be positive")
        ordered = sorted(self.channels, key=lambda c: c.center_thz)
        for a, b in zip(ordered, ordered[1:]):
            gap_ghz = (b.center_thz - a.center_thz) * 1e3
            if gap_ghz < (a.baud_gbd + b.baud_gbd) / 2.0:
                raise ValueError(
                    f"channels at {a.center_thz} and {b.center_thz} THz overlap"
                )

    def __len__(self) -> int:
        return len(self.channels)


@dataclass(frozen=True)
class PropagationResult:
    """Power ledger of one element-chain walk.

    ``profile_dbm[k]`` is the per-channel power at boundary k (row 0 is the
    launch, row k+1 follows element k).  ``edfa_gains_db`` records, per EDFA
    element index, the commanded and post-saturation effective gain.
    """

    profile_dbm: tuple[tuple[float, ...], ...]
    edfa_gains_db: tuple[tuple[int, float, float], ...]


@dataclass(frozen=True)
class LinkSnrBreakdown:
    """Per-element (snr_ase, snr_nli) linear contributions plus the fold.

    ``None`` marks an absent (infinite-SNR) contribution.  Recomputing
    :func:`accumulate_gsnr` over ``contributions`` reproduces ``gsnr``
    bit for bit.
    """

    contributions: tuple[tuple[float | None, float | None], ...]
    gsnr: float
    power_profile_dbm: tuple[tuple[float, ...], ...]
    edfa_gains_db: tuple[tuple[int, float, float], ...] = field(default=())


def accumulate_gsnr(contributions) -> float:
    """Canonical inverse-sum fold over (snr_ase, snr_nli) pairs."""
    inv = 0.0
    for snr_ase, snr_nli in contributions:
        if snr_ase is not None:
            inv += 1.0 / snr_ase
        if snr_nli is not None:
            inv += 1.0 / snr_nli
    return math.inf if inv == 0.0 else 1.0 / inv


def nf_at_gain(edfa: Edfa, gain_db: float) -> float:
    """Noise figure (dB) at a commanded gain; strict range check."""
    if not edfa.gain_min_db <= gain_db <= edfa.gain_max_db:
        raise GainOutOfRange(
            f"gain {gain_db:.2f} dB outside [{edfa.gain_min_db}, {edfa.gain_max_db}] dB"
        )
    return edfa._nf_db(gain_db)


def ase_snr(
    edfa: Edfa,
    gain_db: float,
    channel_power_out_dbm: float,
    center_frequency_thz: float,
    reference_bandwidth_ghz: float,
) -> float:
    """Linear ASE SNR: P_out / (h * nu * F * (G - 1) * B_ref).

    Returns ``math.inf`` when G <= 1 (no amplification, no ASE).
    """
    nf_db = nf_at_gain(edfa, gain_db)
    g_lin = db_to_lin(gain_db)
    if g_lin <= 1.0:
        return math.inf
    p_ase_w = (
        PLANCK_H
        * thz_to_hz(center_frequency_thz)
        * db_to_lin(nf_db)
        * (g_lin - 1.0)
        * ghz_to_hz(reference_bandwidth_ghz)
    )
    return dbm_to_watt(channel_power_out_dbm) / p_ase_w


def _span_nli_snrs(span: FiberSpan, powers_in_dbm, plan: ChannelPlan) -> np.ndarray:
    """Linear NLI SNR per channel for one span, from its launch powers."""
    n = len(plan)
    if span.gamma_per_w_km == 0.0:
        return np.full(n, math.inf)
    freqs_hz = np.array([thz_to_hz(c.center_thz) for c in plan.channels])
    bauds_hz = np.array([ghz_to_hz(c.baud_gbd) for c in plan.channels])
    powers_w = np.array([dbm_to_watt(p) for p in powers_in_dbm])
    alpha = alpha_power_per_m(span.loss_db_per_km)
    leff = (1.0 - math.exp(-alpha * span.length_km * 1e3)) / alpha
    leff_asym = 1.0 / alpha
    # per-channel beta2 keeps each channel's NLI independent of who else
    # is on the plan (monotonicity under added interferers)
    abs_beta2 = np.array(
        [abs(beta2_from_dispersion(span.dispersion_ps_nm_km, c.center_thz)) for c in plan.channels]
    )
    p_nli = span_nli_powers(
        powers_w, freqs_hz, bauds_hz, abs_beta2, span.gamma_per_w_km * 1e-3, leff, leff_asym
    )
    return powers_w / p_nli


def nli_snr(span: FiberSpan, plan: ChannelPlan, channel_index: int) -> float:
    """Single-span NLI SNR for ``channel_index`` at the plan's launch powers."""
    if len(plan) == 0:
        raise EmptyPlan("channel plan is empty")
    if not 0 <= channel_index < len(plan):
        raise IndexError(f"channel index {channel_index} out of range")
    powers = [c.power_dbm for c in plan.channels]
    return float(_span_nli_snrs(span, powers, plan)[channel_index])


def _resolve_edfa_gain(
    edfa: Edfa,
    powers_dbm: np.ndarray,
    managed: bool,
    target_dbm: float | None,
    clamp_gain: bool,
) -> float:
    if managed:
        if target_dbm is None:
            raise ValueError("managed walk requires a target per-channel power")
        gain = target_dbm - float(np.mean(powers_dbm))
    else:
        gain = edfa.gain_target_db
    if gain < edfa.gain_min_db or gain > edfa.gain_max_db:
        if not clamp_gain:
            raise GainOutOfRange(
                f"required gain {gain:.2f} dB outside "
                f"[{edfa.gain_min_db}, {edfa.gain_max_db}] dB"
            )
        gain = min(max(gain, edfa.gain_min_db), edfa.gain_max_db)
    return gain


def _walk(elements, plan: ChannelPlan, managed, target_dbm, clamp_gain):
    """Yield (element, powers_in_dbm, powers_out_dbm, gain_pair).

    ``gain_pair`` is ``(commanded_db, effective_db)`` for EDFAs, else None.
    """
    powers = np.array([c.power_dbm for c in plan.channels], dtype=np.float64)
    for element in elements:
        p_in = powers.copy()
        if isinstance(element, FiberSpan):
            losses = np.array([element.loss_db(c.center_thz) for c in plan.channels])
            powers = powers - losses
            yield element, p_in, powers.copy(), None
        elif isinstance(element, Edfa):
            gain = _resolve_edfa_gain(element, powers, managed, target_dbm, clamp_gain)
            powers = powers + gain
            total_w = float(np.sum([dbm_to_watt(p) for p in powers]))
            p_max_w = dbm_to_watt(element.p_out_max_dbm)
            effective = gain
            if total_w > p_max_w:
                backoff = 10.0 * math.log10(total_w / p_max_w)
                powers = powers - backoff
                effective = gain - backoff
            yield element, p_in, powers.copy(), (gain, effective)
        elif isinstance(element, RoadmNode):
            powers = powers - element.insertion_loss_db
            if managed:
                powers = np.full_like(powers, element.target_per_channel_power_dbm)
            yield element, p_in, powers.copy(), None
        else:
            raise TypeError(f"unsupported element type {type(element).__name__}")


def propagate_power(
    elements,
    plan: ChannelPlan,
    *,
    managed: bool = False,
    target_dbm: float | None = None,
    clamp_gain: bool = False,
) -> PropagationResult:
    """Per-channel power at every element boundary.

    Managed mode chooses each EDFA gain to restore ``target_dbm`` and pins
    ROADM egress to the node set-point; unmanaged mode applies each EDFA's
    fixed ``gain_target_db``.  Output total power is clipped at
    ``p_out_max_dbm`` with a uniform per-channel dB reduction.
    """
    if len(plan) == 0:
        raise EmptyPlan("channel plan is empty")
    profile = [tuple(float(c.power_dbm) for c in plan.channels)]
    gains: list[tuple[int, float, float]] = []
    for idx, (_element, _p_in, p_out, gain_pair) in enumerate(
        _walk(elements, plan, managed, target_dbm, clamp_gain)
    ):
        profile.append(tuple(float(p) for p in p_out))
        if gain_pair is not None:
            gains.append((idx, gain_pair[0], gain_pair[1]))
    return PropagationResult(tuple(profile), tuple(gains))


def link_gsnr(
    elements,
    plan: ChannelPlan,
    channel_index: int,
    *,
    managed: bool = False,
    target_dbm: float | None = None,
    clamp_gain: bool = False,
) -> LinkSnrBreakdown:
    """ASE/NLI breakdown and accumulated GSNR for one channel over a chain.

    Spans contribute NLI from their launch powers; EDFAs contribute ASE from
    the post-saturation effective gain with the NF polynomial evaluated at
    the commanded gain; ROADMs shape power only.
    """
    if len(plan) == 0:
        raise EmptyPlan("channel plan is empty")
    if not 0 <= channel_index < len(plan):
        raise IndexError(f"channel index {channel_index} out of range")
    contributions: list[tuple[float | None, float | None]] = []
    profile = [tuple(float(c.power_dbm) for c in plan.channels)]
    gains: list[tuple[int, float, float]] = []
    for idx, (element, p_in, p_out, gain_pair) in enumerate(
        _walk(elements, plan, managed, target_dbm, clamp_gain)
    ):
        profile.append(tuple(float(p) for p in p_out))
        snr_ase_val: float | None = None
        snr_nli_val: float | None = None
        if isinstance(element, FiberSpan):
            snr = float(_span_nli_snrs(element, p_in, plan)[channel_index])
            snr_nli_val = None if math.isinf(snr) else snr
        elif isinstance(element, Edfa):
            commanded, eff_gain = gain_pair
            gains.append((idx, commanded, eff_gain))
            g_eff_lin = db_to_lin(eff_gain)
            if g_eff_lin > 1.0:
                nf_db = element._nf_db(commanded)
                channel = plan.channels[channel_index]
                p_ase_w = (
                    PLANCK_H
                    * thz_to_hz(channel.center_thz)
                    * db_to_lin(nf_db)
                    * (g_eff_lin - 1.0)
                    * ghz_to_hz(plan.reference_bandwidth_ghz)
                )
                snr_ase_val = dbm_to_watt(float(p_out[channel_index])) / p_ase_w
        contributions.append((snr_ase_val, snr_nli_val))
    return LinkSnrBreakdown(
        contributions=tuple(contributions),
        gsnr=accumulate_gsnr(contributions),
        power_profile_dbm=tuple(profile),
        edfa_gains_db=tuple(gains),
    )
