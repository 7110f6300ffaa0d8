"""Closed-form nonlinear-interference estimator.

Per-span analytical self- and cross-channel terms under the Gaussian
modulation assumption, accumulated incoherently over spans and links. The
missing constellation correction makes this estimator deliberately
conservative: it never under-reports interference for real formats.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from ..constants import REFERENCE_BANDWIDTH_HZ
from ..errors import ModelDomainError
from ..topology import FiberSpan, Link
from .base import ChannelState, effective_length_km, validate_channel_set


def nli_closed_form(
    path: Sequence[Link],
    channels_by_link: Mapping[str, Sequence[ChannelState]],
    target: ChannelState,
    reference_bandwidth_hz: float = REFERENCE_BANDWIDTH_HZ,
) -> float:
    """Interference power (W, reference bandwidth) on the target channel.

    Each link contributes the sum of its spans' self- and cross-channel
    terms, evaluated against the channels lit on that link. Launch power is
    restored after every span, so all spans of a link see the same spectrum.
    """
    psd = 0.0
    for link in path:
        interferers = validate_channel_set(channels_by_link[link.id], target)
        for span, _amp in link.spans:
            psd += _span_nli_psd(span, target, interferers)
    return psd * reference_bandwidth_hz


def _span_nli_psd(span: FiberSpan, target: ChannelState, interferers: Sequence[ChannelState]) -> float:
    """Single-span interference PSD at the target center frequency (W/Hz)."""
    if span.gamma_w_km == 0.0:
        return 0.0
    if span.beta2_ps2_km == 0.0:
        raise ModelDomainError("closed form requires dispersive fiber (beta2 != 0)")
    gamma = span.gamma_w_km * 1e-3  # 1/(W m)
    beta2 = abs(span.beta2_ps2_km) * 1e-27  # s^2/m
    l_eff_km, l_asym_km = effective_length_km(span.length_km, span.alpha_db_km)
    l_eff, l_asym = l_eff_km * 1e3, l_asym_km * 1e3

    g_t = target.psd_w_hz
    rs_t = target.symbol_rate_hz
    sci = (
        (8.0 / 27.0)
        * gamma**2
        * l_eff**2
        * g_t**3
        * math.asinh(0.5 * math.pi**2 * beta2 * l_asym * rs_t**2)
        / (math.pi * beta2 * l_asym)
    )

    xci = 0.0
    for ch in interferers:
        df = abs(ch.center_thz - target.center_thz) * 1e12
        rs_j = ch.symbol_rate_hz
        xci += (
            (16.0 / 27.0)
            * gamma**2
            * l_eff**2
            * g_t
            * ch.psd_w_hz**2
            * math.log((df + rs_j / 2.0) / (df - rs_j / 2.0))
            / (2.0 * math.pi * beta2 * l_asym)
        )
    return sci + xci
