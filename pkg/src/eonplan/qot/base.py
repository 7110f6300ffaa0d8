"""Channel state, ASE noise and OSNR arithmetic shared by both estimators."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from scipy.constants import h as PLANCK_J_S

from ..constants import REFERENCE_BANDWIDTH_HZ
from ..errors import ModelDomainError, NoiseUndefinedError
from ..topology import Amplifier, Link

LN10 = math.log(10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def w_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts / 1e-3)


def dbm_to_w(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


class Estimator(enum.Enum):
    """Which interference model produced a result: closed form or full form."""

    ACF = "acf"
    FF = "ff"


@dataclass(frozen=True)
class ChannelState:
    """A lit channel as the interference models see it."""

    center_thz: float
    launch_power_w: float
    symbol_rate_gbaud: float
    kurtosis: float = 0.0
    demand_id: str = ""

    def __post_init__(self) -> None:
        if self.launch_power_w <= 0:
            raise ModelDomainError(f"launch power must be positive, got {self.launch_power_w}")

    @property
    def symbol_rate_hz(self) -> float:
        return self.symbol_rate_gbaud * 1e9

    @property
    def psd_w_hz(self) -> float:
        return self.launch_power_w / self.symbol_rate_hz


@dataclass(frozen=True)
class QotResult:
    ase_power_w: float
    nli_power_w: float
    linear_osnr_db: float
    total_osnr_db: float
    estimator: Estimator


def effective_length_km(length_km: float, alpha_db_km: float) -> tuple[float, float]:
    """(effective length, asymptotic effective length) of a span, in km.

    Lossless fiber is the alpha -> 0 limit: the effective length equals the
    physical length and the asymptotic value is unbounded.
    """
    a = alpha_db_km * LN10 / 10.0
    if a == 0.0:
        return length_km, math.inf
    return -math.expm1(-a * length_km) / a, 1.0 / a


def ase_power_w(
    amplifiers: Iterable[Amplifier],
    center_frequency_thz: float,
    reference_bandwidth_hz: float = REFERENCE_BANDWIDTH_HZ,
) -> float:
    """Spontaneous-emission power injected by the amplifier chain.

    Per amplifier: NF * h * nu * (G - 1) * B_ref, all linear; additive over
    the chain. An empty chain contributes nothing.
    """
    nu = center_frequency_thz * 1e12
    return sum(
        db_to_linear(amp.nf_db) * PLANCK_J_S * nu * (db_to_linear(amp.gain_db) - 1.0)
        * reference_bandwidth_hz
        for amp in amplifiers
    )


def linear_osnr_db(launch_power_w: float, ase_w: float) -> float:
    if ase_w <= 0.0:
        raise NoiseUndefinedError("linear OSNR undefined without amplifier noise")
    return 10.0 * math.log10(launch_power_w / ase_w)


def total_osnr_db(launch_power_w: float, ase_w: float, nli_w: float) -> float:
    if ase_w < 0.0 or nli_w < 0.0:
        raise ModelDomainError("noise powers must be non-negative")
    if ase_w + nli_w == 0.0:
        raise NoiseUndefinedError("total OSNR undefined when both noise terms are zero")
    return 10.0 * math.log10(launch_power_w / (ase_w + nli_w))


def validate_channel_set(channels: Sequence[ChannelState], target: ChannelState) -> list[ChannelState]:
    """Check the target is present and no interferer overlaps it spectrally.

    Returns the interferers (every channel except the target).
    """
    if target not in channels:
        raise ModelDomainError("target channel missing from the link channel set")
    interferers = []
    seen_target = False
    for ch in channels:
        if not seen_target and ch == target:
            seen_target = True
            continue
        df_hz = abs(ch.center_thz - target.center_thz) * 1e12
        if df_hz < (ch.symbol_rate_hz + target.symbol_rate_hz) / 2.0:
            raise ModelDomainError(
                f"channels at {target.center_thz} and {ch.center_thz} THz overlap"
            )
        interferers.append(ch)
    return interferers


def evaluate_path(
    path: Sequence[Link],
    channels_by_link: Mapping[str, Sequence[ChannelState]],
    target: ChannelState,
    estimator: Estimator,
    **estimator_options,
) -> QotResult:
    """ASE plus estimator-specific NLI for the target over its path."""
    from .closed_form import nli_closed_form
    from .full_form import nli_full_form

    amps = [amp for link in path for _, amp in link.spans]
    ase = ase_power_w(amps, target.center_thz)
    if estimator is Estimator.ACF:
        nli = nli_closed_form(path, channels_by_link, target)
    else:
        nli = nli_full_form(path, channels_by_link, target, **estimator_options)
    return QotResult(
        ase_power_w=ase,
        nli_power_w=nli,
        linear_osnr_db=linear_osnr_db(target.launch_power_w, ase),
        total_osnr_db=total_osnr_db(target.launch_power_w, ase, nli),
        estimator=estimator,
    )
