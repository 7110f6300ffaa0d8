"""Transceiver configuration catalog.

A configuration is a (data rate, modulation, FEC overhead) triple with a
derived symbol rate, channel width, minimum required OSNR and constellation
kurtosis. The catalog is the cross product of the supported parameter sets,
filtered to the transceiver's symbol-rate window and ordered for greedy
selection: highest data rate first, narrowest channel second.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import erfc, erfcinv

from .constants import DEFAULT_ROLL_OFF, SLOT_WIDTH_GHZ
from .errors import CatalogError
from .spectrum import width_in_slots

logger = logging.getLogger(__name__)

DEFAULT_DATA_RATES_GBPS = tuple(range(100, 601, 50))
DEFAULT_BITS_PER_SYMBOL = (2, 3, 4, 5, 6)
DEFAULT_FEC_OVERHEADS = (0.0, 0.15, 0.27)
DEFAULT_BAUD_WINDOW = (32.0, 72.0)
DEFAULT_MARGIN_DB = 2.0

#: Pre-FEC BER each FEC class can correct; 0% overhead is effectively uncoded.
FEC_BER_THRESHOLDS = {0.0: 1.0e-12, 0.15: 2.2e-2, 0.27: 4.0e-2}

MODULATION_NAMES = {2: "QPSK", 3: "8QAM", 4: "16QAM", 5: "32QAM", 6: "64QAM"}


@dataclass(frozen=True)
class Configuration:
    data_rate_gbps: int
    bits_per_symbol: int
    fec_overhead: float
    symbol_rate_gbaud: float
    width_slots: int
    required_osnr_db: float
    kurtosis: float

    @property
    def label(self) -> str:
        fec_pct = round(self.fec_overhead * 100)
        return f"{self.data_rate_gbps}G-{MODULATION_NAMES[self.bits_per_symbol]}-{fec_pct}"


def constellation_points(bits_per_symbol: int) -> np.ndarray:
    """Complex constellation points (unnormalized) for 2..6 bits per symbol.

    Square QAM for even sizes, rectangular 8QAM and cross 32QAM otherwise.
    """
    if bits_per_symbol == 2:
        levels = np.array([-1.0, 1.0])
        return (levels[:, None] + 1j * levels[None, :]).ravel()
    if bits_per_symbol == 3:
        re = np.array([-3.0, -1.0, 1.0, 3.0])
        im = np.array([-1.0, 1.0])
        return (re[:, None] + 1j * im[None, :]).ravel()
    if bits_per_symbol == 4:
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
        return (levels[:, None] + 1j * levels[None, :]).ravel()
    if bits_per_symbol == 5:
        levels = np.array([-5.0, -3.0, -1.0, 1.0, 3.0, 5.0])
        grid = (levels[:, None] + 1j * levels[None, :]).ravel()
        return grid[np.abs(grid.real * grid.imag) != 25.0]
    if bits_per_symbol == 6:
        levels = np.array([-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0])
        return (levels[:, None] + 1j * levels[None, :]).ravel()
    raise CatalogError(f"unsupported constellation size: {bits_per_symbol} bits/symbol")


def constellation_kurtosis(bits_per_symbol: int) -> float:
    """Excess kurtosis of the constellation: E|a|^4 / E|a|^2 ^2 - 2.

    Zero for a Gaussian reference, -1 for any constant-modulus format.
    """
    pts = constellation_points(bits_per_symbol)
    p2 = np.mean(np.abs(pts) ** 2)
    p4 = np.mean(np.abs(pts) ** 4)
    return float(p4 / p2**2 - 2.0)


def _q_function(x: float) -> float:
    return 0.5 * erfc(x / math.sqrt(2.0))


def snr_threshold_db(bits_per_symbol: int, pre_fec_ber: float) -> float:
    """SNR (Es/N0, dB) at which M-QAM reaches the target pre-FEC BER.

    Inverts BER = (4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 SNR/(M-1))), which
    reduces to BER = Q(sqrt(SNR)) for QPSK.
    """
    m = 2**bits_per_symbol
    prefactor = (4.0 / bits_per_symbol) * (1.0 - 1.0 / math.sqrt(m))
    q_target = pre_fec_ber / prefactor
    if not 0.0 < q_target < 0.5:
        raise CatalogError(
            f"BER target {pre_fec_ber} unreachable for {MODULATION_NAMES[bits_per_symbol]}"
        )
    x = math.sqrt(2.0) * float(erfcinv(2.0 * q_target))
    snr = x**2 * (m - 1) / 3.0
    return 10.0 * math.log10(snr)


def required_osnr_db(
    bits_per_symbol: int,
    fec_overhead: float,
    symbol_rate_gbaud: float,
    margin_db: float = DEFAULT_MARGIN_DB,
) -> float:
    """Minimum OSNR (12.5 GHz reference) for the mode to reach its FEC threshold.

    The SNR threshold is referred from the symbol-rate bandwidth to the 12.5
    GHz noise reference, then padded by the implementation margin.
    """
    try:
        ber = FEC_BER_THRESHOLDS[fec_overhead]
    except KeyError:
        raise CatalogError(f"no BER threshold defined for FEC overhead {fec_overhead}")
    bandwidth_term = 10.0 * math.log10(symbol_rate_gbaud / SLOT_WIDTH_GHZ)
    return snr_threshold_db(bits_per_symbol, ber) + bandwidth_term + margin_db


def symbol_rate_gbaud(data_rate_gbps: float, bits_per_symbol: int, fec_overhead: float) -> float:
    """Dual-polarization symbol rate: R (1+OH) / (2 b)."""
    return data_rate_gbps * (1.0 + fec_overhead) / (2.0 * bits_per_symbol)


def generate_catalog(
    rates_gbps: Sequence[int] = DEFAULT_DATA_RATES_GBPS,
    bits_range: Sequence[int] = DEFAULT_BITS_PER_SYMBOL,
    fec_set: Sequence[float] = DEFAULT_FEC_OVERHEADS,
    baud_window: tuple[float, float] = DEFAULT_BAUD_WINDOW,
    margin_db: float = DEFAULT_MARGIN_DB,
    roll_off: float = DEFAULT_ROLL_OFF,
) -> list[Configuration]:
    """Cross product of rates x modulations x FEC, filtered to the baud window."""
    if not (rates_gbps and bits_range and fec_set):
        raise CatalogError("catalog parameter sets must be non-empty")
    lo, hi = baud_window
    configs = []
    for rate in rates_gbps:
        for bits in bits_range:
            for fec in fec_set:
                rs = symbol_rate_gbaud(rate, bits, fec)
                if not lo <= rs <= hi:
                    continue
                configs.append(
                    Configuration(
                        data_rate_gbps=rate,
                        bits_per_symbol=bits,
                        fec_overhead=fec,
                        symbol_rate_gbaud=rs,
                        width_slots=width_in_slots(rs, roll_off),
                        required_osnr_db=required_osnr_db(bits, fec, rs, margin_db),
                        kurtosis=constellation_kurtosis(bits),
                    )
                )
    if not configs:
        raise CatalogError("no configuration satisfies the symbol-rate window")
    ordered = order_configurations(configs)
    logger.info("generated %d transceiver configurations", len(ordered))
    return ordered


def order_configurations(configs: Iterable[Configuration]) -> list[Configuration]:
    """Greedy selection order: data rate desc, channel width asc, OSNR asc; stable."""
    return sorted(
        configs,
        key=lambda c: (-c.data_rate_gbps, c.width_slots, c.required_osnr_db),
    )


def save_catalog(configs: Iterable[Configuration], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "data_rate_gbps",
                "bits_per_symbol",
                "fec_overhead",
                "symbol_rate_gbaud",
                "width_slots",
                "required_osnr_db",
            ]
        )
        for c in configs:
            writer.writerow(
                [
                    c.data_rate_gbps,
                    c.bits_per_symbol,
                    c.fec_overhead,
                    c.symbol_rate_gbaud,
                    c.width_slots,
                    c.required_osnr_db,
                ]
            )


def load_catalog(path: str | Path) -> list[Configuration]:
    """Load a catalog CSV, e.g. a vendor-supplied required-OSNR override."""
    configs = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                bits = int(row["bits_per_symbol"])
                configs.append(
                    Configuration(
                        data_rate_gbps=int(row["data_rate_gbps"]),
                        bits_per_symbol=bits,
                        fec_overhead=float(row["fec_overhead"]),
                        symbol_rate_gbaud=float(row["symbol_rate_gbaud"]),
                        width_slots=int(row["width_slots"]),
                        required_osnr_db=float(row["required_osnr_db"]),
                        kurtosis=constellation_kurtosis(bits),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise CatalogError(f"bad catalog row {row!r}: {exc}") from exc
    if not configs:
        raise CatalogError(f"catalog file {path} contains no configurations")
    return order_configurations(configs)


def with_margin(configs: Iterable[Configuration], extra_margin_db: float) -> list[Configuration]:
    """Copy of the catalog with a uniform extra OSNR margin."""
    return [
        replace(c, required_osnr_db=c.required_osnr_db + extra_margin_db) for c in configs
    ]
