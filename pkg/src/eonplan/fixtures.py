"""Bundled fixtures: a small benchmark network and estimator test combs.

The desk network is a 10-node ring with chords, equal-split 80 km spans and
30 demands; it is small enough for the full-form estimator to plan in
minutes yet has enough distance spread to show rate stepping. The comb
fixtures are single-link channel layouts used to check estimator physics.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .catalog import constellation_kurtosis
from .qot import ChannelState
from .topology import (
    Demand,
    EqualSplit,
    Link,
    Topology,
    build_link,
    save_demands,
    save_topology,
    synthesize_topology,
)

DESK10_NODES = [(f"N{i:02d}", f"Node {i:02d}") for i in range(1, 11)]

DESK10_LINKS = [
    ("L01", "N01", "N02", 80.0),
    ("L02", "N02", "N03", 160.0),
    ("L03", "N03", "N04", 240.0),
    ("L04", "N04", "N05", 80.0),
    ("L05", "N05", "N06", 160.0),
    ("L06", "N06", "N07", 320.0),
    ("L07", "N07", "N08", 80.0),
    ("L08", "N08", "N09", 160.0),
    ("L09", "N09", "N10", 240.0),
    ("L10", "N10", "N01", 320.0),
    ("L11", "N01", "N05", 240.0),
    ("L12", "N03", "N08", 320.0),
    ("L13", "N02", "N07", 320.0),
    ("L14", "N05", "N09", 240.0),
]


def desk10_topology() -> Topology:
    return synthesize_topology(DESK10_NODES, DESK10_LINKS, EqualSplit(80.0))


def desk10_demands() -> list[Demand]:
    """30 of the 45 node pairs, every third pair dropped for variety."""
    ids = sorted(n for n, _ in DESK10_NODES)
    pairs = [
        (src, dst) for i, src in enumerate(ids) for dst in ids[i + 1 :]
    ]
    kept = [pair for idx, pair in enumerate(pairs) if idx % 3 != 2]
    return [Demand(f"{src}-{dst}", src, dst) for src, dst in kept]


DISJOINT_NODES = [(f"M{i}", f"Site {i}") for i in range(1, 6)]
DISJOINT_LINKS = [
    ("K1", "M1", "M2", 160.0),
    ("K2", "M2", "M3", 160.0),
    ("K3", "M3", "M4", 160.0),
    ("K4", "M4", "M5", 160.0),
]


def disjoint_topology() -> Topology:
    return synthesize_topology(DISJOINT_NODES, DISJOINT_LINKS, EqualSplit(80.0))


def disjoint_demands() -> list[Demand]:
    """Two demands on link-disjoint paths: no interference coupling."""
    return [Demand("M1-M2", "M1", "M2"), Demand("M4-M5", "M4", "M5")]


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(resources.files("eonplan").joinpath("data", name))


def desk10_topology_path() -> Path:
    return data_path("desk10_topology.json")


def desk10_demands_path() -> Path:
    return data_path("desk10_demands.csv")


def write_fixture_files(directory: str | Path) -> list[Path]:
    """Regenerate the bundled fixture files (used at development time)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, topo, demands in [
        ("desk10", desk10_topology(), desk10_demands()),
        ("disjoint", disjoint_topology(), disjoint_demands()),
    ]:
        topo_path = directory / f"{name}_topology.json"
        dem_path = directory / f"{name}_demands.csv"
        save_topology(topo, topo_path)
        save_demands(demands, dem_path)
        written += [topo_path, dem_path]
    return written


# --------------------------------------------------------------------------
# Estimator comb fixtures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CombFixture:
    """A single-link channel comb for estimator checks."""

    name: str
    link: Link
    channels: tuple[ChannelState, ...]
    target: ChannelState

    @property
    def channels_by_link(self) -> dict[str, tuple[ChannelState, ...]]:
        return {self.link.id: self.channels}


def comb_fixture(
    name: str,
    n_channels: int = 5,
    spacing_ghz: float = 50.0,
    n_spans: int = 3,
    span_km: float = 80.0,
    symbol_rate_gbaud: float = 32.0,
    bits_per_symbol: int = 2,
    launch_dbm: float = 0.0,
) -> CombFixture:
    link = build_link("F1", "A", "B", span_km * n_spans, EqualSplit(span_km))
    kurtosis = constellation_kurtosis(bits_per_symbol)
    launch_w = 1e-3 * 10.0 ** (launch_dbm / 10.0)
    half = (n_channels - 1) // 2
    channels = tuple(
        ChannelState(
            center_thz=193.4 + k * spacing_ghz / 1000.0,
            launch_power_w=launch_w,
            symbol_rate_gbaud=symbol_rate_gbaud,
            kurtosis=kurtosis,
            demand_id=f"ch{k + half}",
        )
        for k in range(-half, n_channels - half)
    )
    return CombFixture(name, link, channels, channels[half])


def estimator_ordering_fixtures() -> list[CombFixture]:
    """Multi-channel QPSK/16QAM combs on which the full form must not exceed
    the closed form."""
    cases = []
    for bits, label in ((2, "qpsk"), (4, "16qam")):
        for n_spans in (1, 3):
            for spacing in (37.5, 50.0):
                cases.append(
                    comb_fixture(
                        f"{label}-{n_spans}span-{spacing:g}ghz",
                        n_channels=5,
                        spacing_ghz=spacing,
                        n_spans=n_spans,
                        bits_per_symbol=bits,
                    )
                )
    cases.append(comb_fixture("qpsk-9ch-dense", n_channels=9, spacing_ghz=37.5, n_spans=4))
    cases.append(comb_fixture("16qam-5span", n_channels=5, spacing_ghz=50.0, n_spans=5, bits_per_symbol=4))
    return cases
