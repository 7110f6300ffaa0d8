"""Flex-grid spectrum bookkeeping and first-fit channel placement.

Each link carries a fixed array of 12.5 GHz slots. A placed demand occupies
the same contiguous slice on every link of its path (spectrum continuity,
no conversion). The grid has a single writer; reads are safe concurrently.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .constants import C_BAND_SLOTS, DEFAULT_ROLL_OFF, GRID_START_THZ, SLOT_WIDTH_GHZ
from .errors import SpectrumStateError


@dataclass(frozen=True)
class SpectrumSlice:
    start_slot: int
    width_slots: int

    def __post_init__(self) -> None:
        if self.start_slot < 0 or self.width_slots < 1:
            raise SpectrumStateError(f"invalid slice {self}")

    @property
    def stop_slot(self) -> int:
        return self.start_slot + self.width_slots

    @property
    def center_thz(self) -> float:
        center_slots = self.start_slot + self.width_slots / 2.0
        return GRID_START_THZ + center_slots * SLOT_WIDTH_GHZ / 1000.0


def width_in_slots(symbol_rate_gbaud: float, roll_off: float = DEFAULT_ROLL_OFF) -> int:
    """Smallest slot count covering the shaped channel bandwidth Rs (1 + roll-off)."""
    return max(1, math.ceil(symbol_rate_gbaud * (1.0 + roll_off) / SLOT_WIDTH_GHZ))


class SpectrumGrid:
    """Per-link slot occupancy with a reverse demand index."""

    def __init__(self, link_ids: Iterable[str], n_slots: int = C_BAND_SLOTS):
        self.n_slots = n_slots
        self._occupied: dict[str, np.ndarray] = {
            lid: np.zeros(n_slots, dtype=bool) for lid in link_ids
        }
        self._owner: dict[str, dict[int, str]] = {lid: {} for lid in self._occupied}
        self._assignments: dict[str, tuple[SpectrumSlice, tuple[str, ...]]] = {}

    # -- queries ------------------------------------------------------------

    def assignment(self, demand_id: str) -> tuple[SpectrumSlice, tuple[str, ...]] | None:
        return self._assignments.get(demand_id)

    def demands_on_link(self, link_id: str) -> list[str]:
        """Demand ids occupying the link, ordered by start slot."""
        seen: dict[str, int] = {}
        for slot in sorted(self._owner[link_id]):
            owner = self._owner[link_id][slot]
            seen.setdefault(owner, slot)
        return sorted(seen, key=seen.get)

    def free_mask(self, path: Sequence[str]) -> np.ndarray:
        mask = np.ones(self.n_slots, dtype=bool)
        for lid in path:
            mask &= ~self._occupied[lid]
        return mask

    def occupied_slot_count(self) -> int:
        return int(sum(arr.sum() for arr in self._occupied.values()))

    def occupied_bandwidth_thz(self) -> float:
        """Occupied spectrum summed over links (a slice on k links counts k times)."""
        return self.occupied_slot_count() * SLOT_WIDTH_GHZ / 1000.0

    def snapshot(self) -> dict[str, bytes]:
        """Byte-exact occupancy image, for audits and round-trip tests."""
        return {lid: arr.tobytes() for lid, arr in self._occupied.items()}

    # -- mutations ----------------------------------------------------------

    def first_fit_place(
        self, demand_id: str, path: Sequence[str], width_slots: int
    ) -> SpectrumSlice | None:
        """Occupy the lowest feasible slice on every link of the path.

        Returns None when no start index offers ``width_slots`` contiguous
        free slots on all links (the caller blocks the demand).
        """
        if width_slots < 1:
            raise SpectrumStateError(f"width must be >= 1 slot, got {width_slots}")
        if demand_id in self._assignments:
            raise SpectrumStateError(f"demand {demand_id} already holds spectrum")
        free = self.free_mask(path)
        start = _lowest_fit(free, width_slots)
        if start is None:
            return None
        slice_ = SpectrumSlice(start, width_slots)
        for lid in path:
            self._occupied[lid][slice_.start_slot : slice_.stop_slot] = True
            owners = self._owner[lid]
            for slot in range(slice_.start_slot, slice_.stop_slot):
                owners[slot] = demand_id
        self._assignments[demand_id] = (slice_, tuple(path))
        if __debug__:
            self._check_invariants()
        return slice_

    def release_channel(self, demand_id: str) -> None:
        """Free the demand's slice on every link of its path."""
        try:
            slice_, path = self._assignments.pop(demand_id)
        except KeyError:
            raise SpectrumStateError(f"demand {demand_id} holds no spectrum") from None
        for lid in path:
            self._occupied[lid][slice_.start_slot : slice_.stop_slot] = False
            owners = self._owner[lid]
            for slot in range(slice_.start_slot, slice_.stop_slot):
                owners.pop(slot, None)
        if __debug__:
            self._check_invariants()

    # -- internals ----------------------------------------------------------

    def _check_invariants(self) -> None:
        for lid, arr in self._occupied.items():
            owned = set(self._owner[lid])
            marked = set(np.flatnonzero(arr).tolist())
            assert owned == marked, f"owner map out of sync on link {lid}"
        for demand_id, (slice_, path) in self._assignments.items():
            for lid in path:
                for slot in range(slice_.start_slot, slice_.stop_slot):
                    assert self._owner[lid].get(slot) == demand_id, (
                        f"slot {slot} on {lid} not owned by {demand_id}"
                    )

    def dump_csv(self, path: str | Path) -> None:
        """Write one row per occupied slot: link_id, slot_index, demand_id."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["link_id", "slot_index", "demand_id"])
            for lid in sorted(self._owner):
                for slot in sorted(self._owner[lid]):
                    writer.writerow([lid, slot, self._owner[lid][slot]])


def _lowest_fit(free: np.ndarray, width: int) -> int | None:
    """Lowest start index of ``width`` consecutive True entries, else None."""
    run = 0
    for idx, ok in enumerate(free):
        run = run + 1 if ok else 0
        if run >= width:
            return idx - width + 1
    return None
