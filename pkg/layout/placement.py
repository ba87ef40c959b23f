"""Random workstation placement over a fixed floor plan."""

import logging

import numpy as np

from layout.grid import LayoutSpec, COUNTER

logger = logging.getLogger(__name__)


def placement_slots(spec: LayoutSpec) -> list:
    """Non-floor cells that touch floor: where a workstation may stand."""
    return [
        coord for coord in spec.coords()
        if not spec.cell(coord).is_floor
        and any(spec.cell(n).is_floor for n in spec.neighbors(coord))
    ]


def randomize_placement(spec: LayoutSpec, rng: np.random.Generator) -> LayoutSpec:
    """Shuffle every workstation onto a random slot.

    The multiset of station kinds and their capacities is preserved; cells
    the stations leave become counters.
    """
    stations = spec.stations()
    slots = placement_slots(spec)
    chosen = rng.choice(len(slots), size=len(stations), replace=False)
    targets = [slots[int(i)] for i in chosen]

    updates = {coord: COUNTER for coord in stations}
    for station, target in zip(stations, targets):
        updates[target] = spec.cell(station)
    moved = spec.with_cells(updates)
    logger.debug(f"Placed {len(stations)} workstations on {len(slots)} slots")
    return moved
