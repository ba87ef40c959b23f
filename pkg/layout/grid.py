"""ASCII kitchen layouts: parsing and validation."""

import logging
import os
from dataclasses import dataclass
from enum import Enum

from config import (
    CELL_COUNTER, CELL_FLOOR, STATION_CHARS, DEFAULT_STATION_CAPACITY
)
from errors import (
    EmptyLayout, RaggedGrid, UnknownCell, NoFloor, UnreachableWorkstation,
    InvalidHeader, ValidationError
)
from layouts import get_layout

logger = logging.getLogger(__name__)

Coord = tuple  # (row, col)

NEIGHBOR_OFFSETS = ((-1, 0), (0, -1), (0, 1), (1, 0))


class CellKind(Enum):
    FLOOR = 'floor'
    COUNTER = 'counter'
    WORKSTATION = 'workstation'


@dataclass(frozen=True)
class Cell:
    kind: CellKind
    station: str = None
    capacity: int = 0

    @property
    def is_floor(self) -> bool:
        return self.kind is CellKind.FLOOR

    @property
    def is_station(self) -> bool:
        return self.kind is CellKind.WORKSTATION


FLOOR = Cell(CellKind.FLOOR)
COUNTER = Cell(CellKind.COUNTER)


@dataclass(frozen=True)
class LayoutSpec:
    """Rectangular grid of cells; workstation cells carry a capacity c(v)."""

    width: int
    height: int
    cells: tuple

    def cell(self, coord: Coord) -> Cell:
        row, col = coord
        return self.cells[row][col]

    def in_bounds(self, coord: Coord) -> bool:
        row, col = coord
        return 0 <= row < self.height and 0 <= col < self.width

    def coords(self):
        for row in range(self.height):
            for col in range(self.width):
                yield (row, col)

    def neighbors(self, coord: Coord):
        """4-neighbourhood in lexicographic order, clipped to the grid."""
        row, col = coord
        for dr, dc in NEIGHBOR_OFFSETS:
            other = (row + dr, col + dc)
            if self.in_bounds(other):
                yield other

    def floor_cells(self) -> list:
        return [c for c in self.coords() if self.cell(c).is_floor]

    def stations(self, kind: str = None) -> list:
        return [
            c for c in self.coords()
            if self.cell(c).is_station and (kind is None or self.cell(c).station == kind)
        ]

    def with_cells(self, updates: dict) -> 'LayoutSpec':
        """Copy with some cells replaced; updates maps coord -> Cell."""
        rows = [list(r) for r in self.cells]
        for (row, col), cell in updates.items():
            rows[row][col] = cell
        return LayoutSpec(self.width, self.height, tuple(tuple(r) for r in rows))

    def to_text(self) -> str:
        """Inverse of parse_layout, including capacity headers."""
        kind_to_char = {kind: ch for ch, kind in STATION_CHARS.items()}
        headers = {}
        lines = []
        for r in range(self.height):
            chars = []
            for c in range(self.width):
                cell = self.cells[r][c]
                if cell.is_floor:
                    chars.append(CELL_FLOOR)
                elif cell.is_station:
                    ch = kind_to_char[cell.station]
                    chars.append(ch)
                    if cell.capacity != DEFAULT_STATION_CAPACITY:
                        headers[ch] = cell.capacity
                else:
                    chars.append(CELL_COUNTER)
            lines.append(''.join(chars))
        header_lines = [f"# capacity {ch} {cap}" for ch, cap in sorted(headers.items())]
        return '\n'.join(header_lines + lines)


def _parse_headers(lines: list) -> tuple:
    """Split leading '#' lines off; return (capacity overrides, grid lines)."""
    capacities = {}
    index = 0
    while index < len(lines) and lines[index].startswith('#'):
        line = lines[index]
        parts = line[1:].split()
        if parts and parts[0] == 'capacity':
            if len(parts) != 3 or parts[1] not in STATION_CHARS:
                raise InvalidHeader(line)
            try:
                value = int(parts[2])
            except ValueError:
                raise InvalidHeader(line)
            if value < 0:
                raise InvalidHeader(line)
            capacities[STATION_CHARS[parts[1]]] = value
        index += 1
    return capacities, lines[index:]


def parse_layout(text: str, capacities: dict = None) -> LayoutSpec:
    """Parse a layout grid.

    Args:
        text: grid rows separated by newlines, optionally preceded by
            '# capacity <char> <int>' header lines.
        capacities: station kind -> c(v), applied after the headers.
    """
    if not text or not text.strip('\n'):
        raise EmptyLayout()

    lines = text.split('\n')
    overrides, rows = _parse_headers(lines)
    if capacities:
        overrides.update(capacities)
    while rows and rows[-1] == '':
        rows.pop()
    # Windows line endings
    rows = [r[:-1] if r.endswith('\r') else r for r in rows]
    if not rows:
        raise EmptyLayout()

    width = len(rows[0])
    for r, line in enumerate(rows):
        if len(line) != width:
            raise RaggedGrid(r, width, len(line))

    cells = []
    for r, line in enumerate(rows):
        row_cells = []
        for c, ch in enumerate(line):
            if ch == CELL_FLOOR:
                row_cells.append(FLOOR)
            elif ch == CELL_COUNTER:
                row_cells.append(COUNTER)
            elif ch in STATION_CHARS:
                kind = STATION_CHARS[ch]
                row_cells.append(Cell(
                    CellKind.WORKSTATION, kind,
                    overrides.get(kind, DEFAULT_STATION_CAPACITY)))
            else:
                raise UnknownCell(ch, r, c)
        cells.append(tuple(row_cells))

    spec = LayoutSpec(width, len(rows), tuple(cells))
    validate_layout(spec)
    logger.debug(f"Parsed {spec.width}x{spec.height} layout, "
                 f"{len(spec.floor_cells())} floor cells")
    return spec


def validate_layout(spec: LayoutSpec):
    """Check the floor and workstation-reachability invariants."""
    if not spec.floor_cells():
        raise NoFloor()
    for coord in spec.stations():
        if not any(spec.cell(n).is_floor for n in spec.neighbors(coord)):
            raise UnreachableWorkstation(coord)


def load_layout(source: str) -> LayoutSpec:
    """Load a layout from a UTF-8 file path or a built-in layout name."""
    if os.path.isfile(source):
        with open(source, 'r', encoding='utf-8') as f:
            return parse_layout(f.read())
    text = get_layout(source)
    if text is None:
        raise ValidationError(f"no layout file or built-in layout named {source!r}")
    return parse_layout(text)
