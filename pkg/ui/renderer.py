"""Pygame rendering of layouts with an edge-betweenness heat overlay."""

import logging
import os

os.environ.setdefault('SDL_VIDEODRIVER', 'dummy')
os.environ.setdefault('PYGAME_HIDE_SUPPORT_PROMPT', '1')

import pygame

from config import (
    TILE_SIZE, COLOR_WHITE, COLOR_BLACK, COLOR_GRAY, COLOR_DARK_GRAY,
    COLOR_FLOOR, COLOR_COUNTER, COLOR_HEAT_LOW, COLOR_HEAT_HIGH, STATION_COLORS
)
from layout.graph import LayoutGraph, build_graph, edge_betweenness
from layout.grid import LayoutSpec

logger = logging.getLogger(__name__)

STATION_LABELS = {kind: kind[0].upper() for kind in STATION_COLORS}


def heat_color(value: float, peak: float) -> tuple:
    """Blend from the low to the high heat colour by value / peak."""
    ratio = 0.0 if peak <= 0 else max(0.0, min(1.0, value / peak))
    return tuple(int(lo + (hi - lo) * ratio) for lo, hi in zip(COLOR_HEAT_LOW, COLOR_HEAT_HIGH))


class Renderer:
    """Draws one layout onto an off-screen surface."""

    def __init__(self, spec: LayoutSpec, tile_size: int = TILE_SIZE):
        if not pygame.font.get_init():
            pygame.font.init()
        self.spec = spec
        self.tile = tile_size
        self.surface = pygame.Surface((spec.width * tile_size, spec.height * tile_size))
        self.font_small = pygame.font.Font(None, max(12, tile_size // 3))
        self.font_medium = pygame.font.Font(None, max(16, tile_size // 2))

    def cell_rect(self, coord) -> pygame.Rect:
        row, col = coord
        return pygame.Rect(col * self.tile, row * self.tile, self.tile, self.tile)

    def cell_center(self, coord) -> tuple:
        return self.cell_rect(coord).center

    def clear(self):
        self.surface.fill(COLOR_DARK_GRAY)

    def draw_grid(self):
        for coord in self.spec.coords():
            cell = self.spec.cell(coord)
            rect = self.cell_rect(coord)
            if cell.is_floor:
                pygame.draw.rect(self.surface, COLOR_FLOOR, rect)
            elif cell.is_station:
                pygame.draw.rect(self.surface, COLOR_COUNTER, rect)
                inner = rect.inflate(-self.tile // 4, -self.tile // 4)
                pygame.draw.rect(self.surface, STATION_COLORS[cell.station], inner)
                pygame.draw.rect(self.surface, COLOR_BLACK, inner, 2)
            else:
                pygame.draw.rect(self.surface, COLOR_COUNTER, rect)
            pygame.draw.rect(self.surface, COLOR_GRAY, rect, 1)

    def draw_station_labels(self):
        for coord in self.spec.stations():
            cell = self.spec.cell(coord)
            text = f"{STATION_LABELS[cell.station]}{cell.capacity}"
            label = self.font_medium.render(text, True, COLOR_BLACK)
            self.surface.blit(label, label.get_rect(center=self.cell_center(coord)))

    def draw_heat(self, centrality: dict):
        """Edge betweenness as coloured strokes; reciprocal pairs share the larger value."""
        if not centrality:
            return
        peak = max(centrality.values())
        merged = {}
        for (u, v), value in centrality.items():
            key = tuple(sorted((u, v)))
            merged[key] = max(merged.get(key, 0.0), value)
        for (u, v), value in sorted(merged.items()):
            width = 2 + int(round(6 * (value / peak if peak > 0 else 0.0)))
            pygame.draw.line(self.surface, heat_color(value, peak),
                             self.cell_center(u), self.cell_center(v), width)

    def draw_routes(self, task):
        """Subtask routes as thin polylines with their id at the start."""
        for sub in task.subtasks:
            if len(sub.route) < 2:
                continue
            points = [self.cell_center(node) for node in sub.route]
            pygame.draw.lines(self.surface, COLOR_BLACK, False, points, 2)
            label = self.font_small.render(sub.id, True, COLOR_WHITE, COLOR_BLACK)
            self.surface.blit(label, points[0])

    def render(self, graph: LayoutGraph = None, centrality: dict = None, task=None) -> pygame.Surface:
        graph = graph or build_graph(self.spec)
        centrality = edge_betweenness(graph) if centrality is None else centrality
        self.clear()
        self.draw_grid()
        self.draw_heat(centrality)
        self.draw_station_labels()
        if task is not None:
            self.draw_routes(task)
        return self.surface


def render_layout_png(spec: LayoutSpec, out_path: str, task=None, tile_size: int = TILE_SIZE) -> tuple:
    """Write a PNG of the layout; returns the image size in pixels."""
    surface = Renderer(spec, tile_size).render(task=task)
    pygame.image.save(surface, out_path)
    logger.info(f"Rendered {spec.width}x{spec.height} layout to {out_path}")
    return surface.get_size()
