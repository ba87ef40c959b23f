"""UI package - layout rendering."""

from .renderer import Renderer, render_layout_png
