from __future__ import annotations

from magic_selftest.coloring.schedule import PairSchedule, color_of, edges_of_color, wrap

__all__ = ["PairSchedule", "color_of", "edges_of_color", "wrap"]
