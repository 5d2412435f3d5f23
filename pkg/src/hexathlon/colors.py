"""Global color-code table shared by observations, maps, and frame export.

Codes 6 and 7 are observer-relative: a body owned by the observing side renders
as 6, the other side's as 7. Map files and replay frames use side A's view.
"""
from __future__ import annotations

COLOR_BACKGROUND = 0
COLOR_STICKY = 1
COLOR_ELASTIC = 2
COLOR_SENSOR = 3
COLOR_SELF = 4
COLOR_OPPONENT = 5
COLOR_OWN_OBJECT = 6
COLOR_OPP_OBJECT = 7
COLOR_NEUTRAL_OBJECT = 8

ALL_CODES = frozenset(range(9))

# RGB used by the replay frame exporter.
RGB_TABLE: dict[int, tuple[int, int, int]] = {
    COLOR_BACKGROUND: (245, 245, 245),
    COLOR_STICKY: (20, 20, 20),
    COLOR_ELASTIC: (128, 128, 128),
    COLOR_SENSOR: (220, 50, 50),
    COLOR_SELF: (40, 160, 70),
    COLOR_OPPONENT: (60, 90, 200),
    COLOR_OWN_OBJECT: (120, 210, 140),
    COLOR_OPP_OBJECT: (140, 160, 230),
    COLOR_NEUTRAL_OBJECT: (210, 160, 40),
}


def body_color_code(body_kind: str, body_id: int, owner_side: str | None,
                    viewer_id: int | None, observer_side: str | None) -> int:
    """Observer-relative color for a dynamic body."""
    if viewer_id is not None and body_id == viewer_id:
        return COLOR_SELF
    if body_kind == "agent":
        return COLOR_OPPONENT
    if owner_side is None:
        return COLOR_NEUTRAL_OBJECT
    return COLOR_OWN_OBJECT if owner_side == observer_side else COLOR_OPP_OBJECT
