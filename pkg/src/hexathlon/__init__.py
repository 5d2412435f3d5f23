"""hexathlon: a deterministic 2D two-player sports simulator and tournament harness."""

__version__ = "0.1.0"

PROTOCOL_VERSION = 1
