"""arthurkit: extended multi-segments and local Arthur packets for Sp(2n) and SO(2n+1)."""

__version__ = "0.4.0"
