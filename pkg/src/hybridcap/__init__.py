"""Capacity expansion with co-located VRE, inverter, grid and storage sizing."""

__version__ = "0.1.0"
