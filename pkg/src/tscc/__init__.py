"""Topological subsystem color codes with gauge-fixing erasure decoders."""

__version__ = "0.1.0"
