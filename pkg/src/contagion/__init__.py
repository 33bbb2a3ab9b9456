"""Spatial SIS epidemic with site contamination: simulator and analysis tools."""

__version__ = "0.1.0"
