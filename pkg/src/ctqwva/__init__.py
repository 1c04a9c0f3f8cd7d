"""Simulation and analysis of variational algorithms whose mixers are quantum walks."""

__version__ = "0.1.0"
