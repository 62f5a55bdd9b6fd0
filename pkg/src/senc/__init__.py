"""Fit sensory-encoding models (BEC, FMC-weighted BEC, LNP) to speed / EDA sessions
and score them against the Infomax (stimulus CDF) response."""

__version__ = "0.1.0"
