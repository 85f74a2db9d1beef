"""Satellite-integrated MEC network modelling: topologies, latency, offloading plans."""

__version__ = "0.1.0"
