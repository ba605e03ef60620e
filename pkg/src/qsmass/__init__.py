"""Quasi-spherical flow, quasi-local mass and Killing-spinor identities in hyperbolic space."""

__version__ = "0.1.0"
