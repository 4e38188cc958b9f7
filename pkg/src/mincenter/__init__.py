"""Minimal centers of attraction of motions of semiflows, estimated from sampled orbits."""
__version__ = "0.1.0"
