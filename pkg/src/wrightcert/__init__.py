"""Rigorous enclosure of slowly oscillating periodic solutions of Wright's
equation in Fourier coefficient space.

The package certifies zeros of the periodic-orbit functional with an
infinite-dimensional Krawczyk operator over interval cubes, and drives a
branch-and-prune search over the parameter range of interest.
"""

__version__ = "0.1.0"
