"""
chern-fqh - Exact Chern characters of multilayer fractional quantum Hall bundles.

This package computes the Chern character, rank (ground-state degeneracy) and
conductance of the multilayer wavefunction bundle over Pic^d(C) in exact rational
arithmetic, once by brute-force Berezin integration in a Grassmann algebra and once
by the closed-form sums, and analyzes configurations (shift formula, rank
vanishing, particle maximization, large-field asymptotics).
"""

__version__ = "0.1.0"
