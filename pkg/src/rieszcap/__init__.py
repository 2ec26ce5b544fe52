"""Equilibrium measures on the d-sphere under axis-supported external fields.

Closed-form signed equilibria, balayage densities, support-cap solvers and
independent numerical verification for Riesz kernels |x-y|^(-s) with
d-2 <= s < d and the planar logarithmic kernel.
"""

__version__ = "0.1.0"
