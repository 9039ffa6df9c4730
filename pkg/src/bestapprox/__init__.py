"""Exact-arithmetic toolkit for best Diophantine approximations.

Library layout:
    exactcore  exact scalars, certified intervals, integer-vector geometry
    cf1d       one-dimensional continued fractions
    simul      simultaneous best-approximation enumeration and volume checks
    linform    linear-form enumeration, criteria report, reversal transform
    exponents  exponent estimates, the growth-equation root, chain checks
    synth      the inductive synthesizer of certified non-badly-approximable
               targets with bounded remainder ratios
    cli        command-line front end with deterministic JSON reports
"""

__version__ = "0.1.0"
