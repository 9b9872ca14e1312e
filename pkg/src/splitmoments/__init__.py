"""Exact and statistical verification of centered moments of low-lying-zero
statistics for sign-split orthogonal families.

Subpackages / modules:

- ``exactpoly``  exact piecewise-polynomial algebra over rationals
- ``testfn``     admissible test functions (Fejer family)
- ``moments``    closed-form moment quantities, two exact routes
- ``quadrature`` floating-point oracle recomputations
- ``sop``        brute-force combinatorics (systems of parameters, t-classes)
- ``linfeas``    exact Fourier-Motzkin feasibility
- ``rmt``        Haar Monte Carlo over SO(even)/SO(odd)
- ``arith``      Ramanujan/Gauss/Kloosterman sums and identities
- ``vanishing``  order-of-vanishing bounds
- ``cli``        command line driver
"""

from .exactpoly import PiecewisePoly
from .testfn import TestFunction, fejer

__all__ = ["PiecewisePoly", "TestFunction", "fejer"]

__version__ = "0.1.0"
