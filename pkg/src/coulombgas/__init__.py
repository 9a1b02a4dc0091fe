"""Numerical toolkit for the point-charge planar Coulomb gas.

Closed-form droplet geometry, free-energy expansions with exact finite-N
determinant oracles, Laguerre large deviations, the Tracy-Widom distribution
via Painleve II, and Riemann-Hilbert orthogonal-polynomial asymptotics.
"""

__version__ = "0.1.0"
