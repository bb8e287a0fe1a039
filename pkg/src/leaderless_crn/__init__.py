"""Leaderless chemical reaction networks for semilinear functions.

Compile a semilinear function, given as ordered affine pieces, into a CRN
whose initial configuration holds only input molecules; simulate it under
stochastic mass-action kinetics; and certify stable computation by
exhaustive reachability analysis on small inputs.
"""

__version__ = "0.1.0"
