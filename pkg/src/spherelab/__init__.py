"""spherelab: a cross-checking laboratory for 3-sphere / 7-sphere
correlation models, a brute-force quantum oracle, a nonlinear constraint
solver, and seeded hidden-orientation ensembles."""

from . import cli, ga3, geometry, identities, lrmodel, mcsim, qmref, sphere7

__all__ = ["cli", "ga3", "geometry", "identities", "lrmodel", "mcsim", "qmref", "sphere7"]

__version__ = "0.1.0"
