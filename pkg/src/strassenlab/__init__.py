"""Simulation and verification toolkit for Gaussian functional limit laws.

Subpackages split along the objects they handle:

- ``cm_space``: Cameron-Martin models, inner products, nets, dual norms
- ``gaussian_sim``: exact-covariance samplers (Brownian, fractional, white noise)
- ``operators``: measure-preserving scaling families and mixing diagnostics
- ``chaos``: Wiener chaos functionals, homogeneity and tail checks
- ``limit_set``: compact limit-set statistics (containment, coverage, LIL)
- ``spde_kpz``: stochastic heat and KPZ scenarios
- ``cli``: scenario catalog and the ``strassenlab`` command
"""

__version__ = "0.1.0"

from . import chaos, cm_space, gaussian_sim, limit_set, operators, spde_kpz  # noqa: F401
