"""Certified Steinness decisions for flat Reinhardt-fibred bundles over annuli.

The bundle with monodromy ``M`` in GL_d(Z) over an annulus of modulus ``m`` is
Stein exactly when ``m log rho(M) <= 2 pi^2``; this package decides that
inequality rigorously and machine-checks the constructions around it.
"""
__version__ = "0.1.0"

from .errors import CertificationFailed, InputError, SteinlabError  # noqa: E402
from .intcore import IntMatrix, IntPolynomial, LatticeVector, char_poly  # noqa: E402
from .spectra import root_radius, spectral_profile  # noqa: E402
from .steinness import ModulusSpec, classify, critical_modulus, mu_threshold  # noqa: E402

__all__ = ["__version__", "SteinlabError", "InputError", "CertificationFailed", "IntMatrix",
           "IntPolynomial", "LatticeVector", "char_poly", "root_radius", "spectral_profile",
           "ModulusSpec", "classify", "critical_modulus", "mu_threshold"]
