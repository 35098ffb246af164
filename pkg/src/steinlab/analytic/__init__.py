"""Function-theoretic checks: series extension, Laurent extraction, gap sets,
witness certificates and the rectangle harmonic measure."""
from .series import (COSH, POLYNOMIAL, MonomialSection, SeriesSpec, StripPoint,
                     build_series_spec, delta_factor, monomial_section, omega_factor)
