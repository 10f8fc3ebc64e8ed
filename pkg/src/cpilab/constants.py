"""Physical constants. All internal quantities are SI."""

import math

#: Speed of light in vacuum, m/s (exact).
C_VACUUM = 299_792_458.0

TWO_PI = 2.0 * math.pi

#: FWHM of a Gaussian = FWHM_TO_SIGMA^-1 * sigma; sigma = FWHM / (2 sqrt(2 ln 2)).
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
