"""
Physical constants in the package's unit system.

Frequencies are angular, in rad/ps. Energies are quoted as hbar*omega with
hbar = 1, so an energy and its frequency share the same number.
"""

import math

from scipy import constants as codata

# hbar / k_B in ps*K (about 7.6382)
HBAR_OVER_KB_PS_K = codata.hbar / codata.k * 1e12

# 1 cm^-1 expressed in rad/ps: 2*pi*c*(1 cm^-1)
WAVENUMBER_TO_RADPS = 2.0 * math.pi * codata.c * 100.0 * 1e-12
