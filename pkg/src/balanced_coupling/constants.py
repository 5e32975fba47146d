"""Physical constants (SI)."""

from scipy import constants as _c

HBAR = _c.hbar
TWO_PI = 2.0 * _c.pi
