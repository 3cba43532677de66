"""Physical constants (SI, CODATA 2018 exact or recommended values)."""

ELEMENTARY_CHARGE = 1.602176634e-19
"""Elementary charge in coulombs (exact)."""

ELECTRON_MASS = 9.1093837015e-31
"""Electron mass in kilograms."""

SPEED_OF_LIGHT = 299792458.0
"""Speed of light in vacuum in metres per second (exact)."""

VACUUM_PERMEABILITY = 1.25663706212e-6
"""Vacuum magnetic permeability in newtons per ampere squared."""
