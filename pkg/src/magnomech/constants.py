"""Physical constants (CODATA 2018 exact/recommended values)."""

import math

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
TWO_PI = 2.0 * math.pi

# YIG material defaults
YIG_SPIN_DENSITY = 4.22e27  # 1 / m^3
GYROMAGNETIC_RATIO = TWO_PI * 28e9  # rad / s / T
FE3_SPIN = 2.5
KERR_1MM = TWO_PI * 1e-10  # rad / s, for a 1 mm diameter sphere
