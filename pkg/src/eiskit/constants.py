"""Physical constants and the angular-factor conventions used throughout.

The equivalent-circuit model in :mod:`eiskit.circuit` uses a fixed factor
convention for each branch reactance.  The table below is the single
authoritative statement of those factors; the implementation follows it
verbatim and the unit tests pin it.

    branch                      reactance                factor
    --------------------------  -----------------------  -------
    double layer (series R-C)   -j / (pi * f * C_dl)     pi
    solution capacitance        -j / (2 * pi * f * C_sol) 2*pi
    stray capacitance           -j / (pi * f * C_stray)  pi
    stray inductance            +2j * pi * f * L_stray   2*pi

Mixing the factors up changes every derived impedance, so do not
"normalise" them to a single convention.
"""

from __future__ import annotations

import math

# Package version; embedded in every output file (kept in sync with the
# distribution metadata).
TOOL_VERSION: str = "0.1.0"

# Boltzmann constant, J/K (2019 SI exact value).
BOLTZMANN: float = 1.380649e-23

# Vacuum permittivity, F/m (CODATA 2018).
VACUUM_PERMITTIVITY: float = 8.8541878128e-12

TWO_PI: float = 2.0 * math.pi
