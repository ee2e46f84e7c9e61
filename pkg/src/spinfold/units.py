"""Physical constants and unit conversions used by the dynamics code.

Energies in the dynamics layer are quoted in GHz (meaning E/h), times in
ns, temperatures in mK, angular frequencies in rad/s.  Everything that
crosses between those systems goes through this module.
"""

import math

# CODATA exact values (SI)
H_PLANCK = 6.62607015e-34      # J / Hz
HBAR = H_PLANCK / (2.0 * math.pi)
K_BOLTZMANN = 1.380649e-23     # J / K
PHI0 = 2.067833848e-15         # flux quantum, Wb

# k_B / h in GHz per mK: temperature-to-frequency conversion
KB_GHZ_PER_MK = K_BOLTZMANN * 1e-3 / H_PLANCK / 1e9


def mk_to_ghz(t_mk: float) -> float:
    """Thermal energy k_B T of a temperature in mK, expressed in GHz."""
    return t_mk * KB_GHZ_PER_MK


def ghz_to_mk(f_ghz: float) -> float:
    """Temperature in mK whose k_B T matches an energy in GHz."""
    return f_ghz / KB_GHZ_PER_MK


def ghz_to_joule(f_ghz: float) -> float:
    return f_ghz * 1e9 * H_PLANCK


def ghz_to_angular(f_ghz: float) -> float:
    """Energy in GHz -> transition angular frequency in rad/s."""
    return 2.0 * math.pi * f_ghz * 1e9


def us_to_ns(t_us: float) -> float:
    return t_us * 1e3
