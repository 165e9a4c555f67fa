"""CGS-Gaussian physical constants and unit conversions."""

BOLTZMANN = 1.380649e-16          # erg / K
SPEED_OF_LIGHT = 2.99792458e10    # cm / s
HBAR = 1.054571817e-27            # erg s
ELECTRON_CHARGE = 4.80320471e-10  # statC
ELECTRON_MASS = 9.1093837015e-28  # g

DEBYE = 1e-18                     # statC cm
STATVOLT = 299.792458             # V

# One decade between excited-state lifetime and reorientation time.
EQUILIBRIUM_MARGIN = 10.0
ADVISORY_MASS_AMU = 1e3
ADVISORY_LENGTH_ANGSTROM = 10.0


def volts_to_statvolts(value):
    return value / STATVOLT


def statvolts_to_volts(value):
    return value * STATVOLT
