"""
Physical molecule and field data to dimensionless alignment parameters.

Internal units are CGS-Gaussian: dipoles in statC cm (input in Debye),
polarizabilities in cm^3, fields in statvolt/cm, energies in erg.  SI
field values are converted at the boundary.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .constants import (
    ADVISORY_LENGTH_ANGSTROM,
    ADVISORY_MASS_AMU,
    BOLTZMANN,
    DEBYE,
    ELECTRON_CHARGE,
    ELECTRON_MASS,
    EQUILIBRIUM_MARGIN,
    SPEED_OF_LIGHT,
    statvolts_to_volts,
    volts_to_statvolts,
)
from .errors import InvalidArgument, MoleculeFileError, ResonanceError
from .orientation import AlignmentParams

RESONANCE_RTOL = 1e-6

UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class MoleculeRecord:
    name: str
    mu_g: float = 0.0          # Debye
    mu_m: float = 0.0          # Debye
    delta_b_g: float = 0.0     # cm^3
    delta_b_m: float = 0.0     # cm^3
    mass: float = 0.0          # amu
    length: float = 0.0        # Angstrom
    lifetime_tau: float = 0.0  # s
    reorientation_tau0: float = 0.0  # s

    def __post_init__(self):
        for name in ("mu_g", "mu_m", "mass", "length", "lifetime_tau", "reorientation_tau0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidArgument(f"{name} must be a non-negative number, got {value}")
        for name in ("delta_b_g", "delta_b_m"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")


@dataclass(frozen=True)
class FieldConditions:
    """Control field in statvolt/cm plus temperature.

    Use :meth:`from_si` for a field given in V/cm.
    """

    E0: float
    temperature: float
    kind: str = "dc"
    omega0: Optional[float] = None
    breakdown_limit: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.E0) and self.E0 >= 0):
            raise InvalidArgument(f"E0 must be >= 0, got {self.E0}")
        if not self.temperature > 0:
            raise InvalidArgument(f"temperature must be > 0 K, got {self.temperature}")
        if self.kind not in ("dc", "ac"):
            raise InvalidArgument(f"field kind must be 'dc' or 'ac', got {self.kind!r}")
        if self.kind == "ac" and not (self.omega0 is not None and self.omega0 > 0):
            raise InvalidArgument("ac fields need a positive omega0")
        if self.breakdown_limit is not None and self.breakdown_limit < 0:
            raise InvalidArgument("breakdown limit must be non-negative")

    @classmethod
    def from_si(cls, E0_volts_per_cm, temperature, kind="dc", omega0=None,
                breakdown_volts_per_cm=None):
        breakdown = None
        if breakdown_volts_per_cm is not None:
            breakdown = volts_to_statvolts(breakdown_volts_per_cm)
        return cls(
            E0=volts_to_statvolts(E0_volts_per_cm),
            temperature=temperature,
            kind=kind,
            omega0=omega0,
            breakdown_limit=breakdown,
        )

    @property
    def E0_si(self):
        """Field amplitude in V/cm."""
        return statvolts_to_volts(self.E0)

    @property
    def thermal_energy(self):
        return BOLTZMANN * self.temperature


@dataclass(frozen=True)
class TransitionLine:
    omega_lj: float
    strength: float

    def __post_init__(self):
        if not self.omega_lj > 0:
            raise InvalidArgument(f"line frequency must be positive, got {self.omega_lj}")
        if self.strength < 0:
            raise InvalidArgument(f"oscillator strength must be >= 0, got {self.strength}")


def _check_temperature(field):
    if not field.temperature > 0:
        raise InvalidArgument(f"temperature must be > 0 K, got {field.temperature}")


def p_from_physical(mu, field):
    """p = mu E0 / kT with mu in Debye."""
    _check_temperature(field)
    return mu * DEBYE * field.E0 / field.thermal_energy


def q_from_physical(delta_b, field):
    """q = delta_b E0^2 / 2kT; the sign follows delta_b."""
    _check_temperature(field)
    return delta_b * field.E0 * field.E0 / (2 * field.thermal_energy)


def field_from_intensity(intensity_w_cm2):
    """Peak amplitude (statvolt/cm) of a wave with mean intensity I = c E0^2 / 8 pi."""
    if intensity_w_cm2 < 0:
        raise InvalidArgument("intensity must be non-negative")
    intensity_cgs = intensity_w_cm2 * 1e7  # erg / (s cm^2)
    return math.sqrt(8 * math.pi * intensity_cgs / SPEED_OF_LIGHT)


def field_from_power(power_w, spot_radius_cm):
    """Peak amplitude for a flat-top beam of the given power and spot radius."""
    if not spot_radius_cm > 0:
        raise InvalidArgument("spot radius must be positive")
    return field_from_intensity(power_w / (math.pi * spot_radius_cm**2))


def polarizability_from_lines(lines, omega0):
    """Dispersion sum b = (e^2/m) sum_l s_l / (omega_l^2 - omega0^2) in cm^3.

    Line weights are dimensionless oscillator strengths.
    """
    total = 0.0
    for line in lines:
        if abs(omega0 - line.omega_lj) / line.omega_lj < RESONANCE_RTOL:
            raise ResonanceError(
                f"omega0={omega0:g} is resonant with the line at {line.omega_lj:g} rad/s"
            )
        total += line.strength / (line.omega_lj**2 - omega0**2)
    return ELECTRON_CHARGE**2 / ELECTRON_MASS * total


def alignment_for_level(record, level, field):
    """AlignmentParams of one level of a molecule in the given field.

    An ac field cannot orient a permanent dipole over an optical cycle, so
    p is zero there and only the polarizability term aligns.
    """
    if level == UPPER:
        mu, delta_b = record.mu_m, record.delta_b_m
    elif level == LOWER:
        mu, delta_b = record.mu_g, record.delta_b_g
    else:
        raise InvalidArgument(f"level must be 'upper' or 'lower', got {level!r}")
    p = 0.0 if field.kind == "ac" else p_from_physical(mu, field)
    return AlignmentParams(p=p, q=q_from_physical(delta_b, field))


@dataclass(frozen=True)
class FeasibilityReport:
    name: str
    equilibrium_pass: Optional[bool]
    equilibrium_margin: Optional[float]
    align_m: AlignmentParams
    align_g: AlignmentParams
    breakdown_pass: Optional[bool]
    advisories: List[str] = field(default_factory=list)

    def lines(self):
        out = [f"molecule: {self.name}"]
        if self.equilibrium_pass is None:
            out.append("  equilibrium: UNKNOWN (lifetime not given)")
        else:
            verdict = "PASS" if self.equilibrium_pass else "FAIL"
            margin = self.equilibrium_margin
            text = "unbounded" if math.isinf(margin) else f"{margin:.6g}x"
            out.append(f"  equilibrium: {verdict} (margin {text})")
        out.append(f"  upper: p={self.align_m.p:.9g} q={self.align_m.q:.9g}")
        out.append(f"  lower: p={self.align_g.p:.9g} q={self.align_g.q:.9g}")
        if self.breakdown_pass is None:
            out.append("  breakdown: not checked")
        else:
            out.append(f"  breakdown: {'PASS' if self.breakdown_pass else 'FAIL'}")
        if self.advisories:
            out.extend(f"  advisory: {a}" for a in self.advisories)
        else:
            out.append("  size: OK")
        return out

    def render(self):
        return "\n".join(self.lines())


def feasibility_report(record, field, margin=EQUILIBRIUM_MARGIN):
    """Screen a molecule for the orientational-equilibrium and breakdown conditions.

    The excited-state lifetime must exceed the reorientation time by at
    least ``margin`` (default one decade) for the Boltzmann distribution to
    hold in the upper level.
    """
    if record.lifetime_tau > 0:
        if record.reorientation_tau0 > 0:
            ratio = record.lifetime_tau / record.reorientation_tau0
        else:
            ratio = math.inf
        equilibrium = ratio >= margin
    else:
        ratio = None
        equilibrium = None

    breakdown = None
    if field.breakdown_limit is not None:
        breakdown = field.E0 <= field.breakdown_limit

    advisories = []
    if record.mass > ADVISORY_MASS_AMU:
        advisories.append(f"mass {record.mass:g} amu exceeds {ADVISORY_MASS_AMU:g} amu")
    if record.length > ADVISORY_LENGTH_ANGSTROM:
        advisories.append(
            f"length {record.length:g} A exceeds {ADVISORY_LENGTH_ANGSTROM:g} A"
        )

    return FeasibilityReport(
        name=record.name,
        equilibrium_pass=equilibrium,
        equilibrium_margin=ratio,
        align_m=alignment_for_level(record, UPPER, field),
        align_g=alignment_for_level(record, LOWER, field),
        breakdown_pass=breakdown,
        advisories=advisories,
    )


_FILE_KEYS = {
    "name": "name",
    "mu_g_debye": "mu_g",
    "mu_m_debye": "mu_m",
    "delta_b_g_cm3": "delta_b_g",
    "delta_b_m_cm3": "delta_b_m",
    "mass_amu": "mass",
    "length_angstrom": "length",
    "tau_s": "lifetime_tau",
    "tau0_s": "reorientation_tau0",
}


def parse_molecules(text):
    """Parse ``[molecule]`` sections of ``key = value`` lines.

    Blank lines and lines starting with ``#`` or ``;`` are ignored.  Every
    section needs a name; numeric keys default to 0.
    """
    records = []
    current = None
    start_line = None

    def finish():
        if current is None:
            return
        if "name" not in current:
            raise MoleculeFileError("section has no 'name'", start_line)
        try:
            records.append(MoleculeRecord(**current))
        except InvalidArgument as exc:
            raise MoleculeFileError(str(exc), start_line) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if line != "[molecule]":
                raise MoleculeFileError(f"unknown section {line}", lineno)
            finish()
            current = {}
            start_line = lineno
            continue
        if current is None:
            raise MoleculeFileError("key outside a [molecule] section", lineno)
        key, sep, value = line.partition("=")
        if not sep:
            raise MoleculeFileError(f"expected 'key = value', got {line!r}", lineno)
        key, value = key.strip(), value.strip()
        if key not in _FILE_KEYS:
            raise MoleculeFileError(f"unknown key {key!r}", lineno)
        attr = _FILE_KEYS[key]
        if attr in current:
            raise MoleculeFileError(f"duplicate key {key!r}", lineno)
        if attr == "name":
            current[attr] = value
        else:
            try:
                current[attr] = float(value)
            except ValueError:
                raise MoleculeFileError(f"{key} is not a number: {value!r}", lineno) from None
    finish()
    return records


def load_molecules(path):
    with open(path, encoding="utf-8") as fh:
        return parse_molecules(fh.read())
