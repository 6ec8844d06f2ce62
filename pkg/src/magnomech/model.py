"""Physical parameters of the cavity magnomechanical system and the
linearized drift/diffusion description of its fluctuations.

All frequencies and rates are angular (rad/s). Matrices handed to
:mod:`magnomech.linalg` are divided by the mechanical frequency so their
entries are of order one. Quadrature ordering is (X, Y, x, y, q, p): cavity,
magnon, phonon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import constants
from .errors import DegenerateParametersError, DomainError, NotApplicableError
from .linalg import eigenvalues_general

MIN_QUALITY_FACTOR = 100.0
STABILITY_MARGIN = 1e-12
LOW_EXCITATION_THRESHOLD = 0.01
KERR_THRESHOLD = 0.25


@dataclass(frozen=True)
class DirectCoupling:
    """Effective magnomechanical coupling given directly (rad/s)."""

    g_mb_eff: float

    def __post_init__(self):
        _require(self.g_mb_eff >= 0 and math.isfinite(self.g_mb_eff), "g_mb_eff", "must be >= 0")


@dataclass(frozen=True)
class PhysicalDrive:
    """Magnon drive described by field amplitude and sphere properties.

    The effective coupling then follows from the steady-state magnon
    amplitude at each detuning.
    """

    b0: float
    g_mb: float
    sphere_diameter: float = 250e-6
    spin_density: float = constants.YIG_SPIN_DENSITY
    gyromagnetic_ratio: float = constants.GYROMAGNETIC_RATIO
    spin_s: float = constants.FE3_SPIN
    kerr_1mm: float = constants.KERR_1MM

    def __post_init__(self):
        _require(self.b0 >= 0, "b0", "must be >= 0")
        _require(self.g_mb >= 0, "g_mb", "must be >= 0")
        for name in ("sphere_diameter", "spin_density", "gyromagnetic_ratio", "spin_s"):
            _require(getattr(self, name) > 0, name, "must be > 0")
        _require(self.kerr_1mm >= 0, "kerr_1mm", "must be >= 0")


Coupling = Union[DirectCoupling, PhysicalDrive]


def _require(ok, name, message):
    if not ok:
        raise DomainError(f"{name}: {message}")


@dataclass(frozen=True)
class SystemParams:
    omega_a: float
    omega_b: float
    delta_a: float
    delta_m_eff: float
    kappa_a: float
    kappa_m: float
    gamma_b: float
    g_ma: float
    temperature: float
    coupling: Coupling = field(default_factory=lambda: DirectCoupling(0.0))

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "kappa_a", "kappa_m", "gamma_b", "g_ma"):
            value = getattr(self, name)
            _require(math.isfinite(value) and value > 0, name, "must be a positive finite rate")
        for name in ("delta_a", "delta_m_eff"):
            _require(math.isfinite(getattr(self, name)), name, "must be finite")
        _require(
            math.isfinite(self.temperature) and self.temperature >= 0,
            "temperature",
            "must be >= 0",
        )
        _require(
            self.omega_b / self.gamma_b > MIN_QUALITY_FACTOR,
            "gamma_b",
            f"mechanical quality factor omega_b/gamma_b must exceed {MIN_QUALITY_FACTOR:g}",
        )
        _require(
            isinstance(self.coupling, (DirectCoupling, PhysicalDrive)),
            "coupling",
            "must be DirectCoupling or PhysicalDrive",
        )

    @property
    def is_physical(self):
        return isinstance(self.coupling, PhysicalDrive)


@dataclass(frozen=True)
class ValidityReport:
    low_excitation_ratio: float
    kerr_ratio: Optional[float]
    kerr_coefficient: float
    kerr_term: float
    low_excitation_ok: bool
    kerr_ok: bool
    no_drive: bool

    @property
    def ok(self):
        return self.low_excitation_ok and self.kerr_ok


@dataclass(frozen=True)
class DerivedState:
    g_mb_eff: float
    n_therm_a: float
    n_therm_m: float
    n_therm_b: float
    rabi_omega: Optional[float] = None
    n_spins: Optional[float] = None
    m_mean: Optional[complex] = None
    m_mean_approx: Optional[complex] = None
    q_mean: Optional[float] = None
    magnon_occupation: Optional[float] = None
    validity: Optional[ValidityReport] = None

    @property
    def low_excitation_ok(self):
        return None if self.validity is None else self.validity.low_excitation_ok

    @property
    def kerr_ok(self):
        return None if self.validity is None else self.validity.kerr_ok


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_real_part: float
    eigenvalues: tuple


def rabi_frequency(b0, n_spins, gyromagnetic_ratio=constants.GYROMAGNETIC_RATIO):
    """Drive Rabi frequency ``(sqrt(5)/4) * gamma * sqrt(N) * B0`` in rad/s."""
    if b0 < 0 or n_spins <= 0 or gyromagnetic_ratio <= 0:
        raise DomainError("rabi_frequency needs b0 >= 0, n_spins > 0, gyromagnetic_ratio > 0")
    return math.sqrt(5.0) / 4.0 * gyromagnetic_ratio * math.sqrt(n_spins) * b0


def spin_count(sphere_diameter, spin_density=constants.YIG_SPIN_DENSITY):
    """Number of spins in a sphere of the given diameter."""
    if sphere_diameter < 0 or spin_density <= 0:
        raise DomainError("spin_count needs sphere_diameter >= 0 and spin_density > 0")
    return spin_density * math.pi / 6.0 * sphere_diameter**3


def magnon_amplitude_exact(p: SystemParams, rabi_omega: float) -> complex:
    """Steady-state magnon amplitude with dissipation kept.

    ``delta_m_eff`` is treated as the independent knob: it already contains
    the static magnomechanical shift.
    """
    cav = complex(p.kappa_a, p.delta_a)
    denom = p.g_ma**2 + complex(p.kappa_m, p.delta_m_eff) * cav
    if denom == 0:
        raise DegenerateParametersError("magnon amplitude denominator vanishes")
    return rabi_omega * cav / denom


def magnon_amplitude_approx(p: SystemParams, rabi_omega: float) -> complex:
    """Large-detuning magnon amplitude (purely imaginary)."""
    denom = p.g_ma**2 - p.delta_m_eff * p.delta_a
    if denom == 0:
        raise DegenerateParametersError("g_ma**2 equals delta_m_eff * delta_a")
    return complex(0.0, rabi_omega * p.delta_a / denom)


def effective_coupling(g_mb, m_mean):
    """Modulus of ``i sqrt(2) g_mb <m>``.

    The phase of the complex coupling is a local quadrature rotation of the
    magnon mode and does not affect any entanglement measure.
    """
    if g_mb < 0:
        raise DomainError("g_mb must be >= 0")
    return math.sqrt(2.0) * g_mb * abs(m_mean)


def thermal_occupation(omega, temperature):
    """Bose-Einstein mean occupation of a mode at angular frequency ``omega``."""
    if omega <= 0:
        raise DomainError("omega must be > 0")
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = constants.HBAR * omega / (constants.K_B * temperature)
    if x > 700:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def drift_from_rates(delta_a, delta_m_eff, kappa_a, kappa_m, g_ma, g_mb_eff, omega_b, gamma_b):
    """Drift matrix from rates already expressed in the caller's units."""
    return np.array(
        [
            [-kappa_a, delta_a, 0.0, g_ma, 0.0, 0.0],
            [-delta_a, -kappa_a, -g_ma, 0.0, 0.0, 0.0],
            [0.0, g_ma, -kappa_m, delta_m_eff, -g_mb_eff, 0.0],
            [-g_ma, 0.0, -delta_m_eff, -kappa_m, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, omega_b],
            [0.0, 0.0, 0.0, g_mb_eff, -omega_b, -gamma_b],
        ]
    )


def drift_matrix(p: SystemParams, g_mb_eff: float) -> np.ndarray:
    """6x6 drift matrix in units of ``omega_b``."""
    w = p.omega_b
    return drift_from_rates(
        p.delta_a / w,
        p.delta_m_eff / w,
        p.kappa_a / w,
        p.kappa_m / w,
        p.g_ma / w,
        g_mb_eff / w,
        1.0,
        p.gamma_b / w,
    )


def diffusion_matrix(p: SystemParams, occupations: DerivedState) -> np.ndarray:
    """Diagonal input-noise matrix in units of ``omega_b``."""
    w = p.omega_b
    ca = p.kappa_a * (2 * occupations.n_therm_a + 1) / w
    cm = p.kappa_m * (2 * occupations.n_therm_m + 1) / w
    cb = p.gamma_b * (2 * occupations.n_therm_b + 1) / w
    return np.diag([ca, ca, cm, cm, 0.0, cb])


def stability_check(a, margin=STABILITY_MARGIN) -> StabilityVerdict:
    """Stable iff every eigenvalue of ``a`` has real part below ``-margin``."""
    eigs = eigenvalues_general(a)
    max_re = max(e.real for e in eigs)
    return StabilityVerdict(stable=max_re < -margin, max_real_part=max_re, eigenvalues=tuple(eigs))


def validity_report(
    p: SystemParams,
    d: DerivedState,
    low_excitation_threshold=LOW_EXCITATION_THRESHOLD,
    kerr_threshold=KERR_THRESHOLD,
) -> ValidityReport:
    """Check the low-excitation and Kerr conditions behind the linearization."""
    if not p.is_physical:
        raise NotApplicableError("validity checks need a physical drive description")
    drive = p.coupling
    occupation = d.magnon_occupation
    r1 = occupation / (2 * drive.spin_s * d.n_spins)
    kerr = drive.kerr_1mm * (1e-3 / drive.sphere_diameter) ** 3
    kerr_term = kerr * occupation**1.5
    no_drive = d.rabi_omega == 0
    r2 = None if no_drive else kerr_term / d.rabi_omega
    return ValidityReport(
        low_excitation_ratio=r1,
        kerr_ratio=r2,
        kerr_coefficient=kerr,
        kerr_term=kerr_term,
        low_excitation_ok=r1 < low_excitation_threshold,
        kerr_ok=no_drive or r2 < kerr_threshold,
        no_drive=no_drive,
    )


def derive(
    p: SystemParams,
    low_excitation_threshold=LOW_EXCITATION_THRESHOLD,
    kerr_threshold=KERR_THRESHOLD,
) -> DerivedState:
    """Compute every derived quantity needed to build the drift and diffusion matrices."""
    n_a = thermal_occupation(p.omega_a, p.temperature)
    # magnon mode sits near cavity resonance
    n_m = n_a
    n_b = thermal_occupation(p.omega_b, p.temperature)
    if not p.is_physical:
        return DerivedState(
            g_mb_eff=p.coupling.g_mb_eff, n_therm_a=n_a, n_therm_m=n_m, n_therm_b=n_b
        )
    drive = p.coupling
    n_spins = spin_count(drive.sphere_diameter, drive.spin_density)
    omega = rabi_frequency(drive.b0, n_spins, drive.gyromagnetic_ratio)
    m_mean = magnon_amplitude_exact(p, omega)
    try:
        m_approx = magnon_amplitude_approx(p, omega)
    except DegenerateParametersError:
        m_approx = complex(math.nan, math.nan)
    occupation = abs(m_mean) ** 2
    state = DerivedState(
        g_mb_eff=effective_coupling(drive.g_mb, m_mean),
        n_therm_a=n_a,
        n_therm_m=n_m,
        n_therm_b=n_b,
        rabi_omega=omega,
        n_spins=n_spins,
        m_mean=m_mean,
        m_mean_approx=m_approx,
        q_mean=-drive.g_mb / p.omega_b * occupation,
        magnon_occupation=occupation,
    )
    report = validity_report(p, state, low_excitation_threshold, kerr_threshold)
    return replace(state, validity=report)


def relative_difference(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale
