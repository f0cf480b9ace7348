"""Landau eigenstates in the symmetric gauge and paraxial Laguerre-Gauss modes.

Conventions used throughout the package: the particle carries charge -e with
e > 0, the uniform field B > 0 points along +z, and the vector potential is
the symmetric gauge A = (B/2)(-y, x).  Natural units set hbar = 1 with the
magnetic length as the length unit and the Larmor frequency as half the
frequency unit, i.e. l_B = 1 and omega_L = 1/2, so omega_c = 1, the
oscillator length is b = sqrt(2), and the effective mass is 1.

A state is labeled either by (n_r, m) — radial node count and azimuthal
quantum number — or by the energy index n = n_r + (|m| + m)/2 together
with m.  Energies are (2n + 1) omega_L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import laguerre, log_norm_ratio

__all__ = [
    "QuantumNumbers",
    "PhysicalUnits",
    "LandauState",
    "LGBeamParams",
    "to_landau_index",
    "radial_wavefunction",
    "wavefunction",
    "lg_beam",
    "energy",
]


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial node count n_r >= 0 and azimuthal quantum number m (any integer)."""

    n_r: int
    m: int

    def __post_init__(self):
        if int(self.n_r) != self.n_r or int(self.m) != self.m:
            raise ValueError(f"quantum numbers must be integers, got ({self.n_r}, {self.m})")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "m", int(self.m))
        if self.n_r < 0:
            raise ValueError(f"n_r must be non-negative, got {self.n_r}")

    @property
    def landau_index(self) -> int:
        """Energy quantum number n = n_r + (|m| + m)/2."""
        return self.n_r + (abs(self.m) + self.m) // 2

    @classmethod
    def from_landau(cls, n: int, m: int) -> "QuantumNumbers":
        """Inverse label map; requires n - (|m| + m)/2 >= 0."""
        n_r = n - (abs(m) + m) // 2
        if n_r < 0:
            raise ValueError(
                f"invalid quantum numbers: n - (|m|+m)/2 = {n_r} < 0 for (n={n}, m={m})"
            )
        return cls(n_r, m)


def to_landau_index(qn: QuantumNumbers) -> tuple[int, int]:
    """Map (n_r, m) to the energy labels (n, m)."""
    return qn.landau_index, qn.m


@dataclass(frozen=True)
class PhysicalUnits:
    """Length and frequency scales of the problem.

    magnetic_length is l_B = 1/sqrt(eB); larmor is omega_L = eB/(2 m_e).
    Everything else is derived: omega_c = 2 omega_L, oscillator length
    b = sqrt(2) l_B, mass m_e = 1/(2 l_B^2 omega_L), and eB = 1/l_B^2.
    """

    magnetic_length: float = 1.0
    larmor: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.magnetic_length) and self.magnetic_length > 0):
            raise ValueError(f"magnetic_length must be positive, got {self.magnetic_length}")
        if not (math.isfinite(self.larmor) and self.larmor > 0):
            raise ValueError(f"larmor must be positive, got {self.larmor}")

    @property
    def cyclotron(self) -> float:
        return 2.0 * self.larmor

    @property
    def oscillator_length(self) -> float:
        return math.sqrt(2.0) * self.magnetic_length

    @property
    def mass(self) -> float:
        return 1.0 / (2.0 * self.magnetic_length**2 * self.larmor)

    @property
    def eB(self) -> float:
        return 1.0 / self.magnetic_length**2


@dataclass(frozen=True)
class LandauState:
    """A normalized Landau eigenstate, evaluable at (r, phi).

    The radial factor is

        R(r) = (1/b) sqrt(2 n_r!/(n_r+|m|)!) e^{-r^2/(2b^2)}
               (r^2/b^2)^{|m|/2} L_{n_r}^{|m|}(r^2/b^2)

    normalized so that int_0^inf R^2 r dr = 1, and the full wavefunction is
    psi(r, phi) = e^{i m phi}/sqrt(2 pi) R(r).
    """

    qn: QuantumNumbers
    units: PhysicalUnits = PhysicalUnits()

    @property
    def n_r(self) -> int:
        return self.qn.n_r

    @property
    def m(self) -> int:
        return self.qn.m

    @property
    def landau_index(self) -> int:
        return self.qn.landau_index

    @property
    def energy(self) -> float:
        return (2 * self.landau_index + 1) * self.units.larmor

    @property
    def turning_radius(self) -> float:
        """Classical turning radius sqrt(2(2n + |m| + 1)) l_B; sets grid extents."""
        n = self.landau_index
        return math.sqrt(2.0 * (2 * n + abs(self.m) + 1)) * self.units.magnetic_length

    def radial(self, r):
        """Radial factor R(r); scalar in, float out."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        b = self.units.oscillator_length
        x = (r / b) ** 2
        abs_m = abs(self.m)
        log_pref = log_norm_ratio(self.n_r, abs_m) - math.log(b)
        if abs_m == 0:
            log_amp = log_pref - 0.5 * x
        else:
            # log(0) -> -inf -> exp -> 0 handles the r = 0 zero of the m != 0 states
            with np.errstate(divide="ignore"):
                log_amp = log_pref + 0.5 * abs_m * np.log(x) - 0.5 * x
        out = np.exp(log_amp) * laguerre(self.n_r, abs_m, x)
        return float(out[0]) if scalar else out

    def psi(self, r, phi):
        """Full wavefunction e^{i m phi}/sqrt(2 pi) R(r)."""
        phi = np.asarray(phi, dtype=float)
        return np.exp(1j * self.m * phi) / math.sqrt(2.0 * math.pi) * self.radial(r)

    def psi_cartesian(self, x, y):
        """Wavefunction sampled on Cartesian coordinates."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.psi(np.hypot(x, y), np.arctan2(y, x))


def radial_wavefunction(state: LandauState, r):
    return state.radial(r)


def wavefunction(state: LandauState, r, phi):
    return state.psi(r, phi)


def energy(state: LandauState) -> float:
    return state.energy


@dataclass(frozen=True)
class LGBeamParams:
    """Laguerre-Gauss mode labels and beam scales: waist w0, Rayleigh length
    z_r, and wave number k.  The beam width is w(z) = w0 sqrt(1 + z^2/z_r^2).
    """

    n_r: int
    m: int
    w0: float
    z_r: float
    k: float

    def __post_init__(self):
        if self.n_r < 0:
            raise ValueError(f"n_r must be non-negative, got {self.n_r}")
        for name in ("w0", "z_r", "k"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value}")

    def width(self, z) -> np.ndarray:
        return self.w0 * np.sqrt(1.0 + (np.asarray(z, float) / self.z_r) ** 2)

    def gouy_phase(self, z) -> np.ndarray:
        """(2 n_r + |m| + 1) arctan(z/z_r); equals (2n_r+|m|+1) pi/4 at z = z_r."""
        return (2 * self.n_r + abs(self.m) + 1) * np.arctan(np.asarray(z, float) / self.z_r)

    def inverse_curvature(self, z) -> np.ndarray:
        """1/R(z) = z/(z^2 + z_r^2); zero at the focal plane, so the
        curvature phase simply drops out at z = 0."""
        z = np.asarray(z, float)
        return z / (z**2 + self.z_r**2)


def lg_beam(params: LGBeamParams, r, phi, z):
    """Unnormalized Laguerre-Gauss mode at (r, phi, z).

    Amplitude (r^2/w^2)^{|m|/2} L_{n_r}^{|m|}(2 r^2/w^2) e^{-r^2/w^2}, with
    the curvature phase e^{i k r^2/(2R(z))}, the plane-wave and vortex phase
    e^{i(m phi + k z)}, and the Gouy phase e^{-i (2 n_r + |m| + 1) arctan(z/z_r)}.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    phi = np.asarray(phi, dtype=float)
    z = np.asarray(z, dtype=float)
    abs_m = abs(params.m)
    w = params.width(z)
    u = (r / w) ** 2
    amplitude = u ** (0.5 * abs_m) * laguerre(params.n_r, abs_m, 2.0 * u) * np.exp(-u)
    phase = (
        0.5 * params.k * r**2 * params.inverse_curvature(z)
        + params.m * phi
        + params.k * z
        - params.gouy_phase(z)
    )
    return amplitude * np.exp(1j * phase)
