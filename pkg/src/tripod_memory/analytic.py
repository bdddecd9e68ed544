"""Closed-form two-channel storage, Larmor evolution and phase-controlled readout.

The stored excitation is a pair of complex collective coherences
``(s_ca, s_ba)``. A coupling beam pair ``(Omega+, Omega-)`` with phases
``(phi+, phi-)`` addresses the *bright* combination

    c_B = w+ exp(-i phi+) s_ca + w- exp(-i phi-) s_ba,
    w+- = |Omega+-| / sqrt(|Omega+|^2 + |Omega-|^2),

which is the only part converted back into light on readout. Writing maps the
probe onto the conjugate direction ``(w+ exp(i phi+), w- exp(i phi-))``. In a
bias field the ``s_ba`` component precesses by ``exp(2 i Omega_L t)`` relative
to ``s_ca``; the common global phase is dropped.

Unequal beam magnitudes are supported as a generalisation of the equal-amplitude
case. With weights ``w+ != w-`` the best-case fringe visibility drops to
``2 w+ w- / (w+^2 + w-^2)``.

All phases returned by this module are wrapped to ``[0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import constants, integrate

from .errors import InvalidParameterError, InvalidReadError, InvalidWriteError

TWO_PI = 2.0 * math.pi

# mu_B / hbar in rad s^-1 T^-1
_MU_B_OVER_HBAR = constants.physical_constants["Bohr magneton"][0] / constants.hbar
GAUSS = 1e-4  # tesla

DEFAULT_STORE_EFFICIENCY = 0.1


def wrap_phase(x: float) -> float:
    """Wrap an angle to ``[0, 2 pi)``."""
    r = float(x) % TWO_PI
    return 0.0 if r >= TWO_PI else r


def phase_distance(a: float, b: float) -> float:
    """Smallest absolute difference between two angles, in ``[0, pi]``."""
    d = wrap_phase(a - b)
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class BeamPair:
    """Two circularly polarised coupling components.

    ``omega_plus_mag`` drives c <-> e, ``omega_minus_mag`` drives b <-> e.
    Magnitudes are Rabi frequencies in rad/s; phases in rad, with the complex
    Rabi frequency ``|Omega| exp(-i phi)``.
    """

    omega_plus_mag: float
    omega_minus_mag: float
    phi_plus: float = 0.0
    phi_minus: float = 0.0

    def __post_init__(self):
        if self.omega_plus_mag < 0 or self.omega_minus_mag < 0:
            raise InvalidParameterError("Rabi magnitudes must be non-negative")
        for v in (self.omega_plus_mag, self.omega_minus_mag, self.phi_plus, self.phi_minus):
            if not math.isfinite(v):
                raise InvalidParameterError("beam pair fields must be finite")

    @classmethod
    def with_delta(cls, magnitude: float, delta: float, minus_magnitude: float | None = None) -> "BeamPair":
        """Pair with ``phi+ = delta``, ``phi- = 0``. Equal magnitudes unless given."""
        m = magnitude if minus_magnitude is None else minus_magnitude
        return cls(magnitude, m, phi_plus=delta, phi_minus=0.0)

    @property
    def delta(self) -> float:
        """Relative phase ``phi+ - phi-`` wrapped to ``[0, 2 pi)``."""
        return wrap_phase(self.phi_plus - self.phi_minus)

    @property
    def total(self) -> float:
        return math.hypot(self.omega_plus_mag, self.omega_minus_mag)

    @property
    def is_dark(self) -> bool:
        return self.total == 0.0

    @property
    def weights(self) -> tuple[float, float]:
        tot = self.total
        if tot == 0.0:
            raise InvalidReadError("beam pair has no nonzero component")
        return self.omega_plus_mag / tot, self.omega_minus_mag / tot

    @property
    def complex_rabi(self) -> tuple[complex, complex]:
        """``(Omega+, Omega-)`` as complex numbers ``|Omega| exp(-i phi)``."""
        return (
            self.omega_plus_mag * complex(math.cos(self.phi_plus), -math.sin(self.phi_plus)),
            self.omega_minus_mag * complex(math.cos(self.phi_minus), -math.sin(self.phi_minus)),
        )

    def bright_vector(self) -> np.ndarray:
        """Unit vector in ``(s_ca, s_ba)`` space that this pair reads out."""
        wp, wm = self.weights
        return np.array([wp * np.exp(1j * self.phi_plus), wm * np.exp(1j * self.phi_minus)])

    def dark_partner(self) -> "BeamPair":
        """Pair whose bright direction is orthogonal to this one, same total power."""
        tot = self.total
        wp, wm = self.weights
        return BeamPair(wm * tot, wp * tot, self.phi_plus, self.phi_minus + math.pi)

    def scaled(self, total: float) -> "BeamPair":
        """Same weights and phases, rescaled to the given total Rabi frequency."""
        wp, wm = self.weights
        return replace(self, omega_plus_mag=wp * total, omega_minus_mag=wm * total)

    def only_plus(self) -> "BeamPair":
        return replace(self, omega_minus_mag=0.0)

    def only_minus(self) -> "BeamPair":
        return replace(self, omega_plus_mag=0.0)


@dataclass(frozen=True)
class MagneticEnvironment:
    """Bias field (gauss) and Lande factor; ``larmor`` is derived in rad/s."""

    b_field: float
    g_factor: float = 0.5

    def __post_init__(self):
        if self.b_field < 0 or not math.isfinite(self.b_field):
            raise InvalidParameterError("magnetic field must be finite and >= 0")
        if not math.isfinite(self.g_factor):
            raise InvalidParameterError("g factor must be finite")

    @classmethod
    def from_larmor(cls, larmor: float, g_factor: float = 0.5) -> "MagneticEnvironment":
        """Environment producing the requested Larmor frequency (rad/s)."""
        if larmor < 0:
            raise InvalidParameterError("Larmor frequency must be >= 0")
        if larmor == 0:
            return cls(0.0, g_factor)
        if g_factor == 0:
            raise InvalidParameterError("g factor of zero cannot give a finite Larmor frequency")
        return cls(larmor / (abs(g_factor) * _MU_B_OVER_HBAR * GAUSS), g_factor)

    @property
    def larmor(self) -> float:
        return abs(self.g_factor) * _MU_B_OVER_HBAR * self.b_field * GAUSS

    @property
    def larmor_hz(self) -> float:
        return self.larmor / TWO_PI

    @property
    def zeeman_splitting(self) -> float:
        """Angular splitting between |b> and |c>."""
        return 2.0 * self.larmor


def _gaussian_amplitude(fwhm: float, energy: float) -> float:
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    return math.sqrt(energy / (sigma * math.sqrt(TWO_PI)))


@dataclass(frozen=True)
class ProbePulse:
    """Slowly varying input signal envelope.

    ``envelope`` maps times (s, scalar or array) to complex amplitudes whose
    squared modulus is an energy flux; it must vanish outside ``[start, end]``.
    ``duration`` is the intensity FWHM.
    """

    envelope: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    start: float
    end: float
    duration: float
    energy: float

    @classmethod
    def gaussian(cls, fwhm: float, energy: float = 1.0, center: float = 0.0, span: float = 3.0) -> "ProbePulse":
        """Gaussian pulse of given intensity FWHM, truncated at ``center +- span * fwhm``."""
        if fwhm <= 0:
            raise InvalidParameterError("pulse FWHM must be > 0")
        if energy < 0:
            raise InvalidParameterError("pulse energy must be >= 0")
        sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        amp = _gaussian_amplitude(fwhm, energy) if energy > 0 else 0.0
        start, end = center - span * fwhm, center + span * fwhm

        def envelope(t):
            t = np.asarray(t, dtype=float)
            inside = (t >= start) & (t <= end)
            return np.where(inside, amp * np.exp(-((t - center) ** 2) / (4.0 * sigma**2)), 0.0).astype(complex)

        return cls(envelope, start, end, fwhm, float(energy))

    @classmethod
    def from_envelope(cls, envelope: Callable, start: float, end: float, duration: float) -> "ProbePulse":
        """Wrap an arbitrary envelope, computing its energy by quadrature."""
        if end <= start:
            raise InvalidParameterError("pulse support must have end > start")
        energy, _ = integrate.quad(lambda t: float(abs(complex(envelope(t))) ** 2), start, end, limit=200)
        return cls(envelope, float(start), float(end), float(duration), float(energy))

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.end)


@dataclass(frozen=True)
class SpinWaveState:
    """Stored collective coherences ``(s_ca, s_ba)`` with shared envelope metadata.

    ``stored_norm`` is in units of the input probe energy.
    """

    s_ca: complex
    s_ba: complex
    envelope: ProbePulse | None = field(default=None, compare=False)
    elapsed: float = 0.0

    @property
    def stored_norm(self) -> float:
        return abs(self.s_ca) ** 2 + abs(self.s_ba) ** 2

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.s_ca, self.s_ba], dtype=complex)

    @property
    def relative_phase(self) -> float:
        """Phase of ``s_ba`` relative to ``s_ca``, wrapped."""
        return wrap_phase(np.angle(self.s_ba) - np.angle(self.s_ca))

    def with_vector(self, v) -> "SpinWaveState":
        return replace(self, s_ca=complex(v[0]), s_ba=complex(v[1]))


@dataclass(frozen=True)
class PolaritonState:
    """Dark-state polariton: probe amplitude, spin wave and mixing angle."""

    light: complex
    spin: SpinWaveState
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-15:
            raise InvalidParameterError("mixing angle must lie in [0, pi/2]")

    @classmethod
    def from_fields(cls, pair: BeamPair, gN: float, light: complex, spin: SpinWaveState) -> "PolaritonState":
        return cls(complex(light), spin, mixing_angle(pair, gN))

    def amplitude(self, pair: BeamPair) -> complex:
        """Polariton field ``cos(theta) E - sin(theta) S`` for the given pair."""
        if self.theta == math.pi / 2 and pair.is_dark:
            return 0.0j
        s = compose_spin_wave(pair, self.spin) if not pair.is_dark else 0.0j
        return math.cos(self.theta) * self.light - math.sin(self.theta) * s


def mixing_angle(pair: BeamPair, gN: float) -> float:
    """``theta = atan(gN / sqrt(|Omega+|^2 + |Omega-|^2))``; pi/2 for dark beams."""
    if not gN > 0:
        raise InvalidParameterError("collective coupling gN must be > 0")
    return math.atan2(gN, pair.total)


def compose_spin_wave(pair: BeamPair, state: SpinWaveState) -> complex:
    """Bright spin-wave amplitude seen by ``pair``."""
    if pair.is_dark:
        raise InvalidReadError("cannot form a spin wave with both coupling magnitudes zero")
    return complex(np.vdot(pair.bright_vector(), state.vector))


def store(probe: ProbePulse, write: BeamPair, efficiency: float = DEFAULT_STORE_EFFICIENCY) -> SpinWaveState:
    """Map the probe onto the spin waves selected by the write pair.

    The stored norm is ``efficiency * probe.energy``, split between the two
    channels by the squared write weights.
    """
    if write.is_dark:
        raise InvalidWriteError("write pair has both magnitudes zero")
    if not 0.0 <= efficiency <= 1.0:
        raise InvalidParameterError("storage efficiency must lie in [0, 1]")
    if probe.energy <= 0:
        return SpinWaveState(0j, 0j, envelope=probe)
    amp = math.sqrt(efficiency * probe.energy)
    s_ca, s_ba = amp * write.bright_vector()
    return SpinWaveState(complex(s_ca), complex(s_ba), envelope=probe)


def evolve(state: SpinWaveState, tau: float, env: MagneticEnvironment, t0: float = math.inf) -> SpinWaveState:
    """Larmor precession and decoherence over a dark storage interval ``tau``."""
    if tau < 0:
        raise InvalidParameterError("storage interval must be >= 0")
    if not t0 > 0:
        raise InvalidParameterError("lifetime t0 must be > 0")
    decay = math.exp(-tau / (2.0 * t0)) if math.isfinite(t0) else 1.0
    phase = 2.0 * env.larmor * tau
    rot = complex(math.cos(phase), math.sin(phase))
    return replace(
        state,
        s_ca=state.s_ca * decay,
        s_ba=state.s_ba * rot * decay,
        elapsed=state.elapsed + tau,
    )


def read(state: SpinWaveState, readpair: BeamPair) -> tuple[complex, SpinWaveState]:
    """Projective read: the bright component leaves as light, the dark one stays.

    Returns the output amplitude (``|amp|^2`` in units of input energy) and the
    remaining state.
    """
    amp = compose_spin_wave(readpair, state)
    remaining = state.vector - amp * readpair.bright_vector()
    return amp, state.with_vector(remaining)


def total_phase(delta_r: float, delta_w: float, larmor: float, tau: float) -> float:
    """``Delta = delta_R - delta_W + 2 Omega_L tau``, wrapped."""
    return wrap_phase(delta_r - delta_w + 2.0 * larmor * tau)


def readout_intensity(delta_r, delta_w, larmor, tau):
    """Two-beam readout in units of the single-channel readout.

    ``2 cos^2(delta_r/2 - delta_w/2 + larmor tau)``. Accepts numpy arrays.
    """
    if np.any(np.asarray(tau) < 0):
        raise InvalidParameterError("storage interval must be >= 0")
    return 2.0 * np.cos(0.5 * np.asarray(delta_r) - 0.5 * np.asarray(delta_w) + np.asarray(larmor) * tau) ** 2


def retrieval_efficiency(t, a: float, larmor: float, phi: float, t0: float):
    """Collapse-and-revival curve ``A [1 + cos(2 Omega_L t - phi)] exp(-t/t0)``."""
    if not t0 > 0:
        raise InvalidParameterError("lifetime t0 must be > 0")
    if a < 0:
        raise InvalidParameterError("baseline efficiency must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("storage time must be >= 0")
    out = a * (1.0 + np.cos(2.0 * larmor * t - phi)) * np.exp(-t / t0)
    return float(out) if out.ndim == 0 else out


def superposition_populations(t, delta_w: float, larmor: float):
    """Populations of the symmetric/antisymmetric superpositions of the two spin waves."""
    arg = larmor * np.asarray(t, dtype=float) - 0.5 * delta_w
    return np.cos(arg) ** 2, np.sin(arg) ** 2


def projected_population(delta_r, delta_w, larmor, t):
    """Population projected onto the superposition selected by ``delta_r``."""
    return np.cos(0.5 * np.asarray(delta_r) - 0.5 * np.asarray(delta_w) + np.asarray(larmor) * t) ** 2


def compensation_phase(tau: float, larmor: float, delta_w: float) -> float:
    """Read-pair phase that cancels the Larmor phase accrued over ``tau``."""
    if tau < 0:
        raise InvalidParameterError("storage interval must be >= 0")
    return wrap_phase(delta_w - 2.0 * larmor * tau)
