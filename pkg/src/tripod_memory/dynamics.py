"""Time-domain tripod atom-field integrator.

Single-excitation amplitude equations for a weak probe on |a> -> |e> with the
two coupling components on |c> -> |e> (Omega+) and |b> -> |e> (Omega-)::

    dP_j/dt = -g_P P_j + i (Omega+ C_j + Omega- B_j) + i k E_j
    dC_j/dt = i conj(Omega+) P_j - (i Omega_L + 1/2t0) C_j
    dB_j/dt = i conj(Omega-) P_j + (i Omega_L - 1/2t0) B_j
    E_{j+1} = E_j + i k P_j

``P, C, B`` are the collective sigma_ea, sigma_ca, sigma_ba amplitudes of slice
``j`` (``nz`` slices, ``E_1`` is the input envelope and ``E_{nz+1}`` the output).
The field is stepped through the medium in retarded time with a first-order
upwind update. With ``k^2 = gN * length / nz`` the slice update is the
discretised ``dE/dz = i (gN/c) P`` of the slowly varying envelope equations and
``|E|^2`` is an energy flux. ``g_P = (k^2 + Gamma_e) / 2`` keeps the energy
balance exact per slice: the excitation lost from the atoms either leaves in
the probe mode or through spontaneous emission at ``Gamma_e``. In
closed-system mode ``Gamma_e`` is routed into the probe mode as well and the
total (atoms + emitted light) equals the input.

Integration is fixed-step RK4 inside *active windows* (probe present or any
beam on, plus a short settling tail). Between windows nothing drives the
atoms and the linear system is propagated exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np
from scipy import linalg, optimize

from .analytic import BeamPair, MagneticEnvironment, ProbePulse, TWO_PI
from .errors import InvalidParameterError, InvalidScheduleError, StabilityError

STABILITY_BOUND = 0.1


@dataclass(frozen=True)
class AtomParams:
    """Ensemble parameters.

    ``length`` is the medium length in units of ``c / gN``, so the collective
    emission rate into the probe mode is ``gN * length``.
    """

    gN: float
    gamma_e: float
    t0: float = math.inf
    length: float = 1.0
    closed_system: bool = False

    def __post_init__(self):
        if not self.gN > 0:
            raise InvalidParameterError("gN must be > 0")
        if not self.gamma_e > 0:
            raise InvalidParameterError("gamma_e must be > 0")
        if not self.t0 > 0:
            raise InvalidParameterError("t0 must be > 0")
        if not self.length > 0:
            raise InvalidParameterError("length must be > 0")

    @property
    def collective_rate(self) -> float:
        return self.gN * self.length

    @property
    def optical_depth(self) -> float:
        """Resonant intensity optical depth of the bare two-level medium."""
        return 4.0 * self.collective_rate / self.gamma_e

    @property
    def retrieval_ceiling(self) -> float:
        """Fraction of an excited bright spin wave that leaves in the probe mode."""
        if self.closed_system:
            return 1.0
        return self.collective_rate / (self.collective_rate + self.gamma_e)


@dataclass(frozen=True)
class BeamRamp:
    """A beam pair switched on and off with raised-cosine edges.

    Each edge is centred on its nominal time and lasts ``ramp_width``.
    ``on_time = -inf`` means the beam is already on when the simulation starts.
    """

    pair: BeamPair
    on_time: float = -math.inf
    off_time: float = math.inf
    ramp_width: float = 2e-9

    def __post_init__(self):
        if not self.ramp_width > 0:
            raise InvalidScheduleError("ramp_width must be > 0")
        if math.isfinite(self.on_time) and math.isfinite(self.off_time) and not self.off_time > self.on_time:
            raise InvalidScheduleError("off_time must be after on_time")
        if math.isfinite(self.on_time) and math.isfinite(self.off_time) and self.off_time - self.on_time < self.ramp_width:
            raise InvalidScheduleError("on and off edges of a ramp overlap")

    @property
    def support(self) -> tuple[float, float]:
        h = 0.5 * self.ramp_width
        return self.on_time - h, self.off_time + h

    def _edge(self, x):
        w = self.ramp_width
        return np.where(x <= -0.5 * w, 0.0, np.where(x >= 0.5 * w, 1.0, 0.5 * (1.0 + np.sin(np.pi * x / w))))

    def _edge_slope(self, x):
        w = self.ramp_width
        return np.where(np.abs(x) < 0.5 * w, 0.5 * np.pi / w * np.cos(np.pi * x / w), 0.0)

    def envelope(self, t) -> np.ndarray:
        """Switching function in [0, 1]."""
        t = np.asarray(t, dtype=float)
        f = np.ones_like(t)
        if math.isfinite(self.on_time):
            f = f * self._edge(t - self.on_time)
        if math.isfinite(self.off_time):
            f = f * (1.0 - self._edge(t - self.off_time))
        return f

    def envelope_slope(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        on = self._edge(t - self.on_time) if math.isfinite(self.on_time) else np.ones_like(t)
        off = 1.0 - self._edge(t - self.off_time) if math.isfinite(self.off_time) else np.ones_like(t)
        d_on = self._edge_slope(t - self.on_time) if math.isfinite(self.on_time) else np.zeros_like(t)
        d_off = -self._edge_slope(t - self.off_time) if math.isfinite(self.off_time) else np.zeros_like(t)
        return d_on * off + on * d_off

    def rabi(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Complex ``(Omega+(t), Omega-(t))``."""
        f = self.envelope(t)
        op, om = self.pair.complex_rabi
        return op * f, om * f


@dataclass(frozen=True)
class SimGrid:
    """Spatial slices and RK4 step. ``nz = 1`` is the uniform-medium mode."""

    nz: int = 1
    dt: float = 2.5e-12

    def __post_init__(self):
        if self.nz < 1:
            raise InvalidParameterError("nz must be >= 1")
        if not self.dt > 0:
            raise InvalidParameterError("dt must be > 0")

    @property
    def dz(self) -> float:
        return 1.0 / self.nz

    def halved(self) -> "SimGrid":
        return SimGrid(self.nz, self.dt / 2)


@dataclass
class SimResult:
    """Time series and energy bookkeeping of one run.

    Energies are in units of the probe's energy scale (flux integrated over
    time). ``retrieved[i]`` is the light emitted from the start of read ``i``
    until the start of the next read; ``remaining[i]`` the spin-wave norm left
    at the end of that read's window.
    """

    times: np.ndarray
    probe_in: np.ndarray
    probe_out: np.ndarray
    sigma_ea: np.ndarray
    sigma_ca: np.ndarray
    sigma_ba: np.ndarray
    input_energy: float
    transmitted: float
    stored_energy: float
    retrieved: list[float]
    remaining: list[float]
    spontaneous_loss: float
    decoherence_loss: float
    steps: int
    windows: list[tuple[float, float]] = field(default_factory=list)

    @property
    def retrieved_energy(self) -> float:
        return float(sum(self.retrieved))

    @property
    def final_excitation(self) -> float:
        return float(
            np.sum(np.abs(self.sigma_ea[-1]) ** 2 + np.abs(self.sigma_ca[-1]) ** 2 + np.abs(self.sigma_ba[-1]) ** 2)
        )

    @property
    def emitted_energy(self) -> float:
        return self.transmitted + self.retrieved_energy

    def energy_balance(self) -> float:
        """Input minus everything accounted for; zero up to integration error."""
        return self.input_energy - (
            self.final_excitation + self.emitted_energy + self.spontaneous_loss + self.decoherence_loss
        )


@numba.njit(cache=True)
def _rhs(P, C, B, op, om, ein, kap, gp, wl, dec, dP, dC, dB):
    e = ein
    cop = np.conj(op)
    com = np.conj(om)
    for j in range(P.shape[0]):
        dP[j] = -gp * P[j] + 1j * (op * C[j] + om * B[j]) + 1j * kap * e
        dC[j] = 1j * cop * P[j] - (1j * wl + dec) * C[j]
        dB[j] = 1j * com * P[j] + (1j * wl - dec) * B[j]
        e = e + 1j * kap * P[j]
    return e


@numba.njit(cache=True)
def _rk4_window(P, C, B, op, om, ein, dt, kap, gp, wl, dec):
    """Integrate one window. Drive arrays are sampled every dt/2 (length 2n+1)."""
    nz = P.shape[0]
    n = (op.shape[0] - 1) // 2
    out = np.empty(n + 1, np.complex128)
    Ph = np.empty((n + 1, nz), np.complex128)
    Ch = np.empty((n + 1, nz), np.complex128)
    Bh = np.empty((n + 1, nz), np.complex128)
    k = np.empty((4, 3, nz), np.complex128)
    tP = np.empty(nz, np.complex128)
    tC = np.empty(nz, np.complex128)
    tB = np.empty(nz, np.complex128)

    out[0] = _rhs(P, C, B, op[0], om[0], ein[0], kap, gp, wl, dec, k[0, 0], k[0, 1], k[0, 2])
    Ph[0] = P
    Ch[0] = C
    Bh[0] = B
    h = 0.5 * dt
    for i in range(n):
        a = 2 * i
        _rhs(P, C, B, op[a], om[a], ein[a], kap, gp, wl, dec, k[0, 0], k[0, 1], k[0, 2])
        for j in range(nz):
            tP[j] = P[j] + h * k[0, 0, j]
            tC[j] = C[j] + h * k[0, 1, j]
            tB[j] = B[j] + h * k[0, 2, j]
        _rhs(tP, tC, tB, op[a + 1], om[a + 1], ein[a + 1], kap, gp, wl, dec, k[1, 0], k[1, 1], k[1, 2])
        for j in range(nz):
            tP[j] = P[j] + h * k[1, 0, j]
            tC[j] = C[j] + h * k[1, 1, j]
            tB[j] = B[j] + h * k[1, 2, j]
        _rhs(tP, tC, tB, op[a + 1], om[a + 1], ein[a + 1], kap, gp, wl, dec, k[2, 0], k[2, 1], k[2, 2])
        for j in range(nz):
            tP[j] = P[j] + dt * k[2, 0, j]
            tC[j] = C[j] + dt * k[2, 1, j]
            tB[j] = B[j] + dt * k[2, 2, j]
        _rhs(tP, tC, tB, op[a + 2], om[a + 2], ein[a + 2], kap, gp, wl, dec, k[3, 0], k[3, 1], k[3, 2])
        for j in range(nz):
            P[j] += dt / 6.0 * (k[0, 0, j] + 2.0 * k[1, 0, j] + 2.0 * k[2, 0, j] + k[3, 0, j])
            C[j] += dt / 6.0 * (k[0, 1, j] + 2.0 * k[1, 1, j] + 2.0 * k[2, 1, j] + k[3, 1, j])
            B[j] += dt / 6.0 * (k[0, 2, j] + 2.0 * k[1, 2, j] + 2.0 * k[2, 2, j] + k[3, 2, j])
        out[i + 1] = _rhs(P, C, B, op[a + 2], om[a + 2], ein[a + 2], kap, gp, wl, dec, k[0, 0], k[0, 1], k[0, 2])
        Ph[i + 1] = P
        Ch[i + 1] = C
        Bh[i + 1] = B
    return out, Ph, Ch, Bh


def _trapz(y: np.ndarray, dt: float) -> float:
    if y.shape[0] < 2:
        return 0.0
    return float(dt * (np.sum(y) - 0.5 * (y[0] + y[-1])))


def _slice_couplings(atoms: AtomParams, nz: int) -> tuple[float, float, float]:
    """Return (k, g_P, incoherent loss rate) for one slice."""
    k2 = atoms.collective_rate / nz
    if atoms.closed_system:
        k2 += atoms.gamma_e
        return math.sqrt(k2), 0.5 * k2, 0.0
    return math.sqrt(k2), 0.5 * (k2 + atoms.gamma_e), atoms.gamma_e


def max_rate(write: BeamRamp, reads: Sequence[BeamRamp], env: MagneticEnvironment, atoms: AtomParams) -> float:
    rabi = max([write.pair.total] + [r.pair.total for r in reads])
    rates = [atoms.gN, atoms.collective_rate, atoms.gamma_e, rabi, env.larmor]
    if atoms.closed_system:
        rates.append(atoms.collective_rate + atoms.gamma_e)
    return max(rates)


def check_stability(dt: float, write: BeamRamp, reads: Sequence[BeamRamp], env: MagneticEnvironment, atoms: AtomParams):
    fastest = max_rate(write, reads, env, atoms)
    if dt * fastest >= STABILITY_BOUND:
        raise StabilityError(
            f"dt * max rate = {dt * fastest:.3g} >= {STABILITY_BOUND}: fastest rate {fastest:.4g} rad/s "
            f"needs dt < {STABILITY_BOUND / fastest:.4g} s (got {dt:.4g} s)"
        )


def check_schedule(write: BeamRamp, reads: Sequence[BeamRamp]):
    if not math.isfinite(write.off_time):
        raise InvalidScheduleError("write beam must be switched off")
    prev_end = write.support[1]
    prev_name = "write"
    for i, r in enumerate(reads):
        if not (math.isfinite(r.on_time) and math.isfinite(r.off_time)):
            raise InvalidScheduleError(f"read {i} needs finite on and off times")
        start, end = r.support
        if start < prev_end:
            raise InvalidScheduleError(f"read {i} ramp overlaps the {prev_name} ramp")
        prev_end, prev_name = end, f"read {i}"


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def simulate(
    probe: ProbePulse,
    write: BeamRamp,
    reads: Sequence[BeamRamp],
    env: MagneticEnvironment,
    atoms: AtomParams,
    grid: SimGrid = SimGrid(),
    settle: float | None = None,
) -> SimResult:
    """Integrate one write followed by a list of reads.

    Raises :class:`StabilityError` if ``dt`` violates the step bound and
    :class:`InvalidScheduleError` if ramps overlap or are out of order.
    Output is deterministic for fixed inputs.
    """
    reads = list(reads)
    check_schedule(write, reads)
    check_stability(grid.dt, write, reads, env, atoms)

    nz, dt = grid.nz, grid.dt
    kap, gp, loss_rate = _slice_couplings(atoms, nz)
    dec = 0.5 / atoms.t0 if math.isfinite(atoms.t0) else 0.0
    wl = env.larmor
    if settle is None:
        settle = 40.0 / gp

    w_start, w_end = write.support
    t_begin = probe.start if not math.isfinite(w_start) else min(w_start, probe.start)
    intervals = [(t_begin, max(probe.end, w_end) + settle)]
    intervals += [(r.support[0], r.support[1] + settle) for r in reads]
    windows = _merge(intervals)

    # lower-triangular cascade generator for the atomic polarisation in gaps
    cascade = -gp * np.eye(nz, dtype=complex) - kap * kap * np.tril(np.ones((nz, nz)), -1)

    P = np.zeros(nz, complex)
    C = np.zeros(nz, complex)
    B = np.zeros(nz, complex)
    ramps = [write] + reads

    t_chunks, in_chunks, out_chunks, P_chunks, C_chunks, B_chunks = [], [], [], [], [], []
    spont = 0.0
    decoh = 0.0
    steps = 0
    t_now = windows[0][0]
    for a, b in windows:
        gap = a - t_now
        if gap > 0:
            norm_before = float(np.sum(np.abs(C) ** 2 + np.abs(B) ** 2))
            C = C * np.exp(-(1j * wl + dec) * gap)
            B = B * np.exp((1j * wl - dec) * gap)
            P = linalg.expm(cascade * gap) @ P
            decoh += norm_before * (1.0 - math.exp(-2.0 * dec * gap))
        n = max(1, int(math.ceil((b - a) / dt)))
        th = a + 0.5 * dt * np.arange(2 * n + 1)
        op = np.zeros_like(th, dtype=complex)
        om = np.zeros_like(th, dtype=complex)
        for r in ramps:
            s0, s1 = r.support
            if s1 < a or s0 > th[-1]:
                continue
            rp, rm = r.rabi(th)
            op += rp
            om += rm
        ein = np.asarray(probe.envelope(th), dtype=complex)
        out, Ph, Ch, Bh = _rk4_window(P, C, B, op, om, ein, dt, kap, gp, wl, dec)
        t = th[::2]
        t_chunks.append(t)
        in_chunks.append(ein[::2])
        out_chunks.append(out)
        P_chunks.append(Ph)
        C_chunks.append(Ch)
        B_chunks.append(Bh)
        spont += loss_rate * _trapz(np.sum(np.abs(Ph) ** 2, axis=1), dt)
        decoh += 2.0 * dec * _trapz(np.sum(np.abs(Ch) ** 2 + np.abs(Bh) ** 2, axis=1), dt)
        steps += n
        t_now = t[-1]

    times = np.concatenate(t_chunks)
    norm = np.sum(np.abs(np.concatenate(C_chunks)) ** 2 + np.abs(np.concatenate(B_chunks)) ** 2, axis=1)

    # attribute emitted light to the write phase and to each read
    bounds = [r.support[0] for r in reads] + [math.inf]
    emitted = np.zeros(len(reads) + 1)
    for tw, ow in zip(t_chunks, out_chunks):
        fw = np.abs(ow) ** 2
        seg = 0.5 * dt * (fw[:-1] + fw[1:])
        owner = np.searchsorted(np.asarray(bounds[:-1]), tw[:-1], side="right")
        emitted += np.bincount(owner, weights=seg, minlength=len(reads) + 1)

    def norm_before(tb: float) -> float:
        i = int(np.searchsorted(times, tb, side="left")) - 1
        return float(norm[max(i, 0)])

    stored = norm_before(bounds[0]) if reads else float(norm[-1])
    remaining = [norm_before(bounds[i + 1]) if i + 1 < len(reads) else float(norm[-1]) for i in range(len(reads))]

    return SimResult(
        times=times,
        probe_in=np.concatenate(in_chunks),
        probe_out=np.concatenate(out_chunks),
        sigma_ea=np.concatenate(P_chunks),
        sigma_ca=np.concatenate(C_chunks),
        sigma_ba=np.concatenate(B_chunks),
        input_energy=probe.energy,
        transmitted=float(emitted[0]),
        stored_energy=stored,
        retrieved=[float(x) for x in emitted[1:]],
        remaining=remaining,
        spontaneous_loss=spont,
        decoherence_loss=decoh,
        steps=steps,
        windows=windows,
    )


# ---------------------------------------------------------------------------
# Storage protocol helpers

DEFAULT_GN = TWO_PI * 6000e6
DEFAULT_GAMMA_E = TWO_PI * 5.746e6  # Rb D1 natural linewidth


@dataclass(frozen=True)
class NumericSetup:
    """Beam magnitudes, ramps and probe used to turn a storage protocol into ramps.

    Rabi frequencies are per active component (rad/s). The probe is centred at
    ``t = 0`` and the write beam is switched off at ``write_offset``; storage
    times are counted from that switch-off to the centre of a read's turn-on
    edge.
    """

    atoms: AtomParams = AtomParams(DEFAULT_GN, DEFAULT_GAMMA_E)
    grid: SimGrid = SimGrid()
    probe_fwhm: float = 4e-9
    write_rabi: float = TWO_PI * 350e6
    read_rabi: float = TWO_PI * 260e6
    write_ramp: float = 2e-9
    read_ramp: float = 2e-9
    read_duration: float = 30e-9
    write_offset: float = 2e-9

    @property
    def min_tau(self) -> float:
        """Shortest storage time whose read starts after the probe has passed."""
        probe_tail = self.probe().end - self.write_offset
        return max(0.5 * self.write_ramp, probe_tail) + 0.5 * self.read_ramp

    def probe(self, energy: float = 1.0) -> ProbePulse:
        return ProbePulse.gaussian(self.probe_fwhm, energy=energy)

    def write_pair(self, delta: float, plus: bool = True, minus: bool = True) -> BeamPair:
        return BeamPair(self.write_rabi * plus, self.write_rabi * minus, delta, 0.0)

    def read_pair(self, delta: float, plus: bool = True, minus: bool = True) -> BeamPair:
        return BeamPair(self.read_rabi * plus, self.read_rabi * minus, delta, 0.0)

    def write_ramp_for(self, pair: BeamPair) -> BeamRamp:
        return BeamRamp(pair, off_time=self.write_offset, ramp_width=self.write_ramp)

    def read_ramp_at(self, tau: float, pair: BeamPair) -> BeamRamp:
        on = self.write_offset + tau
        return BeamRamp(pair, on_time=on, off_time=on + self.read_duration, ramp_width=self.read_ramp)


def run_storage(
    setup: NumericSetup,
    env: MagneticEnvironment,
    write_pair: BeamPair,
    events: Sequence[tuple[float, BeamPair]],
    probe: ProbePulse | None = None,
) -> SimResult:
    """Write, then read at each ``(storage time, pair)`` in ``events``."""
    probe = setup.probe() if probe is None else probe
    write = setup.write_ramp_for(write_pair)
    reads = [setup.read_ramp_at(tau, pair) for tau, pair in events]
    return simulate(probe, write, reads, env, setup.atoms, setup.grid)


def single_channel_reference(setup: NumericSetup, env: MagneticEnvironment) -> float:
    """Energy of a one-beam read of an equal two-channel store, extrapolated to zero storage time."""
    tau = setup.min_tau + 2e-9
    res = run_storage(setup, env, setup.write_pair(0.0), [(tau, setup.read_pair(0.0, plus=False))])
    t0 = setup.atoms.t0
    return res.retrieved[0] * (math.exp(tau / t0) if math.isfinite(t0) else 1.0)


def fringe_scan(
    setup: NumericSetup,
    env: MagneticEnvironment,
    write_pair: BeamPair,
    read_pair: BeamPair,
    tau: float,
    delta_r_values: Sequence[float],
) -> list[tuple[float, float]]:
    """Retrieved energy as the read-pair relative phase is stepped."""
    out = []
    for d in delta_r_values:
        if not math.isfinite(d):
            raise InvalidParameterError("delta_r values must be finite")
        pair = BeamPair(read_pair.omega_plus_mag, read_pair.omega_minus_mag, read_pair.phi_minus + d, read_pair.phi_minus)
        res = run_storage(setup, env, write_pair, [(tau, pair)])
        out.append((float(d), res.retrieved[0]))
    return out


def storage_scan(
    setup: NumericSetup,
    env: MagneticEnvironment,
    write_pair: BeamPair,
    read_pair: BeamPair,
    taus: Sequence[float],
) -> list[tuple[float, float]]:
    """Retrieved energy with fixed read phase and varying storage time."""
    return [(float(t), run_storage(setup, env, write_pair, [(t, read_pair)]).retrieved[0]) for t in taus]


@dataclass(frozen=True)
class FringeFit:
    """``y = offset + amplitude * cos(2 pi x / period - phase)``."""

    offset: float
    amplitude: float
    period: float
    phase: float
    residual_rms: float

    @property
    def visibility(self) -> float:
        return self.amplitude / self.offset if self.offset else 0.0

    @property
    def maximum_at(self) -> float:
        return (self.phase * self.period / TWO_PI) % self.period


def fit_fringe(x: Sequence[float], y: Sequence[float], period_guess: float = TWO_PI) -> FringeFit:
    """Least-squares sinusoid with free period."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise InvalidParameterError("need at least 4 points to fit a fringe")
    k = TWO_PI / period_guess
    lin = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])
    c0, c1, c2 = np.linalg.lstsq(lin, y, rcond=None)[0]

    def model(x, a, b, p, ph):
        return a + b * np.cos(TWO_PI * x / p - ph)

    p0 = [c0, math.hypot(c1, c2), period_guess, math.atan2(c2, c1)]
    with warnings.catch_warnings():
        # covariance is unused; exact fits make it singular
        warnings.simplefilter("ignore", optimize.OptimizeWarning)
        popt, _ = optimize.curve_fit(model, x, y, p0=p0, maxfev=20000)
    a, b, p, ph = popt
    if b < 0:
        b, ph = -b, ph + math.pi
    rms = float(np.sqrt(np.mean((model(x, *popt) - y) ** 2)))
    return FringeFit(float(a), float(b), float(p), float(ph % TWO_PI), rms)


# ---------------------------------------------------------------------------
# Adiabaticity diagnostics


class AdiabaticityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class AdiabaticityReport:
    max_theta_rate: float
    peak_excited: float
    theta_threshold: float
    excited_threshold: float
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.warnings


def _theta_rate(ramp: BeamRamp, gN: float, samples: int = 4001) -> float:
    total = ramp.pair.total
    if total == 0.0:
        return 0.0
    best = 0.0
    for edge in (ramp.on_time, ramp.off_time):
        if not math.isfinite(edge):
            continue
        t = np.linspace(edge - 0.5 * ramp.ramp_width, edge + 0.5 * ramp.ramp_width, samples)
        om = total * ramp.envelope(t)
        dom = total * ramp.envelope_slope(t)
        # |d theta/dt| / gN with theta = atan(gN / Omega)
        best = max(best, float(np.max(np.abs(dom) / (gN**2 + om**2))))
    return best


def adiabaticity_report(
    ramps: Sequence[BeamRamp],
    atoms: AtomParams,
    result: SimResult | None = None,
    theta_threshold: float = 0.1,
    excited_threshold: float = 0.01,
) -> AdiabaticityReport:
    """Mixing-angle switching rate and excited-state population while beams are on.

    The excited population is ``sum_j |sigma_ea|^2`` per unit input energy,
    taken over the times at which any coupling field is nonzero. It needs a
    ``result``; without one it is reported as 0.
    """
    theta = max([_theta_rate(r, atoms.gN) for r in ramps] + [0.0])
    peak = 0.0
    if result is not None and len(result.times):
        coupling = np.zeros_like(result.times)
        for r in ramps:
            coupling += r.pair.total * r.envelope(result.times)
        mask = coupling > 0
        if np.any(mask):
            pe = np.sum(np.abs(result.sigma_ea[mask]) ** 2, axis=1)
            scale = result.input_energy if result.input_energy > 0 else 1.0
            peak = float(np.max(pe) / scale)
    msgs = []
    if theta > theta_threshold:
        msgs.append(f"mixing angle switches too fast: max |dtheta/dt|/gN = {theta:.3g} > {theta_threshold}")
    if peak > excited_threshold:
        msgs.append(f"excited-state population {peak:.3g} exceeds {excited_threshold}")
    for m in msgs:
        warnings.warn(m, AdiabaticityWarning, stacklevel=2)
    return AdiabaticityReport(theta, peak, theta_threshold, excited_threshold, tuple(msgs))
