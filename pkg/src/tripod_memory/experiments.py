"""Scenario runners: storage/readout protocols on the analytic and numeric engines.

Intensities are in units of the single-channel readout (one read beam on an
equal two-channel store) with the ground-state decay divided out, so a fully
constructive two-beam read is 2 at every storage time. Energies are absolute:
the analytic engine stores ``2 * a_baseline`` of the probe energy and the
numeric engine reports what it integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analytic as an
from .analytic import TWO_PI, BeamPair, MagneticEnvironment, ProbePulse
from .csvio import Table
from .dynamics import (
    DEFAULT_GAMMA_E,
    DEFAULT_GN,
    AtomParams,
    NumericSetup,
    SimGrid,
    adiabaticity_report,
    fit_fringe,
    run_storage,
    single_channel_reference,
)
from .errors import InvalidParameterError, InvalidScheduleError

ENGINES = ("analytic", "numeric", "both")
PI = math.pi


@dataclass(frozen=True)
class ExperimentParams:
    """Physical and numerical parameters shared by all scenarios (SI units, rad/s)."""

    env: MagneticEnvironment = MagneticEnvironment.from_larmor(TWO_PI * 0.21e6)
    delta_w: float = 0.5 * PI
    delta_r: float = 0.2 * PI
    tau: float = 380e-9
    tau2: float = 3.4e-6
    t0: float = 90e-6
    probe_fwhm: float = 4e-9
    a_baseline: float = 0.05
    fig5_t_min: float = 0.38e-6
    fig5_t_max: float = 100e-6
    # numeric engine
    gN: float = DEFAULT_GN
    gamma_e: float = DEFAULT_GAMMA_E
    length: float = 1.0
    nz: int = 1
    dt: float = 2.5e-12
    write_rabi: float = TWO_PI * 350e6
    read_rabi: float = TWO_PI * 260e6
    write_ramp: float = 2e-9
    read_ramp: float = 2e-9
    read_duration: float = 30e-9
    write_offset: float = 2e-9
    closed_system: bool = False

    def __post_init__(self):
        for name in ("tau", "tau2", "probe_fwhm", "write_ramp", "read_ramp", "read_duration", "fig5_t_min", "fig5_t_max"):
            if not getattr(self, name) >= 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if not self.t0 > 0:
            raise InvalidParameterError("t0 must be > 0")
        if not 0 <= 2 * self.a_baseline <= 1:
            raise InvalidParameterError("a_baseline must lie in [0, 0.5]")

    @property
    def larmor(self) -> float:
        return self.env.larmor

    @property
    def store_efficiency(self) -> float:
        return 2.0 * self.a_baseline

    @property
    def probe(self) -> ProbePulse:
        return ProbePulse.gaussian(self.probe_fwhm)

    @property
    def phi(self) -> float:
        """Phase offset of the uncompensated collapse-and-revival curve."""
        return self.delta_w - self.delta_r

    def numeric_setup(self) -> NumericSetup:
        atoms = AtomParams(self.gN, self.gamma_e, self.t0, self.length, self.closed_system)
        return NumericSetup(
            atoms=atoms,
            grid=SimGrid(self.nz, self.dt),
            probe_fwhm=self.probe_fwhm,
            write_rabi=self.write_rabi,
            read_rabi=self.read_rabi,
            write_ramp=self.write_ramp,
            read_ramp=self.read_ramp,
            read_duration=self.read_duration,
            write_offset=self.write_offset,
        )


def pair(delta: float, plus: bool = True, minus: bool = True) -> BeamPair:
    """Unit-magnitude beam pair with relative phase ``delta``."""
    return BeamPair(float(plus), float(minus), delta if plus else 0.0, 0.0)


@dataclass(frozen=True)
class ExperimentSchedule:
    """One write followed by reads at storage times counted from the write switch-off.

    Beam pairs carry directions only (magnitude 1 per active component); the
    numeric engine rescales them to its configured Rabi frequencies.
    ``store_efficiency`` overrides the analytic engine's default when set.
    """

    scenario: str
    write: BeamPair
    probe: ProbePulse
    events: tuple[tuple[float, BeamPair], ...]
    engine: str = "analytic"
    store_efficiency: float | None = None

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise InvalidParameterError(f"engine must be one of {ENGINES}")
        if not self.events:
            raise InvalidScheduleError("schedule needs at least one read")
        times = [t for t, _ in self.events]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidScheduleError("read times must be strictly increasing")
        tail = self.probe.end - self.probe.center
        if not times[0] > tail:
            raise InvalidScheduleError(f"first read at {times[0]:.3g} s is not after the probe ends ({tail:.3g} s)")


@dataclass(frozen=True)
class ReadoutRow:
    """One read event. Phases are stored in units of pi, as in the CSV."""

    time_s: float
    delta_r_pi: float
    total_phase_pi: float
    intensity: float
    energy: float
    remaining: float

    @property
    def delta_r(self) -> float:
        return self.delta_r_pi * PI

    @property
    def total_phase(self) -> float:
        return self.total_phase_pi * PI


ROW_COLUMNS = ["time_s", "delta_r_pi", "total_phase_pi", "intensity", "energy", "remaining"]


@dataclass
class ReadoutRecord:
    label: str
    engine: str
    rows: list[ReadoutRow] = field(default_factory=list)
    params: dict[str, str] = field(default_factory=dict)

    def check(self) -> None:
        rem = [r.remaining for r in self.rows]
        if any(b > a * (1 + 1e-9) + 1e-15 for a, b in zip(rem, rem[1:])):
            raise InvalidScheduleError("remaining stored norm increased between reads")

    def to_table(self) -> Table:
        meta = {"label": self.label, "engine": self.engine, **self.params}
        rows = [[getattr(r, c) for c in ROW_COLUMNS] for r in self.rows]
        return Table(list(ROW_COLUMNS), rows, meta)

    def to_csv(self) -> str:
        return self.to_table().to_csv()

    @classmethod
    def from_csv(cls, text: str) -> "ReadoutRecord":
        t = Table.from_csv(text)
        if t.columns != ROW_COLUMNS:
            raise ValueError(f"unexpected columns {t.columns}")
        meta = dict(t.meta)
        label = meta.pop("label", "")
        engine = meta.pop("engine", "analytic")
        rows = [ReadoutRow(*r) for r in t.rows]
        return cls(label, engine, rows, meta)

    @property
    def intensities(self) -> list[float]:
        return [r.intensity for r in self.rows]

    @property
    def energies(self) -> list[float]:
        return [r.energy for r in self.rows]


def _pi(x: float) -> float:
    return an.wrap_phase(x) / PI


def _record_params(params: ExperimentParams, schedule: ExperimentSchedule, **extra) -> dict[str, str]:
    out = {
        "scenario": schedule.scenario,
        "delta_w_pi": repr(_pi(schedule.write.delta)),
        "larmor_mhz": repr(params.env.larmor_hz / 1e6),
        "t0_us": repr(params.t0 * 1e6),
        "probe_fwhm_ns": repr(schedule.probe.duration * 1e9),
    }
    out.update({k: repr(v) for k, v in extra.items()})
    return out


class AnalyticEngine:
    name = "analytic"

    def __init__(self, params: ExperimentParams):
        self.params = params

    def single_energy(self, tau: float) -> float:
        """Single-channel readout energy of an equal two-channel store."""
        p = self.params
        return 0.5 * p.store_efficiency * math.exp(-tau / p.t0)

    def run(self, schedule: ExperimentSchedule, label: str = "") -> ReadoutRecord:
        p = self.params
        eta = p.store_efficiency if schedule.store_efficiency is None else schedule.store_efficiency
        state = an.store(schedule.probe, schedule.write, eta)
        rec = ReadoutRecord(label or schedule.scenario, self.name, params=_record_params(p, schedule, store_efficiency=eta))
        t_prev = 0.0
        for tau, rp in schedule.events:
            state = an.evolve(state, tau - t_prev, p.env, p.t0)
            t_prev = tau
            amp, state = an.read(state, rp)
            energy = abs(amp) ** 2
            ref = self.single_energy(tau)
            rec.rows.append(
                ReadoutRow(
                    tau,
                    _pi(rp.delta),
                    _pi(an.total_phase(rp.delta, schedule.write.delta, p.larmor, tau)),
                    energy / ref if ref > 0 else 0.0,
                    energy,
                    state.stored_norm,
                )
            )
        rec.check()
        return rec


class NumericEngine:
    name = "numeric"

    def __init__(self, params: ExperimentParams):
        self.params = params
        self.setup = params.numeric_setup()
        self._reference: float | None = None
        self.last_reports: list = []

    @property
    def reference(self) -> float:
        """Single-channel readout energy at zero storage time."""
        if self._reference is None:
            self._reference = single_channel_reference(self.setup, self.params.env)
        return self._reference

    def scale(self, bp: BeamPair, rabi: float) -> BeamPair:
        return BeamPair(bp.omega_plus_mag * rabi, bp.omega_minus_mag * rabi, bp.phi_plus, bp.phi_minus)

    def run(self, schedule: ExperimentSchedule, label: str = "") -> ReadoutRecord:
        p = self.params
        s = self.setup
        write = self.scale(schedule.write, s.write_rabi)
        events = [(tau, self.scale(rp, s.read_rabi)) for tau, rp in schedule.events]
        res = run_storage(s, p.env, write, events, schedule.probe)
        ramps = [s.write_ramp_for(write)] + [s.read_ramp_at(t, rp) for t, rp in events]
        self.last_reports.append(adiabaticity_report(ramps, s.atoms, res))
        rec = ReadoutRecord(
            label or schedule.scenario,
            self.name,
            params=_record_params(p, schedule, single_channel_reference=self.reference, input_energy=res.input_energy),
        )
        for (tau, rp), energy, rem in zip(schedule.events, res.retrieved, res.remaining):
            ref = self.reference * math.exp(-tau / p.t0)
            rec.rows.append(
                ReadoutRow(
                    tau,
                    _pi(rp.delta),
                    _pi(an.total_phase(rp.delta, schedule.write.delta, p.larmor, tau)),
                    energy / ref,
                    energy,
                    rem,
                )
            )
        rec.check()
        return rec


def discrepancy(intensity_numeric: float, intensity_analytic: float) -> float:
    """Analytic/numeric mismatch as a fraction of the full two-channel scale."""
    return abs(intensity_numeric - intensity_analytic) / 2.0


def retrieved_fraction(row: ReadoutRow) -> float:
    """Share of the spin wave present at a read that the read emitted."""
    total = row.energy + row.remaining
    return row.energy / total if total > 0 else 0.0


def fraction_discrepancy(numeric: ReadoutRow, analytic: ReadoutRow) -> float:
    """Mismatch of retrieved fractions.

    Used for single-channel stores, whose absolute storage efficiency differs
    between the engines: the numeric medium is optically thick enough that one
    write beam stores about as much as two.
    """
    return abs(retrieved_fraction(numeric) - retrieved_fraction(analytic))


@dataclass
class ScenarioResult:
    """Table for output plus the per-engine records behind it.

    ``discrepancies`` lists every analytic/numeric comparison made.
    """

    name: str
    table: Table
    records: dict[str, list[ReadoutRecord]] = field(default_factory=dict)
    discrepancies: list[tuple[str, float]] = field(default_factory=list)
    plot_x: str = ""
    plot_y: list[str] = field(default_factory=list)
    ylabel: str = "intensity (single-channel units)"

    @property
    def max_discrepancy(self) -> float:
        return max((d for _, d in self.discrepancies), default=0.0)

    def within(self, tolerance: float = 0.02) -> bool:
        return self.max_discrepancy <= tolerance


def _engines(params: ExperimentParams, engine: str):
    if engine not in ENGINES:
        raise InvalidParameterError(f"engine must be one of {ENGINES}, got {engine!r}")
    ana = AnalyticEngine(params)
    num = NumericEngine(params) if engine in ("numeric", "both") else None
    return ana, num


def _run_all(ana, num, schedules: Sequence[tuple[str, ExperimentSchedule]], result: ScenarioResult):
    out = []
    for label, sch in schedules:
        ra = ana.run(sch, label)
        result.records.setdefault("analytic", []).append(ra)
        rn = None
        if num is not None:
            rn = num.run(sch, label)
            result.records.setdefault("numeric", []).append(rn)
        out.append((ra, rn))
    return out


def _adiabatic_meta(num: NumericEngine | None, table: Table):
    if num is None or not num.last_reports:
        return
    table.meta["max_theta_rate"] = repr(max(r.max_theta_rate for r in num.last_reports))
    table.meta["peak_excited"] = repr(max(r.peak_excited for r in num.last_reports))


def _event_columns(engine: str) -> list[str]:
    cols = ["intensity", "energy", "remaining"]
    if engine in ("numeric", "both"):
        cols += ["intensity_numeric", "energy_numeric", "remaining_numeric"]
    if engine == "both":
        cols.append("discrepancy")
    return cols


def _compare(ra_row: ReadoutRow, rn_row: ReadoutRow, single_store: bool) -> float:
    if single_store:
        return fraction_discrepancy(rn_row, ra_row)
    return discrepancy(rn_row.intensity, ra_row.intensity)


def _event_values(ra_row: ReadoutRow, rn_row: ReadoutRow | None, engine: str, single_store: bool = False) -> list[float]:
    vals = [ra_row.intensity, ra_row.energy, ra_row.remaining]
    if rn_row is not None:
        vals += [rn_row.intensity, rn_row.energy, rn_row.remaining]
    if engine == "both":
        vals.append(_compare(ra_row, rn_row, single_store))
    return vals


# ---------------------------------------------------------------------------
# Scenarios


def run_fig2(params: ExperimentParams = ExperimentParams(), engine: str = "analytic") -> ScenarioResult:
    """Single-channel reference, each single-beam read, and the constructive two-beam read.

    Panels are numbered 1-4 for (a)-(d). The two-beam read uses the
    Larmor-compensated phase so its total phase is exactly zero.
    """
    ana, num = _engines(params, engine)
    p = params
    probe = p.probe
    dr = an.compensation_phase(p.tau, p.larmor, p.delta_w)
    schedules = [
        ("a", ExperimentSchedule("fig2", pair(0.0, plus=False), probe, ((p.tau, pair(0.0, plus=False)),), engine, 0.5 * p.store_efficiency)),
        ("b", ExperimentSchedule("fig2", pair(p.delta_w), probe, ((p.tau, pair(0.0, plus=False)),), engine)),
        ("c", ExperimentSchedule("fig2", pair(p.delta_w), probe, ((p.tau, pair(0.0, minus=False)),), engine)),
        ("d", ExperimentSchedule("fig2", pair(p.delta_w), probe, ((p.tau, pair(dr)),), engine)),
    ]
    cols = ["panel", "tau_us", "delta_r_pi", "total_phase_pi"] + _event_columns(engine)
    table = Table(cols, title="fig2: single-channel vs two-channel readout at one storage time")
    table.meta["panels"] = "1 single-channel store and read; 2 minus-beam read; 3 plus-beam read; 4 two-beam read"
    if engine == "both":
        table.meta["discrepancy"] = "panel 1 compares retrieved fractions; others compare intensities"
    result = ScenarioResult("fig2", table, plot_x="panel", plot_y=["intensity"] + (["intensity_numeric"] if num else []))
    for i, (ra, rn) in enumerate(_run_all(ana, num, schedules, result), start=1):
        a = ra.rows[0]
        b = rn.rows[0] if rn else None
        single = ra.label == "a"
        table.add(i, a.time_s * 1e6, a.delta_r_pi, a.total_phase_pi, *_event_values(a, b, engine, single))
        if engine == "both":
            result.discrepancies.append((ra.label, _compare(a, b, single)))
    _adiabatic_meta(num, table)
    return result


def run_fig3(params: ExperimentParams = ExperimentParams(), engine: str = "analytic") -> ScenarioResult:
    """Destructive first read, then a read with the write-beam phases at the second storage time.

    Panel 1 reads twice; panel 2 skips the first read.
    """
    ana, num = _engines(params, engine)
    p = params
    probe = p.probe
    destructive = an.wrap_phase(an.compensation_phase(p.tau, p.larmor, p.delta_w) + PI)
    schedules = [
        ("a", ExperimentSchedule("fig3", pair(p.delta_w), probe, ((p.tau, pair(destructive)), (p.tau2, pair(p.delta_w))), engine)),
        ("b", ExperimentSchedule("fig3", pair(p.delta_w), probe, ((p.tau2, pair(p.delta_w)),), engine)),
    ]
    cols = ["panel", "read", "tau_us", "delta_r_pi", "total_phase_pi"] + _event_columns(engine)
    table = Table(cols, title="fig3: out-of-phase first read and later second read")
    table.meta["tau2_us"] = repr(p.tau2 * 1e6)
    result = ScenarioResult("fig3", table, plot_x="tau_us", plot_y=["intensity"] + (["intensity_numeric"] if num else []))
    for i, (ra, rn) in enumerate(_run_all(ana, num, schedules, result), start=1):
        for k, a in enumerate(ra.rows):
            b = rn.rows[k] if rn else None
            table.add(i, k + 1, a.time_s * 1e6, a.delta_r_pi, a.total_phase_pi, *_event_values(a, b, engine))
            if engine == "both":
                result.discrepancies.append((f"{ra.label}{k + 1}", discrepancy(b.intensity, a.intensity)))
    _adiabatic_meta(num, table)
    return result


def second_read_pair(first: BeamPair, tau1: float, tau2: float, larmor: float) -> BeamPair:
    """Pair that reads back everything a first read at ``tau1`` left behind, at ``tau2``."""
    dark = first.dark_partner()
    return BeamPair(dark.omega_plus_mag, dark.omega_minus_mag, dark.phi_plus, dark.phi_minus + 2.0 * larmor * (tau2 - tau1))


def run_fig4(
    delta_r_values: Sequence[float],
    params: ExperimentParams = ExperimentParams(),
    engine: str = "analytic",
) -> ScenarioResult:
    """First read at ``tau`` with phase ``delta_r``; second read at ``tau2``.

    ``second`` reads the complement left by the first read (anti-phase fringe);
    ``second_fixed`` reads with the write-beam phases instead.
    """
    values = [float(v) for v in delta_r_values]
    if not values:
        raise InvalidParameterError("delta_r grid must be non-empty")
    ana, num = _engines(params, engine)
    p = params
    probe = p.probe
    cols = ["delta_r_pi", "first_intensity", "second_intensity", "sum_intensity", "second_fixed_intensity"]
    ncols = [c + "_numeric" for c in cols[1:]]
    if num is not None:
        cols += ncols
    if engine == "both":
        cols += ["discrepancy_first", "discrepancy_second"]
    table = Table(cols, title="fig4: first and second read vs read-pair phase")
    table.meta["tau2_us"] = repr(p.tau2 * 1e6)
    result = ScenarioResult(
        "fig4",
        table,
        plot_x="delta_r_pi",
        plot_y=["first_intensity", "second_intensity"] + (["first_intensity_numeric", "second_intensity_numeric"] if num else []),
    )
    for i, d in enumerate(values):
        first = pair(d)
        second = second_read_pair(first, p.tau, p.tau2, p.larmor)
        comp = ExperimentSchedule("fig4", pair(p.delta_w), probe, ((p.tau, first), (p.tau2, second)), engine)
        fixed = ExperimentSchedule("fig4", pair(p.delta_w), probe, ((p.tau, first), (p.tau2, pair(p.delta_w))), engine)
        (ca, cn), (fa, fn) = _run_all(ana, num, [(f"comp{i}", comp), (f"fixed{i}", fixed)], result)
        row = [_pi(d), ca.rows[0].intensity, ca.rows[1].intensity, ca.rows[0].intensity + ca.rows[1].intensity, fa.rows[1].intensity]
        if cn is not None:
            row += [cn.rows[0].intensity, cn.rows[1].intensity, cn.rows[0].intensity + cn.rows[1].intensity, fn.rows[1].intensity]
        if engine == "both":
            d1 = discrepancy(cn.rows[0].intensity, ca.rows[0].intensity)
            d2 = discrepancy(cn.rows[1].intensity, ca.rows[1].intensity)
            row += [d1, d2]
            result.discrepancies += [(f"first{i}", d1), (f"second{i}", d2)]
        table.add(*row)
    _adiabatic_meta(num, table)
    return result


def fig5_times(params: ExperimentParams, points: int) -> np.ndarray:
    if points < 1:
        raise InvalidParameterError("points must be >= 1")
    if points == 1:
        return np.array([params.fig5_t_min])
    return np.linspace(params.fig5_t_min, params.fig5_t_max, points)


def run_fig5(
    times: Sequence[float],
    params: ExperimentParams = ExperimentParams(),
    engine: str = "analytic",
) -> ScenarioResult:
    """Retrieval efficiency vs storage time, with a fixed read phase and with Larmor compensation.

    Efficiency is the retrieved energy per unit probe energy with
    ``2 * a_baseline`` stored. Numeric efficiencies are calibrated on the
    numeric single-channel reference; their discrepancy is taken relative to
    the local envelope ``2 A exp(-t/t0)``.
    """
    t = np.asarray(times, dtype=float)
    if t.size == 0 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise InvalidParameterError("times must be positive and strictly ascending")
    ana, num = _engines(params, engine)
    p = params
    probe = p.probe
    cols = ["t_us", "efficiency_uncomp", "efficiency_comp"]
    if num is not None:
        cols += ["efficiency_uncomp_numeric", "efficiency_comp_numeric"]
    if engine == "both":
        cols += ["discrepancy_uncomp", "discrepancy_comp"]
    table = Table(cols, title="fig5: collapse and revival, and its compensation")
    table.meta["a_baseline"] = repr(p.a_baseline)
    table.meta["phi_pi"] = repr(p.phi / PI)
    result = ScenarioResult("fig5", table, plot_x="t_us", plot_y=cols[1:3] + (cols[3:5] if num else []), ylabel="retrieval efficiency")
    for i, ti in enumerate(t):
        ti = float(ti)
        unc = ExperimentSchedule("fig5", pair(p.delta_w), probe, ((ti, pair(p.delta_r)),), engine)
        com = ExperimentSchedule("fig5", pair(p.delta_w), probe, ((ti, pair(an.compensation_phase(ti, p.larmor, p.delta_w))),), engine)
        (ua, un), (ca, cn) = _run_all(ana, num, [(f"uncomp{i}", unc), (f"comp{i}", com)], result)
        row = [ti * 1e6, ua.rows[0].energy, ca.rows[0].energy]
        if num is not None:
            envelope = p.store_efficiency * math.exp(-ti / p.t0)
            eu = 0.5 * envelope * un.rows[0].intensity
            ec = 0.5 * envelope * cn.rows[0].intensity
            row += [eu, ec]
            if engine == "both":
                du = abs(eu - ua.rows[0].energy) / envelope
                dc = abs(ec - ca.rows[0].energy) / envelope
                row += [du, dc]
                result.discrepancies += [(f"uncomp{i}", du), (f"comp{i}", dc)]
        table.add(*row)
    _adiabatic_meta(num, table)
    return result


def run_isolation(params: ExperimentParams = ExperimentParams(), engine: str = "analytic") -> ScenarioResult:
    """Store in the minus channel only, read the plus channel, then read the minus channel."""
    ana, num = _engines(params, engine)
    p = params
    sch = ExperimentSchedule(
        "isolation",
        pair(0.0, plus=False),
        p.probe,
        ((p.tau, pair(0.0, minus=False)), (p.tau2, pair(0.0, plus=False))),
        engine,
    )
    cols = ["read", "tau_us"] + _event_columns(engine)
    table = Table(cols, title="isolation: wrong-channel read then right-channel read")
    result = ScenarioResult("isolation", table, plot_x="tau_us", plot_y=["energy"] + (["energy_numeric"] if num else []), ylabel="energy")
    if engine == "both":
        table.meta["discrepancy"] = "retrieved fractions"
    ((ra, rn),) = _run_all(ana, num, [("isolation", sch)], result)
    for k, a in enumerate(ra.rows):
        b = rn.rows[k] if rn else None
        table.add(k + 1, a.time_s * 1e6, *_event_values(a, b, engine, True))
        if engine == "both":
            result.discrepancies.append((f"read{k + 1}", _compare(a, b, True)))
    _adiabatic_meta(num, table)
    return result


def run_fringe(
    delta_r_values: Sequence[float],
    params: ExperimentParams = ExperimentParams(),
    engine: str = "analytic",
) -> ScenarioResult:
    """Two-beam readout vs read-pair phase at fixed storage time, with a sinusoid fit."""
    values = [float(v) for v in delta_r_values]
    if not values:
        raise InvalidParameterError("delta_r grid must be non-empty")
    ana, num = _engines(params, engine)
    p = params
    cols = ["delta_r_pi", "intensity"] + (["intensity_numeric"] if num else []) + (["discrepancy"] if engine == "both" else [])
    table = Table(cols, title="fringe: readout vs read-pair phase")
    result = ScenarioResult("fringe", table, plot_x="delta_r_pi", plot_y=cols[1:2] + (["intensity_numeric"] if num else []))
    ia, inum = [], []
    for i, d in enumerate(values):
        sch = ExperimentSchedule("fringe", pair(p.delta_w), p.probe, ((p.tau, pair(d)),), engine)
        ((ra, rn),) = _run_all(ana, num, [(f"fringe{i}", sch)], result)
        row = [d / PI, ra.rows[0].intensity]
        ia.append(ra.rows[0].intensity)
        if rn is not None:
            row.append(rn.rows[0].intensity)
            inum.append(rn.rows[0].intensity)
        if engine == "both":
            dd = discrepancy(rn.rows[0].intensity, ra.rows[0].intensity)
            row.append(dd)
            result.discrepancies.append((f"fringe{i}", dd))
        table.add(*row)
    for name, ys in (("analytic", ia), ("numeric", inum)):
        if len(ys) >= 4:
            f = fit_fringe(values, ys)
            table.meta[f"fit_period_pi_{name}"] = repr(f.period / PI)
            table.meta[f"fit_visibility_{name}"] = repr(f.visibility)
            table.meta[f"fit_maximum_pi_{name}"] = repr(f.maximum_at / PI)
    _adiabatic_meta(num, table)
    return result


def fringe_grid(points: int) -> np.ndarray:
    """``points`` equally spaced phases over [0, 2 pi)."""
    if points < 1:
        raise InvalidParameterError("points must be >= 1")
    return TWO_PI * np.arange(points) / points


@dataclass(frozen=True)
class OracleCase:
    delta_w: float
    delta_r: float
    tau: float


def oracle_cases(n: int, seed: int, tau_range: tuple[float, float] = (50e-9, 5e-6)) -> list[OracleCase]:
    rng = np.random.default_rng(seed)
    dw = rng.uniform(0.0, TWO_PI, n)
    dr = rng.uniform(0.0, TWO_PI, n)
    tau = rng.uniform(*tau_range, n)
    return [OracleCase(float(a), float(b), float(c)) for a, b, c in zip(dw, dr, tau)]


def run_oracle_check(
    params: ExperimentParams = ExperimentParams(),
    cases: int = 20,
    seed: int = 0,
    tolerance: float = 0.02,
) -> ScenarioResult:
    """Randomized analytic-vs-numeric comparison of the two-beam readout."""
    ana, num = _engines(params, "both")
    cols = ["case", "delta_w_pi", "delta_r_pi", "tau_us", "intensity", "intensity_numeric", "discrepancy", "pass"]
    table = Table(cols, title="oracle-check: analytic vs numeric two-beam readout")
    table.meta["seed"] = str(seed)
    table.meta["tolerance"] = repr(tolerance)
    result = ScenarioResult("oracle-check", table, plot_x="case", plot_y=["discrepancy"], ylabel="discrepancy")
    for i, c in enumerate(oracle_cases(cases, seed)):
        sch = ExperimentSchedule("oracle", pair(c.delta_w), params.probe, ((c.tau, pair(c.delta_r)),), "both")
        ((ra, rn),) = _run_all(ana, num, [(f"case{i}", sch)], result)
        d = discrepancy(rn.rows[0].intensity, ra.rows[0].intensity)
        result.discrepancies.append((f"case{i}", d))
        table.add(i, c.delta_w / PI, c.delta_r / PI, c.tau * 1e6, ra.rows[0].intensity, rn.rows[0].intensity, d, int(d <= tolerance))
    table.meta["max_discrepancy"] = repr(result.max_discrepancy)
    _adiabatic_meta(num, table)
    return result
