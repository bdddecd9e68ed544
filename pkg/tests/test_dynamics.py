import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripod_memory.analytic import TWO_PI, BeamPair, MagneticEnvironment, ProbePulse, compensation_phase, readout_intensity
from tripod_memory.dynamics import (
    DEFAULT_GAMMA_E,
    DEFAULT_GN,
    AdiabaticityWarning,
    AtomParams,
    BeamRamp,
    NumericSetup,
    SimGrid,
    adiabaticity_report,
    fit_fringe,
    fringe_scan,
    run_storage,
    simulate,
    single_channel_reference,
    storage_scan,
)
from tripod_memory.errors import InvalidParameterError, InvalidScheduleError, StabilityError

PI = math.pi
ENV = MagneticEnvironment.from_larmor(TWO_PI * 0.21e6)
SETUP = NumericSetup(atoms=AtomParams(DEFAULT_GN, DEFAULT_GAMMA_E, t0=90e-6))
CLOSED = NumericSetup(atoms=AtomParams(DEFAULT_GN, DEFAULT_GAMMA_E, closed_system=True))


def two_beam(setup, dw, dr, tau, env=ENV):
    return run_storage(setup, env, setup.write_pair(dw), [(tau, setup.read_pair(dr))])


class TestTypes:
    def test_atom_params_validation(self):
        for bad in (dict(gN=0, gamma_e=1), dict(gN=1, gamma_e=0), dict(gN=1, gamma_e=1, t0=0)):
            with pytest.raises(InvalidParameterError):
                AtomParams(**bad)

    def test_optical_depth_diagnostic(self):
        a = AtomParams(1.0, 4.0, length=1.5)
        assert a.optical_depth == pytest.approx(1.5)

    def test_ramp_validation(self):
        with pytest.raises(InvalidScheduleError):
            BeamRamp(BeamPair(1, 1), on_time=1.0, off_time=0.5)
        with pytest.raises(InvalidScheduleError):
            BeamRamp(BeamPair(1, 1), ramp_width=0.0)
        with pytest.raises(InvalidScheduleError):
            BeamRamp(BeamPair(1, 1), on_time=0.0, off_time=1e-9, ramp_width=2e-9)

    def test_ramp_envelope(self):
        r = BeamRamp(BeamPair(1, 1), on_time=0.0, off_time=10e-9, ramp_width=2e-9)
        assert r.envelope(-1e-9) == 0.0
        assert r.envelope(0.0) == pytest.approx(0.5)
        assert r.envelope(5e-9) == 1.0
        assert r.envelope(10e-9) == pytest.approx(0.5)
        assert r.envelope(11e-9) == 0.0
        t = np.linspace(-2e-9, 12e-9, 20001)
        num = np.gradient(r.envelope(t), t)
        assert np.max(np.abs(num - r.envelope_slope(t))) < 1e-3 * np.max(np.abs(num))

    def test_grid_validation(self):
        with pytest.raises(InvalidParameterError):
            SimGrid(nz=0)
        assert SimGrid(4, 1e-12).dz == 0.25
        assert SimGrid(4, 1e-12).halved().dt == 0.5e-12


class TestSimulateErrors:
    def test_stability_bound(self):
        grid = SimGrid(dt=1e-11)
        with pytest.raises(StabilityError, match="needs dt <"):
            simulate(SETUP.probe(), SETUP.write_ramp_for(SETUP.write_pair(0)), [], ENV, SETUP.atoms, grid)

    def test_overlapping_read(self):
        write = SETUP.write_ramp_for(SETUP.write_pair(0))
        read = BeamRamp(SETUP.read_pair(0), on_time=2e-9, off_time=30e-9)
        with pytest.raises(InvalidScheduleError):
            simulate(SETUP.probe(), write, [read], ENV, SETUP.atoms)

    def test_reads_out_of_order(self):
        write = SETUP.write_ramp_for(SETUP.write_pair(0))
        r1 = SETUP.read_ramp_at(200e-9, SETUP.read_pair(0))
        r2 = SETUP.read_ramp_at(100e-9, SETUP.read_pair(0))
        with pytest.raises(InvalidScheduleError):
            simulate(SETUP.probe(), write, [r1, r2], ENV, SETUP.atoms)

    def test_write_must_turn_off(self):
        with pytest.raises(InvalidScheduleError):
            simulate(SETUP.probe(), BeamRamp(SETUP.write_pair(0)), [], ENV, SETUP.atoms)


class TestSimulate:
    def test_zero_probe(self):
        res = run_storage(SETUP, ENV, SETUP.write_pair(0.3), [(380e-9, SETUP.read_pair(0.1))], SETUP.probe(energy=0.0))
        assert not np.any(res.probe_out)
        assert not np.any(res.sigma_ea) and not np.any(res.sigma_ca) and not np.any(res.sigma_ba)
        assert res.retrieved == [0.0]

    def test_lambda_limit(self):
        res = run_storage(SETUP, ENV, SETUP.write_pair(0, plus=False), [(380e-9, SETUP.read_pair(0, plus=False))])
        assert not np.any(res.sigma_ca)
        # the projective read returns everything stored in the addressed channel
        assert res.retrieved[0] / res.stored_energy > 0.98

    def test_constructive_vs_destructive(self):
        tau = 380e-9
        dr = compensation_phase(tau, ENV.larmor, 0.5 * PI)
        c = two_beam(SETUP, 0.5 * PI, dr, tau).retrieved[0]
        d = two_beam(SETUP, 0.5 * PI, dr + PI, tau).retrieved[0]
        assert c / d > 100

    def test_closed_system_conserves(self):
        res = two_beam(CLOSED, 0.4, 2.0, 150e-9)
        assert res.spontaneous_loss == 0.0 and res.decoherence_loss == 0.0
        assert abs(res.energy_balance()) < 1e-6 * res.input_energy

    def test_open_system_accounting(self):
        res = two_beam(SETUP, 0.4, 2.0, 5e-6)
        assert res.decoherence_loss > 0 and res.spontaneous_loss > 0
        assert abs(res.energy_balance()) < 1e-6
        assert res.retrieved_energy <= res.input_energy
        assert res.emitted_energy + res.final_excitation <= res.input_energy

    def test_multi_slice_conserves(self):
        setup = NumericSetup(atoms=CLOSED.atoms, grid=SimGrid(nz=6))
        res = two_beam(setup, 0.0, 0.0, 100e-9)
        assert res.sigma_ea.shape[1] == 6
        assert abs(res.energy_balance()) < 1e-6

    def test_deterministic(self):
        a = two_beam(SETUP, 1.1, 0.3, 400e-9)
        b = two_beam(SETUP, 1.1, 0.3, 400e-9)
        for name in ("times", "probe_in", "probe_out", "sigma_ea", "sigma_ca", "sigma_ba"):
            assert np.array_equal(getattr(a, name), getattr(b, name))
        assert a.retrieved == b.retrieved and a.stored_energy == b.stored_energy

    def test_grid_convergence(self):
        tau = 380e-9
        dr = compensation_phase(tau, ENV.larmor, 0.5 * PI)
        fine = NumericSetup(atoms=SETUP.atoms, grid=SETUP.grid.halved())
        e1 = two_beam(SETUP, 0.5 * PI, dr, tau).retrieved[0]
        e2 = two_beam(fine, 0.5 * PI, dr, tau).retrieved[0]
        assert abs(e1 - e2) / e2 < 0.005

    def test_retrieved_attributed_per_read(self):
        tau1, tau2 = 300e-9, 1e-6
        res = run_storage(SETUP, ENV, SETUP.write_pair(0), [(tau1, SETUP.read_pair(PI)), (tau2, SETUP.read_pair(0))])
        assert len(res.retrieved) == 2 and len(res.remaining) == 2
        assert res.remaining[1] <= res.remaining[0] <= res.stored_energy


@settings(max_examples=12)
@given(st.floats(0, TWO_PI), st.floats(0, TWO_PI), st.floats(20e-9, 2e-6))
def test_norm_bound_closed_system(dw, dr, tau):
    res = two_beam(CLOSED, dw, dr, tau)
    total = res.final_excitation + res.emitted_energy
    assert abs(total - res.input_energy) < 1e-6


@settings(max_examples=12)
@given(st.floats(0, TWO_PI), st.floats(0, TWO_PI), st.floats(20e-9, 20e-6))
def test_norm_bound_open_system(dw, dr, tau):
    res = two_beam(SETUP, dw, dr, tau)
    assert res.final_excitation + res.emitted_energy <= res.input_energy + 1e-9
    assert res.retrieved[0] <= res.input_energy


class TestFringe:
    def test_fringe_period_and_visibility(self):
        tau = 380e-9
        ref = single_channel_reference(SETUP, ENV) * math.exp(-tau / 90e-6)
        grid = TWO_PI * np.arange(16) / 16
        x, y = zip(*fringe_scan(SETUP, ENV, SETUP.write_pair(0.5 * PI), SETUP.read_pair(0), tau, grid))
        fit = fit_fringe(x, np.array(y) / ref)
        assert fit.period == pytest.approx(TWO_PI, rel=0.01)
        assert fit.visibility >= 0.95
        expected = readout_intensity(np.array(x), 0.5 * PI, ENV.larmor, tau)
        assert np.max(np.abs(np.array(y) / ref - expected)) / 2 < 0.02

    def test_no_precession_peak_at_zero(self):
        env = MagneticEnvironment(0.0)
        grid = TWO_PI * np.arange(12) / 12
        x, y = zip(*fringe_scan(SETUP, env, SETUP.write_pair(0.0), SETUP.read_pair(0), 200e-9, grid))
        assert int(np.argmax(y)) == 0
        fit = fit_fringe(x, y)
        assert min(fit.maximum_at, TWO_PI - fit.maximum_at) < 0.02

    def test_storage_time_sweep_same_law(self):
        # one full Larmor fringe in tau, read phase fixed
        period = PI / ENV.larmor
        taus = 100e-9 + period * np.arange(12) / 12
        x, y = zip(*storage_scan(SETUP, ENV, SETUP.write_pair(0.5 * PI), SETUP.read_pair(0.5 * PI), taus))
        ref = single_channel_reference(SETUP, ENV)
        ynorm = np.array(y) / (ref * np.exp(-np.array(x) / 90e-6))
        expected = readout_intensity(0.5 * PI, 0.5 * PI, ENV.larmor, np.array(x))
        assert np.max(np.abs(ynorm - expected)) / 2 < 0.02
        fit = fit_fringe(2 * ENV.larmor * np.array(x), ynorm)
        assert fit.period == pytest.approx(TWO_PI, rel=0.01)

    def test_non_finite_phase(self):
        with pytest.raises(InvalidParameterError):
            fringe_scan(SETUP, ENV, SETUP.write_pair(0), SETUP.read_pair(0), 100e-9, [math.nan])

    def test_fit_recovers_synthetic(self):
        x = np.linspace(0, 3 * TWO_PI, 40)
        y = 1.0 + 0.8 * np.cos(TWO_PI * x / 5.5 - 1.2)
        f = fit_fringe(x, y, period_guess=6.0)
        assert f.period == pytest.approx(5.5, rel=1e-6)
        assert f.visibility == pytest.approx(0.8, rel=1e-6)
        assert f.phase == pytest.approx(1.2, rel=1e-6)


class TestAdiabaticity:
    def test_instantaneous_switch_warns(self):
        ramp = BeamRamp(SETUP.write_pair(0), off_time=0.0, ramp_width=SETUP.grid.dt)
        with pytest.warns(AdiabaticityWarning):
            rep = adiabaticity_report([ramp], SETUP.atoms)
        assert rep.max_theta_rate > 0.1 and not rep.ok

    def test_slow_ramp_quiet(self):
        ramps = [
            BeamRamp(SETUP.write_pair(0), off_time=0.0, ramp_width=200e-9),
            BeamRamp(SETUP.read_pair(0), on_time=1e-6, off_time=2e-6, ramp_width=200e-9),
        ]
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rep = adiabaticity_report(ramps, SETUP.atoms)
        assert rep.ok and rep.max_theta_rate < 0.1

    def test_zero_beams(self):
        ramps = [BeamRamp(BeamPair(0, 0), off_time=0.0), BeamRamp(BeamPair(0, 0), on_time=1e-6, off_time=2e-6)]
        res = simulate(SETUP.probe(), ramps[0], ramps[1:], ENV, SETUP.atoms)
        rep = adiabaticity_report(ramps, SETUP.atoms, res)
        assert rep.max_theta_rate == 0.0 and rep.peak_excited == 0.0

    def test_default_run_is_adiabatic(self):
        write = SETUP.write_ramp_for(SETUP.write_pair(0.5 * PI))
        read = SETUP.read_ramp_at(380e-9, SETUP.read_pair(0.2 * PI))
        res = simulate(SETUP.probe(), write, [read], ENV, SETUP.atoms)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rep = adiabaticity_report([write, read], SETUP.atoms, res)
        assert rep.peak_excited < 0.01
