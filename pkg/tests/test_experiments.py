import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tripod_memory.analytic import TWO_PI, ProbePulse, compensation_phase, retrieval_efficiency
from tripod_memory.errors import InvalidParameterError, InvalidScheduleError
from tripod_memory.experiments import (
    AnalyticEngine,
    ExperimentParams,
    ExperimentSchedule,
    ReadoutRecord,
    ReadoutRow,
    fig5_times,
    fringe_grid,
    oracle_cases,
    pair,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fringe,
    run_isolation,
    run_oracle_check,
)

PI = math.pi
P = ExperimentParams()


def col(result, name):
    return np.array(result.table.column(name))


class TestSchedule:
    def test_times_must_increase(self):
        with pytest.raises(InvalidScheduleError):
            ExperimentSchedule("x", pair(0), P.probe, ((1e-6, pair(0)), (1e-6, pair(0))))

    def test_first_read_after_probe(self):
        with pytest.raises(InvalidScheduleError):
            ExperimentSchedule("x", pair(0), ProbePulse.gaussian(100e-9), ((200e-9, pair(0)),))

    def test_needs_reads(self):
        with pytest.raises(InvalidScheduleError):
            ExperimentSchedule("x", pair(0), P.probe, ())

    def test_engine_name(self):
        with pytest.raises(InvalidParameterError):
            ExperimentSchedule("x", pair(0), P.probe, ((1e-6, pair(0)),), engine="magic")


class TestRecord:
    def test_remaining_non_increasing(self):
        sch = ExperimentSchedule("x", pair(0.5 * PI), P.probe, ((380e-9, pair(0.0)), (1e-6, pair(1.0)), (3e-6, pair(2.0))))
        rec = AnalyticEngine(P).run(sch)
        rem = [r.remaining for r in rec.rows]
        assert all(b <= a for a, b in zip(rem, rem[1:]))

    def test_csv_round_trip(self):
        sch = ExperimentSchedule("x", pair(0.5 * PI), P.probe, ((380e-9, pair(0.3)), (3.4e-6, pair(0.5 * PI))))
        rec = AnalyticEngine(P).run(sch, "demo")
        rec.params["note"] = "two reads"
        back = ReadoutRecord.from_csv(rec.to_csv())
        assert back == rec
        assert back.to_csv() == rec.to_csv()


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite, finite, finite, finite, finite), max_size=6), st.text("abcxyz_-0123", min_size=1, max_size=10))
def test_record_round_trip_property(rows, label):
    rec = ReadoutRecord(label, "numeric", [ReadoutRow(*r) for r in rows], {"k": "v w"})
    assert ReadoutRecord.from_csv(rec.to_csv()) == rec


class TestFig2:
    def test_analytic(self):
        r = run_fig2(P, "analytic")
        i = col(r, "intensity")
        assert i[3] / i[0] == pytest.approx(2.0, abs=1e-9)
        assert i[1] == pytest.approx(i[2], rel=1e-12)
        assert i[1] == pytest.approx(0.5 * i[3], rel=1e-12)
        assert col(r, "total_phase_pi")[3] == 0.0

    def test_both(self):
        r = run_fig2(P, "both")
        i = col(r, "intensity_numeric")
        assert i[3] / i[1] == pytest.approx(2.0, abs=0.05)
        assert i[1] == pytest.approx(i[2], rel=0.01)
        assert r.within(0.02)


class TestFig3:
    def test_analytic(self):
        r = run_fig3(P, "analytic")
        i = col(r, "intensity")
        first, second_a, second_b = i
        assert first < 1e-30
        assert second_a == pytest.approx(second_b, rel=1e-12)
        assert second_a < 2.0
        # Delta = 2 Omega_L (3.4 us) = 2.856 pi at the second read
        assert second_a == pytest.approx(0.100594748433628962, rel=1e-9)

    def test_numeric(self):
        r = run_fig3(P, "both")
        i = col(r, "intensity_numeric")
        assert i[0] / 2.0 < 1e-3
        assert i[1] < 2.0 and i[2] < 2.0
        assert r.within(0.02)


class TestFig4:
    def test_complementarity(self):
        grid = fringe_grid(24)
        r = run_fig4(grid, P, "analytic")
        s = col(r, "sum_intensity")
        assert np.max(np.abs(s - s[0])) < 1e-9
        first = col(r, "first_intensity")
        assert np.max(np.abs(first - 2 * np.cos((grid - P.delta_w) / 2 + P.larmor * P.tau) ** 2)) < 1e-12

    def test_compensated_point(self):
        comp = compensation_phase(P.tau, P.larmor, P.delta_w)
        r = run_fig4([comp, comp + PI], P, "analytic")
        first, second = col(r, "first_intensity"), col(r, "second_intensity")
        assert first[0] == pytest.approx(2.0) and second[0] < 1e-12
        assert first[1] < 1e-12 and second[1] == pytest.approx(2.0)

    def test_empty_grid(self):
        with pytest.raises(InvalidParameterError):
            run_fig4([], P)

    def test_both(self):
        r = run_fig4(fringe_grid(8), P, "both")
        assert r.within(0.02)
        s = col(r, "sum_intensity_numeric")
        assert np.max(np.abs(s - 2.0)) < 0.02


class TestFig5:
    def test_uncompensated_matches_closed_form(self):
        t = fig5_times(P, 200)
        r = run_fig5(t, P, "analytic")
        expected = retrieval_efficiency(t, 0.05, TWO_PI * 0.21e6, 0.3 * PI, 90e-6)
        assert np.max(np.abs(col(r, "efficiency_uncomp") - expected)) < 1e-12

    def test_compensated_flat(self):
        t = fig5_times(P, 50)
        r = run_fig5(t, P, "analytic")
        flat = col(r, "efficiency_comp") * np.exp(t / P.t0) / (2 * P.a_baseline)
        assert np.max(np.abs(flat - 1)) < 1e-12
        # compensated curve is the envelope of the uncompensated one
        assert np.all(col(r, "efficiency_uncomp") <= col(r, "efficiency_comp") + 1e-15)

    def test_zero_time_limit(self):
        short = ExperimentParams(probe_fwhm=1e-16)
        r = run_fig5([1e-15, 1e-12], short, "analytic")
        assert col(r, "efficiency_comp") == pytest.approx([0.1, 0.1], rel=1e-7)

    def test_times_validated(self):
        with pytest.raises(InvalidParameterError):
            run_fig5([2e-6, 1e-6], P)
        with pytest.raises(InvalidParameterError):
            run_fig5([0.0, 1e-6], P)

    def test_numeric(self):
        r = run_fig5(fig5_times(P, 6), P, "both")
        assert r.within(0.02)


class TestIsolation:
    def test_analytic(self):
        r = run_isolation(P, "analytic")
        e, rem = col(r, "energy"), col(r, "remaining")
        assert e[0] == 0.0
        stored = P.store_efficiency * math.exp(-P.tau / P.t0)
        assert rem[0] == pytest.approx(stored, rel=1e-12)
        assert e[1] == pytest.approx(P.store_efficiency * math.exp(-P.tau2 / P.t0), rel=1e-12)

    def test_numeric(self):
        r = run_isolation(P, "both")
        e, rem = col(r, "energy_numeric"), col(r, "remaining_numeric")
        assert e[0] < 1e-6 * rem[0]
        # the later right-channel read empties the store
        assert e[1] / (e[1] + col(r, "remaining_numeric")[1]) > 0.98
        assert r.within(0.02)


class TestFringe:
    def test_analytic_fit(self):
        r = run_fringe(fringe_grid(16), P, "analytic")
        assert float(r.table.meta["fit_period_pi_analytic"]) == pytest.approx(2.0, rel=0.01)
        assert float(r.table.meta["fit_visibility_analytic"]) >= 0.99

    def test_numeric_fit(self):
        r = run_fringe(fringe_grid(16), P, "numeric")
        assert float(r.table.meta["fit_period_pi_numeric"]) == pytest.approx(2.0, rel=0.01)
        assert float(r.table.meta["fit_visibility_numeric"]) >= 0.95


class TestOracle:
    def test_cases_seeded(self):
        assert oracle_cases(5, 3) == oracle_cases(5, 3)
        assert oracle_cases(5, 3) != oracle_cases(5, 4)

    def test_suite(self):
        r = run_oracle_check(P, cases=20, seed=1)
        assert len(r.table.rows) == 20
        assert r.within(0.02)
        assert all(col(r, "pass") == 1)


def test_bad_engine():
    with pytest.raises(InvalidParameterError):
        run_fig2(P, "quantum")
