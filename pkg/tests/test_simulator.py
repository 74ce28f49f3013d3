import csv
import math

import numpy as np
import pytest

from scaled_consensus import (
    ProtocolSpec,
    Scenario,
    SimulationDivergedError,
    Trajectory,
    WeightedGraph,
    builtin_scales,
    identity_scale,
    load_bundled_config,
    build_scenario,
    lyapunov_series,
    measure_settling,
    simulate,
    write_trajectory_csv,
)


def pair_scenario(params, x0=(1.0, -1.0), horizon=2.0, step=1e-3, **kw):
    graph = WeightedGraph([[0.0, 1.0], [1.0, 0.0]])
    spec = ProtocolSpec(kind="gal", params=params, weights=graph.weights)
    return Scenario(
        name="pair",
        graph=graph,
        protocol=spec,
        scales=(identity_scale(), identity_scale()),
        x0=x0,
        horizon=horizon,
        step=step,
        record_stride=kw.pop("record_stride", step),
        **kw,
    )


def synthetic_trajectory(times, scaled):
    times = np.array(times, dtype=float)
    scaled = np.array(scaled, dtype=float)
    zeros = np.zeros_like(scaled)
    return Trajectory(
        times=times,
        states=zeros,
        scaled_states=scaled,
        lyapunov=np.zeros(len(times)),
        settling_time=None,
    )


class TestScenarioValidation:
    def test_step_must_be_positive(self, gal_params):
        with pytest.raises(ValueError, match="step"):
            pair_scenario(gal_params, step=0.0)

    def test_state_length_checked(self, gal_params):
        with pytest.raises(ValueError, match="x0"):
            pair_scenario(gal_params, x0=(1.0, 2.0, 3.0))

    def test_stride_covers_step(self, gal_params):
        with pytest.raises(ValueError, match="record_stride"):
            pair_scenario(gal_params, record_stride=1e-5)


class TestSimulate:
    def test_antisymmetric_pair(self, gal_params):
        traj = simulate(pair_scenario(gal_params))
        assert np.abs(traj.states[:, 0] + traj.states[:, 1]).max() <= 1e-9

    def test_pair_settles_inside_band(self, gal_params):
        traj = simulate(pair_scenario(gal_params))
        assert traj.settling_time is not None
        final = traj.scaled_states[-1]
        assert abs(final[0] - final[1]) <= 1e-3

    def test_deterministic_reruns(self, gal_params):
        first = simulate(pair_scenario(gal_params))
        second = simulate(pair_scenario(gal_params))
        assert np.array_equal(first.states, second.states)
        assert np.array_equal(first.scaled_states, second.scaled_states)
        assert first.settling_time == second.settling_time

    def test_divergence_is_diagnosed(self, gal_params):
        # a step far above the stability limit blows up the gamma2 term
        scenario = pair_scenario(gal_params, x0=(1e8, -1e8), step=1.0, horizon=50.0)
        with pytest.raises(SimulationDivergedError):
            simulate(scenario)

    def test_sample_grid(self, gal_params):
        traj = simulate(pair_scenario(gal_params, horizon=1.0, step=1e-3))
        assert len(traj.times) == 1001
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.0, abs=1e-12)

    def test_step_halving_stability_on_bundled_scenario(self):
        cfg = load_bundled_config("example1_c2_gal")
        scenario, _ = build_scenario(cfg)
        coarse = simulate(scenario)
        from dataclasses import replace

        halved = replace(cfg, step=cfg.step / 2.0)
        fine = simulate(build_scenario(halved)[0])
        assert coarse.settling_time is not None
        assert fine.settling_time is not None
        assert abs(coarse.settling_time - fine.settling_time) <= (
            2.0 * scenario.record_stride
        )


class TestMeasureSettling:
    def test_always_inside_band(self):
        traj = synthetic_trajectory(
            [0.0, 0.1, 0.2], [[0.0, 1e-4], [0.0, 5e-5], [0.0, 0.0]]
        )
        assert measure_settling(traj, epsilon=1e-3) == 0.0

    def test_re_entry_uses_final_stay(self):
        scaled = [
            [0.0, 2.0],     # outside
            [0.0, 5e-4],    # inside
            [0.0, 2e-3],    # leaves again
            [0.0, 4e-4],    # re-enters for good
            [0.0, 1e-4],
        ]
        traj = synthetic_trajectory([0.0, 0.1, 0.2, 0.3, 0.4], scaled)
        assert measure_settling(traj, epsilon=1e-3) == pytest.approx(0.3)

    def test_never_settles(self):
        traj = synthetic_trajectory(
            [0.0, 0.1, 0.2], [[0.0, 2.0], [0.0, 1e-4], [0.0, 2.0]]
        )
        assert measure_settling(traj, epsilon=1e-3) is None

    def test_band_is_max_pairwise_difference(self):
        scaled = [[0.0, 5e-4, -6e-4], [0.0, 1e-4, -1e-4]]
        traj = synthetic_trajectory([0.0, 0.1], scaled)
        # range 1.1e-3 exceeds the band even though each |g_i| is below it
        assert measure_settling(traj, epsilon=1e-3) == pytest.approx(0.1)


class TestLyapunov:
    def test_zero_series_at_consensus_start(self, gal_params):
        scenario = pair_scenario(gal_params, x0=(2.0, 2.0), horizon=0.2)
        traj = simulate(scenario)
        assert np.abs(traj.lyapunov).max() == 0.0

    def test_matches_double_sum_per_sample(self, gal_params):
        scenario = pair_scenario(gal_params, horizon=0.5)
        traj = simulate(scenario)
        series = lyapunov_series(scenario, traj)
        for k in range(0, len(traj.times), 100):
            g = traj.scaled_states[k]
            expected = 0.25 * 2.0 * (g[1] - g[0]) ** 2
            assert series.values[k] == pytest.approx(expected, rel=1e-12, abs=1e-15)
        assert np.array_equal(series.values, traj.lyapunov)

    def test_slopes_are_paired_differences(self, gal_params):
        scenario = pair_scenario(gal_params, horizon=0.2)
        traj = simulate(scenario)
        series = lyapunov_series(scenario, traj)
        assert len(series.slopes) == len(series.values) - 1
        k = 17
        expected = (series.values[k + 1] - series.values[k]) / (
            traj.times[k + 1] - traj.times[k]
        )
        assert series.slopes[k] == pytest.approx(expected, rel=1e-12)


class TestCsvExport:
    def test_format(self, gal_params, tmp_path):
        scenario = pair_scenario(gal_params, horizon=0.1)
        traj = simulate(scenario)
        path = tmp_path / "pair.csv"
        write_trajectory_csv(traj, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x_1", "x_2", "g_1", "g_2", "V"]
        assert len(rows) == len(traj.times) + 1
        sample = rows[3]
        k = 2
        assert float(sample[0]) == pytest.approx(traj.times[k], rel=1e-8)
        assert float(sample[1]) == pytest.approx(traj.states[k, 0], rel=1e-8)
        assert float(sample[5]) == pytest.approx(traj.lyapunov[k], rel=1e-8)
        # nine significant digits
        assert len(sample[1].replace("-", "").replace(".", "").lstrip("0")) <= 9
