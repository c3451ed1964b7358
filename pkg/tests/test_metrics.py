"""Energy formula and distance-binned aggregation against brute-force oracles."""

import io
import math

import numpy as np
import pytest

from d2dcast.engine import RunResult
from d2dcast.metrics import (
    EnergyParams,
    aggregate,
    cell_edge,
    energy_joules,
    write_aggregate_csv,
)

ENERGY = EnergyParams()


def make_result(distances, completion, tx, rx, decoded=None):
    distances = np.asarray(distances, dtype=float)
    completion = np.asarray(completion, dtype=float)
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    if decoded is None:
        decoded = ~np.isnan(completion)
    return RunResult(
        scheme="d2d",
        seed=0,
        distances=distances,
        completion_s=completion,
        decoded=np.asarray(decoded),
        tx_seconds=tx,
        rx_seconds=rx,
        energy_j=np.asarray(energy_joules(tx, rx, ENERGY)),
        frames_sent=1,
        d2d_frames_sent=0,
        session_end_s=1.0,
    )


class TestEnergy:
    def test_zero_times_zero_energy(self):
        assert energy_joules(0.0, 0.0, ENERGY) == 0.0

    def test_published_constants_substitution(self):
        # (0.083 * 10 + 0.038 * 100) * 3.7 = 17.131 J
        assert energy_joules(10.0, 100.0, ENERGY) == pytest.approx(17.131, rel=1e-12)

    def test_linear_in_each_argument(self):
        a = energy_joules(3.0, 7.0, ENERGY)
        assert energy_joules(6.0, 14.0, ENERGY) == pytest.approx(2 * a, rel=1e-12)
        assert energy_joules(3.0, 0.0, ENERGY) + energy_joules(
            0.0, 7.0, ENERGY
        ) == pytest.approx(a, rel=1e-12)

    def test_rejects_negative_times(self):
        with pytest.raises(ValueError):
            energy_joules(-1.0, 0.0, ENERGY)

    def test_rejects_non_positive_params(self):
        with pytest.raises(ValueError):
            EnergyParams(tx_current_a=0.0)


class TestAggregate:
    def test_single_ed_is_its_own_mean(self):
        res = make_result([250.0], [1000.0], [2.0], [30.0])
        stats = aggregate([res], 100.0, ENERGY, radius_m=1000.0)
        assert len(stats) == 10
        stat = stats[2]
        assert stat.n == 1
        assert stat.mean_completion_s == 1000.0
        assert stat.mean_activity_s == 32.0
        assert stats[0].n == 0 and math.isnan(stats[0].mean_completion_s)

    def test_two_eds_same_bin_average(self):
        res = make_result([110.0, 190.0], [100.0, 300.0], [1.0, 3.0], [10.0, 30.0])
        stats = aggregate([res], 100.0, ENERGY, radius_m=200.0)
        assert stats[1].n == 2
        assert stats[1].mean_completion_s == 200.0
        assert stats[1].mean_activity_s == 22.0

    def test_brute_force_recomputation(self):
        rng = np.random.default_rng(0)
        results = []
        for _ in range(5):
            n = 50
            d = rng.uniform(0, 1000, n)
            c = rng.uniform(100, 5000, n)
            c[rng.random(n) < 0.1] = np.nan
            results.append(
                make_result(d, c, rng.uniform(0, 20, n), rng.uniform(0, 400, n))
            )
        stats = aggregate(results, 100.0, ENERGY, radius_m=1000.0)
        d_all = np.concatenate([r.distances for r in results])
        c_all = np.concatenate([r.completion_s for r in results])
        tx_all = np.concatenate([r.tx_seconds for r in results])
        rx_all = np.concatenate([r.rx_seconds for r in results])
        for b, stat in enumerate(stats):
            mask = (d_all >= b * 100.0) & (d_all < (b + 1) * 100.0)
            if b == 9:
                mask = (d_all >= 900.0) & (d_all <= 1000.0)
            assert stat.n == mask.sum()
            if stat.n == 0:
                continue
            dec = mask & ~np.isnan(c_all)
            if dec.any():
                assert stat.mean_completion_s == pytest.approx(
                    c_all[dec].mean(), rel=1e-9
                )
            exp_energy = (0.083 * tx_all[mask] + 0.038 * rx_all[mask]).mean() * 3.7
            assert stat.mean_energy_j == pytest.approx(exp_energy, rel=1e-9)

    def test_energy_components_sum_to_total(self):
        res = make_result([50.0, 950.0], [1.0, 2.0], [5.0, 8.0], [100.0, 440.0])
        for stat in aggregate([res], 100.0, ENERGY, radius_m=1000.0):
            if stat.n:
                assert stat.mean_tx_energy_j + stat.mean_rx_energy_j == pytest.approx(
                    stat.mean_energy_j, rel=1e-9
                )

    def test_sample_at_exact_radius_lands_in_outer_bin(self):
        res = make_result([1000.0], [1.0], [0.0], [1.0])
        stats = aggregate([res], 100.0, ENERGY, radius_m=1000.0)
        assert stats[-1].n == 1

    def test_cell_edge_is_outermost_nonempty(self):
        res = make_result([150.0, 750.0], [1.0, 2.0], [0.0, 0.0], [1.0, 1.0])
        stats = aggregate([res], 100.0, ENERGY, radius_m=1000.0)
        assert cell_edge(stats).bin_center_m == 750.0

    def test_rejects_empty_results(self):
        with pytest.raises(ValueError):
            aggregate([], 100.0, ENERGY)


class TestCsv:
    def test_header_and_empty_bins(self):
        res = make_result([250.0], [1000.0], [2.0], [30.0])
        stats = aggregate([res], 100.0, ENERGY, radius_m=400.0)
        buf = io.StringIO()
        write_aggregate_csv(stats, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0].startswith(
            "bin_center_m,mean_completion_s,mean_activity_s,mean_energy_J,n"
        )
        assert len(lines) == 5
        first = lines[1].split(",")
        assert first[0] == "50.0" and first[1] == "" and first[4] == "0"
