import json
import math
from dataclasses import replace

import numpy as np
import pytest

from leaderless_crn import bench, corpus
from leaderless_crn.semilinear import parse_spec


def test_harmonic():
    assert bench.harmonic(1) == 1.0
    assert bench.harmonic(100) == pytest.approx(5.187377517639621)


def test_loglog_slope_exact_power_law():
    n = [10, 20, 40, 80]
    s, (lo, hi) = bench.loglog_slope(n, [3 * v ** 1.5 for v in n])
    assert s == pytest.approx(1.5) and lo == pytest.approx(1.5) and hi == pytest.approx(1.5)
    s, (lo, hi) = bench.loglog_slope(n, [v ** 0.5 for v in n], sems=[0.01] * 4)
    assert s == pytest.approx(0.5) and lo < s < hi


class TestUnimolecular:
    def test_reference(self):
        r = bench.bench_unimolecular((100,), 500, seed=1)
        assert abs(r.relative_errors[0]) < 0.10 and r.ok

    def test_single_molecule(self):
        r = bench.bench_unimolecular((1,), 500, seed=2)
        assert r.means[0] == pytest.approx(1.0, rel=0.15)

    def test_harmonic_ratio(self):
        r = bench.bench_unimolecular((100, 10_000), 200, seed=3)
        assert r.means[1] / r.means[0] == pytest.approx(bench.harmonic(10_000) / bench.harmonic(100), rel=0.10)


class TestLeaderElection:
    def test_reference(self):
        r = bench.bench_leader_election((100,), 500, seed=1)
        assert r.reference[0] == pytest.approx(198.0) and r.ok

    def test_pair(self):
        r = bench.bench_leader_election((2,), 500, seed=4)
        assert r.means[0] == pytest.approx(2.0, rel=0.20)

    def test_linear_slope(self):
        r = bench.bench_leader_election((50, 100, 200, 400, 800), 200, seed=5)
        assert 0.9 <= r.slope()[0] <= 1.1


class TestCatalytic:
    def test_reference(self):
        r = bench.bench_catalytic((100,), 500, seed=1)
        assert r.reference[0] == pytest.approx(10.3748, rel=1e-4) and r.ok

    def test_doubling_increment(self):
        r = bench.bench_catalytic((100, 200), 2000, seed=6)
        assert r.means[1] - r.means[0] == pytest.approx(2 * math.log(2), rel=0.25)

    def test_mean_against_log_n(self):
        sizes = (100, 200, 400, 800, 1600)
        r = bench.bench_catalytic(sizes, 400, seed=7)
        slope = np.polyfit(np.log(sizes), r.means, 1)[0]
        assert slope == pytest.approx(2.0, rel=0.15)


class TestCompiled:
    def test_increment_scaling(self, compiled):
        r = bench.bench_compiled(compiled["increment"], (50, 100, 200, 400), 40, seed=1)
        assert r.slope_band == (0.7, 1.3) and r.ok, r.text()

    def test_double_baseline_is_logarithmic(self):
        r = bench.bench_double((100, 1000, 10_000), 100, seed=2)
        assert r.ok
        assert r.means[2] / r.means[0] == pytest.approx(bench.harmonic(10_000) / bench.harmonic(100), rel=0.10)

    def test_wrong_oracle_is_reported(self, compiled):
        c = compiled["increment"]
        lie = parse_spec(corpus.spec_text("increment").replace('"b": [1]', '"b": [2]'))
        with pytest.raises(bench.BenchOutputError):
            bench.bench_compiled(replace(c, spec=lie), (10,), 30)

    def test_ray(self):
        assert bench.ray_input((1, 2), 50) == (16, 32)
        with pytest.raises(ValueError):
            bench.ray_input((1, 2), 2)


def test_reproducible_and_worker_independent():
    a = bench.bench_leader_election((20, 40), 30, seed=9)
    b = bench.bench_leader_election((20, 40), 30, seed=9, workers=2)
    c = bench.bench_leader_election((20, 40, 80), 30, seed=9)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.samples, c.samples[:2])
    assert a.samples_csv() == b.samples_csv()


def test_report_invariants():
    with pytest.raises(ValueError):
        bench.bench_unimolecular((10,), 29)
    with pytest.raises(ValueError):
        bench.bench_unimolecular((10, 10), 30)


def test_report_artifacts():
    r = bench.bench_unimolecular((10, 20), 30, seed=0)
    csv_lines = r.samples_csv().splitlines()
    assert csv_lines[0].startswith("# leaderless_crn ")
    assert "seed=0" in csv_lines[1]
    header = next(l for l in csv_lines if not l.startswith("#"))
    assert header == "pattern,n,norm,trial,time,events"
    assert len([l for l in csv_lines if not l.startswith("#")]) == 61
    summary = json.loads(r.summary_json())
    assert summary["seed"] == 0 and summary["trials"] == 30 and len(summary["mean"]) == 2
    assert summary["ok"] == r.ok
    dat = [l for l in r.gnuplot_data().splitlines() if not l.startswith("#")]
    assert len(dat) == 2 and dat[0].split()[0] == "10"
    assert "acceptance" in r.text()


def test_band_violation_reported():
    r = bench.bench_unimolecular((50,), 30, seed=0, tolerance=1e-9)
    assert not r.ok and "tolerance" in r.violations()[0]
