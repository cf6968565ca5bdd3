"""Reduced surfaces, Morse scans, and level-set component counts."""

from fractions import Fraction

import numpy as np
import pytest

from ephemera.errors import EmptyFiber, NotMorse, NotProper
from ephemera.family import PolarPoint, build_family, eval_polar
from ephemera.fiberlab import (
    SyntheticChart,
    connectivity_report,
    critical_scan,
    gbar_eval,
    level_components,
    off_critical_levels,
    reduced_surface,
)
from ephemera.lattice import WeightMatrix

FAM = build_family(WeightMatrix(((1, 0, 1), (0, 1, 1))))
FLAT = build_family(WeightMatrix(((1, -1),)))


def test_segment_solve_exact():
    chart = reduced_surface(FAM, (1, 1))
    # endpoints: s3 = 0 on one side, s1 = s2 = 0 on the other
    assert chart.s_start == (Fraction(0), Fraction(0), Fraction(2))
    assert chart.s_end == (Fraction(2), Fraction(2), Fraction(0))
    assert chart.support_start == (0, 1)
    assert chart.support_end == (2,)
    assert chart.collapse_start and chart.collapse_end
    assert not chart.degenerate
    # interior squared radii satisfy the moment equations exactly
    for t in (0.25, 0.5, 0.75):
        s = [
            float(a) + (float(b) - float(a)) * t
            for a, b in zip(chart.s_start, chart.s_end)
        ]
        for a, row in enumerate(FAM.weights.entries):
            assert 0.5 * sum(row[j] * s[j] for j in range(3)) == pytest.approx(
                chart.beta[a]
            )


def test_segment_outside_image():
    with pytest.raises(EmptyFiber):
        reduced_surface(FAM, (-1, 1))


def test_boundary_point_chart():
    chart = reduced_surface(FAM, (0, 0))
    assert chart.degenerate


def test_not_proper_rejected():
    with pytest.raises(NotProper):
        reduced_surface(FLAT, (Fraction(1),))


def test_gbar_matches_lifted_points():
    rng = np.random.default_rng(19)
    chart = reduced_surface(FAM, (1, 1))
    xi = FAM.xi.xi
    for _ in range(1000):
        t = float(rng.uniform(0.05, 0.95))
        psi = float(rng.uniform(0, 2 * np.pi))
        s = np.array(
            [
                float(a) + (float(b) - float(a)) * t
                for a, b in zip(chart.s_start, chart.s_end)
            ]
        )
        # lift: distribute psi onto the angles along the kernel direction
        theta = np.zeros(3)
        theta[0] = psi / xi[0]
        w = PolarPoint(r=tuple(np.sqrt(s)), theta=tuple(theta))
        _, g_lift = eval_polar(FAM, w)
        assert gbar_eval(chart, t, psi) == pytest.approx(g_lift, rel=1e-10, abs=1e-10)


def test_gbar_trivial_values():
    chart = reduced_surface(FAM, (1, 1))
    for t in (0.0, 0.3, 0.8, 1.0):
        assert gbar_eval(chart, t, 0.0) == pytest.approx(0.0)
    assert gbar_eval(chart, 0.5, np.pi / 2) > 0.0
    # collapsed endpoints carry the value zero
    assert gbar_eval(chart, 0.0, 1.234) == pytest.approx(0.0)
    assert gbar_eval(chart, 1.0, 4.321) == pytest.approx(0.0)


def test_critical_scan_sphere_chart():
    chart = reduced_surface(FAM, (1, 1))
    report = critical_scan(chart, 256)
    idx0, idx1, idx2 = report.index_counts()
    assert (idx0, idx1, idx2) == (1, 0, 1)
    assert report.euler_characteristic == 2
    # critical angles are the two sine extrema
    for _, psi, _, _ in report.critical_points:
        assert min(abs(psi - np.pi / 2), abs(psi - 3 * np.pi / 2)) <= 1e-9


def test_critical_scan_synthetic_saddles():
    chart = SyntheticChart(dip=0.7)
    report = critical_scan(chart, 256)
    idx0, idx1, idx2 = report.index_counts()
    assert idx1 == 2
    assert (idx0, idx2) == (2, 2)
    assert report.euler_characteristic == 2


class _ZeroChart(SyntheticChart):
    def radius_profile(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


def test_critical_scan_rejects_zero_chart():
    with pytest.raises(NotMorse):
        critical_scan(_ZeroChart(), 64)


def test_level_components_sphere():
    chart = reduced_surface(FAM, (1, 1))
    report = critical_scan(chart, 512)
    r_max = float(np.max(chart.radius_profile(np.linspace(0, 1, 513))))
    assert level_components(chart, 2.0 * r_max, 512) == 0
    for c in off_critical_levels(report, 21, r_max):
        assert level_components(chart, c, 512) == 1, c


def test_level_components_synthetic_two_loops():
    chart = SyntheticChart(dip=0.7)
    # saddle value and peak value of the profile
    ts = np.linspace(0, 1, 2049)
    rv = chart.radius_profile(ts)
    saddle, peak = rv[1024], float(rv.max())
    between = 0.5 * (saddle + peak)
    assert level_components(chart, between, 512) == 2
    below = 0.5 * saddle
    assert level_components(chart, below, 512) == 1


def _interval_count_oracle(chart, c, samples=4096):
    """Level components of R(t) sin(psi) = c by profile-interval counting.

    For off-critical c != 0 the level is one closed loop per maximal
    interval where the profile exceeds |c|; at c = 0 the two zero-angle
    lines join through the collapsed poles into one circle.
    """
    if c == 0.0:
        return 1
    ts = np.linspace(0.0, 1.0, samples)
    above = chart.radius_profile(ts) > abs(c)
    runs = 0
    prev = False
    for flag in above:
        if flag and not prev:
            runs += 1
        prev = flag
    return runs


def test_level_components_against_interval_oracle():
    rng = np.random.default_rng(23)
    charts = [reduced_surface(FAM, (1, 1)), SyntheticChart(dip=0.7), SyntheticChart(dip=0.2)]
    for chart in charts:
        r_max = float(np.max(chart.radius_profile(np.linspace(0, 1, 1025))))
        report = critical_scan(chart, 256)
        from ephemera.fiberlab import off_critical_levels

        for c in off_critical_levels(report, 21, r_max):
            got = level_components(chart, c, 512)
            assert got == _interval_count_oracle(chart, c), (chart, c)
        for _ in range(20):
            c = float(rng.uniform(-0.9, 0.9)) * r_max
            values = [v for _, _, v, _ in report.critical_points]
            if any(abs(c - v) < 5e-3 * r_max for v in values + [0.0]):
                continue
            assert level_components(chart, c, 512) == _interval_count_oracle(chart, c)


def test_parallel_scan_matches_sequential():
    betas = [(a, b) for a in (0.9, 1.5) for b in (1.0, 1.8)]
    seq = connectivity_report(FAM, betas, c_count=7, resolution=128, max_workers=1)
    par = connectivity_report(FAM, betas, c_count=7, resolution=128, max_workers=4)
    assert seq.all_consistent == par.all_consistent
    for a, b in zip(seq.charts, par.charts):
        assert a.beta == b.beta
        assert a.status == b.status
        assert a.levels == b.levels
        assert a.consistent == b.consistent


def test_resolution_stability():
    chart = reduced_surface(FAM, (1, 1))
    report = critical_scan(chart, 256)
    r_max = float(np.max(chart.radius_profile(np.linspace(0, 1, 257))))
    for c in off_critical_levels(report, 11, r_max):
        assert level_components(chart, c, 256) == level_components(chart, c, 512)
    synth = SyntheticChart(dip=0.7)
    report = critical_scan(synth, 256)
    for c in off_critical_levels(report, 11, 1.0):
        assert level_components(synth, c, 256) == level_components(synth, c, 512)


def test_connectivity_report_consistent():
    betas = [(a, b) for a in (0.8, 1.4) for b in (0.9, 1.3)]
    report = connectivity_report(FAM, betas, c_count=11, resolution=128)
    assert report.all_consistent is True
    ok_charts = [c for c in report.charts if c.status == "ok"]
    assert len(ok_charts) == len(betas)
    for chart in ok_charts:
        assert chart.no_saddles is True
        assert chart.all_levels_connected is True
        assert chart.euler_is_sphere is True
        assert chart.consistent is True
    synth = report.synthetic_check
    assert synth is not None
    assert synth.no_saddles is False
    assert synth.all_levels_connected is False
    assert synth.consistent is True


def test_connectivity_report_flags_empty():
    report = connectivity_report(
        FAM, [(-1.0, 1.0), (1.0, 1.0)], c_count=5, resolution=64, synthetic_check=False
    )
    statuses = [c.status for c in report.charts]
    assert statuses == ["empty", "ok"]
