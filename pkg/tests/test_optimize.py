import math

import numpy as np
import pytest

from acmzi import metrology as mt
from acmzi import optimize as op
from acmzi.errors import AllDivergentError
from acmzi.metrology import Scheme
from acmzi.model import LOSSLESS, InterferometerConfig, LossConfig

FIG2 = InterferometerConfig()


def test_golden_refine_quadratic():
    x = op.golden_refine(lambda t: (t - 0.3) ** 2, 0.0, 0.25, 1.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-6)


def test_grid_then_golden_edge_minimum():
    f = lambda t: (t + 1.0) ** 2
    x, fx = op.grid_then_golden(np.vectorize(f), f, np.linspace(0, 1, 11), 1e-10)
    assert x == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("loss", [LOSSLESS, LossConfig(0.9, 0.8, 0.7, 0.6)])
def test_phase_profile_matches_direct_evaluation(loss):
    cfg = FIG2.with_g2(3.0)
    prof = op.PhaseProfile(cfg, loss, Scheme.INTENSITY)
    phi = np.linspace(0.1, 6.0, 37)
    np.testing.assert_allclose(prof(phi), mt.delta_phi(cfg, loss, phi, Scheme.INTENSITY), rtol=1e-9)


def test_homodyne_working_point_is_pi():
    phi, rep = op.optimal_phase(FIG2, LOSSLESS, Scheme.HOMODYNE)
    assert phi == pytest.approx(math.pi)
    assert rep.delta_phi == pytest.approx(1 / math.sqrt(5000))


def test_intensity_unbalanced_optimum_is_off_pi():
    phi, rep = op.optimal_phase(FIG2.with_g2(math.sqrt(20)), LOSSLESS, Scheme.INTENSITY)
    assert math.pi / 2 < phi < math.pi
    grid = np.linspace(2.5, math.pi - 1e-4, 4001)
    assert rep.delta_phi <= np.min(mt.delta_phi(FIG2.with_g2(math.sqrt(20)), LOSSLESS, grid,
                                                Scheme.INTENSITY)) * (1 + 1e-9)


def test_all_divergent_raises():
    cfg = InterferometerConfig.from_gains(n_c=0.0)
    with pytest.raises(AllDivergentError):
        op.optimal_phase(cfg, LOSSLESS, Scheme.HOMODYNE)


def test_optimize_gain_prefers_closed_form():
    g2, rep = op.optimize_gain(FIG2, LOSSLESS, Scheme.HOMODYNE)
    assert g2 ** 2 == pytest.approx(81, rel=1e-12)
    assert rep.delta_phi == pytest.approx(1 / math.sqrt(9000), rel=1e-12)


def test_optimize_gain_never_worse_than_balanced():
    loss = LossConfig(eta_c=0.5, eta_d=0.9)
    for scheme in Scheme:
        _, bal = op.best_phase(FIG2, loss, scheme)
        _, rep = op.optimize_gain(FIG2, loss, scheme)
        assert rep.delta_phi <= bal * (1 + 1e-12)


def test_lossless_intensity_optimal_ratio_is_one():
    g2, _ = op.optimize_gain(FIG2, LOSSLESS, Scheme.INTENSITY)
    assert g2 / FIG2.g1_gain == pytest.approx(1.0, abs=1e-3)


def test_gain_sweep_rejects_ratio_below_one():
    with pytest.raises(ValueError):
        op.gain_sweep(FIG2, LOSSLESS, Scheme.HOMODYNE, [0.9])


def test_homodyne_sweep_descends_to_optimum():
    ratios = np.linspace(1.0, 4.0, 31)
    d = [r.delta_phi for r in op.gain_sweep(FIG2, LOSSLESS, Scheme.HOMODYNE, ratios)]
    assert np.all(np.diff(d) <= 0)
    # past the optimum the curve stays flat within 2 percent
    tail = [r.delta_phi for r in op.gain_sweep(FIG2, LOSSLESS, Scheme.HOMODYNE, [4.5, 5, 6])]
    assert max(tail) / min(d) - 1 < 0.02


@pytest.fixture(scope="module")
def small_maps():
    g0 = op.loss_map(FIG2, op.Plane.INTERNAL, 16, False, Scheme.HOMODYNE)
    g1 = op.loss_map(FIG2, op.Plane.INTERNAL, 16, True, Scheme.HOMODYNE)
    return g0, g1


def test_loss_map_shape_and_corner(small_maps):
    g0, _ = small_maps
    assert g0.values.shape == (16, 16)
    assert g0.values[-1, -1] == pytest.approx(1 / math.sqrt(5000))
    assert (g0.x_name, g0.y_name) == ("eta_c", "eta_d")


def test_optimized_map_dominates(small_maps):
    g0, g1 = small_maps
    ok = ~g0.divergent & ~g1.divergent
    assert np.all(g1.values[ok] <= g0.values[ok] * (1 + 1e-9))
    level = mt.sql(FIG2)
    assert np.all(g1.beats(level) >= g0.beats(level))


def test_loss_map_worker_count_does_not_change_result():
    a = op.loss_map(FIG2, op.Plane.EXTERNAL, 16, False, Scheme.INTENSITY, workers=1)
    b = op.loss_map(FIG2, op.Plane.EXTERNAL, 16, False, Scheme.INTENSITY, workers=2)
    np.testing.assert_array_equal(a.values, b.values)


def test_loss_map_resolution_validated():
    with pytest.raises(ValueError):
        op.loss_map(FIG2, op.Plane.INTERNAL, 1)


def test_boundary_points_sit_on_sql(small_maps):
    g0, _ = small_maps
    level = mt.sql(FIG2)
    ev = op.sensitivity_function(FIG2, op.Plane.INTERNAL, Scheme.HOMODYNE, False)
    curve = op.extract_boundary(g0, ev, level)
    pts = curve.as_array()
    assert len(pts) > 5
    for x, y in pts:
        assert ev(x, y) == pytest.approx(level, rel=1e-6)
    # ordered by angle about the lossless corner
    ang = np.arctan2(1 - pts[:, 1], 1 - pts[:, 0])
    assert np.all(np.diff(ang) >= 0)
