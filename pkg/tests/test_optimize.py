import numpy as np
import pytest

from qimag.errors import DomainError, OptimizerError, ThresholdError
from qimag.utils.optimize import (OptimizerConfig, bisect_threshold, grid_points, maximize, pattern_refine,
                                  project_to_box)


def _paraboloid(x):
    return -(x[0] - 0.3) ** 2 - (x[1] - 1.2) ** 2


def test_maximize_paraboloid():
    value, argmax, diagnostics = maximize(_paraboloid, [(0, 1), (0, 2)])
    assert abs(value) < 1e-12
    assert np.abs(argmax - [0.3, 1.2]).max() < 1e-5
    assert value >= diagnostics.grid_best
    assert diagnostics.starts == OptimizerConfig().multistart_count


def test_maximize_boundary_maximum():
    value, argmax, _ = maximize(lambda x: x[0] + x[1], [(0, 1), (-1, 2)])
    assert abs(value - 3) < 1e-12
    assert np.abs(argmax - [1, 2]).max() < 1e-12


def test_maximize_periodic_wraps():
    # 峰值靠近周期边界
    f = lambda x: np.cos(x[0] - 6.25)
    value, argmax, _ = maximize(f, [(0, 2 * np.pi)], periodic=[True])
    assert abs(value - 1) < 1e-12
    assert 0 <= argmax[0] < 2 * np.pi
    assert abs(argmax[0] - 6.25) < 1e-4


def test_maximize_deterministic():
    f = lambda x: np.sin(3 * x[0]) * np.cos(2 * x[1]) + 0.1 * x[0]
    config = OptimizerConfig(grid_points_per_dim=10, seed=7)
    ret0 = maximize(f, [(0, 3), (0, 3)], config)
    ret1 = maximize(f, [(0, 3), (0, 3)], config)
    assert ret0.value == ret1.value
    assert np.array_equal(ret0.argmax, ret1.argmax)


def test_maximize_never_below_grid():
    config = OptimizerConfig(grid_points_per_dim=5, refine_iterations=1, multistart_count=1)
    f = lambda x: -np.abs(x[0] - 0.5)
    value, _, diagnostics = maximize(f, [(0, 1)], config)
    assert value >= diagnostics.grid_best
    assert value == 0


def test_maximize_extra_starts():
    config = OptimizerConfig(grid_points_per_dim=3, multistart_count=1)
    _, _, diagnostics = maximize(_paraboloid, [(0, 1), (0, 2)], config, starts=[[0.9, 0.1], [0.1, 1.9]])
    assert diagnostics.starts == 3


def test_maximize_rejects_non_finite():
    with pytest.raises(OptimizerError) as e:
        maximize(lambda x: np.nan, [(0, 1)])
    assert e.value.location is not None


def test_maximize_box_dimension():
    with pytest.raises(DomainError):
        maximize(lambda x: 0.0, [(0, 1)] * 5)


class SerialPool:
    def __init__(self):
        self.calls = 0

    def map(self, func, tasks):
        self.calls += 1
        return [func(t) for t in tasks]


def test_maximize_with_pool():
    pool = SerialPool()
    ret0 = maximize(_paraboloid, [(0, 1), (0, 2)])
    ret1 = maximize(_paraboloid, [(0, 1), (0, 2)], pool=pool)
    assert pool.calls == 1
    assert ret0.value == ret1.value


def test_grid_points():
    ret_ = grid_points([(0, 1), (0, 2 * np.pi)], 4, [False, True])
    assert ret_.shape == (16, 2)
    assert ret_[:, 0].max() == 1
    assert ret_[:, 1].max() < 2 * np.pi


def test_project_to_box():
    ret_ = project_to_box([1.5, -0.1], [(0, 1), (0, 2 * np.pi)], [False, True])
    assert ret_[0] == 1
    assert abs(ret_[1] - (2 * np.pi - 0.1)) < 1e-12


def test_bisect_threshold():
    ret_ = bisect_threshold(lambda p: p - np.sqrt(5) / 3, 0.5, 1.0, tol=1e-8)
    assert abs(ret_ - np.sqrt(5) / 3) < 1e-8
    ret_ = bisect_threshold(lambda p: 0.597 - p, 0.0, 1.0, tol=1e-6)
    assert abs(ret_ - 0.597) < 1e-6
    with pytest.raises(ThresholdError):
        bisect_threshold(lambda p: p + 1, 0.0, 1.0)
    with pytest.raises(ThresholdError):
        bisect_threshold(lambda p: p, 1.0, 0.0)


def test_optimizer_config():
    config = OptimizerConfig.from_settings({'grid_points_per_dim': 12, 'unknown': 1})
    assert config.grid_points_per_dim == 12
    assert config.replace(seed=None, multistart_count=3).multistart_count == 3
    assert config.replace(seed=None).seed == 0
    assert config.to_dict()['full_frame_orbit'] is True
    with pytest.raises(DomainError):
        OptimizerConfig(grid_points_per_dim=1)
    with pytest.raises(DomainError):
        OptimizerConfig(refine_tolerance=0)


def _paraboloid_batch(points):
    return -(points[..., 0] - 0.3) ** 2 - (points[..., 1] - 1.2) ** 2


def test_pattern_refine_paraboloid():
    starts = np.array([[0.0, 0.0], [1.0, 2.0], [0.3, 1.2]])
    ret_ = pattern_refine(_paraboloid_batch, starts, [(0, 1), (0, 2)], steps=(0.1, 0.2))
    assert ret_.converged.all()
    assert np.abs(ret_.points - [0.3, 1.2]).max() < 1e-8
    assert np.abs(ret_.values).max() < 1e-15
    assert ret_.iterations <= OptimizerConfig().refine_iterations


def test_pattern_refine_never_decreases():
    rng = np.random.default_rng(233)
    box = [(0, 1), (0, 2)]
    starts = np.stack([rng.uniform(0, 1, size=20), rng.uniform(0, 2, size=20)], axis=-1)
    config = OptimizerConfig(refine_iterations=3)
    ret_ = pattern_refine(_paraboloid_batch, starts, box, steps=(0.05, 0.05), config=config)
    assert np.all(ret_.values >= _paraboloid_batch(starts))
    assert ret_.iterations == 3
    assert not ret_.converged.all()


def test_pattern_refine_periodic_and_batched_points():
    def f(points):
        return np.cos(points[..., 0] - 0.1)

    ret_ = pattern_refine(f, [[6.0]], [(0.0, 2 * np.pi)], steps=0.2, periodic=[True])
    assert ret_.points.shape == (1, 1)
    assert abs(ret_.points[0, 0] - 0.1) < 1e-6
    assert abs(ret_.values[0] - 1) < 1e-12
    ret_ = project_to_box([[7.0, -1.0], [0.5, 3.0]], [(0.0, 2 * np.pi), (0.0, 2.0)], [True, False])
    assert np.abs(ret_ - [[7.0 - 2 * np.pi, 0.0], [0.5, 2.0]]).max() < 1e-12


def test_pattern_refine_non_finite():
    with pytest.raises(OptimizerError):
        pattern_refine(lambda points: np.full(points.shape[:2], np.nan), [[0.5]], [(0, 1)], steps=0.1)


def test_optimizer_config_coarsened():
    config = OptimizerConfig()
    ret_ = config.coarsened()
    assert ret_.grid_points_per_dim < config.grid_points_per_dim
    assert ret_.multistart_count < config.multistart_count
    assert ret_.refine_tolerance > config.refine_tolerance
    assert ret_.seed == config.seed and ret_.full_frame_orbit == config.full_frame_orbit
    tmp0 = OptimizerConfig(grid_points_per_dim=6, multistart_count=1, refine_iterations=10, refine_tolerance=1e-3)
    assert tmp0.coarsened() == tmp0
