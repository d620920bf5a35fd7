#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
低维盒约束上的无导数最大化与一维阈值二分

先在网格上扫描，再从最好的若干网格点出发做下山单纯形(Nelder-Mead)细化。
周期维度(φ)在细化时按周期取模。
"""

import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from ..errors import DomainError, OptimizerError, ThresholdError

logger = logging.getLogger(__name__)

MAX_BOX_DIM = 4
FATOL = 1e-10
STENCIL_OFFSETS = (-2, -1, 0, 1, 2)
PATTERN_SHRINK = 1 / 3
COARSE_GRID_POINTS = 12
COARSE_MULTISTART = 3
COARSE_REFINE_ITERATIONS = 80
COARSE_REFINE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    """优化器配置"""
    grid_points_per_dim: int = 24
    refine_iterations: int = 200
    refine_tolerance: float = 1e-9
    multistart_count: int = 8
    seed: int = 0
    inner_multistart_count: int = 2
    full_frame_orbit: bool = True
    analytic_l1_inner: bool = True

    def __post_init__(self):
        for name in ('grid_points_per_dim', 'refine_iterations', 'multistart_count',
                     'inner_multistart_count'):
            if int(getattr(self, name)) < 1:
                raise DomainError(f'{name} 必须为正整数', field=name)
        if not self.refine_tolerance > 0:
            raise DomainError('refine_tolerance 必须为正数', field='refine_tolerance')
        if self.grid_points_per_dim < 2:
            raise DomainError('grid_points_per_dim 至少为 2', field='grid_points_per_dim')

    @classmethod
    def from_settings(cls, settings):
        """从设置字典中读取已知字段，忽略其余键"""
        known = {k: v for k, v in (settings or {}).items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)

    def coarsened(self):
        """阈值粗定位用的低预算配置，不会比当前配置更精细"""
        return replace(
            self,
            grid_points_per_dim=min(self.grid_points_per_dim, COARSE_GRID_POINTS),
            multistart_count=min(self.multistart_count, COARSE_MULTISTART),
            refine_iterations=min(self.refine_iterations, COARSE_REFINE_ITERATIONS),
            refine_tolerance=max(self.refine_tolerance, COARSE_REFINE_TOLERANCE),
        )

    def to_dict(self):
        return asdict(self)


@dataclass
class RefineOutcome:
    value: float
    point: np.ndarray
    converged: bool
    iterations: int
    evaluations: int


@dataclass
class MaximizeDiagnostics:
    grid_best: float
    starts: int
    iterations: int
    evaluations: int
    converged: bool
    second_best_gap: float
    best_converged: bool = True
    candidates: list = field(default_factory=list)

    def to_dict(self):
        return {
            'grid_best': self.grid_best,
            'starts': self.starts,
            'iterations': self.iterations,
            'evaluations': self.evaluations,
            'converged': self.converged,
            'best_converged': self.best_converged,
            'second_best_gap': self.second_best_gap,
        }


@dataclass
class MaximizeResult:
    value: float
    argmax: np.ndarray
    diagnostics: MaximizeDiagnostics

    def __iter__(self):
        return iter((self.value, self.argmax, self.diagnostics))


def grid_points(box, points_per_dim, periodic):
    """周期维度不含右端点，其余维度含两端"""
    axes = [np.linspace(lo, hi, points_per_dim, endpoint=not per)
            for (lo, hi), per in zip(box, periodic)]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1)


def project_to_box(x, box, periodic):
    """最后一维为坐标，支持批量输入"""
    x = np.array(x, dtype=float)
    for k, ((lo, hi), per) in enumerate(zip(box, periodic)):
        if per:
            x[..., k] = lo + np.mod(x[..., k] - lo, hi - lo)
        else:
            x[..., k] = np.clip(x[..., k], lo, hi)
    return x


def evaluate_batch(f, points):
    """有 batch 方法的目标函数整体向量化求值，否则逐点求值"""
    batch = getattr(f, 'batch', None)
    if batch is not None:
        values = np.asarray(batch(points), dtype=float)
    else:
        values = np.array([f(p) for p in points], dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        location = points[int(np.argmax(bad))].tolist()
        raise OptimizerError(f'目标函数在 {location} 处取非有限值', location=location)
    return values


def rank_points(values, points):
    """按函数值降序排列，值相同时按角度元组字典序升序"""
    keys = tuple(points[:, k] for k in reversed(range(points.shape[1]))) + (-values,)
    return np.lexsort(keys)


def _refine_task(args):
    f, start, box, periodic, steps, config = args

    def negative(x):
        point = project_to_box(x, box, periodic)
        value = f(point)
        if not np.isfinite(value):
            raise OptimizerError(f'目标函数在 {point.tolist()} 处取非有限值', location=point.tolist())
        return -value

    simplex = [start] + [start + step * np.eye(len(start))[k] for k, step in enumerate(steps)]
    res = minimize(negative, start, method='Nelder-Mead',
                   options={'maxiter': config.refine_iterations, 'xatol': config.refine_tolerance,
                            'fatol': FATOL, 'initial_simplex': np.array(simplex)})
    point = project_to_box(res.x, box, periodic)
    return RefineOutcome(value=float(-res.fun), point=point, converged=bool(res.success),
                         iterations=int(res.nit), evaluations=int(res.nfev))


def _initial_steps(start, box, periodic, points_per_dim, rng):
    steps = []
    for x, (lo, hi), per in zip(start, box, periodic):
        width = (hi - lo) / (points_per_dim if per else points_per_dim - 1)
        step = 0.5 * width * rng.choice([-1.0, 1.0])
        if not per and not lo <= x + step <= hi:
            step = -step
        steps.append(step)
    return steps


def _merge(outcomes):
    return sorted(outcomes, key=lambda o: (-o.value, tuple(o.point)))


def maximize(f, box, config=None, periodic=None, starts=None, pool=None):
    """
    盒约束最大化

    f 可提供 batch(points) 做网格阶段的向量化求值；starts 为额外的细化起点；
    pool 提供 map 方法时各起点并行细化(f 需可 pickle)。
    """
    config = config or OptimizerConfig()
    box = [(float(lo), float(hi)) for lo, hi in box]
    if not 1 <= len(box) <= MAX_BOX_DIM:
        raise DomainError(f'盒约束维度必须在 1~{MAX_BOX_DIM} 之间, 实际 {len(box)}', field='box')
    periodic = list(periodic) if periodic is not None else [False] * len(box)

    points = grid_points(box, config.grid_points_per_dim, periodic)
    values = evaluate_batch(f, points)
    order = rank_points(values, points)
    grid_best = float(values[order[0]])

    start_points = [points[i] for i in order[:config.multistart_count]]
    for extra in starts or []:
        start_points.append(project_to_box(extra, box, periodic))

    rng = np.random.default_rng(config.seed)
    tasks = [(f, np.array(s, dtype=float), box, periodic,
              _initial_steps(s, box, periodic, config.grid_points_per_dim, rng), config)
             for s in start_points]
    if pool is not None and len(tasks) > 1:
        outcomes = list(pool.map(_refine_task, tasks))
    else:
        outcomes = [_refine_task(t) for t in tasks]
    for o in outcomes:
        logger.debug(f'细化起点 -> 值 {o.value:.12g}, 点 {o.point.tolist()}, 迭代 {o.iterations}, '
                     f'收敛 {o.converged}')

    merged = _merge(outcomes)
    best = merged[0]
    value, argmax = best.value, best.point
    if grid_best > value:
        value, argmax = grid_best, points[order[0]].copy()
    gap = merged[0].value - merged[1].value if len(merged) > 1 else 0.0
    diagnostics = MaximizeDiagnostics(
        grid_best=grid_best,
        starts=len(outcomes),
        iterations=sum(o.iterations for o in outcomes),
        evaluations=len(points) + sum(o.evaluations for o in outcomes),
        converged=all(o.converged for o in outcomes),
        second_best_gap=float(gap),
        best_converged=best.converged and value == best.value,
        candidates=[(o.value, o.point) for o in merged],
    )
    return MaximizeResult(value=float(value), argmax=np.asarray(argmax, dtype=float),
                          diagnostics=diagnostics)


@dataclass
class PatternOutcome:
    values: np.ndarray
    points: np.ndarray
    converged: np.ndarray
    iterations: int


def _stencil(dim):
    mesh = np.meshgrid(*[STENCIL_OFFSETS] * dim, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1).astype(float)


def pattern_refine(f, starts, box, steps, config=None, periodic=None):
    """
    多个起点同时做模式搜索

    每轮在各起点周围 5^d 的模板上整体求值并移到最优点；最优点不在模板边缘时步长缩为 1/3，
    步长全部低于 refine_tolerance 即收敛。f 接收 (起点数, 模板点数, d)，返回 (起点数, 模板点数)。
    各起点的值只增不减。
    """
    config = config or OptimizerConfig()
    periodic = list(periodic) if periodic is not None else [False] * len(box)
    points = project_to_box(np.atleast_2d(starts), box, periodic)
    count, dim = points.shape
    steps = np.broadcast_to(np.asarray(steps, dtype=float), (count, dim)).copy()
    offsets = _stencil(dim)
    centre = len(offsets) // 2
    rows = np.arange(count)
    values = np.full(count, -np.inf)
    converged = np.zeros(count, dtype=bool)
    iterations = 0
    while iterations < config.refine_iterations and not converged.all():
        iterations += 1
        trial = project_to_box(points[:, None, :] + offsets[None, :, :] * steps[:, None, :], box, periodic)
        trial_values = np.asarray(f(trial), dtype=float)
        bad = ~np.isfinite(trial_values)
        if bad.any():
            location = trial[np.unravel_index(int(np.argmax(bad)), bad.shape)].tolist()
            raise OptimizerError(f'目标函数在 {location} 处取非有限值', location=location)
        best = np.argmax(trial_values, axis=1)
        best = np.where(trial_values[rows, centre] >= trial_values[rows, best], centre, best)
        points = trial[rows, best]
        values = trial_values[rows, best]
        interior = np.abs(offsets[best]).max(axis=1) < max(STENCIL_OFFSETS)
        steps[interior] *= PATTERN_SHRINK
        converged = np.abs(steps).max(axis=1) < config.refine_tolerance
    return PatternOutcome(values=values, points=points, converged=converged, iterations=iterations)


def bisect_threshold(g, lo, hi, tol=1e-5):
    """在 [lo, hi] 上二分单调函数 g 的变号点，参数精度 tol"""
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ThresholdError(f'区间非法: [{lo}, {hi}]', field='bracket')
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise ThresholdError(f'区间两端同号: g({lo})={g_lo:.6g}, g({hi})={g_hi:.6g}', field='bracket')
    increasing = g_hi > 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        g_mid = g(mid)
        logger.debug(f'二分: g({mid:.9g}) = {g_mid:.9g}')
        if g_mid == 0:
            return mid
        if (g_mid > 0) == increasing:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
