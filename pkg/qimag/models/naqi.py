#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
非局域虚性优势(NAQI)

Alice 做三组投影测量 Π_i，Bob 在三组 MUB M_i 下计算条件态的虚性：
    N = max Σ_{i,a} p(ρ_{B|Π_i^a}) I_{M_i}(ρ_{B|Π_i^a})
N 超过单比特互补界 I_γ 即判定存在 NAQI，进而可推出态可导引(steerable)。

目标函数对 i 可分离：外层搜索 MUB 三元组角度，内层对每个 i 独立搜索测量角度。
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, StateValidationError
from ..utils.optimize import OptimizerConfig, maximize, pattern_refine
from .complementarity import SPHERE_BOX, SPHERE_PERIODIC, bound_constant, sphere_point
from .frames import frame_axes, mub_triple
from .imaginarity import ImaginarityMeasure, bloch_imaginarity, imag_measure
from .qmat import I2, DensityMatrix, partial_trace, pauli_decompose, validate_state

logger = logging.getLogger(__name__)

VERDICT_MARGIN = 1e-7
ZERO_PROBABILITY = 1e-12
SHARED_AXIS_TOL = 1e-12
CHUNK_ELEMENTS = 2 ** 20


@dataclass(frozen=True, eq=False)
class Outcome:
    probability: float
    state: DensityMatrix
    defined: bool = True


@dataclass(frozen=True, eq=False)
class ConditionalEnsemble:
    """Alice 一组测量在 Bob 处诱导的条件态系综"""
    outcomes: tuple

    @property
    def probabilities(self):
        return [o.probability for o in self.outcomes]

    def average(self):
        """Σ_a p_a ρ_{B|a}，未定义的条件态不参与"""
        return sum((o.probability * o.state.matrix for o in self.outcomes if o.defined),
                   np.zeros((2, 2), dtype=complex))


def _checked_two_qubit(rho_ab):
    if not isinstance(rho_ab, DensityMatrix):
        rho_ab = DensityMatrix(rho_ab)
    if rho_ab.dim != 4:
        raise DimensionError(f'NAQI 需要两比特态, 实际维度 {rho_ab.dim}', field='dim')
    diagnostics = validate_state(rho_ab)
    if not diagnostics.passed:
        raise StateValidationError(f'state: {diagnostics.describe()}', field='state',
                                   diagnostics=diagnostics)
    return rho_ab


def conditional_ensemble(rho_ab, pi):
    m = rho_ab.matrix if isinstance(rho_ab, DensityMatrix) else np.asarray(rho_ab, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionError(f'条件系综需要两比特态, 实际维度 {m.shape[0]}', field='dim')
    outcomes = []
    for projector in pi:
        op = np.kron(projector, I2)
        p = float(np.trace(op @ m).real)
        if p < ZERO_PROBABILITY:
            outcomes.append(Outcome(probability=max(p, 0.0), state=DensityMatrix.maximally_mixed(2),
                                    defined=False))
            continue
        outcomes.append(Outcome(probability=p, state=partial_trace(op @ m @ op / p, keep=[1])))
    return ConditionalEnsemble(outcomes=tuple(outcomes))


def objective(rho_ab, mub, meas, measure):
    """矩阵层面逐项计算 Σ_{i,a} p_a I_{M_i}(ρ_{B|a})"""
    total = 0.0
    for basis, pi in zip(mub.bases, meas.projectors):
        for outcome in conditional_ensemble(rho_ab, pi).outcomes:
            if outcome.defined:
                total += outcome.probability * imag_measure(measure, outcome.state, basis)
    return total


class SteeringKernel:
    """
    基于 Pauli 分解 (r, s, T) 的条件态计算

    Bloch 轴为 a 的投影给出 p± = (1 ± r·a)/2，b± = (s ± Tᵀa)/(1 ± r·a)。
    """

    def __init__(self, form):
        self.r = np.asarray(form.r, dtype=float)
        self.s = np.asarray(form.s, dtype=float)
        self.T = np.asarray(form.T, dtype=float)

    @classmethod
    def from_state(cls, rho_ab):
        return cls(pauli_decompose(rho_ab))

    def conditional(self, directions):
        """返回 [(p+, p+ b+), (p−, p− b−)]"""
        ra = directions @ self.r
        ta = directions @ self.T
        return [((1 + ra) / 2, (self.s + ta) / 2), ((1 - ra) / 2, (self.s - ta) / 2)]

    def evaluate(self, measure, directions, axes):
        """测量方向 (..., 3) 与虚轴 (..., 3) 按广播配对，返回 Σ_± p± I(b±, w)"""
        directions = np.asarray(directions, dtype=float)
        axes = np.asarray(axes, dtype=float)
        total = 0.0
        for p, weighted in self.conditional(directions):
            defined = p >= ZERO_PROBABILITY
            b = weighted / np.where(defined, p, 1.0)[..., None]
            total = total + np.where(defined, p * bloch_imaginarity(measure, b, axes), 0.0)
        return total

    def terms(self, measure, directions, axes):
        """所有方向与所有虚轴的组合，输出形状 (方向数, 轴数)"""
        directions = np.atleast_2d(directions)
        axes = np.atleast_2d(axes)
        return self.evaluate(measure, directions[:, None, :], axes[None, :, :])

    def analytic_l1(self, axes):
        """l1 内层极大值 max(|s·w|, ‖T w‖) 及对应的测量方向"""
        axes = np.atleast_2d(axes)
        local = np.abs(axes @ self.s)
        steered_vectors = axes @ self.T.T
        steered = np.linalg.norm(steered_vectors, axis=-1)
        directions = np.tile([0.0, 0.0, 1.0], (len(axes), 1))
        use = steered > 0
        directions[use] = steered_vectors[use] / steered[use, None]
        return np.maximum(local, steered), directions


def _direction_angles(a):
    theta = float(np.arccos(np.clip(a[2], -1.0, 1.0)))
    phi = float(np.mod(np.arctan2(a[1], a[0]), 2 * np.pi))
    return theta, phi


def _direction_angle_grid(points_per_dim):
    theta = np.linspace(0.0, np.pi, points_per_dim)
    phi = np.linspace(0.0, 2 * np.pi, points_per_dim, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    return np.stack([tt.ravel(), pp.ravel()], axis=-1)


def _direction_grid(points_per_dim):
    angles = _direction_angle_grid(points_per_dim)
    return sphere_point(angles[:, 0], angles[:, 1])


class InnerSolver:
    """
    内层：对若干条虚轴同时求 max_a Σ_± p± I(b±, w)

    先在方向网格上取最好的 inner_multistart_count 个点，再对全部 (轴, 起点) 一起做模式搜索。
    结果不低于方向网格上的最大值。
    """

    def __init__(self, kernel, measure, config):
        self.kernel = kernel
        self.measure = ImaginarityMeasure.from_tag(measure)
        self.config = config
        self.angles = _direction_angle_grid(config.grid_points_per_dim)
        self.directions = sphere_point(self.angles[:, 0], self.angles[:, 1])
        self.steps = (0.5 * np.pi / (config.grid_points_per_dim - 1),
                      0.5 * 2 * np.pi / config.grid_points_per_dim)

    def coarse(self, axes):
        """方向网格上的最大值，按块计算"""
        axes = np.atleast_2d(axes)
        chunk = max(1, CHUNK_ELEMENTS // len(self.directions))
        out = np.empty(len(axes))
        for start in range(0, len(axes), chunk):
            block = axes[start:start + chunk]
            out[start:start + chunk] = self.kernel.terms(self.measure, self.directions, block).max(axis=0)
        return out

    def solve(self, axes):
        """返回 [(值, (θ, φ), 是否收敛)]，与 axes 一一对应"""
        axes = np.atleast_2d(axes)
        starts_per_axis = min(self.config.inner_multistart_count, len(self.angles))
        grid = self.kernel.terms(self.measure, self.directions, axes)
        top = np.argsort(-grid, axis=0, kind='stable')[:starts_per_axis]
        owner = np.repeat(np.arange(len(axes)), starts_per_axis)
        starts = self.angles[top.T.ravel()]
        paired_axes = axes[owner][:, None, :]

        def stencil_values(points):
            return self.kernel.evaluate(self.measure, sphere_point(points[..., 0], points[..., 1]), paired_axes)

        outcome = pattern_refine(stencil_values, starts, SPHERE_BOX, self.steps, self.config,
                                 periodic=SPHERE_PERIODIC)
        solved = []
        for i in range(len(axes)):
            mine = np.flatnonzero(owner == i)
            j = mine[int(np.argmax(outcome.values[mine]))]
            point = outcome.points[j]
            solved.append((float(outcome.values[j]), (float(point[0]), float(point[1])),
                           bool(outcome.converged[j])))
        return solved


def best_term(kernel, measure, axis, config):
    """单条虚轴的内层最大化，返回 (值, (θ, φ), 是否收敛)"""
    measure = ImaginarityMeasure.from_tag(measure)
    if measure is ImaginarityMeasure.L1 and config.analytic_l1_inner:
        values, directions = kernel.analytic_l1(axis)
        return float(values[0]), _direction_angles(directions[0]), True
    return InnerSolver(kernel, measure, config).solve(axis)[0]


def frame_box(config):
    if config.full_frame_orbit:
        return [(0.0, np.pi), (0.0, 2 * np.pi), (0.0, 2 * np.pi)], [False, True, True]
    return [(0.0, np.pi), (0.0, 2 * np.pi)], [False, True]


def _frame_angles(x):
    chi = float(x[2]) if len(x) > 2 else 0.0
    return float(x[0]), float(x[1]), chi


def _batch_axes(points):
    chi = points[:, 2] if points.shape[1] > 2 else 0.0
    return frame_axes(points[:, 0], points[:, 1], chi)


def _shared_first_axis(axes):
    """M2 的虚轴与 M1 相同(差一符号)的行"""
    diff = np.minimum(np.linalg.norm(axes[..., 1, :] - axes[..., 0, :], axis=-1),
                      np.linalg.norm(axes[..., 1, :] + axes[..., 0, :], axis=-1))
    return diff < SHARED_AXIS_TOL


class FrameObjective:
    """外层目标：给定 MUB 三元组角度，三个测量项各自取最大后求和"""

    def __init__(self, kernel, measure, config):
        self.kernel = kernel
        self.measure = ImaginarityMeasure.from_tag(measure)
        self.config = config
        self.analytic = self.measure is ImaginarityMeasure.L1 and config.analytic_l1_inner
        self.inner = None if self.analytic else InnerSolver(kernel, self.measure, config)

    def solve(self, x):
        """三条虚轴一起求内层极大，M1 与 M2 的虚轴相同时只算一次"""
        axes = frame_axes(*_frame_angles(x))
        if self.analytic:
            return [best_term(self.kernel, self.measure, w, self.config) for w in axes]
        if _shared_first_axis(axes):
            first, third = self.inner.solve(axes[[0, 2]])
            return [first, first, third]
        return self.inner.solve(axes)

    def __call__(self, x):
        return float(sum(term[0] for term in self.solve(x)))

    def _coarse_inner(self, axes):
        if self.analytic:
            return self.kernel.analytic_l1(axes)[0]
        return self.inner.coarse(axes)

    def batch(self, points):
        """网格阶段：内层只取方向网格上的最大值"""
        axes = _batch_axes(points)
        shared = _shared_first_axis(axes)
        values = np.empty((len(points), 3))
        values[:, 0] = self._coarse_inner(axes[:, 0])
        values[:, 2] = self._coarse_inner(axes[:, 2])
        values[shared, 1] = values[shared, 0]
        if not shared.all():
            values[~shared, 1] = self._coarse_inner(axes[~shared, 1])
        return values.sum(axis=1)


class LowerBoundObjective:
    """Σ_i I_{M_i}(ρ_B)，自变量为 MUB 三元组角度"""

    def __init__(self, measure, bloch):
        self.measure = ImaginarityMeasure.from_tag(measure)
        self.bloch = np.asarray(bloch, dtype=float)

    def __call__(self, x):
        axes = frame_axes(*_frame_angles(x))
        return float(np.sum(bloch_imaginarity(self.measure, self.bloch, axes)))

    def batch(self, points):
        axes = _batch_axes(points)
        return np.sum(bloch_imaginarity(self.measure, self.bloch, axes), axis=-1)


def _lower_bound_search(bloch, measure, config):
    box, periodic = frame_box(config)
    return maximize(LowerBoundObjective(measure, bloch), box, config, periodic=periodic)


def reduced_state_lower_bound(rho_ab, measure, config=None):
    """max_M Σ_i I_{M_i}(ρ_B)，其中 ρ_B = Tr_A ρ_AB"""
    rho_ab = _checked_two_qubit(rho_ab)
    kernel = SteeringKernel.from_state(rho_ab)
    return _lower_bound_search(kernel.s, measure, config or OptimizerConfig()).value


@dataclass(frozen=True)
class NaqiDiagnostics:
    starts: int
    iterations: int
    evaluations: int
    second_best_gap: float
    certified: bool
    reduced_state_bound: float

    def to_dict(self):
        return {
            'starts': self.starts,
            'iterations': self.iterations,
            'evaluations': self.evaluations,
            'second_best_gap': self.second_best_gap,
            'certified': self.certified,
            'reduced_state_bound': self.reduced_state_bound,
        }


@dataclass(frozen=True)
class NaqiResult:
    measure: ImaginarityMeasure
    value: float
    witness: float
    verdict: bool
    steerable_implied: bool
    optimal_mub_angles: tuple
    frame_phase: float
    optimal_measurement_angles: tuple
    diagnostics: NaqiDiagnostics

    def optimal_triple(self):
        return mub_triple(*self.optimal_mub_angles, chi=self.frame_phase)

    def to_dict(self):
        return {
            'measure': self.measure.value,
            'value': self.value,
            'witness': self.witness,
            'verdict': self.verdict,
            'steerable_implied': self.steerable_implied,
            'optimal_mub_angles': list(self.optimal_mub_angles),
            'frame_phase': self.frame_phase,
            'optimal_measurement_angles': [list(a) for a in self.optimal_measurement_angles],
            'diagnostics': self.diagnostics.to_dict(),
        }


def naqi_value(rho_ab, measure, config=None, verdict_margin=VERDICT_MARGIN, pool=None):
    """最大化 N_γ(ρ_AB)，外层从约化态下界的最优三元组热启动"""
    rho_ab = _checked_two_qubit(rho_ab)
    measure = ImaginarityMeasure.from_tag(measure)
    config = config or OptimizerConfig()
    kernel = SteeringKernel.from_state(rho_ab)
    box, periodic = frame_box(config)

    lower = _lower_bound_search(kernel.s, measure, config)
    frame_objective = FrameObjective(kernel, measure, config)
    result = maximize(frame_objective, box, config, periodic=periodic, starts=[lower.argmax], pool=pool)

    theta1, phi1, chi = _frame_angles(result.argmax)
    terms = frame_objective.solve(result.argmax)
    value = float(sum(t[0] for t in terms))
    certified = result.diagnostics.best_converged and all(t[2] for t in terms)
    if not certified:
        logger.warning(f'NAQI 优化未完全收敛 ({measure.value}), 结果 {value:.9f} 未经认证')

    bound = bound_constant(measure).value
    witness_value = value - bound
    verdict = bool(witness_value > verdict_margin)
    logger.info(f'N_{measure.value} = {value:.12f}, witness = {witness_value:.3e}, verdict = {verdict}')
    return NaqiResult(
        measure=measure,
        value=value,
        witness=witness_value,
        verdict=verdict,
        steerable_implied=verdict,
        optimal_mub_angles=(theta1, phi1),
        frame_phase=chi,
        optimal_measurement_angles=tuple(t[1] for t in terms),
        diagnostics=NaqiDiagnostics(
            starts=result.diagnostics.starts,
            iterations=result.diagnostics.iterations,
            evaluations=result.diagnostics.evaluations,
            second_best_gap=result.diagnostics.second_best_gap,
            certified=certified,
            reduced_state_bound=lower.value,
        ),
    )


def witness(rho_ab, measure, config=None, verdict_margin=VERDICT_MARGIN, pool=None):
    """F = N_l1 − I_l1 或 G = N_r − I_r；严格大于 verdict_margin 才判定存在 NAQI"""
    return naqi_value(rho_ab, measure, config=config, verdict_margin=verdict_margin, pool=pool)


def flat_grid_maximum(rho_ab, measure, points_per_dim=5):
    """
    八个角度上的粗网格穷举：(θ1, φ1) 与三组 (θ, φ) 的全部组合，
    用于检验嵌套分解不丢失最大值
    """
    rho_ab = _checked_two_qubit(rho_ab)
    measure = ImaginarityMeasure.from_tag(measure)
    kernel = SteeringKernel.from_state(rho_ab)
    theta = np.linspace(0.0, np.pi, points_per_dim)
    phi = np.linspace(0.0, 2 * np.pi, points_per_dim, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    axes = frame_axes(tt.ravel(), pp.ravel())
    directions = _direction_grid(points_per_dim)
    n_frames, n_dirs = len(axes), len(directions)
    t = kernel.terms(measure, directions, axes.reshape(-1, 3)).reshape(n_dirs, n_frames, 3)
    t = t.transpose(1, 2, 0)
    total = (t[:, 0, :, None, None] + t[:, 1, None, :, None] + t[:, 2, None, None, :])
    return float(total.max())
