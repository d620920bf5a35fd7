#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
单比特虚性互补关系

对任意一组三个 MUB，Σ_i I_{M_i}(ρ) 不超过 I_l1 = √5 (l1 范数) 或 I_r ≈ 2.02685 (相对熵)。
I_r 在首次使用时重新计算并缓存。
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import BoundConstantError
from ..utils.optimize import OptimizerConfig, maximize
from .frames import bloch_axis, mub_triple
from .imaginarity import ImaginarityMeasure, bloch_imaginarity, imag_measure
from .qmat import BlochVector, bloch_to_density

logger = logging.getLogger(__name__)

L1_BOUND = float(np.sqrt(5.0))
L1_MAXIMIZER = (1 / np.sqrt(5.0), 2 / np.sqrt(5.0), 0.0)
REFERENCE_RELATIVE_ENTROPY_BOUND = 2.02685
BOUND_TOL = 5e-4
ALTERNATIVE_TOL = 1e-6
DISTINCT_TOL = 1e-4
SPHERE_BOX = [(0.0, np.pi), (0.0, 2 * np.pi)]
SPHERE_PERIODIC = [False, True]


class Provenance(Enum):
    ANALYTIC = 'analytic'
    RECOMPUTED = 'recomputed'


@dataclass(frozen=True)
class BoundConstant:
    measure: ImaginarityMeasure
    value: float
    maximizer: BlochVector
    provenance: Provenance

    def to_dict(self):
        return {
            'measure': self.measure.value,
            'value': self.value,
            'maximizer': self.maximizer.as_list(),
            'provenance': self.provenance.value,
        }


@dataclass
class SumMaximum:
    value: float
    maximizer: BlochVector
    alternatives: list = field(default_factory=list)
    converged: bool = True


def sphere_point(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


class PureStateObjective:
    """球面 (θ, φ) 上的 Σ_i I_{M_i}(ρ(n))，Bloch 层面计算"""

    def __init__(self, measure, axes):
        self.measure = ImaginarityMeasure.from_tag(measure)
        self.axes = np.asarray(axes, dtype=float)

    def __call__(self, x):
        n = sphere_point(x[0], x[1])
        return float(np.sum(bloch_imaginarity(self.measure, n[None, :], self.axes)))

    def batch(self, points):
        n = sphere_point(points[:, 0], points[:, 1])
        return np.sum(bloch_imaginarity(self.measure, n[:, None, :], self.axes[None, :, :]), axis=1)


def mub_imaginarity_sum(n, m, measure):
    """Σ_i I^γ_{M_i}(ρ(n))，矩阵层面逐项计算"""
    rho = bloch_to_density(n)
    return float(sum(imag_measure(measure, rho, basis) for basis in m.bases))


def _signed_frame(triple):
    """三元组的正交坐标架 (M1 的 Bloch 轴, 两条虚轴)，每条轴第一个非零分量取正"""
    axes = [bloch_axis(triple.bases[0].vectors[0])]
    w = triple.axes()
    axes += [w[0], w[2]]
    signed = []
    for e in axes:
        nonzero = np.flatnonzero(np.abs(e) > 1e-12)
        signed.append(-e if nonzero.size and e[nonzero[0]] < 0 else e)
    return signed


def canonical_maximizer(n, triple):
    """把 n 反射到各投影非负的代表元"""
    n = np.asarray(n.array if isinstance(n, BlochVector) else n, dtype=float)
    out = sum(abs(float(n @ e)) * e for e in _signed_frame(triple))
    return BlochVector.from_array(np.clip(out, -1.0, 1.0))


def maximize_sum_over_states(measure, triple=None, config=None):
    """在纯态(单位球面)上最大化 Σ_i I_{M_i}"""
    measure = ImaginarityMeasure.from_tag(measure)
    triple = triple or mub_triple(0.0, 0.0)
    objective = PureStateObjective(measure, triple.axes())
    result = maximize(objective, SPHERE_BOX, config or OptimizerConfig(), periodic=SPHERE_PERIODIC)
    if not result.diagnostics.converged:
        logger.warning(f'{measure.value} 互补界最大化存在未收敛的细化起点')
    best = canonical_maximizer(sphere_point(*result.argmax), triple)
    alternatives = []
    for value, point in result.diagnostics.candidates:
        if value < result.value - ALTERNATIVE_TOL:
            continue
        candidate = canonical_maximizer(sphere_point(*point), triple)
        if all(np.linalg.norm(candidate.array - a.array) > DISTINCT_TOL for a in alternatives):
            alternatives.append(candidate)
    return SumMaximum(value=result.value, maximizer=best, alternatives=alternatives,
                      converged=result.diagnostics.converged)


def ball_sweep_maximum(measure, triple=None, resolution=12):
    """在整个 Bloch 球内做粗网格扫描，用于检验纯态限制不丢失最大值"""
    measure = ImaginarityMeasure.from_tag(measure)
    triple = triple or mub_triple(0.0, 0.0)
    axes = triple.axes()
    radii = np.linspace(0.0, 1.0, resolution)
    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.linspace(0.0, 2 * np.pi, 2 * resolution, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    directions = sphere_point(tt.ravel(), pp.ravel())
    points = (radii[:, None, None] * directions[None, :, :]).reshape(-1, 3)
    values = np.sum(bloch_imaginarity(measure, points[:, None, :], axes[None, :, :]), axis=1)
    return float(values.max())


_BOUND_CACHE = {}
_BOUND_LOCK = threading.Lock()


def _recompute_relative_entropy_bound():
    result = maximize_sum_over_states(ImaginarityMeasure.RELATIVE_ENTROPY, mub_triple(0.0, 0.0),
                                      OptimizerConfig())
    if abs(result.value - REFERENCE_RELATIVE_ENTROPY_BOUND) > BOUND_TOL:
        raise BoundConstantError(
            f'重新计算的 I_r = {result.value:.9f} 偏离 {REFERENCE_RELATIVE_ENTROPY_BOUND} 超过 {BOUND_TOL}')
    logger.info(f'I_r 重新计算完成: {result.value:.12f}, 极大点 {result.maximizer.as_list()}')
    return BoundConstant(measure=ImaginarityMeasure.RELATIVE_ENTROPY, value=result.value,
                         maximizer=result.maximizer, provenance=Provenance.RECOMPUTED)


def bound_constant(measure):
    measure = ImaginarityMeasure.from_tag(measure)
    if measure is ImaginarityMeasure.L1:
        return BoundConstant(measure=measure, value=L1_BOUND,
                             maximizer=BlochVector.from_array(L1_MAXIMIZER),
                             provenance=Provenance.ANALYTIC)
    with _BOUND_LOCK:
        if measure not in _BOUND_CACHE:
            _BOUND_CACHE[measure] = _recompute_relative_entropy_bound()
        return _BOUND_CACHE[measure]
