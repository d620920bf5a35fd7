#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
态族与实验驱动

Bell 态混合、Werner 态与三比特纯态族；参数扫描、NAQI 阈值定位与三比特排斥性扫描。
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import DomainError, ThresholdError
from ..utils.optimize import OptimizerConfig, bisect_threshold
from .imaginarity import ImaginarityMeasure
from .naqi import VERDICT_MARGIN, witness
from .qmat import DensityMatrix, partial_trace, permute_subsystems

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-10
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
THREE_QUBIT_SLOTS = (0b000, 0b100, 0b101, 0b110, 0b111)
COARSE_THRESHOLD_TOL = 1e-3
THRESHOLD_MARGIN = 2e-3


class FamilyTag(Enum):
    BELL_MIXTURE = 'bell'
    WERNER = 'werner'
    THREE_QUBIT_PURE = 'three-qubit'


def _check_probability(p):
    if not 0 <= p <= 1:
        raise DomainError(f'参数 p 必须在 [0, 1] 内, 实际 {p}', field='p')


@dataclass(frozen=True)
class BellMixture:
    """p|φ+><φ+| + (1−p)|ψ+><ψ+|"""
    p: float
    tag = FamilyTag.BELL_MIXTURE

    def __post_init__(self):
        _check_probability(self.p)

    def build(self):
        return DensityMatrix(self.p * np.outer(PHI_PLUS, PHI_PLUS.conj())
                             + (1 - self.p) * np.outer(PSI_PLUS, PSI_PLUS.conj()))


@dataclass(frozen=True)
class Werner:
    """p|φ+><φ+| + (1−p) I⊗I/4"""
    p: float
    tag = FamilyTag.WERNER

    def __post_init__(self):
        _check_probability(self.p)

    def build(self):
        return DensityMatrix(self.p * np.outer(PHI_PLUS, PHI_PLUS.conj()) + (1 - self.p) * np.eye(4) / 4)


@dataclass(frozen=True)
class ThreeQubitPure:
    """λ0|000> + λ1 e^{iφ}|100> + λ2|101> + λ3|110> + λ4|111>"""
    lambdas: tuple
    phi: float = 0.0
    allow_signed: bool = False
    tag = FamilyTag.THREE_QUBIT_PURE

    def __post_init__(self):
        lambdas = tuple(float(x) for x in self.lambdas)
        if len(lambdas) != 5:
            raise DomainError(f'需要 5 个振幅 λ0..λ4, 实际 {len(lambdas)} 个', field='lambdas')
        if not self.allow_signed and min(lambdas) < 0:
            raise DomainError(f'振幅必须非负: {lambdas}', field='lambdas')
        norm = sum(x * x for x in lambdas)
        if abs(norm - 1) > NORMALIZATION_TOL:
            raise DomainError(f'振幅未归一化: Σλ² = {norm:.12g}', field='lambdas')
        if not 0 <= self.phi <= np.pi:
            raise DomainError(f'相位 φ 必须在 [0, π] 内, 实际 {self.phi}', field='phi')
        object.__setattr__(self, 'lambdas', lambdas)

    @classmethod
    def alpha_beta(cls, alpha, beta):
        """λ0 = cos α, λ2 = sin α cos β, λ3 = sin α sin β，振幅可带符号"""
        return cls((np.cos(alpha), 0.0, np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta), 0.0),
                   allow_signed=True)

    @classmethod
    def theta_family(cls, theta):
        """λ0 = √2/2, λ2 = (√2/2) cos θ, λ3 = (√2/2) sin θ"""
        h = np.sqrt(2) / 2
        return cls((h, 0.0, h * np.cos(theta), h * np.sin(theta), 0.0), allow_signed=True)

    def build(self):
        ket = np.zeros(8, dtype=complex)
        amplitudes = list(self.lambdas)
        amplitudes[1] = amplitudes[1] * np.exp(1j * self.phi)
        for slot, amp in zip(THREE_QUBIT_SLOTS, amplitudes):
            ket[slot] = amp
        return DensityMatrix(np.outer(ket, ket.conj()))


FAMILIES = {
    FamilyTag.BELL_MIXTURE.value: BellMixture,
    FamilyTag.WERNER.value: Werner,
}


def family_template(name):
    """命令行名称 -> 单参数态族模板"""
    if name not in FAMILIES:
        raise DomainError(f'未知的态族: {name}, 可选 {sorted(FAMILIES)}', field='family')
    return FAMILIES[name]


def build_state(family):
    if not isinstance(family, (BellMixture, Werner, ThreeQubitPure)):
        raise DomainError(f'未知的态族类型: {type(family).__name__}', field='family')
    return family.build()


def _map(pool, func, tasks):
    if pool is not None and len(tasks) > 1:
        return list(pool.map(func, tasks))
    return [func(t) for t in tasks]


@dataclass(frozen=True)
class ScanRecord:
    param: float
    value: float
    witness: float
    verdict: bool
    result: object = field(repr=False, default=None)

    def to_row(self):
        return {'param': self.param, 'N': self.value, 'witness': self.witness, 'verdict': self.verdict}


def _scan_point(task):
    template, param, measure, config, margin = task
    result = witness(build_state(template(param)), measure, config=config, verdict_margin=margin)
    return ScanRecord(param=float(param), value=result.value, witness=result.witness,
                      verdict=result.verdict, result=result)


def scan_family(template, grid, measure, config=None, pool=None, verdict_margin=VERDICT_MARGIN):
    """按网格顺序返回每个参数点的 (参数, N, witness, verdict)"""
    measure = ImaginarityMeasure.from_tag(measure)
    tasks = [(template, float(p), measure, config, verdict_margin) for p in grid]
    records = _map(pool, _scan_point, tasks)
    logger.info(f'{getattr(template, "__name__", template)} 扫描完成: {len(records)} 个点, 度量 {measure.value}')
    return records


def _witness_function(template, measure, config, pool=None):
    def g(p):
        return witness(build_state(template(p)), measure, config=config, pool=pool).witness
    return g


def find_naqi_threshold(template, measure, bracket=(0.5, 1.0), config=None, tol=1e-5, pool=None):
    """
    在区间内二分 witness 的变号点

    先用低预算配置二分到 COARSE_THRESHOLD_TOL，再用完整配置在附近的小区间内细化；
    小区间两端不变号时回到原区间。pool 用于并行细化每次 witness 计算的外层起点。
    """
    measure = ImaginarityMeasure.from_tag(measure)
    config = config or OptimizerConfig()
    lo, hi = float(bracket[0]), float(bracket[1])
    g = _witness_function(template, measure, config, pool)
    coarse = config.coarsened()
    if tol >= COARSE_THRESHOLD_TOL or coarse == config:
        threshold = bisect_threshold(g, lo, hi, tol=tol)
    else:
        try:
            guess = bisect_threshold(_witness_function(template, measure, coarse, pool), lo, hi,
                                     tol=COARSE_THRESHOLD_TOL)
            narrow = (max(lo, guess - THRESHOLD_MARGIN), min(hi, guess + THRESHOLD_MARGIN))
            logger.debug(f'粗定位阈值 {guess:.6f}, 细化区间 {narrow}')
            threshold = bisect_threshold(g, *narrow, tol=tol)
        except ThresholdError:
            logger.info('粗定位区间内未找到变号点, 在原区间上重新二分')
            threshold = bisect_threshold(g, lo, hi, tol=tol)
    logger.info(f'{getattr(template, "__name__", template)} 的 NAQI 阈值 ({measure.value}): {threshold:.9f}')
    return threshold


PAIR_LABELS = ('AB', 'BC', 'CA')


def pair_states(rho_abc, reverse_roles=False):
    """
    三个有序比特对，测量方在前：ρ_AB 测 A、ρ_BC 测 B、ρ_CA 测 C；
    reverse_roles 时交换测量方与虚性方
    """
    ab = partial_trace(rho_abc, keep=[0, 1])
    bc = partial_trace(rho_abc, keep=[1, 2])
    ac = partial_trace(rho_abc, keep=[0, 2])
    ca = permute_subsystems(ac, [1, 0])
    if reverse_roles:
        return {'AB': permute_subsystems(ab, [1, 0]), 'BC': permute_subsystems(bc, [1, 0]), 'CA': ac}
    return {'AB': ab, 'BC': bc, 'CA': ca}


@dataclass(frozen=True)
class ExclusionRecord:
    params: dict
    results: tuple
    count_exceeding: int

    @property
    def values(self):
        return tuple(r.value for r in self.results)

    def to_row(self):
        row = dict(self.params)
        for label, r in zip(PAIR_LABELS, self.results):
            row[f'N_{label}'] = r.value
        row['count_exceeding'] = self.count_exceeding
        return row


def _exclusion_point(task):
    params, family, measure, config, margin, reverse_roles = task
    pairs = pair_states(build_state(family), reverse_roles=reverse_roles)
    results = tuple(witness(pairs[label], measure, config=config, verdict_margin=margin)
                    for label in PAIR_LABELS)
    return ExclusionRecord(params=dict(params), results=results,
                           count_exceeding=sum(1 for r in results if r.verdict))


def alpha_beta_grid(n_alpha=40, n_beta=40):
    """α ∈ [0, π], β ∈ [0, 2π]"""
    return [({'alpha': float(a), 'beta': float(b)}, ThreeQubitPure.alpha_beta(a, b))
            for a in np.linspace(0.0, np.pi, n_alpha)
            for b in np.linspace(0.0, 2 * np.pi, n_beta)]


def theta_grid(n_theta=100, lo=0.0, hi=2 * np.pi):
    return [({'theta': float(t)}, ThreeQubitPure.theta_family(t)) for t in np.linspace(lo, hi, n_theta)]


def exclusion_scan(grid, measure=ImaginarityMeasure.L1, config=None, pool=None, reverse_roles=False,
                   verdict_margin=VERDICT_MARGIN):
    """每个网格点计算 N(A→B), N(B→C), N(C→A) 以及超过互补界的对数"""
    measure = ImaginarityMeasure.from_tag(measure)
    tasks = [(params, family, measure, config, verdict_margin, reverse_roles) for params, family in grid]
    records = _map(pool, _exclusion_point, tasks)
    violations = sum(1 for r in records if r.count_exceeding > 1)
    logger.info(f'排斥性扫描完成: {len(records)} 个点, 多于一对超界的点数 {violations}')
    return records
