#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
互无偏基(MUB)三元组与投影测量的参数化构造

M1 = {cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>, sin(θ/2)|0> − e^{iφ} cos(θ/2)|1>}
M2± = (M1+ ± M1−)/√2,  M3± = (M1+ ± i M1−)/√2
可选相位 χ 乘在 M1 的第二个基矢上，默认关闭。
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import DomainError, FrameError
from .imaginarity import OrthonormalBasis, imaginary_axes, imaginary_axis
from .qmat import PAULI

MUB_TOL = 1e-10
UNITARY_TOL = 1e-10
SQRT_HALF = 1 / np.sqrt(2)


def _check_finite(**angles):
    for name, value in angles.items():
        if not np.isfinite(value):
            raise DomainError(f'角度 {name} 不是有限数: {value}', field=name)


def spinor_pair(theta, phi):
    """M1 与投影测量共用的旋量对"""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    phase = np.exp(1j * phi)
    return np.array([c, phase * s], dtype=complex), np.array([s, -phase * c], dtype=complex)


def bloch_axis(vector):
    """纯态 |ψ> 的 Bloch 矢量"""
    psi = np.asarray(vector, dtype=complex)
    return np.array([np.real(psi.conj() @ s @ psi) for s in PAULI])


@dataclass(frozen=True, eq=False)
class MubTriple:
    theta1: float
    phi1: float
    chi: float
    bases: tuple

    @property
    def angles(self):
        return self.theta1, self.phi1

    def axes(self):
        """三个基的虚轴，形状 (3, 3)"""
        return np.stack([imaginary_axis(b) for b in self.bases])


def mub_triple(theta1, phi1, chi=0.0):
    _check_finite(theta1=theta1, phi1=phi1, chi=chi)
    e1, e2 = spinor_pair(theta1, phi1)
    e2 = np.exp(1j * chi) * e2
    m1 = OrthonormalBasis.from_vectors(e1, e2)
    m2 = OrthonormalBasis.from_vectors(SQRT_HALF * (e1 + e2), SQRT_HALF * (e1 - e2))
    m3 = OrthonormalBasis.from_vectors(SQRT_HALF * (e1 + 1j * e2), SQRT_HALF * (e1 - 1j * e2))
    return MubTriple(theta1=float(theta1), phi1=float(phi1), chi=float(chi), bases=(m1, m2, m3))


def frame_axes(theta1, phi1, chi=0.0):
    """批量计算三元组的虚轴，输出形状 (..., 3, 3)"""
    theta1, phi1, chi = np.broadcast_arrays(np.asarray(theta1, dtype=float),
                                            np.asarray(phi1, dtype=float),
                                            np.asarray(chi, dtype=float))
    c, s = np.cos(theta1 / 2), np.sin(theta1 / 2)
    phase = np.exp(1j * phi1)
    e1 = np.stack([c + 0j, phase * s], axis=-1)
    e2 = np.exp(1j * chi)[..., None] * np.stack([s + 0j, -phase * c], axis=-1)
    w1 = imaginary_axes(e1, e2)
    w2 = imaginary_axes(SQRT_HALF * (e1 + e2), SQRT_HALF * (e1 - e2))
    w3 = imaginary_axes(SQRT_HALF * (e1 + 1j * e2), SQRT_HALF * (e1 - 1j * e2))
    return np.stack([w1, w2, w3], axis=-2)


@dataclass(frozen=True, eq=False)
class ProjectorPair:
    theta: float
    phi: float
    plus: np.ndarray
    minus: np.ndarray

    @property
    def axis(self):
        """Π+ 的 Bloch 轴 (sinθ cosφ, sinθ sinφ, cosθ)"""
        return np.array([np.sin(self.theta) * np.cos(self.phi),
                         np.sin(self.theta) * np.sin(self.phi),
                         np.cos(self.theta)])

    def __iter__(self):
        return iter((self.plus, self.minus))


def projector_pair(theta, phi):
    _check_finite(theta=theta, phi=phi)
    e1, e2 = spinor_pair(theta, phi)
    plus = np.outer(e1, e1.conj())
    minus = np.outer(e2, e2.conj())
    plus.setflags(write=False)
    minus.setflags(write=False)
    return ProjectorPair(theta=float(theta), phi=float(phi), plus=plus, minus=minus)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    angles: tuple
    projectors: tuple


def measurement_set(angles):
    angles = tuple((float(t), float(p)) for t, p in angles)
    if len(angles) != 3:
        raise DomainError(f'需要三组测量角度, 实际 {len(angles)} 组', field='angles')
    return MeasurementSet(angles=angles, projectors=tuple(projector_pair(t, p) for t, p in angles))


@dataclass(frozen=True)
class MubCheck:
    passed: bool
    worst_defect: float

    def __bool__(self):
        return self.passed


def check_mutually_unbiased(bases, tol=MUB_TOL):
    """检查 |<e_i^a|e_j^b>|² = 1/2 对所有 i ≠ j 成立"""
    worst = 0.0
    for bi, bj in combinations(bases, 2):
        overlaps = np.abs(bi.matrix.conj().T @ bj.matrix) ** 2
        worst = max(worst, float(np.max(np.abs(overlaps - 0.5))))
    return MubCheck(passed=worst <= tol, worst_defect=worst)


def conjugate_frame(m, v):
    """M' = {V M_i V†}"""
    v = np.asarray(v, dtype=complex)
    if v.shape != (2, 2):
        raise FrameError(f'酉矩阵必须是 2x2, 实际形状 {v.shape}', field='unitary')
    defect = float(np.max(np.abs(v.conj().T @ v - np.eye(2))))
    if defect > UNITARY_TOL:
        raise FrameError(f'矩阵不是酉矩阵, 偏差 {defect:.3e}', field='unitary')
    bases = m.bases if isinstance(m, MubTriple) else tuple(m)
    return tuple(b.conjugated(v) for b in bases)
