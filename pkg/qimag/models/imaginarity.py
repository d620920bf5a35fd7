#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
单比特虚性度量

l1 范数虚性与相对熵虚性，参考基可任意选取（通过酉共轭）。
对数一律以 2 为底。
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import entr

from ..errors import DimensionError, DomainError, FrameError, NumericalError
from .qmat import PAULI, STATE_TOL, DensityMatrix, hermitian_eigenvalues

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
BASIS_TOL = 1e-12
NEGATIVE_TOL = 1e-9


class ImaginarityMeasure(Enum):
    L1 = 'l1'
    RELATIVE_ENTROPY = 'r'

    @classmethod
    def from_tag(cls, tag):
        if isinstance(tag, cls):
            return tag
        key = str(tag).strip().lower()
        aliases = {'l1': cls.L1, 'r': cls.RELATIVE_ENTROPY,
                   'relative_entropy': cls.RELATIVE_ENTROPY, 'rel': cls.RELATIVE_ENTROPY}
        if key not in aliases:
            raise DomainError(f'未知的虚性度量: {tag}', field='measure')
        return aliases[key]


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """单比特正交归一基，矩阵的列即基矢 |e_a>，相位原样保留"""
    matrix: np.ndarray

    def __post_init__(self):
        w = np.array(self.matrix, dtype=complex)
        if w.shape != (2, 2):
            raise FrameError(f'基必须由两个二维复向量组成, 实际形状 {w.shape}', field='basis')
        defect = float(np.max(np.abs(w.conj().T @ w - np.eye(2))))
        if defect > BASIS_TOL:
            raise FrameError(f'基矢不正交归一, 偏差 {defect:.3e}', field='basis')
        w.setflags(write=False)
        object.__setattr__(self, 'matrix', w)

    @property
    def vectors(self):
        return self.matrix[:, 0], self.matrix[:, 1]

    @classmethod
    def from_vectors(cls, e1, e2):
        return cls(np.column_stack([np.asarray(e1, dtype=complex), np.asarray(e2, dtype=complex)]))

    @classmethod
    def pauli_eigenbasis(cls, axis):
        """σ_x, σ_y, σ_z 的本征基"""
        s = 1 / np.sqrt(2)
        table = {
            'z': ([1, 0], [0, 1]),
            'x': ([s, s], [s, -s]),
            'y': ([s, 1j * s], [s, -1j * s]),
        }
        key = str(axis).lower()
        if key not in table:
            raise DomainError(f'未知的 Pauli 轴: {axis}', field='basis')
        return cls.from_vectors(*table[key])

    def conjugated(self, v):
        """V 作用于每个基矢"""
        return OrthonormalBasis(np.asarray(v, dtype=complex) @ self.matrix)


def _qubit_matrix(rho):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise DimensionError(f'虚性度量只实现了单比特, 实际维度 {m.shape[0]}', field='dim')
    return m


def real_part_map(rho, basis):
    """Δ(ρ) = (ρ + ρ^T)/2，转置在给定基下进行"""
    m = _qubit_matrix(rho)
    w = basis.matrix
    in_basis = w.conj().T @ m @ w
    return DensityMatrix(w @ in_basis.real.astype(complex) @ w.conj().T)


def imag_l1(rho, basis):
    m = _qubit_matrix(rho)
    w = basis.matrix
    return float(np.sum(np.abs((w.conj().T @ m @ w).imag)))


def binary_entropy(x):
    if not 0 <= x <= 1:
        raise DomainError(f'二元熵的自变量必须在 [0, 1] 内, 实际 {x}', field='x')
    return float((entr(x) + entr(1 - x)) / LN2)


def _binary_entropy_array(x):
    x = np.clip(x, 0.0, 1.0)
    return (entr(x) + entr(1 - x)) / LN2


def von_neumann_entropy(rho):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    evs = hermitian_eigenvalues(m)
    if np.any(evs < -STATE_TOL) or np.any(evs > 1 + STATE_TOL):
        logger.warning(f'本征值超出 [0, 1] 容差范围, 已截断: {evs}')
    evs = np.clip(evs, 0.0, 1.0)
    return float(np.sum(entr(evs)) / LN2)


def imag_rel_entropy(rho, basis):
    """S(Δ(ρ)) − S(ρ)"""
    value = von_neumann_entropy(real_part_map(rho, basis)) - von_neumann_entropy(rho)
    if value < -NEGATIVE_TOL:
        raise NumericalError(f'相对熵虚性为负: {value:.3e}')
    return max(value, 0.0)


def imag_measure(measure, rho, basis):
    measure = ImaginarityMeasure.from_tag(measure)
    if measure is ImaginarityMeasure.L1:
        return imag_l1(rho, basis)
    return imag_rel_entropy(rho, basis)


def imaginary_axes(e1, e2):
    """w_k = Im<e1|σ_k|e2>，支持批量输入 (..., 2)"""
    e1 = np.asarray(e1, dtype=complex)
    e2 = np.asarray(e2, dtype=complex)
    c = np.stack([np.einsum('...i,ij,...j->...', e1.conj(), s, e2) for s in PAULI], axis=-1)
    return c.imag


def imaginary_axis(basis):
    """单位矢量 w，使 ρ(n) 在该基下的 l1 虚性等于 |n·w|"""
    return imaginary_axes(*basis.vectors)


def bloch_imaginarity(measure, b, w):
    """Bloch 层面的快速计算：l1 -> |b·w|；相对熵 -> H((1+|b⊥|)/2) − H((1+|b|)/2)"""
    measure = ImaginarityMeasure.from_tag(measure)
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    proj = np.sum(b * w, axis=-1)
    if measure is ImaginarityMeasure.L1:
        return np.abs(proj)
    bb = np.sum(b * b, axis=-1)
    length = np.sqrt(np.clip(bb, 0.0, 1.0))
    perp = np.sqrt(np.clip(bb - proj ** 2, 0.0, 1.0))
    value = _binary_entropy_array((1 + perp) / 2) - _binary_entropy_array((1 + length) / 2)
    return np.maximum(value, 0.0)
