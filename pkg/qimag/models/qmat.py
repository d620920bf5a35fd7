#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
小维度稠密复矩阵核心

1~3 个量子比特密度矩阵的构造、校验、张量积、偏迹与分解。
复合系统的基矢顺序固定为 A⊗B⊗C，计算基标签按字典序 |000>...|111>。
"""

import logging
from dataclasses import dataclass
from math import prod

import numpy as np
from scipy.stats import unitary_group

from ..errors import DimensionError, DomainError, NumericalError, StateValidationError

logger = logging.getLogger(__name__)

MAX_DIM = 8
ALLOWED_DIMS = (2, 4, 8)
STATE_TOL = 1e-9
OFFDIAG_TOL = 1e-12
MAX_JACOBI_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def _frozen(array):
    arr = np.array(array, dtype=complex)
    arr.setflags(write=False)
    return arr


def _as_array(m):
    if isinstance(m, DensityMatrix):
        return m.matrix
    return np.asarray(m, dtype=complex)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """密度矩阵；只在构造时做一次厄米化 M <- (M + M†)/2"""
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f'密度矩阵必须是方阵, 实际形状 {m.shape}', field='matrix')
        if m.shape[0] not in ALLOWED_DIMS:
            raise DimensionError(f'维度必须属于 {ALLOWED_DIMS}, 实际 {m.shape[0]}', field='dim')
        object.__setattr__(self, 'matrix', _frozen((m + m.conj().T) / 2))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def checked(cls, array, field='matrix'):
        """校验原始数组后再构造，避免厄米化掩盖缺陷"""
        diagnostics = validate_matrix(array)
        if not diagnostics.passed:
            raise StateValidationError(f'{field}: {diagnostics.describe()}', field=field,
                                       diagnostics=diagnostics)
        return cls(array)

    @classmethod
    def from_ket(cls, ket):
        psi = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise DomainError('零向量不能构成纯态', field='ket')
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class StateDiagnostics:
    """密度矩阵校验结果"""
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tolerance: float = STATE_TOL

    @property
    def failures(self):
        items = []
        if self.hermiticity_defect > self.tolerance:
            items.append('hermiticity')
        if self.trace_defect > self.tolerance:
            items.append('trace')
        if self.min_eigenvalue < -self.tolerance:
            items.append('positivity')
        return items

    @property
    def passed(self):
        return not self.failures

    def describe(self):
        return (f'hermiticity_defect={self.hermiticity_defect:.3e}, '
                f'trace_defect={self.trace_defect:.3e}, '
                f'min_eigenvalue={self.min_eigenvalue:.3e}, '
                f'failed={",".join(self.failures) or "none"}')

    def to_dict(self):
        return {
            'hermiticity_defect': self.hermiticity_defect,
            'trace_defect': self.trace_defect,
            'min_eigenvalue': self.min_eigenvalue,
            'passed': self.passed,
            'failures': self.failures,
        }


@dataclass(frozen=True)
class BlochVector:
    """单比特 Bloch 矢量 n = (n_x, n_y, n_z), |n| <= 1"""
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ('x', 'y', 'z'):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise DomainError(f'Bloch 分量 {name} 不是有限数', field=f'n_{name}')
            object.__setattr__(self, name, value)
        if self.norm > 1 + STATE_TOL:
            raise DomainError(f'Bloch 矢量长度 {self.norm:.12g} 超过 1', field='bloch')

    @property
    def array(self):
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self):
        return float(np.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2))

    @classmethod
    def from_array(cls, values):
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def as_list(self):
        return [self.x, self.y, self.z]


@dataclass(frozen=True, eq=False)
class TwoQubitPauliForm:
    """两比特态的 Pauli 分解 ρ = ¼(I⊗I + r·σ⊗I + I⊗s·σ + Σ T_jk σ_j⊗σ_k)"""
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray

    def to_density(self):
        m = np.kron(I2, I2)
        for j in range(3):
            m = m + self.r[j] * np.kron(PAULI[j], I2)
            m = m + self.s[j] * np.kron(I2, PAULI[j])
            for k in range(3):
                m = m + self.T[j, k] * np.kron(PAULI[j], PAULI[k])
        return DensityMatrix(m / 4)


def tensor(a, b):
    """Kronecker 积；两个 DensityMatrix 的积仍返回 DensityMatrix"""
    ma, mb = _as_array(a), _as_array(b)
    dim = ma.shape[0] * mb.shape[0]
    if dim > MAX_DIM:
        raise DimensionError(f'张量积维度 {dim} 超过上限 {MAX_DIM}', field='dim')
    out = np.kron(ma, mb)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(out)
    return out


def _check_subsystems(dim, keep, dims):
    if prod(dims) != dim:
        raise DimensionError(f'子系统维度 {dims} 的乘积不等于 {dim}', field='dims')
    if not keep:
        raise DimensionError('保留子系统列表为空', field='keep')
    if len(set(keep)) != len(keep) or any(i < 0 or i >= len(dims) for i in keep):
        raise DimensionError(f'保留子系统下标非法: {keep}', field='keep')


def partial_trace(rho, keep, dims=None):
    """对未保留的子系统求偏迹，保留的子系统按原顺序排列"""
    m = _as_array(rho)
    dim = m.shape[0]
    if dims is None:
        dims = [2] * int(round(np.log2(dim)))
    dims = list(dims)
    keep = list(keep)
    _check_subsystems(dim, keep, dims)
    keep = sorted(keep)
    n = len(dims)
    letters = 'abcdefghijklmnopqrstuvwxyz'
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = ''.join(row[i] for i in keep) + ''.join(col[i] for i in keep)
    reduced = np.einsum(''.join(row) + ''.join(col) + '->' + out, m.reshape(dims + dims))
    d = prod(dims[i] for i in keep)
    return DensityMatrix(reduced.reshape(d, d))


def permute_subsystems(rho, order, dims=None):
    """按 order 重排张量因子，例如 [1, 0] 交换两个比特"""
    m = _as_array(rho)
    dim = m.shape[0]
    if dims is None:
        dims = [2] * int(round(np.log2(dim)))
    dims = list(dims)
    order = list(order)
    _check_subsystems(dim, order, dims)
    if sorted(order) != list(range(len(dims))):
        raise DimensionError(f'重排顺序必须覆盖全部子系统: {order}', field='order')
    n = len(dims)
    arr = m.reshape(dims + dims).transpose(order + [n + i for i in order])
    return DensityMatrix(arr.reshape(dim, dim))


def bloch_to_density(n):
    """ρ = (I + n·σ)/2"""
    if not isinstance(n, BlochVector):
        n = BlochVector.from_array(n)
    return DensityMatrix((I2 + n.x * SIGMA_X + n.y * SIGMA_Y + n.z * SIGMA_Z) / 2)


def density_to_bloch(rho):
    """n_k = Tr(ρ σ_k)"""
    m = _as_array(rho)
    if m.shape != (2, 2):
        raise DimensionError(f'Bloch 表示只适用于单比特, 实际维度 {m.shape[0]}', field='dim')
    return BlochVector.from_array([np.trace(m @ s).real for s in PAULI])


def pauli_decompose(rho_ab):
    m = _as_array(rho_ab)
    if m.shape != (4, 4):
        raise DimensionError(f'Pauli 分解需要两比特态, 实际维度 {m.shape[0]}', field='dim')
    r = np.array([np.trace(m @ np.kron(s, I2)).real for s in PAULI])
    s_vec = np.array([np.trace(m @ np.kron(I2, s)).real for s in PAULI])
    T = np.array([[np.trace(m @ np.kron(sj, sk)).real for sk in PAULI] for sj in PAULI])
    return TwoQubitPauliForm(r=r, s=s_vec, T=T)


def _qubit_eigenvalues(h):
    a, d, b = h[0, 0].real, h[1, 1].real, h[0, 1]
    mean = (a + d) / 2
    rad = np.hypot((a - d) / 2, abs(b))
    return np.array([mean + rad, mean - rad])


def _jacobi_rotation(app, aqq, apq, n, p, q):
    """使 2x2 子块 [[app, apq], [apq*, aqq]] 对角化的酉旋转"""
    rad = np.hypot((app - aqq) / 2, abs(apq))
    lam = (app + aqq) / 2 + rad
    if app >= aqq:
        v1 = np.array([lam - aqq, np.conj(apq)], dtype=complex)
    else:
        v1 = np.array([apq, lam - app], dtype=complex)
    v1 = v1 / np.linalg.norm(v1)
    v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
    g = np.eye(n, dtype=complex)
    g[p, p], g[q, p] = v1
    g[p, q], g[q, q] = v2
    return g


def _jacobi_eigenvalues(h):
    a = np.array((h + h.conj().T) / 2, dtype=complex)
    n = a.shape[0]
    for _ in range(MAX_JACOBI_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= OFFDIAG_TOL:
            return np.sort(np.diag(a).real)[::-1]
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 0:
                    g = _jacobi_rotation(a[p, p].real, a[q, q].real, a[p, q], n, p, q)
                    a = g.conj().T @ a @ g
    raise NumericalError(f'Jacobi 对角化 {MAX_JACOBI_SWEEPS} 轮后仍未收敛')


def hermitian_eigenvalues(h):
    """厄米矩阵本征值，降序；2x2 用迹/行列式闭式，4x4 与 8x8 用循环 Jacobi 旋转"""
    m = _as_array(h)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f'需要方阵, 实际形状 {m.shape}', field='matrix')
    defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if defect > STATE_TOL:
        raise DomainError(f'矩阵非厄米, 最大偏差 {defect:.3e}', field='hermiticity')
    if m.shape[0] == 1:
        return np.array([m[0, 0].real])
    if m.shape[0] == 2:
        return _qubit_eigenvalues(m)
    return _jacobi_eigenvalues(m)


def validate_matrix(array, tol=STATE_TOL):
    """对原始数组做密度矩阵校验：厄米性、单位迹、半正定"""
    m = np.asarray(array, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f'密度矩阵必须是方阵, 实际形状 {m.shape}', field='matrix')
    herm = float(np.max(np.abs(m - m.conj().T)))
    trace = float(abs(np.trace(m) - 1))
    min_eig = float(hermitian_eigenvalues((m + m.conj().T) / 2)[-1])
    return StateDiagnostics(hermiticity_defect=herm, trace_defect=trace,
                            min_eigenvalue=min_eig, tolerance=tol)


def validate_state(rho):
    return validate_matrix(_as_array(rho))


def random_pure_state(rng, dim=4):
    """复高斯向量归一化得到 Haar 随机纯态"""
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return DensityMatrix.from_ket(psi)


def random_noisy_state(rng, dim=4):
    """Haar 纯态与 I/dim 的均匀权重凸组合"""
    weight = rng.uniform()
    pure = random_pure_state(rng, dim).matrix
    return DensityMatrix(weight * pure + (1 - weight) * np.eye(dim) / dim)


def random_unitary(rng, dim=2):
    return unitary_group.rvs(dim, random_state=rng)
