import time
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.optimize import brentq

from qimag.errors import DomainError, ThresholdError
from qimag.models import scenarios
from qimag.models.complementarity import L1_BOUND, bound_constant
from qimag.models.imaginarity import binary_entropy
from qimag.models.qmat import DensityMatrix, validate_state
from qimag.models.scenarios import (PAIR_LABELS, BellMixture, ThreeQubitPure, Werner, alpha_beta_grid, build_state,
                                    exclusion_scan, family_template, find_naqi_threshold, pair_states, scan_family,
                                    theta_grid)
from qimag.utils.optimize import OptimizerConfig


def test_family_states_are_valid():
    for family in (BellMixture(0.3), Werner(0.6), ThreeQubitPure((0.5, 0.5, 0.5, 0.5, 0.0), phi=1.0),
                   ThreeQubitPure.alpha_beta(2.0, 4.0), ThreeQubitPure.theta_family(5.0)):
        assert validate_state(build_state(family)).passed


def test_family_domains():
    with pytest.raises(DomainError):
        Werner(1.2)
    with pytest.raises(DomainError):
        BellMixture(-0.1)
    with pytest.raises(DomainError):
        ThreeQubitPure((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        ThreeQubitPure((0.6, 0.0, 0.6, 0.0, 0.0))
    with pytest.raises(DomainError):
        ThreeQubitPure((np.sqrt(0.5), 0.0, -np.sqrt(0.5), 0.0, 0.0))
    with pytest.raises(DomainError):
        ThreeQubitPure((1.0, 0.0, 0.0, 0.0, 0.0), phi=4.0)
    with pytest.raises(DomainError):
        family_template('ghz')
    with pytest.raises(DomainError):
        build_state('werner')


def test_three_qubit_slots():
    rho = build_state(ThreeQubitPure((0.0, 0.6, 0.0, 0.0, 0.8), phi=np.pi / 2))
    ket = np.zeros(8, dtype=complex)
    ket[4] = 0.6j
    ket[7] = 0.8
    assert np.abs(rho.matrix - np.outer(ket, ket.conj())).max() < 1e-15


def test_pair_states():
    # (|000> + |110>)/√2 = |φ+>_AB |0>_C
    rho = build_state(ThreeQubitPure.theta_family(np.pi / 2))
    pairs = pair_states(rho)
    assert list(pairs) == list(PAIR_LABELS)
    phi_plus = DensityMatrix.from_ket(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.abs(pairs['AB'].matrix - phi_plus.matrix).max() < 1e-12
    # ρ_CA 以 C 在前：|0><0| ⊗ I/2
    assert np.abs(pairs['CA'].matrix - np.diag([0.5, 0.5, 0, 0])).max() < 1e-12
    assert np.abs(pairs['BC'].matrix - np.diag([0.5, 0, 0.5, 0])).max() < 1e-12
    reversed_pairs = pair_states(rho, reverse_roles=True)
    assert np.abs(reversed_pairs['CA'].matrix - np.diag([0.5, 0, 0.5, 0])).max() < 1e-12


def test_scan_family():
    records = scan_family(Werner, [0.0, 0.5, 1.0], 'l1')
    assert [r.param for r in records] == [0.0, 0.5, 1.0]
    assert np.abs(np.array([r.value for r in records]) - [0, 1.5, 3]).max() < 1e-6
    assert [r.verdict for r in records] == [False, False, True]
    assert set(records[0].to_row()) == {'param', 'N', 'witness', 'verdict'}


def test_werner_l1_threshold():
    ret_ = find_naqi_threshold(Werner, 'l1', tol=1e-5)
    assert abs(ret_ - np.sqrt(5) / 3) < 1e-3
    assert abs(ret_ - 0.74536) < 1e-3


def test_threshold_without_sign_change():
    with pytest.raises(ThresholdError):
        find_naqi_threshold(Werner, 'l1', bracket=(0.0, 0.5))


def test_threshold_coarse_then_fine(monkeypatch):
    # 低预算配置下变号点在 0.7，完整配置下在 0.8 或 0.7005
    calls = []

    def fake_witness(rho, measure, config=None, pool=None):
        calls.append(config)
        root = 0.7 if config.grid_points_per_dim < OptimizerConfig().grid_points_per_dim else full_root
        return SimpleNamespace(witness=rho - root)

    monkeypatch.setattr(scenarios, 'witness', fake_witness)
    monkeypatch.setattr(scenarios, 'build_state', lambda family: family)
    full_root = 0.7005
    ret_ = find_naqi_threshold(lambda p: p, 'r', tol=1e-6)
    assert abs(ret_ - 0.7005) < 1e-6
    num_full = sum(1 for c in calls if c == OptimizerConfig())
    assert num_full < 16
    full_root = 0.8
    ret_ = find_naqi_threshold(lambda p: p, 'r', tol=1e-6)
    assert abs(ret_ - 0.8) < 1e-6


def _werner_relative_entropy_root():
    bound = bound_constant('r').value
    return brentq(lambda p: 3 * (1 - binary_entropy((1 + p) / 2)) - bound, 0.5, 1.0, xtol=1e-12)


@pytest.mark.slow
def test_werner_relative_entropy_threshold():
    t0 = time.perf_counter()
    ret_ = find_naqi_threshold(Werner, 'r', tol=1e-5)
    assert time.perf_counter() - t0 < 300
    assert abs(ret_ - 0.8816) < 2e-3
    assert abs(ret_ - _werner_relative_entropy_root()) < 1e-4


@pytest.mark.slow
def test_bell_mixture_relative_entropy_threshold():
    t0 = time.perf_counter()
    ret_ = find_naqi_threshold(BellMixture, 'r', bracket=(0.5, 1.0), tol=1e-5)
    assert time.perf_counter() - t0 < 300
    assert abs(ret_ - 0.597) < 5e-3


def test_theta_family_anchor():
    records = exclusion_scan(theta_grid(3, np.pi / 4, 3 * np.pi / 4), 'l1')
    ret_ = records[1]
    assert abs(ret_.params['theta'] - np.pi / 2) < 1e-15
    assert np.abs(np.array(ret_.values) - [3, L1_BOUND, 0]).max() < 1e-6
    assert ret_.count_exceeding == 1
    assert set(ret_.to_row()) == {'theta', 'N_AB', 'N_BC', 'N_CA', 'count_exceeding'}


def test_ghz_like_corner():
    # λ0 = 1：|000>，ρ_BC 的约化态为纯态，N 恰为 √5
    rho = build_state(ThreeQubitPure((1.0, 0.0, 0.0, 0.0, 0.0)))
    records = exclusion_scan([({'alpha': 0.0, 'beta': 0.0}, ThreeQubitPure.alpha_beta(0.0, 0.0))], 'l1')
    assert np.abs(np.array(records[0].values) - L1_BOUND).max() < 1e-6
    assert records[0].count_exceeding == 0
    assert validate_state(rho).passed


def test_exclusion_small_grids():
    for grid in (theta_grid(12), alpha_beta_grid(5, 5)):
        records = exclusion_scan(grid, 'l1')
        assert len(records) == len(grid)
        assert max(r.count_exceeding for r in records) <= 1


def test_exclusion_reverse_roles_runs():
    records = exclusion_scan(theta_grid(4), 'l1', reverse_roles=True)
    assert len(records) == 4
    assert all(len(r.values) == 3 for r in records)


@pytest.mark.slow
def test_exclusion_full_grids():
    for grid in (theta_grid(100), alpha_beta_grid(40, 40)):
        records = exclusion_scan(grid, 'l1')
        assert max(r.count_exceeding for r in records) <= 1


def test_scan_with_pool():
    class SerialPool:
        def map(self, func, tasks):
            return [func(t) for t in tasks]

    config = OptimizerConfig(grid_points_per_dim=12)
    ret_ = scan_family(BellMixture, [0.1, 0.9], 'l1', config=config, pool=SerialPool())
    assert abs(ret_[0].witness - ret_[1].witness) < 1e-6
