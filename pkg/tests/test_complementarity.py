import numpy as np
import pytest

from qimag.models.complementarity import (L1_BOUND, REFERENCE_RELATIVE_ENTROPY_BOUND, PureStateObjective,
                                          Provenance, ball_sweep_maximum, bound_constant, canonical_maximizer,
                                          maximize_sum_over_states, mub_imaginarity_sum)
from qimag.models.frames import conjugate_frame, mub_triple
from qimag.models.imaginarity import ImaginarityMeasure, bloch_imaginarity, imag_l1, imaginary_axis
from qimag.models.qmat import bloch_to_density, random_unitary


def test_bound_constant_l1():
    ret_ = bound_constant('l1')
    assert ret_.value == np.sqrt(5)
    assert ret_.provenance is Provenance.ANALYTIC
    assert np.abs(ret_.maximizer.array - [1 / np.sqrt(5), 2 / np.sqrt(5), 0]).max() < 1e-15


def test_l1_bound_maximization():
    ret_ = maximize_sum_over_states(ImaginarityMeasure.L1)
    assert abs(ret_.value - L1_BOUND) < 1e-6
    assert np.abs(ret_.maximizer.array - [1 / np.sqrt(5), 2 / np.sqrt(5), 0]).max() < 1e-3
    assert ret_.alternatives


def test_relative_entropy_bound():
    ret_ = bound_constant('r')
    assert abs(ret_.value - REFERENCE_RELATIVE_ENTROPY_BOUND) < 5e-4
    assert ret_.provenance is Provenance.RECOMPUTED
    assert np.abs(ret_.maximizer.array - [0.27249, 0.96216, 0]).max() < 1e-3
    # 缓存：第二次调用返回同一对象
    assert bound_constant(ImaginarityMeasure.RELATIVE_ENTROPY) is ret_


def test_bound_is_frame_independent():
    rng = np.random.default_rng(233)
    for _ in range(3):
        triple = mub_triple(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        ret_ = maximize_sum_over_states('l1', triple)
        assert abs(ret_.value - L1_BOUND) < 1e-6


def test_canonical_maximizer():
    triple = mub_triple(0.0, 0.0)
    ret_ = canonical_maximizer([-1 / np.sqrt(5), -2 / np.sqrt(5), 0], triple)
    assert np.abs(ret_.array - [1 / np.sqrt(5), 2 / np.sqrt(5), 0]).max() < 1e-12


def test_matrix_and_bloch_sums_agree():
    rng = np.random.default_rng(234)
    triple = mub_triple(0.7, 2.1, 0.4)
    for measure in ImaginarityMeasure:
        objective = PureStateObjective(measure, triple.axes())
        for _ in range(10):
            theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            n = [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
            assert abs(objective([theta, phi]) - mub_imaginarity_sum(n, triple, measure)) < 1e-10


def _random_sum_check(num_sample, seed):
    rng = np.random.default_rng(seed)
    bound = {m: bound_constant(m).value for m in ImaginarityMeasure}
    tmp0 = rng.normal(size=(num_sample, 3))
    n = tmp0 / np.linalg.norm(tmp0, axis=1, keepdims=True) * rng.uniform(size=(num_sample, 1)) ** (1 / 3)
    pure = rng.uniform(size=num_sample) < 0.5
    n[pure] /= np.linalg.norm(n[pure], axis=1, keepdims=True)
    base = mub_triple(0.0, 0.0)
    axes = np.stack([[imaginary_axis(b) for b in conjugate_frame(base, random_unitary(rng, 2))]
                     for _ in range(num_sample)])
    for measure in ImaginarityMeasure:
        ret_ = bloch_imaginarity(measure, n[:, None, :], axes).sum(axis=1)
        assert np.sum(ret_ > bound[measure] + 1e-9) == 0


def test_complementarity_random_pairs():
    _random_sum_check(2000, seed=235)


@pytest.mark.slow
def test_complementarity_random_pairs_full():
    _random_sum_check(100000, seed=236)


def test_ball_sweep_below_bound():
    for measure in ImaginarityMeasure:
        bound = bound_constant(measure).value
        ret_ = ball_sweep_maximum(measure, resolution=16)
        assert ret_ <= bound + 1e-9
        assert ret_ > bound - 0.1


def test_sum_reflection_symmetry():
    rng = np.random.default_rng(239)
    triple = mub_triple(0.0, 0.0)
    for _ in range(50):
        n = rng.normal(size=3)
        n = n / np.linalg.norm(n) * rng.uniform(0.2, 1)
        for measure in ImaginarityMeasure:
            ret0 = mub_imaginarity_sum(n, triple, measure)
            for flip in ([-1, 1, 1], [1, -1, 1], [-1, -1, 1]):
                assert abs(mub_imaginarity_sum(n * np.array(flip), triple, measure) - ret0) < 1e-10


def test_tradeoff_along_equator():
    # n_z = 0 上 M3 项为 |n_x|，另外两项之和为 2√(1−n_x²)
    triple = mub_triple(0.0, 0.0)
    nx = np.linspace(1 / np.sqrt(5), 1, 30)
    third, others = [], []
    for x in nx:
        rho = bloch_to_density([x, np.sqrt(max(0.0, 1 - x * x)), 0.0])
        terms = [imag_l1(rho, basis) for basis in triple.bases]
        third.append(terms[2])
        others.append(terms[0] + terms[1])
    third, others = np.array(third), np.array(others)
    assert np.abs(third - nx).max() < 1e-12
    assert np.abs(others - 2 * np.sqrt(1 - nx ** 2)).max() < 1e-12
    assert np.all(np.diff(others) < 0)
    assert abs(third[0] + others[0] - L1_BOUND) < 1e-12
