import math

import numpy as np
import pytest

from varimax_phase.adversarial import build_witness, expected_objective, witness_beats_truth
from varimax_phase.datagen import Instance, KurtosisLaw, make_instance
from varimax_phase.errors import ParameterError, SingularityError
from varimax_phase.harness import sample_witness_instance
from varimax_phase.linalg import Rotation, haar_rotation, orthogonality_residual
from varimax_phase.theory import monte_carlo_objective
from varimax_phase.varimax import objective

C = math.sqrt(2) / 2
ROT45 = np.array([[C, -C], [C, C]])


def _instance(z, r_star=None):
    n, k = z.shape
    r = Rotation(np.eye(k) if r_star is None else r_star)
    return Instance(n=n, k=k, law=None, seed=0, z=z, r_star=r, z_hat=z @ r.mat)


def test_hand_witness_k2():
    z = np.array([[1.0, 0.0], [0.5, -1.0], [2.0, 1.0], [-1.0, 0.3]])
    w = build_witness(_instance(z))
    np.testing.assert_allclose(np.abs(w.u1), [[1.0], [0.0]], atol=1e-15)
    np.testing.assert_allclose(w.r1, [[1.0]], atol=1e-15)
    assert w.d1 == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n,k,seed", [(40, 5, 1), (128, 32, 2), (60, 8, 3), (30, 2, 4)])
def test_witness_structure(n, k, seed):
    inst, w = sample_witness_instance(n, k, KurtosisLaw.sparse_gaussian(0.5), seed)
    m = math.ceil(k / 2)
    assert orthogonality_residual(w.a.mat) <= 1e-10
    y = inst.z_hat @ w.a.mat.T
    np.testing.assert_allclose(y[:m, :m], w.r1.T, atol=1e-8)
    assert np.max(np.abs(y[:m, m:])) <= 1e-8
    assert np.all(np.diag(w.r1) >= 0)
    assert w.d1 == pytest.approx(np.sum(np.diag(w.r1) ** 4))
    assert w.d2 == pytest.approx(np.sum(y[k:] ** 4))
    assert w.d1 >= 0 and w.d2 >= 0
    assert objective(inst.z_hat, w.a) >= (w.d1 + w.d2) / n - 1e-9
    # diag(R1) product equals product of the singular values of Z1
    sv = np.linalg.svd(inst.z[:m], compute_uv=False)
    assert np.prod(np.diag(w.r1)) == pytest.approx(np.prod(sv), rel=1e-8)
    assert w.sigma_min_z1 == pytest.approx(sv[-1])


def test_witness_errors():
    z = np.zeros((6, 4))
    z[2:] = 1.0
    with pytest.raises(SingularityError):
        build_witness(_instance(z))
    with pytest.raises(ParameterError):
        build_witness(make_instance(10, 1, KurtosisLaw.gaussian(), 0))


def test_d1_am_gm_bound_k32():
    hits = sum(build_witness(make_instance(128, 32, KurtosisLaw.three_point(2.0), s)).d1 >= 0.005 * 32**3
               for s in range(100))
    assert hits >= 90


def test_witness_beats_truth_failure_regime():
    beats = 0
    for s in range(100):
        inst = make_instance(128, 32, KurtosisLaw.three_point(2.0), s)
        beats += witness_beats_truth(inst, build_witness(inst))[2]
    assert beats >= 90


def test_witness_loses_in_recovery_regime():
    beats = 0
    for s in range(100):
        inst, w = sample_witness_instance(20_000, 3, KurtosisLaw.three_point(math.sqrt(6.0)), s)
        v_adv, v_true, b = witness_beats_truth(inst, w)
        assert v_true == pytest.approx(objective(inst.z_hat, inst.r_star))
        beats += b
    assert beats <= 5


def test_witness_wins_at_kappa_3_small_n():
    beats = 0
    for s in range(50):
        inst = make_instance(64, 16, KurtosisLaw.gaussian(), s)
        beats += witness_beats_truth(inst, build_witness(inst))[2]
    assert beats >= 40


def test_expected_objective_examples():
    assert expected_objective(np.eye(3), 4.0, 3) == 12.0
    assert expected_objective(ROT45, 4.0, 2) == pytest.approx(7.0, abs=1e-12)
    for seed in range(5):
        assert expected_objective(haar_rotation(5, seed), 3.0, 5) == pytest.approx(15.0, abs=1e-12)
    with pytest.raises(ParameterError):
        expected_objective(np.eye(2), 0.5, 2)


def test_expected_objective_unbiased():
    a = haar_rotation(3, 17)
    mean, se = monte_carlo_objective(a, KurtosisLaw.three_point(2.0), 3, draws=100, n=5_000, seed=4)
    assert abs(mean - expected_objective(a, 4.0, 3)) <= 3 * se
