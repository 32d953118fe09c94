import numpy as np
import pytest

from betamix.coupling import (
    _maximal_coupling,
    berbee_couple,
    generalized_berbee,
    verify_coupling,
)
from betamix.errors import MalformedInputError, SizeError
from betamix.mixing import beta_coefficient, pairwise_beta
from betamix.pmf import FinitePmf, JointPmf


def random_joint(rng, shape):
    probs = rng.random(shape)
    probs /= probs.sum()
    return JointPmf(tuple(tuple(range(s)) for s in shape), probs)


def test_maximal_coupling_is_maximal():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.random(5)
        p /= p.sum()
        q = rng.random(5)
        q /= q.sum()
        M = _maximal_coupling(p, q)
        assert np.all(M >= -1e-15)
        assert np.allclose(M.sum(axis=1), p)
        assert np.allclose(M.sum(axis=0), q)
        tv = 0.5 * np.abs(p - q).sum()
        assert 1.0 - np.trace(M) == pytest.approx(tv, abs=1e-12)


def test_berbee_pair_mismatch_equals_beta():
    rng = np.random.default_rng(1)
    for _ in range(20):
        j = random_joint(rng, (4, 3))
        res = berbee_couple(j)
        assert res.mismatch_probs[0] == pytest.approx(beta_coefficient(j), abs=1e-12)
        report = verify_coupling(res, j)
        assert report.max_error < 1e-12


def test_berbee_pair_with_zero_mass_atom():
    probs = np.array([[0.25, 0.25], [0.25, 0.25], [0.0, 0.0]])
    j = JointPmf(((0, 1, 2), (0, 1)), probs)
    res = berbee_couple(j)
    report = verify_coupling(res, j)
    assert report.max_error < 1e-12


def test_berbee_pair_independent_input():
    j = JointPmf.from_product(
        [FinitePmf((0, 1), [0.3, 0.7]), FinitePmf((0, 1, 2), [0.2, 0.5, 0.3])]
    )
    res = berbee_couple(j)
    assert res.mismatch_probs[0] == pytest.approx(0.0, abs=1e-12)
    # the coupling is then the diagonal: W* = W almost surely
    ext = res.extended_joint.probs
    off_diag = ext.sum() - np.einsum("vww->", ext)
    assert off_diag == pytest.approx(0.0, abs=1e-12)


def test_berbee_requires_two_axes():
    rng = np.random.default_rng(2)
    with pytest.raises(MalformedInputError):
        berbee_couple(random_joint(rng, (2, 2, 2)))


def test_generalized_three_axis_properties():
    rng = np.random.default_rng(3)
    for _ in range(5):
        proc = random_joint(rng, (2, 2, 2))
        res = generalized_berbee(proc)
        report = verify_coupling(res, proc)
        assert report.marginal_error < 1e-10
        assert report.independence_error < 1e-10
        assert report.mismatch_error < 1e-10
        for k in range(3):
            ref = pairwise_beta(proc, tuple(range(k)), (k,))
            assert res.mismatch_probs[k] == pytest.approx(ref, abs=1e-10)
        # the first coordinate is copied, never resampled
        assert res.mismatch_probs[0] == 0.0


def test_generalized_mixed_alphabet_sizes():
    rng = np.random.default_rng(4)
    proc = random_joint(rng, (3, 2, 4))
    report = verify_coupling(generalized_berbee(proc), proc)
    assert report.max_error < 1e-10


def test_generalized_independent_process_is_diagonal():
    factors = [FinitePmf((0, 1), [0.4, 0.6])] * 3
    proc = JointPmf.from_product(factors)
    res = generalized_berbee(proc)
    assert all(mm == pytest.approx(0.0, abs=1e-12) for mm in res.mismatch_probs)


def test_generalized_cell_cap():
    rng = np.random.default_rng(5)
    probs = rng.random((4, 4, 4))
    probs /= probs.sum()
    proc = JointPmf(tuple((0, 1, 2, 3) for _ in range(3)), probs, cell_cap=100)
    with pytest.raises(SizeError):
        generalized_berbee(proc)


def test_coupling_json_document():
    rng = np.random.default_rng(6)
    j = random_joint(rng, (2, 2))
    doc = berbee_couple(j).to_json()
    assert doc["n_original"] == 2
    assert doc["starred_indices"] == [1]
    assert len(doc["probs"]) == 8
