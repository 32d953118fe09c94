import numpy as np
import pytest

from betamix.bounds import BoundParams
from betamix.entropy import FunctionFamily, finite_family_entropy
from betamix.errors import MalformedInputError
from betamix.mixing import MixingFit, markov_beta
from betamix.pmf import FinitePmf, MarkovChainSpec
from betamix.simulate import (
    GeneratorSpec,
    deviation_experiment,
    generate,
    replication_rng,
    spec_from_json,
    weak_error_experiment,
)


def two_state_chain(p=0.25, q=0.25):
    pi = np.array([q / (p + q), p / (p + q)])
    return MarkovChainSpec((0, 1), [[1 - p, p], [q, 1 - q]], FinitePmf((0, 1), pi))


def state_family(tables):
    members = tuple((lambda s, t=t: t[s]) for t in tables)
    return FunctionFamily("explicit-table", members)


def test_spec_validation():
    with pytest.raises(MalformedInputError):
        GeneratorSpec(kind="markov", seed=0)
    with pytest.raises(MalformedInputError):
        GeneratorSpec(kind="m_dependent", seed=0, dependence_lag=0, alphabet_size=4)
    with pytest.raises(MalformedInputError):
        GeneratorSpec(kind="weird", seed=0)


def test_generator_determinism():
    spec = GeneratorSpec(kind="markov", seed=42, chain=two_state_chain())
    a = generate(spec, 50, replication=3)
    b = generate(spec, 50, replication=3)
    assert a.xs == b.xs
    assert np.array_equal(a.ys, b.ys)
    c = generate(spec, 50, replication=4)
    assert a.xs != c.xs


def test_replication_streams_are_independent_of_order():
    r1 = replication_rng(7, 0).random(5)
    replication_rng(7, 99).random(100)
    r2 = replication_rng(7, 0).random(5)
    assert np.array_equal(r1, r2)


def test_markov_marginals_attached_exactly():
    chain = MarkovChainSpec(
        (0, 1), [[0.9, 0.1], [0.3, 0.7]], FinitePmf((0, 1), [1.0, 0.0])
    )
    spec = GeneratorSpec(kind="markov", seed=0, chain=chain)
    data = generate(spec, 10)
    assert np.allclose(data.marginal_laws, chain.marginal_matrix(10))


def test_markov_trajectory_frequencies_match_marginals():
    chain = two_state_chain(0.3, 0.2)
    spec = GeneratorSpec(kind="markov", seed=5, chain=chain)
    n = 20000
    data = generate(spec, n)
    freq1 = np.mean([x == 1 for x in data.xs])
    pi1 = chain.initial.probs[1]
    assert abs(freq1 - pi1) < 0.02


def test_empirical_lagged_joint_matches_exact():
    chain = two_state_chain(0.3, 0.2)
    spec = GeneratorSpec(kind="markov", seed=8, chain=chain)
    m, n = 2, 200
    reps = 400
    counts = np.zeros((2, 2))
    for rep in range(reps):
        xs = generate(spec, n, rep).xs
        for k in range(n - m):
            counts[xs[k], xs[k + m]] += 1
    counts /= counts.sum()
    pi = chain.initial.probs
    exact = pi[:, None] * np.linalg.matrix_power(chain.transition, m)
    assert np.abs(counts - exact).max() < 5 / np.sqrt(reps * (n - m))


def test_m_dependent_marginals_uniform_and_beta_zero():
    spec = GeneratorSpec(kind="m_dependent", seed=1, dependence_lag=2, alphabet_size=4)
    data = generate(spec, 1000)
    assert np.allclose(data.marginal_laws, 0.25)
    counts = np.bincount(np.array(data.xs), minlength=4) / 1000
    assert np.abs(counts - 0.25).max() < 0.06
    assert spec.beta_at(2) == 0.0
    assert spec.beta_at(5) == 0.0
    assert spec.beta_at(1) == 1.0


def test_m_dependent_pairs_beyond_lag_independent():
    spec = GeneratorSpec(kind="m_dependent", seed=2, dependence_lag=2, alphabet_size=4)
    xs = np.array(generate(spec, 200000).xs)
    m = 2
    joint = np.zeros((4, 4))
    for a, b in zip(xs[:-m], xs[m:]):
        joint[a, b] += 1
    joint /= joint.sum()
    assert np.abs(joint - 1 / 16).max() < 0.005


def test_iid_kind():
    law = FinitePmf((0, 1, 2), [0.2, 0.3, 0.5])
    spec = GeneratorSpec(kind="iid", seed=3, law=law)
    data = generate(spec, 5000)
    assert spec.beta_at(1) == 0.0
    freq = np.bincount(np.array(data.xs), minlength=3) / 5000
    assert np.abs(freq - law.probs).max() < 0.03


def test_responses_bounded_by_construction():
    spec = GeneratorSpec(
        kind="iid",
        seed=4,
        law=FinitePmf((0, 1), [0.5, 0.5]),
        phi=lambda s: 0.1 * s,
        noise_values=(-0.1, 0.1),
        noise_probs=(0.5, 0.5),
        response_bound=0.25,
    )
    data = generate(spec, 500)
    assert np.abs(data.ys).max() <= 0.25


def make_params(**overrides):
    defaults = dict(
        epsilon=0.5, c=2.0, gamma=2.0, gamma_prime=2.0, lam=1.5,
        B=1.0, V=1, n=100, m=1, mixing=None,
    )
    defaults.update(overrides)
    return BoundParams(**defaults)


def test_deviation_experiment_zero_family():
    spec = GeneratorSpec(kind="iid", seed=6, law=FinitePmf((0, 1), [0.5, 0.5]))
    fam = state_family([{0: 0.0, 1: 0.0}])
    report = deviation_experiment(
        spec, fam, make_params(), finite_family_entropy(1), [0.05, 0.2], 200
    )
    for row in report.rows:
        assert row["frequency"] == 0.0
        assert row["dominant"]


def test_deviation_experiment_iid_dominance():
    spec = GeneratorSpec(kind="iid", seed=7, law=FinitePmf((0, 1), [0.5, 0.5]))
    fam = state_family([{0: 0.0, 1: 1.0}, {0: 1.0, 1: 0.0}])
    params = make_params(n=400)
    report = deviation_experiment(
        spec, fam, params, finite_family_entropy(2), [0.3, 0.38, 0.45], 500
    )
    assert report.all_dominant
    assert report.metadata["beta_at_m"] == 0.0
    # frequencies are nonincreasing in t
    freqs = [row["frequency"] for row in report.rows]
    assert freqs == sorted(freqs, reverse=True)


def test_deviation_experiment_markov_uses_exact_beta():
    chain = two_state_chain()
    spec = GeneratorSpec(kind="markov", seed=9, chain=chain)
    params = make_params(n=60, m=3)
    report = deviation_experiment(
        spec,
        state_family([{0: 0.0, 1: 1.0}]),
        params,
        finite_family_entropy(1),
        [0.4],
        50,
    )
    assert report.metadata["beta_at_m"] == pytest.approx(markov_beta(chain, 3))


def test_weak_error_experiment_rows_and_slope():
    spec = GeneratorSpec(
        kind="m_dependent",
        seed=10,
        dependence_lag=2,
        alphabet_size=4,
        phi=lambda s: (s - 1.5) / 15.0,
        noise_values=(-0.1, 0.1),
        noise_probs=(0.5, 0.5),
        response_bound=0.25,
    )
    fam = FunctionFamily.linear_span((lambda s: 1.0, lambda s: float(s)))
    params = make_params(B=0.25, V=3, m=2, n=100)
    truth = lambda s: (s - 1.5) / 15.0
    report = weak_error_experiment(spec, fam, params, truth, [50, 200], 40)
    assert len(report.rows) == 2
    for row in report.rows:
        assert row["bias"] == pytest.approx(0.0, abs=1e-10)
        assert row["dominant"]
    assert report.rows[0]["weak_error"] > report.rows[1]["weak_error"]
    assert report.metadata["loglog_slope"] < 0


def test_report_csv_roundtrip(tmp_path):
    spec = GeneratorSpec(kind="iid", seed=11, law=FinitePmf((0, 1), [0.5, 0.5]))
    fam = state_family([{0: 0.0, 1: 0.0}])
    report = deviation_experiment(
        spec, fam, make_params(), finite_family_entropy(1), [0.1], 20
    )
    out = tmp_path / "report.csv"
    report.to_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,m,t,frequency,stderr,bound,dominant,vacuous"
    assert len(lines) == 2


def test_spec_from_json_roundtrip():
    doc = {
        "kind": "m_dependent",
        "seed": 12,
        "dependence_lag": 2,
        "alphabet_size": 4,
        "phi": {"0": -0.1, "1": 0.0, "2": 0.05, "3": 0.1},
        "noise": {"values": [-0.1, 0.1], "probs": [0.5, 0.5]},
        "response_bound": 0.25,
    }
    spec = spec_from_json(doc)
    data = generate(spec, 30)
    assert data.response_bound == 0.25
    assert spec.phi(2) == 0.05
