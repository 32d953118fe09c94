"""Seeded data generators with known dependence structure and the Monte Carlo
experiments that test bound dominance.

Three generator kinds: a finite-state Markov chain (exact lag-m dependence
coefficients available), an m-dependent sliding-window construction built from
independent seeds (dependence vanishes beyond the lag), and an i.i.d. draw
from a fixed law.  Each replication owns a counter-based stream derived from
(seed, replication), so reports are bit-reproducible regardless of execution
order.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bounds import BoundParams, beta_deviation_bound, weak_error_bound
from .entropy import EntropyEstimate, FunctionFamily
from .errors import DomainError, MalformedInputError
from .mixing import markov_beta
from .pmf import FinitePmf, MarkovChainSpec
from .regression import Dataset, weak_error
from .stats import wilson_stderr


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Counter-based stream for one replication: independent of execution order."""
    return np.random.Generator(np.random.Philox(key=[seed, replication]))


@dataclass(frozen=True)
class GeneratorSpec:
    """A seeded source of dependent (x, y) samples with exact input marginals.

    kinds: "markov" (needs ``chain``), "m_dependent" (sliding window of width
    ``dependence_lag`` over i.i.d. uniform seeds modulo ``alphabet_size``),
    "iid" (needs ``law``).  Responses are phi(x) plus discrete noise.
    """

    kind: str
    seed: int
    chain: MarkovChainSpec | None = None
    dependence_lag: int | None = None
    alphabet_size: int | None = None
    law: FinitePmf | None = None
    phi: Callable | None = None
    noise_values: tuple = (0.0,)
    noise_probs: tuple = (1.0,)
    response_bound: float | None = None

    def __post_init__(self):
        if self.kind not in ("markov", "m_dependent", "iid"):
            raise MalformedInputError(f"unknown generator kind {self.kind!r}")
        if self.kind == "markov" and self.chain is None:
            raise MalformedInputError("markov kind requires a chain")
        if self.kind == "m_dependent" and (
            self.dependence_lag is None or self.alphabet_size is None
            or self.dependence_lag < 1 or self.alphabet_size < 2
        ):
            raise MalformedInputError("m_dependent kind requires dependence_lag >= 1 and alphabet_size >= 2")
        if self.kind == "iid" and self.law is None:
            raise MalformedInputError("iid kind requires a law")
        if abs(sum(self.noise_probs) - 1.0) > 1e-12 or min(self.noise_probs) < 0:
            raise MalformedInputError("noise_probs must be a pmf")

    def states(self) -> tuple:
        if self.kind == "markov":
            return self.chain.states
        if self.kind == "m_dependent":
            return tuple(range(self.alphabet_size))
        return self.law.support

    def marginal_laws(self, n: int) -> np.ndarray:
        """Exact per-index laws of X_1..X_n, one row per index."""
        if self.kind == "markov":
            return self.chain.marginal_matrix(n)
        if self.kind == "m_dependent":
            # sums of i.i.d. uniforms modulo the alphabet size stay uniform
            k = self.alphabet_size
            return np.full((n, k), 1.0 / k)
        return np.tile(self.law.probs, (n, 1))

    def beta_at(self, m: int, horizon: int = 64) -> float:
        """Lag-m dependence coefficient of the inputs.

        Exact for markov and iid kinds; for the m_dependent kind, exactly 0 at
        or beyond the lag and the trivial bound 1 below it.
        """
        if self.kind == "markov":
            return markov_beta(self.chain, m, horizon=horizon)
        if self.kind == "m_dependent":
            return 0.0 if m >= self.dependence_lag else 1.0
        return 0.0


def _sample_states(spec: GeneratorSpec, n: int, rng: np.random.Generator) -> list:
    if spec.kind == "markov":
        chain = spec.chain
        cum_init = np.cumsum(chain.initial.probs)
        cum_rows = np.cumsum(chain.transition, axis=1)
        u = rng.random(n)
        idx = int(np.searchsorted(cum_init, u[0], side="right"))
        path = [idx]
        for j in range(1, n):
            idx = int(np.searchsorted(cum_rows[idx], u[j], side="right"))
            path.append(idx)
        return [chain.states[i] for i in path]
    if spec.kind == "m_dependent":
        k, lag = spec.alphabet_size, spec.dependence_lag
        w = rng.integers(0, k, size=n + lag - 1)
        sums = np.convolve(w, np.ones(lag, dtype=int), mode="valid") % k
        return [int(s) for s in sums]
    cum = np.cumsum(spec.law.probs)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return [spec.law.support[int(i)] for i in idx]


def generate(spec: GeneratorSpec, n: int, replication: int = 0) -> Dataset:
    """Draw one replication of length n, with exact marginal laws attached."""
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = replication_rng(spec.seed, replication)
    xs = _sample_states(spec, n, rng)
    phi = spec.phi if spec.phi is not None else (lambda s: 0.0)
    noise_values = np.asarray(spec.noise_values, dtype=float)
    noise = noise_values[
        np.searchsorted(np.cumsum(spec.noise_probs), rng.random(n), side="right")
    ]
    ys = np.array([float(phi(x)) for x in xs]) + noise
    return Dataset(
        xs=tuple(xs),
        ys=ys,
        states=spec.states(),
        marginal_laws=spec.marginal_laws(n),
        response_bound=spec.response_bound,
    )


@dataclass(frozen=True)
class ExperimentReport:
    """Row-per-configuration Monte Carlo report with dominance flags."""

    rows: tuple
    metadata: dict

    def to_csv(self, path) -> None:
        fieldnames = list(self.rows[0].keys())
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(self.rows)

    def to_json(self) -> dict:
        return {"metadata": self.metadata, "rows": list(self.rows)}

    @property
    def all_dominant(self) -> bool:
        return all(row["dominant"] for row in self.rows)


def _dominance(frequency: float, stderr: float, bound: float) -> tuple:
    vacuous = bound >= 1.0
    dominant = vacuous or frequency + 3.0 * stderr <= bound
    return dominant, vacuous


def deviation_experiment(
    spec: GeneratorSpec,
    family: FunctionFamily,
    params: BoundParams,
    entropy: EntropyEstimate,
    t_grid: Sequence[float],
    replications: int,
    beta_at_m: float | None = None,
) -> ExperimentReport:
    """Frequency of the uniform deviation event against its closed-form bound.

    The statistic per replication is sup over family members of
    (1-eps) * empirical mean - (1+eps) * average mean of the member over the
    sample; frequencies of {statistic >= t} are paired with the dependent-case
    deviation bound at each t on the grid.
    """
    if replications < 1:
        raise DomainError("replications must be >= 1")
    if not family.members:
        raise DomainError("the deviation experiment needs an enumerable family")
    n, m = params.n, params.m
    states = spec.states()
    table = family.values(states)  # (members, n_states)
    laws = spec.marginal_laws(n)
    avg = (laws @ table.T).mean(axis=0)  # per-member average mean
    state_index = {s: i for i, s in enumerate(states)}
    beta = spec.beta_at(m) if beta_at_m is None else float(beta_at_m)

    stats = np.empty(replications)
    for rep in range(replications):
        data = generate(spec, n, rep)
        idx = np.fromiter((state_index[x] for x in data.xs), dtype=int, count=n)
        emp = table[:, idx].mean(axis=1)
        stats[rep] = ((1.0 - params.epsilon) * emp - (1.0 + params.epsilon) * avg).max()

    rows = []
    for t in t_grid:
        hits = int((stats >= t).sum())
        freq = hits / replications
        se = wilson_stderr(hits, replications)
        bound = beta_deviation_bound(params, entropy, float(t), beta_at_m=beta)
        dominant, vacuous = _dominance(freq, se, bound)
        rows.append(
            {
                "n": n,
                "m": m,
                "t": float(t),
                "frequency": freq,
                "stderr": se,
                "bound": bound,
                "dominant": dominant,
                "vacuous": vacuous,
            }
        )
    meta = {"seed": spec.seed, "replications": replications, "beta_at_m": beta, "kind": spec.kind}
    return ExperimentReport(tuple(rows), meta)


def weak_error_experiment(
    spec: GeneratorSpec,
    family: FunctionFamily,
    params: BoundParams,
    truth: Callable,
    n_grid: Sequence[int],
    replications: int,
) -> ExperimentReport:
    """Measured weak error of the truncated fit against its closed-form bound.

    One row per n on the grid; the metadata carries the log-log slope of the
    measured error over the grid for trend checks.
    """
    rows = []
    for n in n_grid:
        p = dataclasses.replace(params, n=int(n))
        beta = spec.beta_at(p.m)
        est = weak_error(
            lambda rep, nn=int(n): generate(spec, nn, rep),
            family,
            p.B,
            truth,
            replications,
        )
        breakdown = weak_error_bound(p, est.bias, beta_at_m=beta)
        dominant = est.mean <= breakdown.total + 3.0 * est.stderr
        rows.append(
            {
                "n": int(n),
                "m": p.m,
                "replications": replications,
                "weak_error": est.mean,
                "stderr": est.stderr,
                "bias": est.bias,
                "bound_total": breakdown.total,
                "bound_variance": breakdown.variance_term,
                "bound_beta": breakdown.beta_error_term,
                "dominant": dominant,
                "vacuous": False,
            }
        )
    slope = None
    if len(rows) > 1 and all(r["weak_error"] > 0 for r in rows):
        logs_n = np.log([r["n"] for r in rows])
        logs_e = np.log([r["weak_error"] for r in rows])
        slope = float(np.polyfit(logs_n, logs_e, 1)[0])
    meta = {"seed": spec.seed, "replications": replications, "loglog_slope": slope}
    return ExperimentReport(tuple(rows), meta)


def spec_from_json(doc) -> GeneratorSpec:
    """Build a GeneratorSpec from an experiment-document fragment.

    phi is given as a {state: value} table (keys matched by string form).
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("kind")
    chain = None
    law = None
    if kind == "markov":
        from .pmf import chain_from_json

        chain = chain_from_json(doc["chain"])
    if kind == "iid":
        law = FinitePmf(tuple(doc["law"]["support"]), np.asarray(doc["law"]["probs"], dtype=float))
    phi = None
    if "phi" in doc:
        table = {str(k): float(v) for k, v in doc["phi"].items()}
        phi = lambda s, tbl=table: tbl[str(s)]
    noise = doc.get("noise", {"values": [0.0], "probs": [1.0]})
    return GeneratorSpec(
        kind=kind,
        seed=int(doc.get("seed", 0)),
        chain=chain,
        dependence_lag=doc.get("dependence_lag"),
        alphabet_size=doc.get("alphabet_size"),
        law=law,
        phi=phi,
        noise_values=tuple(noise["values"]),
        noise_probs=tuple(noise["probs"]),
        response_bound=doc.get("response_bound"),
    )
