"""Command-line front end.

One executable, eight subcommands (beta, couple, partition, entropy, bound,
regress, simulate, verify), all file/stdout based.  Exit status 0 on success,
1 on domain or hypothesis violations (the message names the violated
inequality), 2 on I/O or parse failures.  Configs are validated before any
computation starts and outputs are written whole or not at all.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds, coupling, entropy, mixing, regression, simulate
from .blocking import m_steps_partition
from .errors import BetamixError
from .mixing import MixingFit
from .pmf import FinitePmf, chain_from_json, joint_from_json, joint_to_json


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(doc, output_path, compact=False):
    if compact:
        text = json.dumps(doc, separators=(",", ":"), default=float) + "\n"
    else:
        text = json.dumps(doc, indent=2, default=float) + "\n"
    if output_path:
        with open(output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def family_from_json(doc) -> entropy.FunctionFamily:
    kind = doc["kind"]
    if kind == "state_table":
        members = tuple(
            (lambda s, tbl={str(k): float(v) for k, v in table.items()}: tbl[str(s)])
            for table in doc["tables"]
        )
        return entropy.FunctionFamily(
            "explicit-table", members, doc.get("declared_vc"), doc.get("range_bound")
        )
    if kind == "affine_span":
        scale = float(doc.get("scale", 1.0))
        basis = (lambda s: 1.0, lambda s, a=scale: a * float(s))
        return entropy.FunctionFamily.linear_span(basis, doc.get("range_bound"))
    raise BetamixError(f"unknown family kind {kind!r}")


def params_from_json(doc) -> bounds.BoundParams:
    fit = None
    if "mixing" in doc:
        mx = doc["mixing"]
        fit = MixingFit(mx["model"], float(mx["a"]), mx.get("b"), float(mx["gamma"]))
    return bounds.BoundParams(
        epsilon=float(doc["epsilon"]),
        c=float(doc["c"]),
        gamma=float(doc["gamma"]),
        gamma_prime=float(doc["gamma_prime"]),
        lam=float(doc["lambda"]),
        B=float(doc["B"]),
        V=int(doc["V"]),
        n=int(doc["n"]),
        m=int(doc.get("m", 1)),
        mixing=fit,
    )


def entropy_from_json(doc) -> entropy.EntropyEstimate:
    kind = doc.get("entropy", "sauer_shelah")
    if kind == "sauer_shelah":
        return entropy.sauer_shelah_estimate(int(doc["V"]), float(doc["B"]))
    if kind == "neural_net":
        return entropy.neural_net_estimate(int(doc["N"]), int(doc["d"]), float(doc["B"]))
    if kind == "finite":
        return entropy.finite_family_entropy(int(doc["n_members"]))
    if kind == "zero":
        return entropy.zero_entropy()
    raise BetamixError(f"unknown entropy kind {kind!r}")


def _cmd_beta(args) -> int:
    doc = _load_json(args.config)
    if "chain" in doc:
        chain = chain_from_json(doc["chain"])
        m = int(doc.get("m", 1))
        horizon = int(doc.get("horizon", 64))
        out = {"beta": mixing.markov_beta(chain, m, horizon=horizon), "m": m, "horizon": horizon}
    elif "joint" in doc:
        out = {"beta": mixing.beta_coefficient(joint_from_json(doc["joint"]))}
    elif "process" in doc:
        process = joint_from_json(doc["process"])
        m = int(doc.get("m", 1))
        out = {"beta_max": mixing.beta_max(process, m), "m": m}
    else:
        raise BetamixError("beta config needs one of: chain, joint, process")
    _emit(out, args.output)
    return 0


def _cmd_couple(args) -> int:
    doc = _load_json(args.config)
    if "joint" in doc:
        original = joint_from_json(doc["joint"])
        result = coupling.berbee_couple(original)
    elif "process" in doc:
        original = joint_from_json(doc["process"])
        result = coupling.generalized_berbee(original)
    else:
        raise BetamixError("couple config needs one of: joint, process")
    report = coupling.verify_coupling(result, original)
    out = result.to_json()
    out["verification"] = {
        "marginal_error": report.marginal_error,
        "independence_error": report.independence_error,
        "mismatch_error": report.mismatch_error,
    }
    _emit(out, args.output)
    return 0


def _cmd_partition(args) -> int:
    part = m_steps_partition(args.n, args.m)
    part.check()
    _emit(part.to_lists(), args.output, compact=True)
    return 0


def _cmd_entropy(args) -> int:
    doc = _load_json(args.config)
    kind = doc.get("entropy", "sauer_shelah")
    if kind in ("exact_cover", "greedy_cover"):
        values = np.asarray(doc["values"], dtype=float)
        r = float(doc["r"])
        fn = entropy.covering_number_exact if kind == "exact_cover" else entropy.covering_number_greedy
        out = {"covering_number": fn(values, r), "r": r}
    else:
        est = entropy_from_json(doc)
        out = {"entropy": est(int(doc.get("size", 1)), float(doc["r"])), "r": float(doc["r"])}
    _emit(out, args.output)
    return 0


def _cmd_bound(args) -> int:
    doc = _load_json(args.config)
    params = params_from_json(doc["params"])
    kind = doc.get("bound", "beta_deviation")
    if kind == "indep_deviation":
        est = entropy_from_json(doc["entropy_spec"])
        out = {
            "bound": bounds.indep_deviation_bound(params, est, int(doc.get("size", params.n)), float(doc["t"]))
        }
    elif kind == "beta_deviation":
        est = entropy_from_json(doc["entropy_spec"])
        out = {"bound": bounds.beta_deviation_bound(params, est, float(doc["t"]), doc.get("beta_at_m"))}
    elif kind == "weak_error":
        breakdown = bounds.weak_error_bound(params, float(doc.get("bias", 0.0)), doc.get("beta_at_m"))
        out = {
            "variance_term": breakdown.variance_term,
            "beta_error_term": breakdown.beta_error_term,
            "scaled_bias_term": breakdown.scaled_bias_term,
            "total": breakdown.total,
        }
    elif kind == "subexp_rate":
        out = {"rate": bounds.subexp_rate(params, float(doc["C"]))}
    elif kind == "subpoly_rate":
        out = {"rate": bounds.subpoly_rate(params, float(doc["C"]))}
    else:
        raise BetamixError(f"unknown bound kind {kind!r}")
    _emit(out, args.output)
    return 0


def _cmd_regress(args) -> int:
    doc = _load_json(args.config)
    family = family_from_json(doc["family"])
    data = regression.Dataset(
        xs=tuple(doc["xs"]),
        ys=np.asarray(doc["ys"], dtype=float),
        response_bound=doc.get("response_bound"),
    )
    result = regression.fit_least_squares(data, family, float(doc["B"]))
    out = {"empirical_risk": result.empirical_risk, "ridge_used": result.ridge_used}
    if result.member_index is not None:
        out["member_index"] = result.member_index
    if result.coefficients is not None:
        out["coefficients"] = result.coefficients.tolist()
    _emit(out, args.output)
    return 0


def _run_experiment(doc, seed_override=None):
    gen_doc = dict(doc["generator"])
    if seed_override is not None:
        gen_doc["seed"] = seed_override
    spec = simulate.spec_from_json(gen_doc)
    family = family_from_json(doc["family"])
    params = params_from_json(doc["params"])
    replications = int(doc["replications"])
    if doc.get("experiment", "deviation") == "deviation":
        est = entropy_from_json(doc["entropy_spec"])
        return simulate.deviation_experiment(
            spec, family, params, est, [float(t) for t in doc["t_grid"]], replications
        )
    truth_tbl = {str(k): float(v) for k, v in doc["truth"].items()}
    truth = lambda s: truth_tbl[str(s)]
    return simulate.weak_error_experiment(
        spec, family, params, truth, [int(n) for n in doc["n_grid"]], replications
    )


def _cmd_simulate(args) -> int:
    doc = _load_json(args.config)
    report = _run_experiment(doc, args.seed)
    if args.format == "csv" and args.output:
        report.to_csv(args.output)
    else:
        _emit(report.to_json(), args.output)
    return 0


def _cmd_verify(args) -> int:
    doc = _load_json(args.config)
    report = _run_experiment(doc, args.seed)
    _emit(report.to_json(), args.output)
    if not report.all_dominant:
        sys.stderr.write("dominance violated: at least one frequency + 3*stderr exceeds its bound\n")
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betamix",
        description="Dependence coefficients, couplings, and deviation bounds on finite spaces.",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker cap for simulate/entropy")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, needs_config=True):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("config", help="path to a JSON config document")
        p.add_argument("--output", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.set_defaults(fn=fn)
        return p

    add("beta", _cmd_beta)
    add("couple", _cmd_couple)
    p = add("partition", _cmd_partition, needs_config=False)
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    add("entropy", _cmd_entropy)
    add("bound", _cmd_bound)
    add("regress", _cmd_regress)
    add("simulate", _cmd_simulate)
    add("verify", _cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BetamixError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"i/o error: {exc!r}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
