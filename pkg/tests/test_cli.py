import json
import math

import numpy as np
import pytest

from betamix.cli import main


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partition_subcommand(capsys):
    code, out, _ = run(capsys, ["partition", "7", "3"])
    assert code == 0
    assert out.strip() == "[[1,4,7],[2,5],[3,6]]"


def test_partition_invalid_args(capsys):
    code, _, err = run(capsys, ["partition", "3", "5"])
    assert code == 1
    assert "1 <= m <= n" in err


def test_beta_chain_closed_form(tmp_path, capsys):
    p = q = 0.25
    cfg = write(
        tmp_path,
        "beta.json",
        {
            "chain": {
                "states": [0, 1],
                "transition": [[1 - p, p], [q, 1 - q]],
                "initial": [0.5, 0.5],
            },
            "m": 3,
        },
    )
    code, out, _ = run(capsys, ["beta", cfg])
    assert code == 0
    doc = json.loads(out)
    assert doc["beta"] == pytest.approx(2 * 0.25 * 0.5**3)
    assert doc["horizon"] == 64


def test_beta_joint(tmp_path, capsys):
    cfg = write(
        tmp_path,
        "joint.json",
        {"joint": {"axes": [[0, 1], [0, 1]], "probs": [0.5, 0.0, 0.0, 0.5]}},
    )
    code, out, _ = run(capsys, ["beta", cfg])
    assert code == 0
    assert json.loads(out)["beta"] == pytest.approx(0.5)


def test_couple_subcommand(tmp_path, capsys):
    cfg = write(
        tmp_path,
        "couple.json",
        {"joint": {"axes": [[0, 1], [0, 1]], "probs": [0.4, 0.1, 0.1, 0.4]}},
    )
    code, out, _ = run(capsys, ["couple", cfg])
    assert code == 0
    doc = json.loads(out)
    assert doc["n_original"] == 2
    assert doc["verification"]["mismatch_error"] < 1e-10


def test_entropy_subcommand(tmp_path, capsys):
    cfg = write(tmp_path, "ent.json", {"entropy": "sauer_shelah", "V": 1, "B": 1.0, "r": 0.25})
    code, out, _ = run(capsys, ["entropy", cfg])
    assert code == 0
    assert json.loads(out)["entropy"] == pytest.approx(5.4265, abs=1e-3)


def test_entropy_exact_cover(tmp_path, capsys):
    cfg = write(
        tmp_path, "cover.json",
        {"entropy": "exact_cover", "values": [[0.0], [1.0], [1.01]], "r": 0.5},
    )
    code, out, _ = run(capsys, ["entropy", cfg])
    assert code == 0
    assert json.loads(out)["covering_number"] == 2


def params_doc(**over):
    doc = {
        "epsilon": 0.5, "c": 2.0, "gamma": 2.0, "gamma_prime": 2.0,
        "lambda": 1.5, "B": 1.0, "V": 1, "n": 1000, "m": 2,
    }
    doc.update(over)
    return doc


def test_bound_weak_error(tmp_path, capsys):
    cfg = write(
        tmp_path, "bound.json",
        {"bound": "weak_error", "params": params_doc(), "bias": 0.0, "beta_at_m": 0.0},
    )
    code, out, _ = run(capsys, ["bound", cfg])
    assert code == 0
    doc = json.loads(out)
    assert doc["total"] == pytest.approx(doc["variance_term"])


def test_bound_hypothesis_violation_exits_one(tmp_path, capsys):
    cfg = write(
        tmp_path, "bad.json",
        {"bound": "weak_error", "params": params_doc(**{"lambda": 3.0}), "bias": 0.0, "beta_at_m": 0.0},
    )
    code, _, err = run(capsys, ["bound", cfg])
    assert code == 1
    assert "lambda <= (3+sqrt(1+8c))/4" in err


def test_regress_subcommand(tmp_path, capsys):
    cfg = write(
        tmp_path, "reg.json",
        {
            "family": {"kind": "state_table", "tables": [{"0": 0.0, "1": 0.0}, {"0": 1.0, "1": 1.0}]},
            "xs": [0, 1, 0],
            "ys": [1.0, 1.0, 1.0],
            "B": 1.0,
        },
    )
    code, out, _ = run(capsys, ["regress", cfg])
    assert code == 0
    doc = json.loads(out)
    assert doc["member_index"] == 1
    assert doc["empirical_risk"] == pytest.approx(0.0)


def experiment_doc(seed=21):
    return {
        "experiment": "deviation",
        "generator": {
            "kind": "iid",
            "seed": seed,
            "law": {"support": [0, 1], "probs": [0.5, 0.5]},
        },
        "family": {"kind": "state_table", "tables": [{"0": 0.0, "1": 1.0}]},
        "params": params_doc(n=400, m=1),
        "entropy_spec": {"entropy": "finite", "n_members": 1},
        "t_grid": [0.3, 0.4],
        "replications": 300,
    }


def test_simulate_subcommand_csv(tmp_path, capsys):
    cfg = write(tmp_path, "exp.json", experiment_doc())
    out_csv = tmp_path / "report.csv"
    code, _, _ = run(capsys, ["simulate", cfg, "--output", str(out_csv), "--format", "csv"])
    assert code == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0].startswith("n,m,t,frequency")
    assert len(lines) == 3


def test_simulate_byte_identical_given_seed(tmp_path, capsys):
    cfg = write(tmp_path, "exp.json", experiment_doc())
    code1, out1, _ = run(capsys, ["simulate", cfg, "--seed", "5"])
    code2, out2, _ = run(capsys, ["simulate", cfg, "--seed", "5"])
    _, out3, _ = run(capsys, ["simulate", cfg, "--seed", "6"])
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1 != out3


def test_verify_subcommand_dominant(tmp_path, capsys):
    cfg = write(tmp_path, "exp.json", experiment_doc())
    code, out, _ = run(capsys, ["verify", cfg])
    assert code == 0
    assert json.loads(out)["rows"][0]["dominant"] is True


def test_missing_file_exits_two(capsys):
    code, _, err = run(capsys, ["beta", "/nonexistent/config.json"])
    assert code == 2
    assert "i/o error" in err


def test_malformed_json_exits_two(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, _ = run(capsys, ["beta", str(path)])
    assert code == 2
