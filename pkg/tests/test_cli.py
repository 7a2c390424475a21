import json

import numpy as np
import pytest

from polytoeplitz import linalg
from polytoeplitz.cli import main
from polytoeplitz.model import FockSpace
from polytoeplitz.toeplitz import evaluate_at_model, random_symbol, symbol_to_json
from polytoeplitz.weights import spec_from_json


def write_spec(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


BERGMAN = {"k": 1, "n": [1], "m": [2], "coeffs": [{"i": 1, "word": [1], "a": 1.0}]}
BALL = {
    "k": 1,
    "n": [2],
    "m": [1],
    "coeffs": [{"i": 1, "word": [1], "a": 1.0}, {"i": 1, "word": [2], "a": 1.0}],
}
ONES = {
    "k": 1,
    "n": [1],
    "m": [1],
    "coeffs": [{"i": 1, "word": [1] * p, "a": 1.0} for p in range(1, 14)],
}


def test_weights_command_ones_ratio(tmp_path):
    spec = write_spec(tmp_path / "spec.json", ONES)
    rc = main(["weights", "--spec", spec, "--trunc", "13", "--out", str(tmp_path / "out")])
    assert rc == 0
    report = json.loads((tmp_path / "out" / "weights-report.json").read_text())
    by_degree = report["ratio_trend"][0]["max_by_degree"]
    for d in range(1, 13):
        assert by_degree[str(d)] == pytest.approx(2.0, abs=1e-12)
    csv_text = (tmp_path / "out" / "weights.csv").read_text()
    assert csv_text.splitlines()[0] == "factor,word,b"


def test_weights_command_bergman_column(tmp_path):
    spec = write_spec(tmp_path / "spec.json", BERGMAN)
    rc = main(["weights", "--spec", spec, "--trunc", "6", "--out", str(tmp_path / "out")])
    assert rc == 0
    rows = (tmp_path / "out" / "weights.csv").read_text().strip().splitlines()[1:]
    values = [float(r.split(",")[2]) for r in rows]
    assert values == [float(p + 1) for p in range(7)]


def test_malformed_spec_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 1, "n": [1], "m": [1], "coeffs": []}')
    rc = main(["weights", "--spec", str(bad), "--trunc", "4"])
    assert rc == 2


def test_missing_spec_file_exits_2(tmp_path):
    rc = main(["weights", "--spec", str(tmp_path / "nope.json"), "--trunc", "4"])
    assert rc == 2


def test_model_command_writes_matrices(tmp_path):
    spec = write_spec(tmp_path / "spec.json", BALL)
    rc = main(["model", "--spec", spec, "--trunc", "3", "--out", str(tmp_path / "out")])
    assert rc == 0
    report = json.loads((tmp_path / "out" / "model-report.json").read_text())
    assert report["passed"]
    assert report["defect_vs_vacuum_projection"] < 1e-10
    with open(tmp_path / "out" / "W_1_1.mtx") as fh:
        W = linalg.load_matrix(fh)
    assert W.shape == (15, 15)


def test_toeplitz_fourier_round_trip(tmp_path, rng):
    spec_path = write_spec(tmp_path / "spec.json", BALL)
    spec = spec_from_json(BALL)
    space = FockSpace(spec, (3,), coeff_dim=2)
    sym = random_symbol(space, rng, n_monomials=5)
    T = evaluate_at_model(sym)
    with open(tmp_path / "op.mtx", "w") as fh:
        linalg.save_matrix(fh, T.dense)

    rc = main(
        [
            "toeplitz",
            "--spec", spec_path,
            "--trunc", "3",
            "--coeff-dim", "2",
            "--operator", str(tmp_path / "op.mtx"),
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "out" / "toeplitz-report.json").read_text())
    assert report["report"]["verdict"]

    rc = main(
        [
            "fourier",
            "--spec", spec_path,
            "--trunc", "3",
            "--coeff-dim", "2",
            "--symbol", str(tmp_path / "out" / "symbol.json"),
            "--radius", "1.0",
            "--out", str(tmp_path / "out2"),
        ]
    )
    assert rc == 0
    with open(tmp_path / "out2" / "operator.mtx") as fh:
        back = linalg.load_matrix(fh).toarray()
    assert np.abs(back - T.dense).max() < 1e-12


def test_toeplitz_dimension_mismatch_exits_3(tmp_path):
    spec_path = write_spec(tmp_path / "spec.json", BALL)
    with open(tmp_path / "op.mtx", "w") as fh:
        linalg.save_matrix(fh, np.eye(4))
    rc = main(
        ["toeplitz", "--spec", spec_path, "--trunc", "3", "--operator", str(tmp_path / "op.mtx")]
    )
    assert rc == 3


def test_toeplitz_rejects_junk_operator(tmp_path, rng):
    spec_path = write_spec(tmp_path / "spec.json", BALL)
    M = rng.standard_normal((15, 15))
    with open(tmp_path / "op.mtx", "w") as fh:
        linalg.save_matrix(fh, M)
    rc = main(
        ["toeplitz", "--spec", spec_path, "--trunc", "3", "--operator", str(tmp_path / "op.mtx")]
    )
    assert rc == 1


def test_berezin_command(tmp_path, rng):
    spec_path = write_spec(tmp_path / "spec.json", BERGMAN)
    spec = spec_from_json(BERGMAN)
    from polytoeplitz.cpmaps import random_pure_tuple

    X = random_pure_tuple(spec, rng, dims=(3,), shrink=0.85)
    files = []
    for i in range(spec.k):
        row = []
        for j, mat in enumerate(X.ops[i], start=1):
            name = f"X_{i + 1}_{j}.mtx"
            with open(tmp_path / name, "w") as fh:
                linalg.save_matrix(fh, mat)
            row.append(name)
        files.append(row)
    (tmp_path / "tuple.json").write_text(json.dumps({"dim_h": X.dim_h, "files": files}))
    space = FockSpace(spec, (4,))
    T = evaluate_at_model(random_symbol(space, rng, n_monomials=3))
    with open(tmp_path / "op.mtx", "w") as fh:
        linalg.save_matrix(fh, T.dense)
    rc = main(
        [
            "berezin",
            "--spec", spec_path,
            "--trunc", "4",
            "--tuple", str(tmp_path / "tuple.json"),
            "--operator", str(tmp_path / "op.mtx"),
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "out" / "berezin-report.json").read_text())
    assert report["member"] and report["pure"]
    assert report["intertwining_residual"] < 1e-9
    with open(tmp_path / "out" / "berezin-transform.mtx") as fh:
        transformed = linalg.load_matrix(fh)
    assert transformed.shape == (X.dim_h, X.dim_h)


def test_brown_halmos_command(tmp_path, rng):
    spec_path = write_spec(tmp_path / "spec.json", BALL)
    spec = spec_from_json(BALL)
    space = FockSpace(spec, (3,))
    T = evaluate_at_model(random_symbol(space, rng, n_monomials=4))
    with open(tmp_path / "op.mtx", "w") as fh:
        linalg.save_matrix(fh, T.dense)
    rc = main(
        [
            "brown-halmos",
            "--spec", spec_path,
            "--trunc", "3",
            "--operator", str(tmp_path / "op.mtx"),
            "--factor", "1",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "out" / "brown-halmos-report.json").read_text())
    assert report["satisfied"]
    assert report["classification"] == "BH-consistent"


def test_kernel_psd_command(tmp_path, rng):
    spec_path = write_spec(tmp_path / "spec.json", BALL)
    spec = spec_from_json(BALL)
    space = FockSpace(spec, (3,))
    sym = random_symbol(space, rng, n_monomials=4, hermitian=True)
    (tmp_path / "symbol.json").write_text(json.dumps(symbol_to_json(sym)))
    rc = main(
        [
            "kernel-psd",
            "--spec", spec_path,
            "--trunc", "3",
            "--symbol", str(tmp_path / "symbol.json"),
            "--radius", "0.5",
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "out" / "kernel-psd-report.json").read_text())
    assert report["verdicts_agree"]


def test_verify_command_passes(tmp_path):
    rc = main(["verify", "--seed", "3", "--out", str(tmp_path / "out")])
    assert rc == 0
    report = json.loads((tmp_path / "out" / "verify-report.json").read_text())
    assert report["passed"]
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)


def test_invalid_tolerance_exits_2(tmp_path):
    spec_path = write_spec(tmp_path / "spec.json", BERGMAN)
    rc = main(["weights", "--spec", spec_path, "--trunc", "4", "--tol", "-1"])
    assert rc == 2
