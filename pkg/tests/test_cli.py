import io
import json

import numpy as np
import pytest

from app.cli import main

COSINE = {"n": 2, "a": [[0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]}
TRACE = {"n": 2, "a": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]}
ONES = {"n": 3, "t": [[1.0, 0.0]] * 5}


@pytest.fixture
def doc(tmp_path):
    def write(name: str, payload) -> str:
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)
    return write


def _error(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_factorize(doc, capsys):
    assert main(["factorize", doc("a.json", COSINE)]) == 0

    result = json.loads(capsys.readouterr().out)
    assert len(result["q"]) == 2
    assert result["residual"] < 1e-10
    assert np.hypot(*result["q"][0]) == pytest.approx(np.sqrt(0.5))


def test_factorize_reads_standard_input(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(COSINE)))

    assert main(["factorize", "-"]) == 0
    assert len(json.loads(capsys.readouterr().out)["q"]) == 2


def test_writes_to_output_file(doc, tmp_path, capsys):
    out = tmp_path / "q.json"

    assert main(["factorize", doc("a.json", COSINE), "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["residual"] < 1e-10


def test_malformed_json(doc, capsys):
    assert main(["factorize", doc("a.json", "{")]) == 1

    error = _error(capsys)
    assert error["error"] == "ValidationError"
    assert "column" in error["detail"]


def test_negative_density(doc, capsys):
    assert main(["factorize", doc("a.json", {"n": 2, "a": [[1, 0], [1, 0], [1, 0]]})]) == 1
    assert _error(capsys)["error"] == "NotPositiveError"


def test_wrong_length(doc, capsys):
    assert main(["factorize", doc("a.json", {"n": 3, "a": [[1, 0]]})]) == 1
    assert _error(capsys)["error"] == "InvalidInputError"


def test_missing_file(tmp_path, capsys):
    assert main(["factorize", str(tmp_path / "absent.json")]) == 1
    assert _error(capsys)["error"] == "FileNotFoundError"


def test_bad_command_line():
    assert main(["transmogrify"]) == 2
    assert main(["propagation"]) == 2
    assert main(["propagation", "--toeplitz", "3", "--full", "3"]) == 2


def test_help():
    assert main(["--help"]) == 0


def test_decompose(doc, capsys):
    assert main(["decompose", doc("t.json", ONES)]) == 0

    result = json.loads(capsys.readouterr().out)
    assert result["rank"] == 1
    assert result["weights"] == [pytest.approx(3.0)]


def test_decompose_multiplicity(doc, capsys):
    assert main(["decompose", doc("t.json", ONES), "--multiplicity"]) == 0

    assert json.loads(capsys.readouterr().out) == {"multiplicity": 2, "rank": 1}


def test_decompose_rejects_indefinite(doc, capsys):
    indefinite = {"n": 2, "t": [[2, 0], [0, 0], [2, 0]]}

    assert main(["decompose", doc("t.json", indefinite)]) == 1
    assert _error(capsys)["error"] == "NotPositiveError"


@pytest.mark.parametrize("failure", [
    np.linalg.LinAlgError("Eigenvalues did not converge"),
    FloatingPointError("overflow encountered in det"),
])
def test_numerical_failure_is_reported_as_json(doc, capsys, monkeypatch, failure):
    def broken(*args, **kwargs):
        raise failure

    monkeypatch.setattr("app.cli.vandermonde_decompose", broken)

    assert main(["decompose", doc("t.json", ONES)]) == 1
    captured = capsys.readouterr()
    error = json.loads(captured.err.strip().splitlines()[-1])
    assert error == {"error": type(failure).__name__, "detail": str(failure)}
    assert "Traceback" not in captured.err
    assert captured.out == ""


def test_state_check_pure_and_eval(doc, capsys):
    identity = {"n": 2, "t": [[0, 0], [1, 0], [0, 0]]}
    scaled = {"n": 2, "a": [[1.0, 0.0], [2.0, 0.0], [1.0, 0.0]]}

    assert main(["state", doc("a.json", scaled), "--check-pure", "--eval", doc("t.json", identity)]) == 0

    result = json.loads(capsys.readouterr().out)
    assert result["pure"] is True
    assert len(result["angles"]) == 1
    assert result["value"] == pytest.approx(1.0)
    assert result["density"]["a"][0] == pytest.approx([0.5, 0.0])


def test_state_trace_not_pure(doc, capsys):
    assert main(["state", doc("a.json", TRACE), "--check-pure"]) == 0

    result = json.loads(capsys.readouterr().out)
    assert result["pure"] is False
    assert result["angles"] is None
    assert result["value"] is None


def test_distance(doc, capsys):
    assert main(["distance", doc("phi.json", COSINE), doc("psi.json", TRACE), "--gap", "1e-4"]) == 0

    result = json.loads(capsys.readouterr().out)
    connes = result["connes"]
    assert result["inequality_ok"] is True
    assert connes["lower"] <= connes["upper"] + 1e-12
    assert connes["upper"] - connes["lower"] <= 1e-4
    assert connes["optimizer"]["n"] == 2
    assert result["kantorovich"] > 0
    assert result["dual_route"] is None


def test_circulant_tensor_rank(capsys):
    assert main(["circulant", "tensor-rank", "--n", "3"]) == 0
    assert json.loads(capsys.readouterr().out) == {"n": 3, "m": 5, "rank": 25, "full": True, "prime": True}

    assert main(["circulant", "tensor-rank", "--n", "5"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["full"] is False
    assert result["rank"] < 81


def test_circulant_eigenvalues(doc, capsys):
    assert main(["circulant", "eigenvalues", doc("c.json", {"m": 4, "c": [[3, 0], [1, 0], [0, 0], [1, 0]]})]) == 0

    result = json.loads(capsys.readouterr().out)
    assert sorted(re for re, _ in result["eigenvalues"]) == pytest.approx([1, 3, 3, 5])
    assert result["positive"] is True


def test_circulant_needs_its_arguments(doc, capsys):
    assert main(["circulant", "complete", doc("t.json", ONES)]) == 1
    assert "--m" in _error(capsys)["detail"]
    assert main(["circulant", "tensor-rank"]) == 1
    assert main(["circulant", "eigenvalues"]) == 1


def test_complete_then_compress(doc, capsys):
    assert main(["circulant", "complete", doc("t.json", ONES), "--m", "5"]) == 0
    completion = capsys.readouterr().out

    assert main(["circulant", "compress", doc("c.json", completion), "--n", "3"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["n"] == 3
    assert np.allclose(result["t"], ONES["t"])


def test_propagation(capsys):
    assert main(["propagation", "--toeplitz", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["prop"] == 2

    assert main(["propagation", "--circulant", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["prop"] == 1


def test_geometry3_check(capsys):
    assert main(["geometry3", "--check", "--samples", "100", "--seed", "5"]) == 0

    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert len(report["checks"]) == 16


def test_geometry3_empty_sample(capsys):
    assert main(["geometry3", "--sample", "cone-slice", "--count", "0"]) == 0
    assert capsys.readouterr().out == "a,b,c,d\n"


def test_geometry3_sample_file(tmp_path):
    out = tmp_path / "boundary.csv"

    assert main(["geometry3", "--sample", "boundary", "--count", "5", "--out", str(out)]) == 0

    lines = out.read_text().splitlines()
    assert lines[0] == "x,y,s,W,X,Y,Z"
    assert len(lines) == 6
    assert all(len(line.split(",")) == 7 for line in lines[1:])


def test_geometry3_sample_is_deterministic(capsys):
    main(["geometry3", "--sample", "state-surface", "--count", "8", "--seed", "3"])
    first = capsys.readouterr().out
    main(["geometry3", "--sample", "state-surface", "--count", "8", "--seed", "3"])

    assert capsys.readouterr().out == first


def test_geometry3_bad_slice(capsys):
    assert main(["geometry3", "--sample", "cone-slice", "--slice-d", "2"]) == 1
    assert _error(capsys)["error"] == "InvalidInputError"
