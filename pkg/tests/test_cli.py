import csv
import json

from relaxcert.cli import run


def read_json(path):
    return json.loads(path.read_text())


def test_build_dim5_and_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "dim5.json"
    rc = run(["build", "dim5", "--out", str(out)])
    assert rc == 0
    data = read_json(out)
    assert len(data["system"]["rows"]) == 5
    assert data["provenance"]["eps"] == "1/8"
    captured = capsys.readouterr()
    assert '"provenance"' in captured.out

    rc = run(["verify", "--system", str(out), "--points", str(out), "--box=-2:3"])
    assert rc == 0


def test_build_outputs_deterministic(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert run(["build", "corollary", "--d", "7", "--out", str(first)]) == 0
    assert run(["build", "corollary", "--d", "7", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_build_xa_and_pipeline(tmp_path):
    out = tmp_path / "xa.json"
    assert run(["build", "xa", "--a", "2", "--out", str(out)]) == 0
    assert read_json(out)["provenance"]["a"] == 2

    out = tmp_path / "p2.json"
    mixed = tmp_path / "mixed.json"
    heights = tmp_path / "heights.json"
    rc = run(["build", "pipeline", "--k", "2", "--out", str(out),
              "--mixed-out", str(mixed), "--heights-out", str(heights)])
    assert rc == 0
    assert len(read_json(out)["system"]["rows"]) == 8

    rc = run(["certify-mixed", "--system", str(mixed), "--heights", str(heights)])
    assert rc == 0


def test_certify_mixed_from_dim5_artifacts(tmp_path):
    out = tmp_path / "dim5.json"
    mixed = tmp_path / "mixed.json"
    heights = tmp_path / "heights.json"
    cert = tmp_path / "cert.json"
    assert run(["build", "dim5", "--out", str(out), "--mixed-out", str(mixed),
                "--heights-out", str(heights)]) == 0
    assert run(["certify-mixed", "--system", str(mixed), "--heights", str(heights),
                "--out", str(cert)]) == 0
    data = read_json(cert)
    assert data["verdict"] == "certified"
    assert len(data["projection_points"]) == 6


def test_verify_failure_exit_code(tmp_path, capsys):
    out = tmp_path / "dim5.json"
    assert run(["build", "dim5", "--out", str(out)]) == 0
    data = read_json(out)
    data["target"]["points"] = data["target"]["points"][:-1]
    bad = tmp_path / "bad_points.json"
    bad.write_text(json.dumps(data))
    rc = run(["verify", "--system", str(out), "--points", str(bad), "--box=-2:3"])
    assert rc == 1
    assert "witness" in capsys.readouterr().err


def test_bounds_csv(tmp_path):
    out = tmp_path / "bounds.csv"
    assert run(["bounds", "--dmax", "12", "--out", str(out)]) == 0
    with open(out) as handle:
        rows = {int(r["d"]): r for r in csv.DictReader(handle)}
    assert rows[5]["best"] == "5"
    assert rows[11]["best"] == "10"


def test_cover_csv(tmp_path):
    out = tmp_path / "cover.csv"
    assert run(["cover", "--k", "3", "--out", str(out)]) == 0
    with open(out) as handle:
        rows = list(csv.DictReader(handle))
    assert rows[0]["f_pi"] == "2" and rows[0]["f_b"] == "1"
    assert rows[0]["upper_total"] == "3"


def test_cover_random_method(tmp_path):
    out = tmp_path / "cover.csv"
    assert run(["cover", "--k", "3", "--method", "random", "--seed", "7",
                "--out", str(out)]) == 0
    with open(out) as handle:
        rows = list(csv.DictReader(handle))
    assert rows[0]["f_pi"] == "2"


def test_usage_errors_exit_two(tmp_path, capsys):
    assert run(["build", "dim5", "--bogus-flag"]) == 2
    assert run(["bounds", "--dmax", "0"]) == 2
    capsys.readouterr()


def test_resource_error_exit_two(tmp_path, capsys):
    out = tmp_path / "c11.json"
    assert run(["build", "corollary", "--d", "11", "--out", str(out)]) == 0
    rc = run(["verify", "--system", str(out), "--points", str(out),
              "--box=-1:2", "--cap", "1000"])
    assert rc == 2
    assert "error" in capsys.readouterr().err
