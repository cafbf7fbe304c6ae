import json
import subprocess
import sys

import pytest

from origami_kz.certify import RunConfig, certify_all, dumps, verify_report
from origami_kz.cli import main
from origami_kz.origami import parse_origami


@pytest.fixture(scope="module")
def o1_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("report") / "o1.json"
    assert main(["--builtin", "o1", "--format", "json", "--out", str(out)]) == 0
    return out


def test_certify_all_o1_text(capsys):
    assert main(["--builtin", "o1"]) == 0
    out = capsys.readouterr().out
    assert "stratum: H(1,1,1,1), genus 3" in out
    assert "orbit size: 4, cusps: 1" in out
    assert "status: certified" in out
    assert "verdict: arithmetic" in out


def test_json_report_structure(o1_report):
    doc = json.loads(o1_report.read_text())
    assert doc["status"] == "certified"
    assert set(doc["stages"]) == {"stratum", "orbit", "veech", "homology", "kz", "pinching",
                                  "arithmeticity", "pingpong"}
    assert doc["stages"]["veech"]["index"] == 4
    assert doc["stages"]["homology"]["omega"] == [[0, 0, -6, -3], [0, 0, -3, 3], [6, 3, 0, 0], [3, -3, 0, 0]]
    assert doc["stages"]["homology"]["homological_dimension"] == 3
    kz = doc["stages"]["kz"]["monodromy"]
    assert kz["a"]["rho"] == [[0, 0, -1, 0], [0, 0, 1, 1], [0, 1, 0, -1], [1, 0, 1, 1]]


def test_verify_accepts_report(o1_report, capsys):
    assert main(["--stage", "verify", "--input", str(o1_report)]) == 0
    assert "certificate verified" in capsys.readouterr().out


def test_verify_rejects_tampered_report(o1_report, tmp_path, capsys):
    doc = json.loads(o1_report.read_text())
    doc["stages"]["kz"]["monodromy"]["a"]["rho"][0][0] = 7
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["--stage", "verify", "--input", str(bad)]) == 2
    out = capsys.readouterr().out
    assert "certificate rejected" in out
    assert "kz" in out


def test_json_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["--builtin", "o1", "--format", "json", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_torus(capsys):
    assert main(["--builtin", "torus", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["stages"]["pinching"]["status"] == "skipped"
    assert doc["stages"]["orbit"]["size"] == 1


def test_non_transitive_input_is_an_error(capsys):
    assert main(["h=(1,2)(3); v=(1,2)(3); n=3"]) == 1
    assert "error in stage parse" in capsys.readouterr().err


def test_conflicting_sources(capsys):
    assert main(["--builtin", "o1", "h=(1); v=(1); n=1"]) == 1
    assert "exactly one" in capsys.readouterr().err


def test_single_stage_orbit(capsys):
    assert main(["--builtin", "o1", "--stage", "orbit"]) == 0
    out = capsys.readouterr().out
    assert "orbit size: 4, cusps: 1" in out


def test_single_stage_kz_prints_rho(capsys):
    assert main(["--builtin", "o1", "--stage", "kz"]) == 0
    out = capsys.readouterr().out
    assert "rho(a)" in out and "rho(b)" in out


def test_low_search_bound_withholds_verdict(capsys):
    assert main(["--builtin", "o1", "--max-syllables", "5", "--format", "json"]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["stages"]["arithmeticity"]["verdict"]["verdict"] == "withheld"


def test_input_file_with_comments(tmp_path, capsys):
    f = tmp_path / "l.txt"
    f.write_text("# L-shaped origami\nh=(1,2)(3)\nv=(1,3)(2)  # columns\nn=3\n")
    main(["--input", str(f), "--stage", "stratum"])
    assert "H(2), genus 2" in capsys.readouterr().out


def test_cache_dir_and_strict_cache_miss(tmp_path, capsys):
    cache = tmp_path / "cache"
    assert main(["--builtin", "o1", "--stage", "pingpong", "--cache-dir", str(cache)]) == 1
    assert "missing upstream result" in capsys.readouterr().err
    assert main(["--builtin", "o1", "--cache-dir", str(cache)]) == 0
    capsys.readouterr()
    assert main(["--builtin", "o1", "--stage", "pingpong", "--cache-dir", str(cache)]) == 0
    assert "Z/3 * Z/3" in capsys.readouterr().out


def test_dot_output(tmp_path):
    dot = tmp_path / "orbit.dot"
    assert main(["--builtin", "o1", "--stage", "orbit", "--dot", str(dot)]) == 0
    assert dot.read_text().count("->") == 12


def test_library_round_trip():
    cfg = RunConfig(parse_origami("h=(1,2)(3); v=(1,3)(2); n=3"))
    doc = json.loads(dumps(certify_all(cfg)))
    assert verify_report(doc).ok


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "origami_kz", "--builtin", "torus", "--stage", "stratum"],
                       capture_output=True, text=True)
    assert "H(0)" in r.stdout
