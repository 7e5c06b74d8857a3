import json

from rovella.cli import main


def test_constants_command(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["constants", "--out", str(out)]) == 0
    payload = json.loads((out / "constants.json").read_text())
    assert payload["Delta"] == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "constants"


def test_invalid_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no separator here\n")
    assert main(["constants", "--config", str(cfg),
                 "--out", str(tmp_path / "o")]) == 2


def test_invalid_constants_exit_2(tmp_path):
    assert main(["constants", "--alpha", "0.5",
                 "--out", str(tmp_path / "o")]) == 2


def test_pipeline_failure_exits_1(tmp_path, capsys):
    # no super-attractor of hitting index 2 exists in the range
    assert main(["super-search", "--k", "2", "--lo", "0", "--hi", "0.4",
                 "--out", str(tmp_path / "o")]) == 1


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("a = 0.1\nn = 5\n")
    out = tmp_path / "o1"
    assert main(["orbit", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "orbit.csv").read_text().splitlines()
    assert len(lines) == 6
    out2 = tmp_path / "o2"
    assert main(["orbit", "--config", str(cfg), "--n", "8",
                 "--out", str(out2)]) == 0
    assert len((out2 / "orbit.csv").read_text().splitlines()) == 9


def test_byte_identical_reruns(tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(["measure", "--a", "0.32", "--n", "20000",
                     "--out", str(out)]) == 0
        outs.append((out / "measure.csv").read_bytes())
    assert outs[0] == outs[1]


def test_super_search_artifact(tmp_path):
    out = tmp_path / "ss"
    assert main(["super-search", "--k", "3", "--lo", "0.2", "--hi", "0.4",
                 "--out", str(out)]) == 0
    lines = (out / "hits.csv").read_text().splitlines()
    assert lines[0] == "a,k,period,type,residual"
    a = float(lines[1].split(",")[0])
    assert abs(a - 0.2984) < 1e-3
