import csv
import io
import json
import subprocess
import sys

from detkmeans.cli import main


def test_csv_to_stdout(capsys):
    assert main(["bench", "--data", "builtin:iris", "--methods", "vp,pp"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["method"] for r in rows] == ["vp", "pp"]
    assert all(round(float(r["IS"])) == 8 for r in rows)


def test_json_to_file(tmp_path):
    out = tmp_path / "report.json"
    code = main(["bench", "--data", "builtin:wine", "--format", "json", "--out", str(out), "--max-iters", "3"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["meta"]["max_iterations"] == 3
    assert all(c["iterations"] <= 3 for c in report["cells"])


def test_cell_error_exit_code(capsys):
    assert main(["bench", "--data", "builtin:iris,k=200", "--methods", "mm"]) == 1
    assert "K exceeds N" in capsys.readouterr().err


def test_config_error_exit_code(capsys):
    assert main(["bench", "--data", "builtin:iris", "--methods", "forgy"]) == 2
    assert main(["bench"]) == 2
    assert main(["bench", "--data", "builtin:iris", "--epsilon", "-1"]) == 2


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("datasets: [builtin:iris]\nmethods: [mm, kk]\nformat: json\n")
    assert main(["bench", "--config", str(cfg), "--methods", "pp", "--no-normalize", "--format", "md"]) == 0
    out = capsys.readouterr().out
    assert "normalize: False" in out and "| PP |" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "detkmeans", "bench", "--data", "builtin:iris", "--methods", "mm", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("dataset,method,K,IS,FS,NI")
