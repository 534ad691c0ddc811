import math
import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from lazycg.algorithms import SolverConfig, lazy_cg_parameter_free
from lazycg.bench.cli import main
from lazycg.bench.config import ConfigError, parse_config
from lazycg.bench.trace_io import dumps_trace, loads_trace, read_trace
from lazycg.bench.verify import verify_trace
from lazycg.domains import ProbabilitySimplex
from lazycg.objectives import generate_regression_instance

OFFLINE = """
[experiment]
name = demo

[domain]
kind = simplex
n = 5

[objective]
generator = regression
density = 0.8
m = 6
seed = 4

[solver.textbook]
algorithm = lazy_cg_textbook
K = 1.1
max_iters = 200

[solver.free]
algorithm = lazy_cg_parameter_free
max_iters = 200

[solver.fw]
algorithm = vanilla_fw
max_iters = 200
"""

ONLINE = """
[experiment]
name = online

[domain]
kind = hypercube
n = 3

[stream]
generator = linear
rounds = 100
seed = 2

[solver.locg]
algorithm = lazy_online_cg
K = 1.0
"""


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_writes_one_trace_per_solver(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE)
    out = tmp_path / "out"
    code, stdout, _ = _run(["run", cfg, "--output-dir", str(out)], capsys)
    assert code == 0
    files = sorted(os.listdir(out))
    assert files == ["demo_free.csv", "demo_fw.csv", "demo_textbook.csv"]
    assert len(stdout.strip().splitlines()) == 3
    lazy = read_trace(out / "demo_free.csv")
    fw = read_trace(out / "demo_fw.csv")
    assert lazy.columns[:8] == ["t", "f", "phi", "wolfe_gap", "lp_calls", "cache_hits",
                                "answer", "elapsed_s"]
    assert len(lazy.rows) == len(fw.rows)
    assert lazy.rows[-1]["lp_calls"] < fw.rows[-1]["lp_calls"]
    assert "cache_hit_rate" in lazy.summary and lazy.params["solver"] == "free"


def test_verify_passes_on_fresh_traces(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE)
    _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)
    for name in ("textbook", "free", "fw"):
        code, stdout, _ = _run(["verify", str(tmp_path / f"demo_{name}.csv"), cfg], capsys)
        assert code == 0 and stdout.startswith("pass"), stdout


def test_verify_flags_first_corrupted_row(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE)
    _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)
    path = tmp_path / "demo_textbook.csv"
    data = read_trace(path)
    lines = path.read_text().splitlines()
    col = data.columns.index("phi")
    for t in (37, 80):
        fields = lines[t + 1].split(",")
        fields[col] = repr(float(fields[col]) * 0.5)
        lines[t + 1] = ",".join(fields)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    code, stdout, _ = _run(["verify", str(bad), cfg], capsys)
    assert code == 1
    assert stdout.startswith("fail at row t=37")


def test_verify_online_trace(tmp_path, capsys):
    cfg = _write(tmp_path, ONLINE)
    assert _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)[0] == 0
    code, stdout, _ = _run(["verify", str(tmp_path / "online_locg.csv"), cfg], capsys)
    assert code == 0 and stdout.startswith("pass")
    assert "aggregate gap <= h" in stdout


def test_verify_skips_large_domains(tmp_path, capsys):
    text = OFFLINE.replace("kind = simplex\nn = 5", "kind = spanning_tree\nnodes = 6")
    text = text.replace("[solver.textbook]\nalgorithm = lazy_cg_textbook\nK = 1.1\nmax_iters = 200\n", "")
    cfg = _write(tmp_path, text)
    assert _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)[0] == 0
    code, stdout, _ = _run(["verify", str(tmp_path / "demo_free.csv"), cfg], capsys)
    assert code == 0 and stdout.startswith("skipped: oracle-contract checks only")


def test_sweep_over_K(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE)
    code, _, _ = _run(["sweep", cfg, "--param", "K=1,1.1,2", "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    for k in ("1", "1.1", "2"):
        data = read_trace(tmp_path / f"demo_free_K={k}.csv")
        assert data.params["K"] == float(k)


@pytest.mark.parametrize("text,needle", [
    ("[domain]\nkind = simplex\nn = 3\n", "no [solver.*] sections"),
    (OFFLINE.replace("kind = simplex", "kind = cube"), "[domain] kind"),
    (OFFLINE.replace("K = 1.1", "K = fast"), "[solver.textbook] K"),
    (OFFLINE.replace("K = 1.1", "K = 0.5"), "solver.textbook"),
    (OFFLINE.replace("algorithm = vanilla_fw", "algorithm = nope"), "unknown algorithm"),
    (OFFLINE.replace("seed = 4", ""), "missing 'seed'"),
    (OFFLINE.replace("max_iters = 200\n\n[solver.fw]", "bogus = 1\n\n[solver.fw]"), "unknown solver option"),
    ("not an ini file", "exp.ini"),
])
def test_malformed_config_exits_2_without_output(tmp_path, capsys, text, needle):
    cfg = _write(tmp_path, text)
    out = tmp_path / "out"
    code, stdout, stderr = _run(["run", cfg, "--output-dir", str(out)], capsys)
    assert code == 2
    assert needle in stderr
    assert not out.exists()
    assert stdout == ""


def test_missing_config_file(tmp_path, capsys):
    code, _, stderr = _run(["run", str(tmp_path / "none.ini")], capsys)
    assert code == 2 and "none.ini" in stderr


def test_cli_flags(tmp_path, capsys):
    text = OFFLINE.replace("kind = simplex\nn = 5", "kind = hypercube\nn = 3")
    cfg = _write(tmp_path, text)
    code, _, _ = _run(["run", cfg, "--no-cache", "--seed", "9", "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    data = read_trace(tmp_path / "demo_free.csv")
    assert data.rows[-1]["cache_hits"] == 0 and data.params["seed"] == 9
    code, _, stderr = _run(["run", cfg, "--oracle", "augmentation", "--output-dir", str(tmp_path)],
                           capsys)
    # K = 1 in [solver.free] cannot use the augmentation oracle
    assert code == 2 and "K > 1" in stderr


def test_time_limit_truncates(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE.replace("max_iters = 200", "max_iters = 100000000"))
    code, stdout, _ = _run(["run", cfg, "--time-limit", "0.2", "--output-dir", str(tmp_path)], capsys)
    assert code == 0 and "truncated" in stdout


def test_csv_round_trip_is_bit_exact():
    dom = ProbabilitySimplex(5)
    f = generate_regression_instance(dom, 0.6, 7, 2)
    tr = lazy_cg_parameter_free(f, dom, SolverConfig(max_iters=100))
    data = loads_trace(dumps_trace(tr))
    for rec, row in zip(tr.records, data.rows):
        for key, value in rec.items():
            if isinstance(value, float) and math.isnan(value):
                assert math.isnan(row[key])
            else:
                assert row[key] == value
    assert data.summary["positive"] == tr.positive_calls


def test_trace_without_columns_is_rejected():
    with pytest.raises(ValueError):
        loads_trace("t,f\n0,1\n")


def _numeric_content(path):
    """CSV text of every row without the wall-clock column."""
    data = read_trace(path)
    keep = [i for i, c in enumerate(data.columns) if c != "elapsed_s"]
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return [[ln.split(",")[i] for i in keep] for ln in lines]


def test_runs_are_reproducible_across_processes(tmp_path):
    cfg = _write(tmp_path, OFFLINE)
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        subprocess.run([sys.executable, "-m", "lazycg.bench", "run", cfg, "--output-dir", str(out)],
                       check=True, capture_output=True)
        outs.append(out)
    for name in ("demo_free.csv", "demo_textbook.csv", "demo_fw.csv"):
        assert _numeric_content(outs[0] / name) == _numeric_content(outs[1] / name)


def test_parse_config_reports_location(tmp_path):
    cfg = _write(tmp_path, OFFLINE.replace("density = 0.8", "density = lots"))
    with pytest.raises(ConfigError, match=r"\[objective\] density"):
        spec = parse_config(cfg)
        from lazycg.bench.config import build_domain, build_objective
        build_objective(spec, build_domain(spec))


def test_verify_report_object(tmp_path, capsys):
    cfg = _write(tmp_path, OFFLINE)
    _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)
    report = verify_trace(read_trace(tmp_path / "demo_textbook.csv"), parse_config(cfg))
    assert report.passed and "textbook rate" in report.checks


def test_verify_adversarial_trace(tmp_path, capsys):
    text = ONLINE.replace("algorithm = lazy_online_cg", "algorithm = run_adversarial")
    text = text.replace("kind = hypercube\nn = 3", "kind = simplex\nn = 3")
    cfg = _write(tmp_path, text)
    assert _run(["run", cfg, "--output-dir", str(tmp_path)], capsys)[0] == 0
    code, stdout, _ = _run(["verify", str(tmp_path / "online_locg.csv"), cfg], capsys)
    assert code == 0 and stdout.startswith("pass"), stdout
