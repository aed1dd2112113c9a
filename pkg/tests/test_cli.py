import os
import subprocess
import sys

import pytest

from rankforge.cli import main

SRC = os.path.join(os.path.dirname(__file__), "..", "src")

STRUCT_FILE = """signature
rel lt 2
end
structure L2 size 2
lt 0 1
end
"""

ACTION_FILE = """space size 3
group
elem e : 0 1 2
elem s : 1 0 2
end
basis all-subsets
"""

SUPP_FILE = """signature
rel edge 2
end
supported M support 2
edge 0 1
end
supported N support 3
edge 0 1
edge 1 2
end
"""


@pytest.fixture
def struct_path(tmp_path):
    p = tmp_path / "l2.txt"
    p.write_text(STRUCT_FILE)
    return str(p)


@pytest.fixture
def action_path(tmp_path):
    p = tmp_path / "sys1.act"
    p.write_text(ACTION_FILE)
    return str(p)


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = SRC + os.pathsep + env.get("PYTHONPATH", "")
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "rankforge", *args],
                          capture_output=True, text=True, env=env)


def test_scott_rank_records(struct_path, capsys):
    code = main(["scott-rank", struct_path, "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "RANK point=L2 delta=1 stab=1" in out


def test_scott_rank_malformed_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("structure X size 2\nend\n")
    code = main(["scott-rank", str(p), "--format", "records"])
    out = capsys.readouterr().out
    assert code == 2
    assert "RANK" not in out


def test_hjorth_records(action_path, capsys):
    code = main(["hjorth", action_path, "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "RANK point=0 delta=1 stab=1 m=0" in out
    assert "PART rank=1 points=0;1;2" in out


def test_hjorth_dump_and_point(action_path, capsys):
    code = main(["hjorth", action_path, "--format", "records", "--dump",
                 "--point", "2"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    leq = [l for l in out if l.startswith("LEQ ")]
    assert len(leq) == 81  # (3 points x 3 basis)^2 at the single stored level
    assert all(" level=1 " in l for l in leq)
    assert sum(1 for l in out if l.startswith("RANK ")) == 1


def test_hjorth_oracle_flag(action_path, capsys):
    code = main(["hjorth", action_path, "--format", "records", "--oracle"])
    out = capsys.readouterr().out
    assert code == 0
    assert "CHECK name=leq_oracle_equivalence verdict=pass" in out


def test_hjorth_logic(tmp_path, capsys):
    p = tmp_path / "structs.txt"
    p.write_text("signature\nrel edge 2\nend\n"
                 "structure A size 2\nedge 0 1\nend\n"
                 "structure B size 2\nend\n")
    code = main(["hjorth", "--logic", "--structures", str(p), "--n", "2",
                 "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "RANK point=A" in out and "RANK point=B" in out


def test_hjorth_symbolic_reports_violation(tmp_path, capsys):
    p = tmp_path / "supp.txt"
    p.write_text(SUPP_FILE)
    code = main(["hjorth", "--symbolic", "--structures", str(p),
                 "--support", "3", "--k", "2", "--format", "records"])
    out = capsys.readouterr().out
    assert code == 1
    assert "CHECK name=level_monotonicity verdict=fail witness=(" in out


def test_hjorth_symbolic_base_level(tmp_path, capsys):
    p = tmp_path / "supp.txt"
    p.write_text(SUPP_FILE)
    code = main(["hjorth", "--symbolic", "--structures", str(p),
                 "--support", "3", "--k", "2", "--max-level", "1",
                 "--format", "records"])
    out = capsys.readouterr().out
    assert code == 1  # truncated tables cannot stabilize
    assert "CHECK name=stabilization verdict=fail" in out


def test_hjorth_oversize_logic_budget(tmp_path, capsys):
    p = tmp_path / "structs.txt"
    p.write_text("signature\nrel edge 2\nend\nstructure A size 2\nend\n")
    code = main(["hjorth", "--logic", "--structures", str(p), "--n", "9"])
    assert code == 3


def test_verify_records_and_exit(capsys):
    code = main(["verify", "vaught", "--seed", "3", "--count", "6",
                 "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("CONFIG command=verify suite=vaught seed=3 ")
    assert "CHECK name=vaught_duality verdict=pass" in out


def test_verify_unknown_suite_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["verify", "nope"])
    assert err.value.code == 2


def test_compare_records(capsys):
    code = main(["compare", "--n", "2", "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "CHECK name=scott_implies_hjorth verdict=pass" in out
    assert any(line.startswith("PROFILE ") for line in out.splitlines())


def test_compare_empty_signature_degenerate(capsys):
    code = main(["compare", "--empty-signature", "--n", "2",
                 "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "CHECK name=scott_implies_hjorth verdict=pass" in out


def test_compare_budget_env(capsys):
    os.environ["RANKFORGE_BUDGET"] = "n=2"
    try:
        code = main(["compare", "--n", "3"])
    finally:
        del os.environ["RANKFORGE_BUDGET"]
    assert code == 3


def test_sizes_flag_parsing(capsys):
    code = main(["verify", "basis", "--seed", "1", "--count", "4",
                 "--sizes", "g≤4,x≤4,n≤2", "--format", "records"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sizes=g<=4,x<=4,n<=2" in out


def test_records_deterministic_across_processes():
    args = ["verify", "vaught", "--seed", "9", "--count", "5",
            "--format", "records"]
    first = run_cli(args, {"PYTHONHASHSEED": "1"})
    second = run_cli(args, {"PYTHONHASHSEED": "77"})
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
