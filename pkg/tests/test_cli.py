import json

from conftest import LAMPS_TV_FLOORPLAN
from mrplan.cli import main
from mrplan.model import RobotSpec


def test_plan_exec_eval_roundtrip(tmp_path, capsys):
    plan, trace, out = tmp_path / "p.dsl", tmp_path / "t.jsonl", tmp_path / "m.json"
    assert main(["plan", "--task", "cp01", "--out", str(plan)]) == 0
    assert plan.read_text().startswith("plan {")
    assert main(["exec", str(plan), "--task", "cp01", "--out", str(trace)]) == 0
    assert main(["eval", str(trace), "--task", "cp01", "--out", str(out)]) == 0
    record = json.loads(out.read_text())
    assert record["sr"] == 1 and record["exe"] == 1.0


def test_plan_to_stdout_random(capsys):
    assert main(["plan", "--task", "sm01", "--planner", "random", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["plan", "--task", "sm01", "--planner", "random", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first


def test_plan_llm_with_mock_and_transcript(tmp_path, capsys):
    cfg = tmp_path / "mock.toml"
    cfg.write_text('kind = "oracle-mock"\n')
    transcript = tmp_path / "t.jsonl"
    code = main(["plan", "--task", "cx02", "--planner", "llm", "--backend-config", str(cfg),
                 "--transcript", str(transcript)])
    assert code == 0 and "Patrol(" in capsys.readouterr().out
    assert len(transcript.read_text().splitlines()) == 3


def test_exec_with_explicit_files(tmp_path, capsys):
    fp = tmp_path / "fp.json"
    fp.write_text(json.dumps(LAMPS_TV_FLOORPLAN))
    robots = tmp_path / "r.json"
    robots.write_text(json.dumps([RobotSpec.of(1, "GoToObject", "SwitchOff").to_dict()]))
    plan = tmp_path / "p.dsl"
    plan.write_text("plan { assign robot1 { GoToObject(FloorLamp); SwitchOff(FloorLamp); } }")
    assert main(["exec", str(plan), "--floorplan", str(fp), "--robots", str(robots)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[-1])["succeeded"] == 2


def test_exec_reports_syntax_error(tmp_path, capsys):
    plan = tmp_path / "p.dsl"
    plan.write_text("plan { assign robot1 { Fly(Lamp); } }")
    assert main(["exec", str(plan), "--task", "el01"]) == 2
    assert "Fly" in capsys.readouterr().err


def test_bench_and_validate(tmp_path, capsys):
    assert main(["bench", "--out", str(tmp_path), "--task-id", "el01", "--task-id", "cp02"]) == 0
    out = capsys.readouterr().out
    assert "| elemental | 1.00 | 1.00 | 1.00 | 1.00 | 1.00 | 1 | 0 |" in out
    assert main(["validate"]) == 0
    assert "36 tasks (elemental 6, simple 8, compound 14, complex 8); 0 error(s)" in capsys.readouterr().out


def test_ablate_with_mock(capsys):
    assert main(["ablate", "--out", "", "--task-id", "el01"]) == 0
    rows = [line.split("|")[1].strip() for line in capsys.readouterr().out.splitlines()[2:] if line.startswith("|")]
    assert rows == ["full", "no-comments", "no-summary", "no-both", "no-coalition"]


def test_errors_exit_two(capsys):
    assert main(["plan", "--task", "zz99"]) == 2
    assert main(["validate", "--dataset", "/nonexistent/dir"]) == 2
