import csv
import json
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from regret_team.cli import main
from regret_team.engine import ScenarioConfig
from regret_team.regret import DecisionModel, RegretParams
from regret_team.scenario import (
    SEARCH_PATH_ENV,
    ScenarioError,
    bundled_scenarios,
    dump_scenario,
    parse_scenario,
    resolve_scenario,
)
from regret_team.sensing import SensorModel

TINY = ScenarioConfig(
    name="tiny", n_robots=2, rows=3, cols=3, total_objects=3, horizon=3, beam_width=8, unit_cost=-3.0
)


@pytest.fixture
def tiny_file(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(dump_scenario(TINY))
    return path


def test_bundled_scenarios_parse():
    assert {"condition1", "condition2", "single_robot"} <= set(bundled_scenarios())
    for name in bundled_scenarios():
        resolved = resolve_scenario(name)
        parse_scenario(resolved.text, resolved.source)


unit = st.floats(min_value=0.01, max_value=1.0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(1, 6),
    unit,
    unit,
    st.floats(min_value=-100, max_value=-0.01),
    st.one_of(st.none(), st.integers(1, 64)),
    st.sampled_from(list(DecisionModel)),
    st.one_of(st.none(), st.floats(min_value=1.0, max_value=200.0)),
    st.booleans(),
)
def test_round_trip(n_robots, side, a, b, unit_cost, beam, model, c_range, stop):
    cfg = ScenarioConfig(
        name="rt",
        n_robots=n_robots,
        rows=side,
        cols=side,
        total_objects=1,
        sensor=SensorModel(a, b),
        sensor_overrides=((0, SensorModel(b, a)),),
        unit_cost=unit_cost,
        beam_width=beam,
        decision_model=model,
        c_range=c_range,
        regret=RegretParams(alpha1=0.5, beta2=0.9),
        stop_when_all_found=stop,
    )
    text = dump_scenario(cfg)
    assert parse_scenario(text) == cfg
    assert dump_scenario(parse_scenario(text)) == text


def _error_line(text):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, "x.toml")
    return info.value.line


def test_unknown_key_reports_its_line():
    text = dump_scenario(TINY)
    lines = text.splitlines()
    idx = lines.index("[planner]")
    lines.insert(idx + 2, "hoizon = 3")
    assert _error_line("\n".join(lines)) == idx + 3


def test_unknown_section_reports_header_line():
    text = dump_scenario(TINY) + "\n[extras]\nfoo = 1\n"
    line = _error_line(text)
    assert text.splitlines()[line - 1] == "[extras]"


def test_wrong_type_and_version():
    text = dump_scenario(TINY)
    bad = text.replace("horizon = 3", 'horizon = "3"')
    assert bad.splitlines()[_error_line(bad) - 1].startswith("horizon")
    assert _error_line(text.replace("version = 1", "version = 2")) == 1
    with pytest.raises(ScenarioError, match="x.toml:"):
        parse_scenario("not [valid", "x.toml")


def test_semantic_error_is_reported():
    text = dump_scenario(TINY).replace("n_robots = 2", "n_robots = 0")
    with pytest.raises(ScenarioError, match="n_robots"):
        parse_scenario(text)


def test_search_path(tmp_path, tiny_file, monkeypatch):
    other = tmp_path / "lib"
    other.mkdir()
    (other / "mine.toml").write_text(dump_scenario(replace(TINY, name="mine")))
    monkeypatch.setenv(SEARCH_PATH_ENV, str(other))
    assert parse_scenario(resolve_scenario("mine").text).name == "mine"
    assert resolve_scenario(str(tiny_file)).source == str(tiny_file)
    with pytest.raises(ScenarioError):
        resolve_scenario("nope")


def test_run_writes_outputs(tmp_path, tiny_file, capsys):
    out = tmp_path / "out"
    assert main(["run", str(tiny_file), "--out", str(out), "--render", "--dump-path", "0:2"]) == 0
    for rel in [
        "scenario.toml",
        "comparison.txt",
        "comparison.csv",
        "regret/events.jsonl",
        "regret/metrics.json",
        "regret/queue.svg",
        "regret/path.svg",
        "ev/events.jsonl",
    ]:
        assert (out / rel).is_file(), rel
    table = (out / "comparison.txt").read_text()
    assert "Average queue length:" in table and "Expected Value" in table
    with open(out / "comparison.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["metric", "regret", "ev"] and len(rows) == 5
    assert "tiny" in capsys.readouterr().out


def test_run_is_reproducible(tmp_path, tiny_file):
    for d in ("a", "b"):
        assert main(["run", str(tiny_file), "--out", str(tmp_path / d), "--render"]) == 0
    for rel in ("regret/events.jsonl", "ev/events.jsonl", "regret/queue.svg", "comparison.csv"):
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_seed_override(tmp_path, tiny_file):
    main(["run", str(tiny_file), "--model", "regret", "--seed", "9", "--out", str(tmp_path)])
    header = json.loads((tmp_path / "regret/events.jsonl").read_text().splitlines()[0])
    assert header["seed"] == 9
    assert "seed = 9" in (tmp_path / "scenario.toml").read_text()


def test_malformed_scenario_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(dump_scenario(TINY) + "bogus = 1\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "bad.toml:" in capsys.readouterr().err
    assert main(["validate", str(bad)]) == 2
    assert main(["run", "does-not-exist", "--out", str(tmp_path / "o")]) == 2


def test_step_limit_exit_code(tmp_path, tiny_file, monkeypatch):
    monkeypatch.setattr(ScenarioConfig, "max_steps", property(lambda self: 2))
    assert main(["run", str(tiny_file), "--out", str(tmp_path)]) == 3
    # the partial log is still written
    assert (tmp_path / "regret/events.jsonl").is_file()


def test_render(tmp_path, tiny_file):
    main(["run", str(tiny_file), "--model", "regret", "--out", str(tmp_path), "--dump-path", "1:1"])
    log = tmp_path / "regret/events.jsonl"
    assert main(["render", str(log), "-o", str(tmp_path / "q1.svg")]) == 0
    assert main(["render", str(log), "-o", str(tmp_path / "q2.svg")]) == 0
    assert (tmp_path / "q1.svg").read_bytes() == (tmp_path / "q2.svg").read_bytes()
    assert (tmp_path / "q1.svg").read_bytes().lstrip().startswith(b"<?xml")
    assert main(["render", str(tmp_path / "regret/path.json")]) == 0
    assert (tmp_path / "regret/path.svg").is_file()


def test_render_empty_queue_timeline(tmp_path, tiny_file):
    cfg = replace(TINY, c_wrong=0.0)
    path = tmp_path / "quiet.toml"
    path.write_text(dump_scenario(cfg))
    main(["run", str(path), "--model", "regret", "--out", str(tmp_path)])
    assert main(["render", str(tmp_path / "regret/events.jsonl")]) == 0


@pytest.mark.parametrize("content", ["", "{not json\n", '{"type": "header"}\n'])
def test_render_bad_input(tmp_path, content):
    src = tmp_path / "in.jsonl"
    src.write_text(content)
    assert main(["render", str(src)]) == 2


def test_validate(tiny_file, capsys):
    assert main(["validate", "condition1", "condition2", str(tiny_file)]) == 0
    assert capsys.readouterr().out.count("ok:") == 3


@pytest.mark.parametrize("workers", [1, 2])
def test_sweep(tmp_path, tiny_file, workers):
    code = main(["sweep", str(tiny_file), "--seeds", "0", "1", "--out", str(tmp_path), "--workers", str(workers)])
    assert code == 0
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [(r["seed"], r["model"]) for r in rows] == [
        ("0", "regret"), ("0", "ev"), ("1", "regret"), ("1", "ev")
    ]
    assert all(r["status"] == "ok" for r in rows)
