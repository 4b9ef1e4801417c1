import json

import pytest

from gfsum import cli
from gfsum.pipeline import (
    SCENARIOS,
    AssertStep,
    BlockStep,
    PipelineError,
    PipelineSyntaxError,
    StepError,
    builtin_scenario,
    emit_report,
    lookup,
    parse_h1_expression,
    parse_pipeline,
    pipeline_from_json,
    report_text,
    run_pipeline,
)


def test_parse_minimal_block():
    p = parse_pipeline('{"steps": [{"op": "block", "kind": "t4", "name": "R"}]}')
    assert len(p.steps) == 1
    step = p.steps[0]
    assert isinstance(step, BlockStep) and step.kind == "t4" and step.name == "R"


def test_u_scenario_has_six_construction_steps():
    p = builtin_scenario("U")
    assert len(p.construction_steps) == 6
    assert all(isinstance(s, AssertStep) for s in p.assertions)


def test_dangling_name_is_step_error():
    doc = {"steps": [{"op": "blow_up", "target": "nope", "count": 1, "name": "Q"}]}
    with pytest.raises(StepError) as info:
        pipeline_from_json(doc)
    assert info.value.index == 0
    assert "nope" in str(info.value)


def test_syntax_error_reports_position():
    with pytest.raises(PipelineSyntaxError) as info:
        parse_pipeline('{"steps": [\n  {"op": "block",,}\n]}')
    assert info.value.line == 2
    assert info.value.column > 0


@pytest.mark.parametrize(
    "doc, needle",
    [
        ({"steps": [{"op": "block", "kind": "k3", "name": "K"}]}, "unknown block kind"),
        ({"steps": [{"op": "explode", "name": "K"}]}, "unknown op"),
        ({"steps": [{"op": "block", "kind": "t4", "name": "K", "color": 1}]}, "unknown field"),
        ({"steps": [], "extra": 1}, "unknown top-level"),
        ({"steps": [{"op": "block", "kind": "t4"}]}, "missing field"),
    ],
)
def test_structural_errors(doc, needle):
    with pytest.raises(PipelineError, match=needle):
        pipeline_from_json(doc)


@pytest.mark.parametrize("name", SCENARIOS)
def test_scenarios_pass(name):
    reports = run_pipeline(builtin_scenario(name))
    assert reports
    for r in reports:
        d = r.to_dict()
        assert d["status"] == "pass", [a for a in d["asserts"] if a["status"] != "pass"]
        assert d["asserts"]


def test_u_report_json_fields():
    (r,) = run_pipeline(builtin_scenario("U"))
    d = json.loads(emit_report([r], "json"))[0]
    assert d["b2_plus"] == 1 and d["b2_minus"] == 3
    assert d["K_squared"] == 6
    assert d["homology_note"] == "homology-level only — π₁ not computed"


def test_v_report_text():
    (r,) = run_pipeline(builtin_scenario("V"))
    text = report_text(r.to_dict())
    assert "3 ℂP² # 5 ℂP²bar" in text


def test_x_report_text_canonical_line():
    (r,) = run_pipeline(builtin_scenario("X"))
    assert "canonical class: absent (rim tori rank 2)" in report_text(r.to_dict())


def test_empty_report_list():
    assert emit_report([], "json") == "[]\n"
    assert emit_report([], "text") == ""


def test_round_trip_through_text():
    for name in SCENARIOS:
        p = builtin_scenario(name)
        assert parse_pipeline(p.to_text()) == p


def test_runs_are_deterministic():
    a = emit_report(run_pipeline(builtin_scenario("X")), "json")
    b = emit_report(run_pipeline(builtin_scenario("X")), "json")
    assert a == b


def test_failed_assert_is_reported_not_raised():
    p = builtin_scenario("XK").to_json()
    p["steps"].append({"op": "assert", "target": "XK", "check": "b2", "expected": 3})
    (r,) = run_pipeline(pipeline_from_json(p))
    assert r.to_dict()["status"] == "fail"


def test_unknown_check_is_step_error():
    p = builtin_scenario("XK").to_json()
    p["steps"].append({"op": "assert", "target": "XK", "check": "no.such.key", "expected": 0})
    with pytest.raises(StepError):
        run_pipeline(pipeline_from_json(p))


def test_lookup_longest_key():
    data = {"checks": {"adjunction:B_U": {"status": "pass"}}, "surfaces": {"Sigma''": {"genus": 2}}}
    assert lookup(data, "checks.adjunction:B_U.status") == "pass"
    assert lookup(data, "surfaces.Sigma''.genus") == 2
    with pytest.raises(KeyError):
        lookup(data, "checks.missing")


def test_h1_expressions():
    labels = ("a1", "b1", "x", "b")
    assert parse_h1_expression("-a1", labels) == (-1, 0, 0, 0)
    assert parse_h1_expression("2x - b", labels) == (0, 0, 2, -1)
    assert parse_h1_expression("0", labels) == (0, 0, 0, 0)
    with pytest.raises(ValueError, match="unknown H1 generator"):
        parse_h1_expression("q", labels)
    with pytest.raises(ValueError):
        parse_h1_expression("x b", labels)


def test_verbose_hook_sees_every_step():
    seen = []
    p = builtin_scenario("U")
    run_pipeline(p, on_step=lambda i, step, report: seen.append(i))
    assert len(seen) == len(p.construction_steps)


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["scenario", "U"]) == 0
    assert "K" in capsys.readouterr().out

    bad_assert = builtin_scenario("XK").to_json()
    bad_assert["steps"].append({"op": "assert", "target": "XK", "check": "b2", "expected": 3})
    f1 = tmp_path / "fail.json"
    f1.write_text(json.dumps(bad_assert))
    assert cli.main(["run", str(f1)]) == 1

    f2 = tmp_path / "broken.json"
    f2.write_text("{not json")
    assert cli.main(["run", str(f2)]) == 2
    assert "line 1" in capsys.readouterr().err

    f3 = tmp_path / "dangling.json"
    f3.write_text(json.dumps({"steps": [{"op": "resolve", "target": "M", "surfaces": ["a", "b"],
                                         "new_label": "c", "name": "M"}]}))
    assert cli.main(["run", str(f3)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2


def test_cli_out_and_json(tmp_path):
    out = tmp_path / "u.json"
    assert cli.main(["scenario", "U", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data[0]["label"] == "U" and data[0]["K_squared"] == 6


def test_cli_verbose(capsys):
    assert cli.main(["--verbose", "scenario", "YK"]) == 0
    assert "after step 0" in capsys.readouterr().err
