import random

import pytest

from lammu.props import SUITES, SuiteReport, reaches, run_suite, sample_object, sample_sn
from lammu.reduction import eta_max, step_all
from lammu.syntax import free_names, free_vars, parse


@pytest.mark.parametrize("suite", SUITES)
@pytest.mark.parametrize("calculus", ["lmu", "lmus"])
def test_suites_pass_on_a_small_run(suite, calculus):
    report = run_suite(suite, count=15, seed=11, max_size=9, calculus=calculus)
    assert report.ok, report.failures


def test_reports_are_deterministic():
    a = run_suite("sr", 10, 5, 9, "lmus")
    b = run_suite("sr", 10, 5, 9, "lmus")
    assert a == b and a.to_json() == b.to_json()


def test_report_json_shape():
    report = SuiteReport("sr", "lmu", 1, 3, 8, 3, ((2, "boom"),))
    data = report.to_json()
    assert not report.ok
    assert data["failures"] == [{"case": 2, "detail": "boom"}]
    assert "1 failure" in report.summary()


def test_unknown_suite_or_calculus():
    with pytest.raises(ValueError):
        run_suite("nope")
    with pytest.raises(ValueError):
        run_suite("sr", calculus="pi")


def test_sampled_objects_are_normalizing_when_requested():
    rng = random.Random(0)
    for _ in range(20):
        assert eta_max(sample_sn(rng, 10, "lmu"), 20_000) is not None


def test_sampled_lmus_objects_are_closed():
    rng = random.Random(1)
    for _ in range(20):
        o = sample_object(rng, 10, "lmus")
        assert not free_vars(o) and not free_names(o)


def test_reaches():
    t = parse(r"(\x.x x) ((\y.y) z)")
    assert reaches(t, parse("z z"), step_all) == 2
    assert reaches(t, t, step_all) == 0
    assert reaches(parse("x"), parse("y"), step_all) is None


def test_stranded_replacement_detection():
    from lammu.lmus import nonerasing_step_all
    from lammu.props import strands_replacement
    (s,) = nonerasing_step_all(parse(r"\x.\y.mu g.(([a] x){b//a.y}){a//g.x}"))
    assert strands_replacement(s)
    steps = nonerasing_step_all(parse(r"mu b.([a] mu c.[a] x){a//b.u}"))
    assert steps and not any(strands_replacement(t) for t in steps)
