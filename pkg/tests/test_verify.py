import pytest

from catrewire.necklace import Q_LAMBDA, Q_NS, q_all
from catrewire.trees import ResourceLimitError
from catrewire.verify import (
    CheckResult,
    SUITES,
    bijection_check,
    marked_vertex_check,
    run_all,
    series_check,
)


def test_check_result():
    r = CheckResult("demo")
    assert not r.ok  # nothing checked yet
    r.add("a", True)
    r.add("b", False, "why")
    assert not r.ok
    assert r.lines() == ["demo: FAILED", "  a: ok", "  b: FAILED (why)"]
    assert r.to_data()["rows"][1] == {"label": "b", "ok": False, "detail": "why"}


@pytest.mark.parametrize("suite", list(SUITES))
@pytest.mark.parametrize("system", [Q_LAMBDA, Q_NS], ids=["lambda", "nonseparable"])
def test_suites_small(suite, system):
    res = SUITES[suite](system, 5)
    assert res.ok, "\n".join(res.lines())


def test_all4_bijection_small_sizes():
    res = bijection_check(q_all(4), 3)
    assert res.ok, "\n".join(res.lines())


def test_all4_bijection_hits_the_ceiling():
    with pytest.raises(ResourceLimitError):
        bijection_check(q_all(4), 8)


def test_marked_vertices_all4():
    assert marked_vertex_check(q_all(4), 3).ok


def test_series_check_all4():
    assert series_check(q_all(4), 8, bivariate_size=4).ok


def test_run_all():
    assert all(r.ok for r in run_all(Q_LAMBDA, 5, 8))
