import pytest

from catrewire.casebook import (
    CASES,
    PARKING,
    double_factorial,
    get_case,
    lambda_counts,
    run_case,
    tutte_ns_count,
)
from catrewire.trees import count_nonneg
from catrewire.necklace import Q_NS


@pytest.mark.parametrize("n, want", [(-1, 1), (0, 1), (1, 1), (5, 15), (6, 48)])
def test_double_factorial(n, want):
    assert double_factorial(n) == want


@pytest.mark.parametrize("n, want", [(1, (1, 2)), (2, (4, 12)), (3, (32, 128)), (4, (336, 1680))])
def test_lambda_counts(n, want):
    assert lambda_counts(n) == want


def test_lambda_relation_up_to_ten():
    for n in range(1, 11):
        f, c = lambda_counts(n)
        assert c == (n + 1) * f


@pytest.mark.parametrize("fn", [lambda_counts, tutte_ns_count])
def test_oracles_reject_zero(fn):
    with pytest.raises(ValueError):
        fn(0)


def test_tutte():
    assert [tutte_ns_count(n) for n in range(1, 9)] == [1, 2, 6, 22, 91, 408, 1938, 9614]
    assert count_nonneg(Q_NS, 1, 0) == 1


def test_registry_names():
    assert list(CASES) == ["lambda", "nonseparable", "parking", "triangulation", "linear-basic", "all-necklaces"]
    with pytest.raises(KeyError):
        get_case("no-such-case")


def test_parking_system_shape():
    words = sorted(n.word for n in PARKING.necklaces())
    assert len(words) == 14 and "" in words and "t" in words and "ddt" in words


@pytest.mark.parametrize("name", list(CASES))
def test_case_passes(name):
    res = run_case(name)
    assert res.ok, "\n".join(res.lines())


def test_case_sizes():
    rows = dict((label, ok) for label, ok, _ in run_case("lambda").rows)
    assert rows["n=4 c_n by series"]
    rows = dict((label, ok) for label, ok, _ in run_case("linear-basic").rows)
    assert rows["n=12 f_n = n - 1"]
    rows = dict((label, ok) for label, ok, _ in run_case("nonseparable").rows)
    assert rows["n=5 Tutte count by enumeration"]
