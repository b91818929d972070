import pytest

from sdneig.checks import SUITES, run_suite
from sdneig.errors import InvalidParameterError


@pytest.mark.parametrize("suite", SUITES)
def test_suites_pass(suite):
    report = run_suite(suite, seed=0)
    assert report["suite"] == suite
    assert report["passed"]
    for case in report["cases"]:
        assert case["ok"]
        assert "seed" in case and "margin" in case and "property" in case


def test_unknown_suite_rejected():
    with pytest.raises(InvalidParameterError):
        run_suite("bogus", seed=0)
