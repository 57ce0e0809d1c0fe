"""The fourteen acceptance criteria at their stated tolerances.

One test per criterion; a pass/fail line per criterion is printed in the
terminal summary (and when the file is run as a script).
"""

import pytest

from dirext.acceptance import CRITERIA, representation

STATED_ATOM = (
    "the stated mass 0.92300 ± 1e-5 of the atom at s = 1/2 disagrees with the closed form "
    "(e^{4/3} - e^{2/3})/2 = 0.9229669 by 3.3e-5; the computed mass matches the closed form to 1e-12"
)


def _param(c):
    marks = [pytest.mark.xfail(strict=True, reason=STATED_ATOM)] if c.number == 10 else []
    return pytest.param(c, id=f"criterion_{c.number:02d}", marks=marks)


@pytest.mark.parametrize("criterion", [_param(c) for c in CRITERIA])
def test_criterion(criterion, request):
    result = criterion()
    lines = request.config.__dict__.setdefault("acceptance_lines", {})
    lines[result.number] = result.line()
    print(result.line())
    assert result.passed, result.details


@pytest.fixture(scope="module")
def representation_result():
    return representation()


def test_criterion_10_representation_parts(representation_result):
    check = representation_result.details["check"]
    assert check["pass"]
    assert check["sup"]["exact"]
    for key in ("energy", "l2"):
        assert check[key]["difference"] <= 1e-6 * max(1.0, abs(check[key]["x_space"]))


def test_criterion_10_atom_matches_closed_form(representation_result):
    atom = representation_result.details["atom_half"]
    assert atom["position"] == 0.5
    assert atom["closed_form_pass"]
    assert atom["mass"] == pytest.approx(atom["closed_form"], abs=1e-12)


if __name__ == "__main__":  # pragma: no cover
    for c in CRITERIA:
        print(c().line())
