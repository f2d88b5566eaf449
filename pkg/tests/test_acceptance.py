"""Release criteria: every check the package promises, at full scale.

These mirror the CLI ``verify`` command exactly; the heavy lattice runs
(criteria 5-7, 10-12) dominate the runtime of the whole suite.
"""

import pytest

from meiodrive import acceptance


@pytest.mark.parametrize("index", range(1, 14))
def test_criterion(index):
    result = acceptance.ALL[index - 1]()
    print(result.line())
    assert result.passed, result.detail
