import random
from fractions import Fraction

import pytest

from lvint.poly import PARAMS

_ACCEPTANCE: dict = {}


def random_point(rng: random.Random, span: int = 5, den: int = 3) -> dict:
    return {n: Fraction(rng.randint(-span, span), rng.randint(1, den)) for n in PARAMS.names}


@pytest.fixture
def record_criterion():
    """Register a one-line acceptance outcome; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE[number] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
