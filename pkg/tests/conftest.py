from __future__ import annotations

import pytest

from smashlab.expr import annotate
from smashlab.parser import Environment, parse_expr


@pytest.fixture(scope="session")
def env():
    return Environment.standard()


@pytest.fixture(scope="session")
def check(env):
    """Parse and typecheck an expression in one step."""

    def _check(text: str, prime: int = 2):
        return annotate(parse_expr(text, env), prime=prime)

    return _check
