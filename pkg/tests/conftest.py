import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from gridbook.session import Session
from gridbook.workbook import Workbook


@pytest.fixture
def wb() -> Workbook:
    return Workbook()


@pytest.fixture
def session() -> Session:
    return Session()


@pytest.fixture
def dispatch(session):
    counter = iter(range(10_000))

    def _send(verb: str, **params):
        return session.dispatch({"id": next(counter), "verb": verb,
                                 "params": params})

    _send.session = session
    return _send
