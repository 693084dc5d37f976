import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

TESTS = Path(__file__).resolve().parent
REPO = TESTS.parent
CORPUS = REPO / "corpus" / "rotlog"
RENAME_CORPUS = TESTS / "corpora" / "rename"
GOLDEN = TESTS / "golden"


@pytest.fixture
def rotlog_session():
    """A session loaded with the committed sample corpus."""
    from splkit.backend import scan_workspace
    from splkit.protocol import Session

    session = Session()
    response = session.dispatch(scan_workspace(CORPUS))
    assert response["ok"], response
    return session
