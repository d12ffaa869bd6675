from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from goalnet import collab
from goalnet.persistence import Store


@pytest.fixture
def store():
    s = Store.in_memory()
    for login in ("lisiyao", "yuhan", "chen"):
        collab.register_user(s, login)
    yield s
    s.close()


@pytest.fixture
def sdlc():
    from goalnet import sample_nets

    return sample_nets.sdlc_document()


@pytest.fixture
def sdlc_prefix():
    """The SDLC net as drawn, before net properties are configured."""
    from goalnet import sample_nets

    return sample_nets.sdlc_document(with_properties=False)
