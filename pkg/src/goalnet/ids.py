"""Entity identity: random version-4 UUIDs, lowercase hyphenated."""
from __future__ import annotations

import random
import re
import uuid

ENTITY_ID_RE = re.compile(
    r"^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$"
)


def new_uuid(rng: random.Random | None = None) -> str:
    """Return a fresh v4 UUID string.

    Passing a seeded ``rng`` makes the id stream reproducible, which keeps
    fixture documents byte-stable across processes.
    """
    if rng is None:
        return str(uuid.uuid4())
    return str(uuid.UUID(int=rng.getrandbits(128), version=4))


def is_entity_id(value: str) -> bool:
    return bool(ENTITY_ID_RE.match(value))
