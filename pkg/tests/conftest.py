from __future__ import annotations

import pytest

from shipgame.levels import LevelPack, LevelSpec, load_level_pack
from shipgame.syntax import parse_program


@pytest.fixture(scope="session")
def pack() -> LevelPack:
    return load_level_pack()


@pytest.fixture(scope="session")
def cryo(pack) -> LevelSpec:
    return pack.level(1)


@pytest.fixture(scope="session")
def cryo_program(cryo):
    return parse_program(cryo.cut_source, "cut", file_id="component.ship")
