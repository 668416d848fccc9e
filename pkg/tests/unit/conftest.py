from collections.abc import Callable
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_path() -> Callable[[str], Path]:
    """Path of a sample input document by file stem."""

    def resolve(name: str) -> Path:
        return DATA_DIR / f"{name}.txt"

    return resolve


@pytest.fixture
def document() -> Callable[[str], str]:
    """Text of a sample input document by file stem."""

    def read(name: str) -> str:
        return (DATA_DIR / f"{name}.txt").read_text(encoding="utf-8")

    return read
