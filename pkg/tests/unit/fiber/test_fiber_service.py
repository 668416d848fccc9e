from collections.abc import Callable

import pytest

from torus_bns_mcp.errors import CharacterError
from torus_bns_mcp.services.fiber.fiber_service import fiber_classify


class TestFiberClassify:
    """The fiber tool."""

    def test_fibration_with_oracle(self, document: Callable[[str], str]) -> None:
        report = fiber_classify(document("f2_identity"), "x1=0, x2=0, t=1", oracle=True)
        assert report["in_sigma"] is True
        assert report["rank"] == 2
        assert report["oracle_rank"] == 2
        assert report["agreement"] is True
        assert report["summary"] == ["rank 2", "hierarchy=oracle=2"]
        assert report["kernel"]["rank"] == 2

    def test_non_fibration(self, document: Callable[[str], str]) -> None:
        report = fiber_classify(document("f2_identity"), "x1=1, x2=0, t=0")
        assert report["in_sigma"] is False
        assert report["rank"] is None
        assert report["witness_element"] == "t"
        assert report["summary"] == ["not in Sigma(G); kernel virtually surjects onto F_infinity"]

    def test_circle(self, document: Callable[[str], str]) -> None:
        report = fiber_classify(document("circle2"), "a0=-1, a1=1, b2=0, t=1", oracle=True)
        assert report["rank"] == 4
        assert sorted(report["indices"]) == [1, 2]
        assert report["oracle_rank"] == 4
        assert report["kernel"]["free_factors"] == 2
        assert report["kernel"]["betti"] == 2

    def test_circle_canonical_fibration(self, document: Callable[[str], str]) -> None:
        report = fiber_classify(document("circle2"), "a0=0, a1=0, b2=0, t=1")
        assert report["rank"] == 3

    def test_character_must_vanish_on_relators(self, document: Callable[[str], str]) -> None:
        with pytest.raises(CharacterError, match="does not vanish"):
            fiber_classify(document("swap"), "x1=1, x2=0, t=0")
