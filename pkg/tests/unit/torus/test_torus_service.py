from collections.abc import Callable

import pytest

from torus_bns_mcp.errors import TorusBnsError
from torus_bns_mcp.services.torus.torus_service import torus_presentation


class TestTorusPresentation:
    """The presentation tool."""

    def test_automorphism(self, document: Callable[[str], str]) -> None:
        report = torus_presentation(document("f2_identity"))
        assert report["kind"] == "presentation"
        assert report["generators"] == ["x1", "x2", "t"]
        assert report["deficiency"] == 1
        assert report["lattice"]["b1"] == 3
        assert "root" not in report

    def test_graph(self, document: Callable[[str], str]) -> None:
        report = torus_presentation(document("circle2"))
        assert report["generators"] == ["a0", "a1", "b2", "t"]
        assert report["tree_edges"] == ["b1"]
        assert report["vertex_words"] == {"v0": "t", "v1": "t a1"}
        assert report["retracted"] == []
        assert report["lattice"]["b1"] == 3

    def test_rejects_gbs(self, document: Callable[[str], str]) -> None:
        with pytest.raises(TorusBnsError, match="expected a document of kind"):
            torus_presentation(document("khramtsov"))
