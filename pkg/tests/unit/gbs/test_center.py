from collections.abc import Callable
from fractions import Fraction

import pytest

from torus_bns_mcp.document.input_document import parse_document
from torus_bns_mcp.errors import CharacterError, ElementaryGbsError, GbsError, TrivialCenterError
from torus_bns_mcp.services.gbs.center import (
    admissibility_table,
    admissible_parameters,
    betti,
    center,
    centrality_certificate,
    enumerate_fibrations,
    euler_characteristic,
    fiber_rank,
    gbs_membership,
    kappa_epsilon,
    kappa_via_elliptic,
    modular_map_loop,
)
from torus_bns_mcp.services.gbs.gbs_graph import GbsGraph, gbs_presentation
from torus_bns_mcp.services.torus.characters import parse_character


def _graph(text: str) -> GbsGraph:
    gamma = parse_document(text).gbs
    assert gamma is not None
    return gamma


@pytest.fixture
def khramtsov(document: Callable[[str], str]) -> GbsGraph:
    return _graph(document("khramtsov"))


class TestModularMap:
    def test_trivial_on_khramtsov_loop(self, khramtsov: GbsGraph) -> None:
        assert modular_map_loop(khramtsov, (1, 2, -1)) == 1
        assert modular_map_loop(khramtsov, ()) == 1

    def test_baumslag_solitar(self, document: Callable[[str], str]) -> None:
        assert modular_map_loop(_graph(document("bs12")), (1,)) == 2
        assert modular_map_loop(_graph(document("bs12")), (-1,)) == Fraction(1, 2)

    @pytest.mark.parametrize(
        "loop, message",
        [((1,), "not closed"), ((2, 1), "breaks at 'b'"), ((5,), "out of range")],
    )
    def test_rejects_bad_paths(self, khramtsov: GbsGraph, loop: tuple[int, ...], message: str) -> None:
        with pytest.raises(GbsError, match=message):
            modular_map_loop(khramtsov, loop)


class TestCenter:
    """Center, (kappa, epsilon) and b1."""

    def test_khramtsov(self, khramtsov: GbsGraph) -> None:
        c = center(khramtsov)
        assert c.base == "a"
        assert c.weights == {"a": 1, "b": 2}
        assert c.z_star == 4
        assert c.center_word() == (1, 1, 1, 1)
        assert c.vertex_kappas == {"a": 4, "b": 2}
        assert c.edge_kappas == {"e1": 1, "t": 2}
        assert euler_characteristic(c) == Fraction(-3, 4)
        assert kappa_epsilon(c) == (4, 3)
        assert betti(khramtsov) == 2

    def test_other_base_gives_the_same_invariants(self, khramtsov: GbsGraph) -> None:
        c = center(khramtsov, base="b")
        assert c.center_word() == (2, 2)
        assert kappa_epsilon(c) == (4, 3)

    def test_product_of_rose_with_circle(self, document: Callable[[str], str]) -> None:
        gamma = _graph(document("f2_rose_gbs"))
        c = center(gamma)
        assert c.center_word() == (1,)
        assert kappa_epsilon(c) == (1, 1)
        assert betti(gamma) == 3

    def test_trivial_center(self, document: Callable[[str], str]) -> None:
        with pytest.raises(TrivialCenterError, match="non-trivial modular map") as excinfo:
            center(_graph(document("bs12")))
        assert excinfo.value.witness == (1,)
        assert excinfo.value.modular_value == "2"

    @pytest.mark.parametrize(
        "text, message",
        [
            ("[gbs]\nvertex a b\nedge a b 2 2 tree\n", "Klein bottle group as an amalgam"),
            ("[gbs]\nvertex a\nedge a a 1 1 loop t\n", "Z\\^2 or the Klein bottle group"),
            ("[gbs]\nvertex a\nedge a a 1 -1 loop t\n", "Z\\^2 or the Klein bottle group"),
            ("[gbs]\nvertex a\n", "infinite cyclic"),
            ("[gbs]\nvertex a b\nedge a b 1 5 tree\n", "infinite cyclic"),
        ],
    )
    def test_elementary(self, text: str, message: str) -> None:
        with pytest.raises(ElementaryGbsError, match=message):
            center(_graph(text))

    def test_klein_fixture(self, document: Callable[[str], str]) -> None:
        with pytest.raises(ElementaryGbsError):
            center(_graph(document("klein_amalgam")))

    def test_centrality_certificate(self, khramtsov: GbsGraph) -> None:
        assert centrality_certificate(center(khramtsov)) == {"e1": 1, "t": 2}


class TestFibrations:
    """Membership, monodromy order and fiber rank of GBS characters."""

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_enumeration(self, khramtsov: GbsGraph, p: int) -> None:
        fibration = enumerate_fibrations(center(khramtsov), p)
        assert fibration.monodromy_order == 4 * p
        assert fibration.fiber_rank == 3 * p + 1
        assert fibration.character.values == (p, 2 * p, 1)

    def test_enumeration_needs_surjective_character(self, khramtsov: GbsGraph) -> None:
        with pytest.raises(GbsError, match="not surjective"):
            enumerate_fibrations(center(khramtsov), 2, stable_value=2)

    def test_enumeration_needs_positive_p(self, khramtsov: GbsGraph) -> None:
        with pytest.raises(GbsError, match="positive"):
            enumerate_fibrations(center(khramtsov), 0)

    def test_admissibility(self, khramtsov: GbsGraph) -> None:
        c = center(khramtsov)
        assert admissibility_table(c, 2, 16) == [(4, 4), (8, 7), (12, 10), (16, 13)]
        assert admissible_parameters(c, 2, 8, 7)
        assert not admissible_parameters(c, 2, 6, 5)
        assert not admissible_parameters(c, 2, 0, 1)

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_admissible_pairs_scale(self, khramtsov: GbsGraph, m: int) -> None:
        c = center(khramtsov)
        for k, n in admissibility_table(c, 2, 8):
            assert admissible_parameters(c, 2, m * k, m * (n - 1) + 1)

    def test_admissibility_of_rose(self, document: Callable[[str], str]) -> None:
        gamma = _graph(document("f2_rose_gbs"))
        table = admissibility_table(center(gamma), betti(gamma), 16)
        assert table == [(k, k + 1) for k in range(1, 16)]

    def test_fiber_rank_of_character(self, khramtsov: GbsGraph) -> None:
        c = center(khramtsov)
        phi = parse_character("a=1, b=2, t=0", gbs_presentation(khramtsov))
        assert gbs_membership(c, phi)
        assert fiber_rank(c, phi) == (4, 4)
        assert kappa_via_elliptic(c, phi) == 4

    def test_stable_letter_character_is_not_a_fibration(self, khramtsov: GbsGraph) -> None:
        c = center(khramtsov)
        phi = parse_character("a=0, b=0, t=1", gbs_presentation(khramtsov))
        assert not gbs_membership(c, phi)
        with pytest.raises(CharacterError, match="vanishes on the center"):
            kappa_via_elliptic(c, phi)
