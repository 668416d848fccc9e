from collections.abc import Callable

import pytest

from torus_bns_mcp.document.input_document import parse_document
from torus_bns_mcp.errors import CharacterError, HierarchyError
from torus_bns_mcp.services.bns.analysis import analyze_automorphism, analyze_filtered_map
from torus_bns_mcp.services.bns.spheres import sigma_arrangement, sigma_contains, sigma_witness, sphere_label
from torus_bns_mcp.services.torus.characters import CharacterClass, parse_character
from torus_bns_mcp.services.torus.presentation import rose_presentation
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, identity


class TestSphereArrangement:
    """Great spheres S(G, t) cut out by edge elements."""

    def test_product_has_one_sphere(self) -> None:
        analysis = analyze_automorphism(identity(2))
        arrangement = analysis.arrangement
        assert arrangement.dimension == 3
        assert len(arrangement.spheres) == 1
        assert sphere_label(arrangement, arrangement.spheres[0]) == "phi(t) = 0"
        assert arrangement.spheres[0].elements == ((3,),)

    def test_repeated_elements_merge(self) -> None:
        pres = rose_presentation(identity(3))
        arrangement = sigma_arrangement(pres, [(4,), (4,), (4, 4)])
        assert len(arrangement.spheres) == 1
        assert len(arrangement.spheres[0].elements) == 3

    def test_circle_has_one_sphere_per_vertex(self, document: Callable[[str], str]) -> None:
        fmap = parse_document(document("circle3")).graph_map
        assert fmap is not None
        analysis = analyze_filtered_map(fmap)
        assert analysis.rank == 4
        assert len(analysis.arrangement.spheres) == 3

    def test_longer_circle(self, document: Callable[[str], str]) -> None:
        fmap = parse_document(document("circle4")).graph_map
        assert fmap is not None
        analysis = analyze_filtered_map(fmap)
        assert analysis.rank == 5
        assert len(analysis.arrangement.spheres) == 4

    def test_circle_labels(self, document: Callable[[str], str]) -> None:
        fmap = parse_document(document("circle2")).graph_map
        assert fmap is not None
        arrangement = analyze_filtered_map(fmap).arrangement
        labels = {sphere_label(arrangement, sphere) for sphere in arrangement.spheres}
        assert labels == {"phi(t) = 0", "phi(a1) + phi(t) = 0"}

    def test_element_in_every_kernel(self) -> None:
        pres = rose_presentation(identity(2))
        with pytest.raises(HierarchyError, match="pairs to zero with every character"):
            sigma_arrangement(pres, [()])


class TestMembership:
    """Sigma(G) as the complement of the arrangement."""

    def test_fibration_and_non_fibration(self) -> None:
        analysis = analyze_automorphism(identity(2))
        inside = analysis.character("x1=0, x2=0, t=1")
        outside = analysis.character("x1=1, x2=-1, t=0")
        assert sigma_contains(analysis.arrangement, inside)
        assert sigma_witness(analysis.arrangement, inside) is None
        assert not sigma_contains(analysis.arrangement, outside)
        assert sigma_witness(analysis.arrangement, outside) == 0

    def test_membership_is_scale_invariant(self) -> None:
        analysis = analyze_automorphism(identity(2))
        phi = analysis.character("x1=1, x2=2, t=3")
        assert sigma_contains(analysis.arrangement, phi.scaled(5))

    def test_negated_character(self) -> None:
        analysis = analyze_automorphism(identity(2))
        phi = analysis.character("x1=1, x2=0, t=2")
        assert sigma_contains(analysis.arrangement, phi)
        assert sigma_contains(analysis.arrangement, phi.scaled(-1))

    def test_dimension_mismatch(self) -> None:
        analysis = analyze_automorphism(identity(2))
        phi = parse_character("x1=0, x2=0, x3=0, t=1", rose_presentation(identity(3)))
        with pytest.raises(CharacterError, match="dimension mismatch"):
            sigma_contains(analysis.arrangement, phi)

    def test_swap_uses_square_of_stable_letter(self) -> None:
        analysis = analyze_automorphism(FreeAutomorphism(2, ((2,), (1,))))
        assert analysis.power == 2
        (sphere,) = analysis.arrangement.spheres
        assert sphere_label(analysis.arrangement, sphere) == "2 phi(t) = 0"
        assert not sigma_contains(analysis.arrangement, analysis.character("x1=1, x2=1, t=0"))
        assert sigma_contains(analysis.arrangement, CharacterClass(("x1", "x2", "t"), (0, 0, 1)))
