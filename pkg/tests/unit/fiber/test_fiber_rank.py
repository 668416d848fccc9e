from collections.abc import Callable
from functools import cache
from math import gcd

import pytest

from torus_bns_mcp.document.input_document import parse_document
from torus_bns_mcp.errors import AutomorphismError, CharacterError
from torus_bns_mcp.services.alexander import fox
from torus_bns_mcp.services.bns.analysis import TorusAnalysis, analyze_automorphism
from torus_bns_mcp.services.fiber.fiber_rank import (
    INFINITE_INDEX,
    NOT_IN_SIGMA_VERDICT,
    InSigma,
    NotInSigma,
    classify,
    kernel_decomposition,
    relative_index,
)
from torus_bns_mcp.services.torus.characters import CharacterClass
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, identity, validate_automorphism

PRODUCT_GRID = [(n, p, q) for n in range(2, 6) for p in range(1, 8) for q in range(1, 8) if gcd(p, q) == 1]


@cache
def _product(n: int) -> TorusAnalysis:
    return analyze_automorphism(identity(n))


def _classify(analysis: TorusAnalysis, text: str):
    return classify(analysis.presentation, analysis.hierarchy, analysis.character(text), analysis.power, analysis.lift)


def _kernel(analysis: TorusAnalysis, text: str):
    return kernel_decomposition(
        analysis.presentation,
        analysis.hierarchy,
        analysis.character(text),
        analysis.power,
        analysis.lift,
        analysis.power_presentation,
    )


class TestRelativeIndex:
    def test_gcd_of_values(self) -> None:
        phi = CharacterClass(("a", "b"), (4, 6))
        assert relative_index(phi, [(1,), (2,)]) == 2
        assert relative_index(phi, [(1, 1, -2)]) == 2

    def test_zero_image(self) -> None:
        phi = CharacterClass(("a", "b"), (0, 1))
        assert relative_index(phi, [(1,)]) == INFINITE_INDEX
        assert relative_index(phi, []) == INFINITE_INDEX


class TestClassify:
    """Fibration verdicts and hierarchy ranks."""

    def test_product_fibration(self) -> None:
        verdict = _classify(analyze_automorphism(identity(2)), "x1=0, x2=0, t=1")
        assert verdict == InSigma(rank=2, k=1, indices=(1,))

    @pytest.mark.parametrize(
        ("p", "q", "rank"),
        [(0, 1, 3), (1, 1, 3), (1, 2, 5), (3, 2, 5), (-1, 3, 7), (0, -1, 3)],
    )
    def test_product_family(self, p: int, q: int, rank: int) -> None:
        analysis = analyze_automorphism(identity(3))
        verdict = _classify(analysis, f"x1={p}, x2={p}, x3={p}, t={q}")
        assert isinstance(verdict, InSigma)
        assert verdict.rank == rank == abs(q) * (3 - 1) + 1

    def test_not_in_sigma(self) -> None:
        verdict = _classify(analyze_automorphism(identity(2)), "x1=1, x2=0, t=0")
        assert isinstance(verdict, NotInSigma)
        assert verdict.witness == 1
        assert verdict.witness_element == (3,)
        assert verdict.discrete
        assert verdict.verdict == NOT_IN_SIGMA_VERDICT

    def test_non_primitive_character_is_rescaled(self) -> None:
        verdict = _classify(analyze_automorphism(identity(2)), "x1=0, x2=0, t=2")
        assert isinstance(verdict, InSigma)
        assert verdict.rank == 2

    def test_finite_order_automorphism(self) -> None:
        analysis = analyze_automorphism(FreeAutomorphism(2, ((2,), (1,))))
        verdict = _classify(analysis, "x1=0, x2=0, t=1")
        assert verdict == InSigma(rank=2, k=2, indices=(2,))


class TestKernelDecomposition:
    """Ranks from Bass-Serre orbit counts."""

    def test_product(self) -> None:
        decomposition = _kernel(analyze_automorphism(identity(2)), "x1=0, x2=0, t=1")
        assert decomposition.rank == 2
        assert decomposition.betti == 1
        assert decomposition.free_factors == 1
        assert decomposition.leaf_kernels == ("Z",)
        (count,) = decomposition.splittings
        assert count.edge_name == "x2"
        assert count.vertex_orbits == (1,)
        assert count.edge_orbits == 1

    @pytest.mark.parametrize(("p", "q"), [(1, 1), (1, 2), (2, 3), (5, -2)])
    def test_agrees_with_hierarchy_and_oracle(self, p: int, q: int) -> None:
        analysis = analyze_automorphism(identity(3))
        text = f"x1={p}, x2={p}, x3={p}, t={q}"
        verdict = _classify(analysis, text)
        assert isinstance(verdict, InSigma)
        assert _kernel(analysis, text).rank == verdict.rank
        assert fox.oracle_rank(analysis.presentation, analysis.character(text)) == verdict.rank

    def test_finite_order_descends_through_k(self) -> None:
        decomposition = _kernel(analyze_automorphism(FreeAutomorphism(2, ((2,), (1,)))), "x1=0, x2=0, t=1")
        assert decomposition.k == 2
        assert decomposition.power_index == 2
        assert decomposition.power_rank == 2
        assert decomposition.rank == 2

    def test_killed_edge_element(self) -> None:
        with pytest.raises(CharacterError, match="kills the edge element of 'x2'"):
            _kernel(analyze_automorphism(identity(2)), "x1=1, x2=0, t=0")


class TestProductGrid:
    """F_n x Z with phi(x_i) = p and phi(t) = q, over every coprime pair with 1 <= p, q <= 7."""

    @pytest.mark.parametrize(("n", "p", "q"), PRODUCT_GRID)
    def test_closed_form_rank(self, n: int, p: int, q: int) -> None:
        analysis = _product(n)
        text = ", ".join([*(f"x{i}={p}" for i in range(1, n + 1)), f"t={q}"])
        verdict = _classify(analysis, text)
        assert isinstance(verdict, InSigma)
        assert verdict.rank == 1 + q * (n - 1)
        assert _kernel(analysis, text).rank == verdict.rank
        assert fox.oracle_rank(analysis.presentation, analysis.character(text)) == verdict.rank


def _marked_analysis(text: str) -> TorusAnalysis:
    doc = parse_document(text)
    assert doc.automorphism is not None
    return analyze_automorphism(doc.automorphism, doc.power_map)


class TestMarkedPower:
    """x2 -> x1 x2^-1 x1^-1, whose square conjugates x2 by x1^2 and is not triangular on the rose."""

    def test_power_section_is_required(self) -> None:
        alpha = validate_automorphism(2, [(1,), (1, -2, -1)])
        with pytest.raises(AutomorphismError, match=r"alpha\^2 is not triangular.*\[power\] section"):
            analyze_automorphism(alpha)

    def test_analysis(self, document: Callable[[str], str]) -> None:
        analysis = _marked_analysis(document("reflected_conjugation"))
        assert analysis.power == 2
        assert analysis.verified
        assert analysis.triangular_order is None
        assert analysis.lift.twist == (1, 1)
        assert [analysis.presentation.format(element) for element in analysis.edge_elements()] == ["t t x1 x1"]

    @pytest.mark.parametrize(
        ("text", "rank"),
        [
            ("x1=0, x2=0, t=1", 2),
            ("x1=1, x2=0, t=0", 2),
            ("x1=1, x2=0, t=1", 3),
            ("x1=2, x2=0, t=-1", 2),
            ("x1=3, x2=0, t=-1", 3),
        ],
    )
    def test_ranks_agree_with_oracle(self, document: Callable[[str], str], text: str, rank: int) -> None:
        analysis = _marked_analysis(document("reflected_conjugation"))
        verdict = _classify(analysis, text)
        assert isinstance(verdict, InSigma)
        assert verdict.k == 2
        assert verdict.rank == rank
        assert _kernel(analysis, text).rank == rank
        assert fox.oracle_rank(analysis.presentation, analysis.character(text)) == rank

    def test_twisted_edge_element_is_killed(self, document: Callable[[str], str]) -> None:
        verdict = _classify(_marked_analysis(document("reflected_conjugation")), "x1=1, x2=0, t=-1")
        assert isinstance(verdict, NotInSigma)
        assert verdict.witness_element == (3, 3, 1, 1)

    def test_retracted_tree_gives_the_same_answers(self, document: Callable[[str], str]) -> None:
        rose = _marked_analysis(document("reflected_conjugation"))
        tree = _marked_analysis(document("reflected_conjugation_tree"))
        assert tree.retracted == ("c",)
        assert tree.edge_elements() == rose.edge_elements()
        assert _classify(tree, "x1=1, x2=0, t=1") == _classify(rose, "x1=1, x2=0, t=1")
