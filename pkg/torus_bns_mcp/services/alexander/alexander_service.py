from __future__ import annotations

from typing import Any

from torus_bns_mcp.document.input_document import AUTOMORPHISM, GBS, GOG, GRAPH, parse_document
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.alexander import fox
from torus_bns_mcp.services.bns.graph_of_groups import gog_presentation
from torus_bns_mcp.services.gbs.gbs_graph import gbs_presentation
from torus_bns_mcp.services.torus.characters import parse_character
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.torus.torus_service import document_presentation


@logged_operation
def alexander_polynomial(document: str, character: str, seed: int | None = None) -> dict[str, Any]:
    """
    Compute the Alexander polynomial of a deficiency-one presentation relative to a
    character, by Fox calculus. For a fibration its exponent span is the rank of the fiber.

    :param document: Input document of any kind whose presentation has deficiency one (see FORMAT.md)
    :param character: Character as "name=value, ..." over every generator of the presentation
    :param seed: Optional seed that randomizes the spanning tree of a [graph] presentation
    :return: Normalized polynomial, its span degree and whether every maximal minor vanished
    """
    doc = parse_document(document)
    pres: GroupPresentation
    if doc.kind in (AUTOMORPHISM, GRAPH):
        pres = document_presentation(doc, seed)
    elif doc.kind == GOG:
        assert doc.gog is not None
        pres = gog_presentation(doc.gog)
    else:
        doc.require(GBS)
        assert doc.gbs is not None
        pres = gbs_presentation(doc.gbs)

    phi = parse_character(character, pres)
    result = fox.alexander_polynomial(pres, phi)
    polynomial = result.polynomial
    summary = (
        ["Alexander polynomial 0 (all maximal minors vanish)"]
        if result.degenerate
        else [f"Alexander polynomial {polynomial.format()}", f"degree {result.degree}"]
    )
    return {
        "kind": "alexander",
        "summary": summary,
        "character": phi.as_dict(),
        "polynomial": polynomial.format(),
        "coefficients": [[exponent, coefficient] for exponent, coefficient in polynomial.terms],
        "degree": result.degree,
        "degenerate": result.degenerate,
    }
