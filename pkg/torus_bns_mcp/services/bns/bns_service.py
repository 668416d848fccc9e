from __future__ import annotations

from typing import Any

from torus_bns_mcp.config import logger
from torus_bns_mcp.document.input_document import AUTOMORPHISM, GBS, GOG, GRAPH, InputDocument, parse_document
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.bns.analysis import TorusAnalysis, analyze_automorphism, analyze_filtered_map
from torus_bns_mcp.services.bns.graph_of_groups import (
    GraphOfGroupsZn,
    gog_membership,
    gog_presentation,
    is_ascending_hnn,
    is_reduced,
    reduce_gog,
)
from torus_bns_mcp.services.bns.spheres import sigma_contains, sigma_witness, sphere_label
from torus_bns_mcp.services.gbs.gbs_graph import to_graph_of_groups
from torus_bns_mcp.services.hierarchy.hierarchy_builder import render_hierarchy
from torus_bns_mcp.services.torus.characters import parse_character
from torus_bns_mcp.services.torus.torus_service import lattice_report
from torus_bns_mcp.services.words.free_group import format_word


def document_analysis(doc: InputDocument, seed: int | None = None) -> TorusAnalysis:
    doc.require(AUTOMORPHISM, GRAPH)
    if doc.automorphism is not None:
        if not doc.automorphism.verified:
            logger.warning("Analyzing an automorphism whose invertibility was not certified")
        return analyze_automorphism(doc.automorphism, doc.power_map)
    assert doc.graph_map is not None
    return analyze_filtered_map(doc.graph_map, seed=seed)


def arrangement_report(analysis: TorusAnalysis) -> list[dict[str, Any]]:
    pres = analysis.presentation
    arrangement = analysis.arrangement
    return [
        {
            "label": sphere_label(arrangement, sphere),
            "normal": list(sphere.normal),
            "elements": [pres.format(element) for element in sphere.elements],
        }
        for sphere in arrangement.spheres
    ]


@logged_operation
def bns_analyze(document: str, seed: int | None = None) -> dict[str, Any]:
    """
    Analyze the mapping torus G of a polynomially growing automorphism (or of a filtered
    graph map): presentation, Z-hierarchy, edge elements and the sphere arrangement whose
    complement is the BNS invariant Sigma(G).

    :param document: Input document with an [automorphism] or [graph]/[map] section (see FORMAT.md)
    :param seed: Optional seed that randomizes the spanning tree of the presentation
    :return: Analysis report; "spheres" lists the great spheres S(G, t_i) with Sigma(G) their complement
    """
    analysis = document_analysis(parse_document(document), seed)
    pres = analysis.presentation
    spheres = arrangement_report(analysis)
    edge_elements = [pres.format(element) for element in analysis.edge_elements()]
    summary = [
        f"n = {analysis.rank}, k = {analysis.power}",
        f"b1 = {analysis.lattice.b1}",
        f"{len(spheres)} sphere{'s' if len(spheres) != 1 else ''} in the complement of Sigma(G)",
    ]
    return {
        "kind": "analysis",
        "summary": summary,
        "rank": analysis.rank,
        "power": analysis.power,
        "verified": analysis.verified,
        "triangular_order": list(analysis.triangular_order) if analysis.triangular_order is not None else None,
        "retracted": list(analysis.retracted),
        "power_map": analysis.power_map.describe() if analysis.power_map is not None else None,
        "twist": format_word(analysis.lift.twist),
        "presentation": {
            "generators": list(pres.generators),
            "relators": [pres.format(relator) for relator in pres.relators],
        },
        "hierarchy": render_hierarchy(analysis.hierarchy, analysis.power_presentation),
        "absorbed": list(analysis.hierarchy.absorbed),
        "edge_elements": edge_elements,
        "lattice": lattice_report(analysis.lattice),
        "spheres": spheres,
    }


def _gog_sigma(gamma: GraphOfGroupsZn, characters: list[str]) -> dict[str, Any]:
    reduced = gamma if is_reduced(gamma) else reduce_gog(gamma)
    pres = gog_presentation(reduced)
    report: dict[str, Any] = {
        "kind": "sigma",
        "summary": [f"reduced graph of groups: {len(reduced.vertices)} vertices, {len(reduced.edges)} edges"],
        "generators": list(pres.generators),
        "collapsed_edges": len(gamma.edges) - len(reduced.edges),
        "ascending": is_ascending_hnn(reduced),
        "characters": [],
    }
    for text in characters:
        phi = parse_character(text, pres)
        inside = gog_membership(reduced, phi)
        report["characters"].append({"character": phi.as_dict(), "in_sigma": inside})
        report["summary"].append(f"{text}: {'in' if inside else 'not in'} Sigma(G)")
    return report


@logged_operation
def bns_sigma(document: str, characters: list[str] | None = None) -> dict[str, Any]:
    """
    Decide membership of characters in the BNS invariant Sigma(G).

    Mapping tori use their sphere arrangement. Graphs of free abelian groups ([gog]) and
    GBS graphs ([gbs]) use the edge criterion on the reduced graph of groups; characters
    are then given on the generators of the reduced presentation.

    :param document: Input document (see FORMAT.md)
    :param characters: Characters as "name=value, ..." assignments covering every generator
    :return: Membership verdict per character, with the sphere containing it when outside Sigma(G)
    """
    characters = characters or []
    doc = parse_document(document)
    if doc.kind == GOG:
        assert doc.gog is not None
        return _gog_sigma(doc.gog, characters)
    if doc.kind == GBS:
        assert doc.gbs is not None
        return _gog_sigma(to_graph_of_groups(doc.gbs), characters)

    analysis = document_analysis(doc)
    arrangement = analysis.arrangement
    report: dict[str, Any] = {
        "kind": "sigma",
        "summary": [f"{len(arrangement.spheres)} spheres in dimension {arrangement.dimension}"],
        "generators": list(arrangement.generators),
        "spheres": arrangement_report(analysis),
        "characters": [],
    }
    for text in characters:
        phi = analysis.character(text)
        witness = sigma_witness(arrangement, phi)
        inside = sigma_contains(arrangement, phi)
        label = sphere_label(arrangement, arrangement.spheres[witness]) if witness is not None else None
        report["characters"].append({"character": phi.as_dict(), "in_sigma": inside, "sphere": label})
        report["summary"].append(f"{text}: in Sigma(G)" if inside else f"{text}: not in Sigma(G), on {label}")
    return report
