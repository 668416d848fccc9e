from __future__ import annotations

from typing import Any

from torus_bns_mcp.document.input_document import AUTOMORPHISM, GRAPH, InputDocument, parse_document
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.hierarchy.normalize_core import normalize_core, retracted_edges
from torus_bns_mcp.services.torus.characters import CharacterLattice, character_lattice
from torus_bns_mcp.services.torus.presentation import MappingTorusPresentation, presentation, rose_presentation


def document_presentation(doc: InputDocument, seed: int | None = None) -> MappingTorusPresentation:
    """Presentation of G for a torus document; filtered maps are normalized first."""
    doc.require(AUTOMORPHISM, GRAPH)
    if doc.automorphism is not None:
        return rose_presentation(doc.automorphism)
    assert doc.graph_map is not None
    return presentation(normalize_core(doc.graph_map), seed=seed)


def lattice_report(lattice: CharacterLattice) -> dict[str, Any]:
    return {"b1": lattice.b1, "basis": [list(vector) for vector in lattice.basis], "torsion": list(lattice.torsion)}


@logged_operation
def torus_presentation(document: str, seed: int | None = None) -> dict[str, Any]:
    """
    Build the deficiency-one presentation of the mapping torus of an automorphism or of a
    filtered graph map, together with its character lattice Hom(G, Z).

    :param document: Input document with an [automorphism] or [graph]/[map] section (see FORMAT.md)
    :param seed: Optional seed that randomizes the spanning tree used to eliminate edges
    :return: Generators, relators, spanning tree data and the character lattice
    """
    doc = parse_document(document)
    pres = document_presentation(doc, seed)
    lattice = character_lattice(pres)
    report: dict[str, Any] = {
        "kind": "presentation",
        "summary": [pres.describe(), f"b1 = {lattice.b1}"],
        "generators": list(pres.generators),
        "relators": [pres.format(relator) for relator in pres.relators],
        "deficiency": pres.deficiency,
        "lattice": lattice_report(lattice),
    }
    if doc.graph_map is not None:
        normalized = pres.graph_map
        assert normalized is not None
        report["root"] = pres.root
        report["tree_edges"] = sorted(normalized.edge(index).name for index in pres.tree_edges)
        report["vertex_words"] = {vertex: pres.format(pres.vertex_word(vertex)) for vertex in normalized.vertices}
        report["retracted"] = list(retracted_edges(doc.graph_map, normalized))
    return report
