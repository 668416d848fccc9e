from __future__ import annotations

from typing import Any

from torus_bns_mcp.config import logger
from torus_bns_mcp.document.input_document import parse_document
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.alexander import fox
from torus_bns_mcp.services.bns.bns_service import document_analysis
from torus_bns_mcp.services.fiber.fiber_rank import InSigma, classify, kernel_decomposition


@logged_operation
def fiber_classify(document: str, character: str, oracle: bool = False, seed: int | None = None) -> dict[str, Any]:
    """
    Decide whether a character of a mapping torus is a fibration and compute the rank of
    its fiber from the Z-hierarchy, the Bass-Serre orbit counts and optionally the
    Alexander polynomial.

    :param document: Input document with an [automorphism] or [graph]/[map] section (see FORMAT.md)
    :param character: Character as "name=value, ..." over every generator of the presentation
    :param oracle: Also compute the rank as the degree of the Alexander polynomial and compare
    :param seed: Optional seed that randomizes the spanning tree of the presentation
    :return: Verdict report; "rank" is set only for fibrations
    """
    analysis = document_analysis(parse_document(document), seed)
    pres = analysis.presentation
    phi = analysis.character(character)
    verdict = classify(pres, analysis.hierarchy, phi, analysis.power, analysis.lift)

    if not isinstance(verdict, InSigma):
        return {
            "kind": "fiber",
            "summary": [f"not in Sigma(G); {verdict.verdict}"],
            "character": phi.as_dict(),
            "in_sigma": False,
            "rank": None,
            "witness": verdict.witness,
            "witness_element": pres.format(verdict.witness_element),
            "discrete": verdict.discrete,
        }

    decomposition = kernel_decomposition(
        pres, analysis.hierarchy, phi, analysis.power, analysis.lift, analysis.power_presentation
    )
    if decomposition.rank != verdict.rank:
        logger.error(f"Edge index rank {verdict.rank} disagrees with the orbit count rank {decomposition.rank}")
    report: dict[str, Any] = {
        "kind": "fiber",
        "summary": [f"rank {verdict.rank}"],
        "character": phi.as_dict(),
        "in_sigma": True,
        "rank": verdict.rank,
        "k": verdict.k,
        "indices": list(verdict.indices),
        "kernel": {
            "rank": decomposition.rank,
            "power_rank": decomposition.power_rank,
            "power_index": decomposition.power_index,
            "betti": decomposition.betti,
            "free_factors": decomposition.free_factors,
            "leaf_kernels": list(decomposition.leaf_kernels),
            "splittings": [
                {
                    "kind": count.kind,
                    "edge": count.edge_name,
                    "vertex_orbits": list(count.vertex_orbits),
                    "edge_orbits": count.edge_orbits,
                }
                for count in decomposition.splittings
            ],
        },
    }
    if oracle:
        degree = fox.oracle_rank(pres, phi)
        report["oracle_rank"] = degree
        report["agreement"] = degree == verdict.rank == decomposition.rank
        if report["agreement"]:
            report["summary"].append(f"hierarchy=oracle={verdict.rank}")
        else:
            logger.error(f"Hierarchy rank {verdict.rank} disagrees with the Alexander degree {degree}")
            report["summary"].append(f"hierarchy={verdict.rank} oracle={degree}")
    return report
