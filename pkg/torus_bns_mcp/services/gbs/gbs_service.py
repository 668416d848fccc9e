from __future__ import annotations

from typing import Any

from torus_bns_mcp.config import global_config, logger
from torus_bns_mcp.document.input_document import GBS, parse_document
from torus_bns_mcp.errors import GbsError, TrivialCenterError
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.alexander import fox
from torus_bns_mcp.services.gbs.center import (
    CenterData,
    admissibility_table,
    betti,
    center,
    centrality_certificate,
    enumerate_fibrations,
    fiber_rank,
    gbs_membership,
    kappa_epsilon,
    kappa_via_elliptic,
)
from torus_bns_mcp.services.gbs.gbs_graph import GbsGraph, gbs_presentation
from torus_bns_mcp.services.torus.characters import character_lattice, parse_character
from torus_bns_mcp.services.torus.presentation import GroupPresentation


def _character_report(c: CenterData, pres: GroupPresentation, text: str) -> dict[str, Any]:
    phi = parse_character(text, pres)
    entry: dict[str, Any] = {"character": phi.as_dict(), "in_sigma": gbs_membership(c, phi)}
    if entry["in_sigma"]:
        order, rank = fiber_rank(c, phi)
        entry.update(
            monodromy_order=order,
            fiber_rank=rank,
            kappa_via_elliptic=kappa_via_elliptic(c, phi),
            oracle_rank=fox.oracle_rank(pres, phi),
        )
    return entry


def _trivial_center_report(gamma: GbsGraph, error: TrivialCenterError) -> dict[str, Any]:
    lattice = character_lattice(gbs_presentation(gamma))
    return {
        "kind": "gbs",
        "summary": [
            f"modular map non-trivial (value {error.modular_value} on loop {list(error.witness)})",
            "center trivial, Sigma(G) is empty",
        ],
        "modular_map_trivial": False,
        "witness_loop": list(error.witness),
        "modular_value": error.modular_value,
        "b1": lattice.b1,
        "center": None,
    }


@logged_operation
def gbs_analyze(
    document: str,
    enumerate_p: int | None = None,
    stable_value: int = 1,
    characters: list[str] | None = None,
    bound: int | None = None,
) -> dict[str, Any]:
    """
    Analyze a generalized Baumslag-Solitar group: modular map, center, the invariants
    (kappa, epsilon), b1 and the admissible (monodromy order, fiber rank) pairs.

    :param document: Input document with a [gbs] section (see FORMAT.md)
    :param enumerate_p: Optional p; builds the fibration phi_p with phi_p(E) = pZ
    :param stable_value: Value given to stable letters by the enumeration (default 1)
    :param characters: Optional characters "name=value, ..." to classify
    :param bound: Bound on k and n in the admissibility table. Defaults to TORUS_BNS_ADMISSIBLE_BOUND.
    :return: GBS report; a non-trivial modular map is a valid answer with an empty Sigma(G)
    """
    gamma = parse_document(document).require(GBS).gbs
    assert gamma is not None
    try:
        c = center(gamma)
    except TrivialCenterError as error:
        logger.info(f"GBS group has trivial center: {error}")
        return _trivial_center_report(gamma, error)

    pres = gbs_presentation(gamma)
    b1 = betti(gamma)
    lattice_b1 = character_lattice(pres).b1
    if lattice_b1 != b1:
        raise GbsError(f"b1 from the graph ({b1}) disagrees with the abelianization ({lattice_b1})")
    kappa, epsilon = kappa_epsilon(c)
    table = admissibility_table(c, b1, bound if bound is not None else global_config.admissible_bound)

    report: dict[str, Any] = {
        "kind": "gbs",
        "summary": [
            f"kappa = {kappa}, epsilon = {epsilon}",
            f"b1 = {b1}",
            f"minimal fiber rank {epsilon + 1}",
        ],
        "modular_map_trivial": True,
        "center": {
            "word": pres.format(c.center_word()),
            "base": c.base,
            "z_star": str(c.z_star),
            "weights": {name: str(weight) for name, weight in c.weights.items()},
            "vertex_kappas": dict(c.vertex_kappas),
            "edge_kappas": dict(c.edge_kappas),
            "certificate": centrality_certificate(c),
        },
        "kappa": kappa,
        "epsilon": epsilon,
        "b1": b1,
        "admissible": [list(pair) for pair in table],
    }
    if enumerate_p is not None:
        fibration = enumerate_fibrations(c, enumerate_p, stable_value)
        degree = fox.oracle_rank(pres, fibration.character)
        report["enumeration"] = {
            "p": fibration.p,
            "character": fibration.character.as_dict(),
            "monodromy_order": fibration.monodromy_order,
            "fiber_rank": fibration.fiber_rank,
            "oracle_rank": degree,
        }
        report["summary"].append(
            f"phi_{fibration.p}: monodromy order {fibration.monodromy_order}, fiber rank {fibration.fiber_rank}"
        )
        if degree != fibration.fiber_rank:
            logger.error(f"Alexander degree {degree} disagrees with the fiber rank {fibration.fiber_rank}")
    if characters:
        report["characters"] = [_character_report(c, pres, text) for text in characters]
    return report
