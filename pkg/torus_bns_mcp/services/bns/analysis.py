"""Everything downstream services need about one mapping torus, computed once.

For an automorphism alpha with least unipotent power k, the hierarchy is built for a
filtered representative of alpha^k and its edge elements are pushed into G_alpha
through t -> t^k. When alpha^k is not triangular on the rose, a filtered representative
on a marked graph stands in for it and t goes to t^k z instead. A filtered graph map is
taken as its own power (k = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import AutomorphismError
from torus_bns_mcp.services.bns.spheres import SphereArrangement, sigma_arrangement
from torus_bns_mcp.services.hierarchy.hierarchy_builder import HierarchyTree, build_hierarchy, edge_elements
from torus_bns_mcp.services.hierarchy.normalize_core import normalize_core, retracted_edges
from torus_bns_mcp.services.torus.characters import CharacterClass, CharacterLattice, character_lattice, parse_character
from torus_bns_mcp.services.torus.filtered_map import FilteredGraphMap, find_triangular_order, rose_from_triangular
from torus_bns_mcp.services.torus.marked_power import MarkedPowerMap, marked_lift
from torus_bns_mcp.services.torus.presentation import (
    MappingTorusPresentation,
    PowerLift,
    identity_lift,
    power_lift,
    presentation,
    rose_presentation,
)
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, Word, abelianization_matrix, power
from torus_bns_mcp.services.words.unipotence import least_unipotent_power


@dataclass(slots=True, frozen=True)
class TorusAnalysis:
    rank: int
    power: int
    presentation: MappingTorusPresentation
    graph_map: FilteredGraphMap
    power_presentation: MappingTorusPresentation
    hierarchy: HierarchyTree
    lift: PowerLift
    lattice: CharacterLattice
    arrangement: SphereArrangement
    automorphism: FreeAutomorphism | None = None
    triangular_order: tuple[int, ...] | None = None
    retracted: tuple[str, ...] = ()
    power_map: MarkedPowerMap | None = None

    @property
    def verified(self) -> bool:
        # a certified marked power is an automorphism, so alpha is one too
        return self.automorphism is None or self.automorphism.verified or self.power_map is not None

    def edge_elements(self) -> list[Word]:
        """Edge elements as words in the generators of G_alpha."""
        return [self.lift.lift(element) for element in edge_elements(self.hierarchy)]

    def character(self, text: str) -> CharacterClass:
        return parse_character(text, self.presentation)


def _finish(
    pres: MappingTorusPresentation,
    fmap: FilteredGraphMap,
    power_pres: MappingTorusPresentation,
    lift: PowerLift,
    k: int,
    automorphism: FreeAutomorphism | None = None,
    triangular_order: tuple[int, ...] | None = None,
    retracted: tuple[str, ...] = (),
    power_map: MarkedPowerMap | None = None,
) -> TorusAnalysis:
    hierarchy = build_hierarchy(fmap, power_pres)
    lattice = character_lattice(pres)
    elements = [lift.lift(element) for element in edge_elements(hierarchy)]
    arrangement = sigma_arrangement(pres, elements, lattice)
    return TorusAnalysis(
        rank=fmap.rank,
        power=k,
        presentation=pres,
        graph_map=fmap,
        power_presentation=power_pres,
        hierarchy=hierarchy,
        lift=lift,
        lattice=lattice,
        arrangement=arrangement,
        automorphism=automorphism,
        triangular_order=triangular_order,
        retracted=retracted,
        power_map=power_map,
    )


def analyze_automorphism(alpha: FreeAutomorphism, power_map: MarkedPowerMap | None = None) -> TorusAnalysis:
    k = least_unipotent_power(abelianization_matrix(alpha))
    if k is None:
        raise AutomorphismError(
            "abelianization has an eigenvalue that is not a root of unity; the automorphism does not grow polynomially"
        )
    logger.info(f"Least unipotent power k = {k}")
    if power_map is not None:
        return _analyze_marked(alpha, k, power_map)
    beta = power(alpha, k)
    order = find_triangular_order(beta)
    if order is None:
        raise AutomorphismError(
            f"alpha^{k} is not triangular in any basis order; "
            "describe a filtered graph map for it in a [power] section"
        )
    raw = rose_from_triangular(beta, order)
    fmap = normalize_core(raw)
    pres = rose_presentation(alpha)
    power_pres = presentation(fmap)
    return _finish(
        pres,
        fmap,
        power_pres,
        power_lift(power_pres, pres, k),
        k,
        automorphism=alpha,
        triangular_order=order,
        retracted=retracted_edges(raw, fmap),
    )


def analyze_filtered_map(fmap: FilteredGraphMap, seed: int | None = None) -> TorusAnalysis:
    normalized = normalize_core(fmap)
    pres = presentation(normalized, seed=seed)
    return _finish(pres, normalized, pres, identity_lift(pres), 1, retracted=retracted_edges(fmap, normalized))


def _analyze_marked(alpha: FreeAutomorphism, k: int, power_map: MarkedPowerMap) -> TorusAnalysis:
    fmap = normalize_core(power_map.graph_map)
    pres = rose_presentation(alpha)
    power_pres = presentation(fmap)
    return _finish(
        pres,
        fmap,
        power_pres,
        marked_lift(alpha, k, power_map, power_pres),
        k,
        automorphism=alpha,
        retracted=retracted_edges(power_map.graph_map, fmap),
        power_map=power_map,
    )
