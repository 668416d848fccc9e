"""Filtered representatives of alpha^k given on a marked graph.

A marked power map is a filtered graph map f on a graph Gamma, a marking that sends every
edge of Gamma to a word in x_1..x_n, and a twist word z. On loops g at the first vertex the
marking must satisfy marking(f(g)) = z^-1 alpha^k(marking(g)) z. The mapping torus of f then
embeds in G_alpha through e -> marking(e) and t -> t^k z.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import cache

import networkx as nx

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import AutomorphismError, FilteredMapError
from torus_bns_mcp.services.torus.filtered_map import STABLE_LETTER, FilteredGraphMap
from torus_bns_mcp.services.torus.presentation import MappingTorusPresentation, PowerLift
from torus_bns_mcp.services.words.free_group import (
    FreeAutomorphism,
    Word,
    apply_automorphism,
    format_word,
    generates_free_group,
    invert_word,
    map_word,
    multiply,
    power,
    reduce_word,
    word_power,
)


@dataclass(slots=True, frozen=True)
class MarkedPowerMap:
    graph_map: FilteredGraphMap
    # one word in x_1..x_n per edge, in edge order; unmarked edges carry the empty word
    marking: tuple[Word, ...]
    twist: Word = ()

    def mark(self, path: Word) -> Word:
        return map_word(path, self.marking)

    def describe(self) -> list[str]:
        lines = [
            f"{edge.name} -> {format_word(word)}" for edge, word in zip(self.graph_map.edges, self.marking) if word
        ]
        return [*lines, f"twist {format_word(self.twist)}"]


def validate_marked_power(
    graph_map: FilteredGraphMap, marking: Mapping[str, Word], twist: Word, rank: int
) -> MarkedPowerMap:
    unknown = sorted(set(marking) - set(graph_map.edge_names()))
    if unknown:
        raise FilteredMapError(f"marking names unknown edges: {', '.join(unknown)}")
    if graph_map.rank != rank:
        raise FilteredMapError(f"graph has rank {graph_map.rank}, but the automorphism acts on F_{rank}")
    words = tuple(reduce_word(marking.get(name, ()), rank) for name in graph_map.edge_names())
    return MarkedPowerMap(graph_map, words, reduce_word(twist, rank))


def is_trivial_in_torus(alpha: FreeAutomorphism, word: Word) -> bool:
    """Word problem in <x_1..x_n, t | t^-1 x t = alpha(x)>, with t numbered n + 1.

    Writing the word as a product of t^a x t^-a = alpha^-a(x) times a power of t, it is
    trivial when that power is zero and alpha^M of the product, M the largest a, reduces
    to the empty word.
    """
    stable = alpha.rank + 1
    height = 0
    pieces: list[tuple[int, int]] = []
    for letter in word:
        if abs(letter) == stable:
            height += 1 if letter > 0 else -1
        else:
            pieces.append((height, letter))
    if height:
        return False
    if not pieces:
        return True

    @cache
    def iterate(depth: int, letter: int) -> Word:
        if depth == 0:
            return (letter,)
        return apply_automorphism(alpha, iterate(depth - 1, letter))

    top = max(level for level, _ in pieces)
    return not multiply(*(iterate(top - level, letter) for level, letter in pieces))


def _path(graph: nx.MultiGraph, fmap: FilteredGraphMap, start: str, end: str) -> Word:
    vertices = nx.shortest_path(graph, start, end)
    letters: list[int] = []
    for source, target in zip(vertices, vertices[1:]):
        index = next(iter(graph[source][target]))
        letters.append(index if fmap.edge(index).origin == source else -index)
    return tuple(letters)


def transport(marked: MarkedPowerMap, normalized: FilteredGraphMap, beta: FreeAutomorphism) -> MarkedPowerMap:
    """Carry the marking and twist over to a retraction of the marked graph.

    Every surviving edge is routed through the retracted trees back to its old endpoints,
    and the twist is moved to the first surviving vertex along a path p from the old first
    vertex: z' = beta(marking(p))^-1 z marking(f(p)).
    """
    fmap = marked.graph_map
    if normalized == fmap:
        return marked
    kept = set(normalized.edge_names())
    forest = nx.MultiGraph()
    forest.add_nodes_from(fmap.vertices)
    for index, edge in enumerate(fmap.edges, start=1):
        if edge.name not in kept:
            forest.add_edge(edge.origin, edge.terminus, key=index)

    def detour(new: str, old: str) -> Word:
        return marked.mark(_path(forest, fmap, new, old))

    marking: list[Word] = []
    for edge in normalized.edges:
        index = fmap.edge_index(edge.name)
        old = fmap.edge(index)
        marking.append(
            multiply(
                detour(edge.origin, old.origin),
                marked.mark((index,)),
                invert_word(detour(edge.terminus, old.terminus)),
            )
        )

    path = _path(fmap.graph(), fmap, fmap.vertices[0], normalized.vertices[0])
    twist = multiply(
        invert_word(apply_automorphism(beta, marked.mark(path))),
        marked.twist,
        marked.mark(fmap.map_path(path)),
    )
    return MarkedPowerMap(normalized, tuple(marking), twist)


def marked_lift(
    alpha: FreeAutomorphism, k: int, marked: MarkedPowerMap, power_pres: MappingTorusPresentation
) -> PowerLift:
    """Embedding of the mapping torus in ``power_pres`` into G_alpha, checked before it is returned.

    The marking must carry pi_1 of the graph onto F_n, and every relator of ``power_pres``
    must lift to the identity of G_alpha.
    """
    fmap = power_pres.graph_map
    if fmap is None:
        raise FilteredMapError("power presentation carries no graph map")
    marked = transport(marked, fmap, power(alpha, k))

    stable = alpha.rank + 1
    images: list[Word] = []
    fiber: list[Word] = []
    for name in power_pres.generators:
        if name == STABLE_LETTER:
            images.append(multiply(word_power((stable,), k), marked.twist))
            continue
        index = fmap.edge_index(name)
        edge = fmap.edge(index)
        loop = (*power_pres.tree_path(edge.origin), index, *invert_word(power_pres.tree_path(edge.terminus)))
        image = marked.mark(loop)
        fiber.append(image)
        images.append(image)

    if not generates_free_group(fiber, alpha.rank):
        raise AutomorphismError(f"the marking does not carry pi_1 of the graph onto F_{alpha.rank}")
    lift = PowerLift(k, tuple(images), twist=marked.twist)
    names = (*(f"x{i}" for i in range(1, stable)), STABLE_LETTER)
    for relator in power_pres.relators:
        image = lift.lift(relator)
        if not is_trivial_in_torus(alpha, image):
            raise AutomorphismError(
                f"the marked map does not represent alpha^{k}: relator {power_pres.format(relator)} "
                f"lifts to {format_word(image, names)}, which is not trivial"
            )
    logger.info(f"Marked map certified as a representative of alpha^{k} with twist {format_word(marked.twist)}")
    return lift
