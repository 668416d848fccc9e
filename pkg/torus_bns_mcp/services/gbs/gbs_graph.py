"""Generalized Baumslag-Solitar graphs: graphs of infinite cyclic groups given by edge labels."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx

from torus_bns_mcp.errors import GbsError
from torus_bns_mcp.services.bns.graph_of_groups import (
    GogEdge,
    GogVertex,
    GraphOfGroupsZn,
    reduce_gog,
    validate_graph_of_groups,
)
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.words.free_group import Word, invert_word, multiply, word_power


@dataclass(slots=True, frozen=True)
class GbsEdge:
    origin: str
    terminus: str
    origin_label: int
    terminus_label: int
    tree: bool
    # stable letter for non-tree edges
    name: str

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(slots=True, frozen=True)
class GbsGraph:
    vertices: tuple[str, ...]
    edges: tuple[GbsEdge, ...]

    @property
    def stable_letters(self) -> tuple[str, ...]:
        return tuple(edge.name for edge in self.edges if not edge.tree)

    @property
    def generators(self) -> tuple[str, ...]:
        return (*self.vertices, *self.stable_letters)

    def edge_index(self, name: str) -> int:
        for position, edge in enumerate(self.edges, start=1):
            if edge.name == name:
                return position
        raise GbsError(f"unknown edge '{name}'")


def validate_gbs_graph(vertices: Sequence[str], edges: Sequence[GbsEdge]) -> GbsGraph:
    if not vertices:
        raise GbsError("GBS graph has no vertices")
    if len(set(vertices)) != len(vertices):
        raise GbsError("duplicate vertex names")
    names = [edge.name for edge in edges]
    if len(set(names)) != len(names) or set(names) & set(vertices):
        raise GbsError("edge and stable letter names must be distinct from each other and from vertex names")

    graph = nx.MultiGraph()
    graph.add_nodes_from(vertices)
    tree = nx.Graph()
    tree.add_nodes_from(vertices)
    for edge in edges:
        for end in (edge.origin, edge.terminus):
            if end not in graph:
                raise GbsError(f"edge '{edge.name}' uses unknown vertex '{end}'")
        if edge.origin_label == 0 or edge.terminus_label == 0:
            raise GbsError(f"edge '{edge.name}' has a zero label")
        graph.add_edge(edge.origin, edge.terminus)
        if edge.tree:
            if edge.is_loop or tree.has_edge(edge.origin, edge.terminus):
                raise GbsError(f"tree edge '{edge.name}' closes a cycle; mark it as a loop edge with a stable letter")
            tree.add_edge(edge.origin, edge.terminus)

    if not nx.is_connected(graph):
        raise GbsError("GBS graph is disconnected")
    if not nx.is_tree(tree):
        raise GbsError("tree edges do not form a spanning tree")
    return GbsGraph(tuple(vertices), tuple(edges))


def _power(generator: int, exponent: int) -> Word:
    return word_power((generator,), exponent)


def gbs_presentation(gamma: GbsGraph) -> GroupPresentation:
    """<vertex generators, stable letters | a_u^lu = a_v^lv (tree), t^-1 a_u^lu t = a_v^lv (others)>."""
    index = {name: position for position, name in enumerate(gamma.generators, start=1)}
    relators: list[Word] = []
    for edge in gamma.edges:
        origin = _power(index[edge.origin], edge.origin_label)
        terminus = invert_word(_power(index[edge.terminus], edge.terminus_label))
        if edge.tree:
            relators.append(multiply(origin, terminus))
        else:
            t = index[edge.name]
            relators.append(multiply((-t,), origin, (t,), terminus))
    return GroupPresentation(gamma.generators, tuple(relators))


def to_graph_of_groups(gamma: GbsGraph) -> GraphOfGroupsZn:
    vertices = [GogVertex(name, 1) for name in gamma.vertices]
    edges = [
        GogEdge(edge.name, edge.origin, edge.terminus, ((edge.origin_label,),), ((edge.terminus_label,),))
        for edge in gamma.edges
    ]
    return validate_graph_of_groups(vertices, edges, frozenset(edge.name for edge in gamma.edges if edge.tree))


def from_graph_of_groups(gog: GraphOfGroupsZn) -> GbsGraph:
    if any(vertex.rank != 1 for vertex in gog.vertices):
        raise GbsError("graph of groups has a vertex group that is not infinite cyclic")
    edges = [
        GbsEdge(
            origin=edge.origin,
            terminus=edge.terminus,
            origin_label=edge.origin_inclusion[0][0],
            terminus_label=edge.terminus_inclusion[0][0],
            tree=edge.name in gog.tree,
            name=edge.name,
        )
        for edge in gog.edges
    ]
    return GbsGraph(tuple(vertex.name for vertex in gog.vertices), tuple(edges))


def reduce_gbs(gamma: GbsGraph) -> GbsGraph:
    """Collapse every non-loop edge with a label of +-1."""
    return from_graph_of_groups(reduce_gog(to_graph_of_groups(gamma)))


def graph_betti(gamma: GbsGraph) -> int:
    return len(gamma.edges) - len(gamma.vertices) + 1


def tree_path(gamma: GbsGraph, start: str, end: str) -> Word:
    """Signed 1-based edge path from ``start`` to ``end`` inside the spanning tree."""
    tree = nx.Graph()
    tree.add_nodes_from(gamma.vertices)
    for position, edge in enumerate(gamma.edges, start=1):
        if edge.tree:
            tree.add_edge(edge.origin, edge.terminus, index=position)
    vertices = nx.shortest_path(tree, start, end)
    letters: list[int] = []
    for here, there in zip(vertices, vertices[1:]):
        position = tree.edges[here, there]["index"]
        letters.append(position if gamma.edges[position - 1].origin == here else -position)
    return tuple(letters)


def fundamental_loops(gamma: GbsGraph, base: str | None = None) -> list[Word]:
    """One closed edge path at ``base`` per non-tree edge; together a basis of H_1 of the graph."""
    base = base if base is not None else gamma.vertices[0]
    loops: list[Word] = []
    for position, edge in enumerate(gamma.edges, start=1):
        if edge.tree:
            continue
        loops.append(
            (*tree_path(gamma, base, edge.origin), position, *invert_word(tree_path(gamma, base, edge.terminus)))
        )
    return loops
