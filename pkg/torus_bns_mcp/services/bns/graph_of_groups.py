"""Finite graphs of groups with free abelian vertex and edge groups.

An edge of rank m between vertices of ranks p and q carries two injective integer
matrices, p x m and q x m; column j is the image of the j-th edge basis vector.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx
from sympy import ImmutableMatrix, Matrix

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, GraphOfGroupsError
from torus_bns_mcp.services.torus.characters import CharacterClass, validate_character
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.words.free_group import Word, invert_word, multiply, word_power

IntRows = tuple[tuple[int, ...], ...]


@dataclass(slots=True, frozen=True)
class GogVertex:
    name: str
    rank: int


@dataclass(slots=True, frozen=True)
class GogEdge:
    name: str
    origin: str
    terminus: str
    origin_inclusion: IntRows
    terminus_inclusion: IntRows

    @property
    def rank(self) -> int:
        return len(self.origin_inclusion[0]) if self.origin_inclusion else 0

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(slots=True, frozen=True)
class GraphOfGroupsZn:
    vertices: tuple[GogVertex, ...]
    edges: tuple[GogEdge, ...]
    # names of the spanning-tree edges; every other edge carries a stable letter
    tree: frozenset[str]

    def vertex(self, name: str) -> GogVertex:
        for vertex in self.vertices:
            if vertex.name == name:
                return vertex
        raise GraphOfGroupsError(f"unknown vertex '{name}'")

    def vertex_generators(self, name: str) -> tuple[str, ...]:
        vertex = self.vertex(name)
        if vertex.rank == 1:
            return (name,)
        return tuple(f"{name}_{index}" for index in range(1, vertex.rank + 1))

    @property
    def stable_letters(self) -> tuple[str, ...]:
        return tuple(edge.name for edge in self.edges if edge.name not in self.tree)


def _rows(matrix: Matrix) -> IntRows:
    return tuple(tuple(int(entry) for entry in matrix.row(index)) for index in range(matrix.rows))


def _spanning_tree(
    vertices: Sequence[GogVertex], edges: Sequence[GogEdge], preferred: frozenset[str]
) -> frozenset[str]:
    graph = nx.MultiGraph()
    graph.add_nodes_from(vertex.name for vertex in vertices)
    for position, edge in enumerate(edges):
        weight = position if edge.name in preferred else len(edges) + position
        graph.add_edge(edge.origin, edge.terminus, key=edge.name, weight=weight)
    return frozenset(key for _, _, key in nx.minimum_spanning_edges(graph, algorithm="kruskal", keys=True, data=False))


def validate_graph_of_groups(
    vertices: Sequence[GogVertex], edges: Sequence[GogEdge], tree: frozenset[str] | None = None
) -> GraphOfGroupsZn:
    names = [vertex.name for vertex in vertices]
    if not names:
        raise GraphOfGroupsError("graph of groups has no vertices")
    if len(set(names)) != len(names):
        raise GraphOfGroupsError("duplicate vertex names")
    edge_names = [edge.name for edge in edges]
    if len(set(edge_names)) != len(edge_names) or set(edge_names) & set(names):
        raise GraphOfGroupsError("edge names must be distinct from each other and from vertex names")
    ranks = {vertex.name: vertex.rank for vertex in vertices}
    if any(rank < 1 for rank in ranks.values()):
        raise GraphOfGroupsError("vertex groups must have rank at least 1")

    for edge in edges:
        for end, inclusion in ((edge.origin, edge.origin_inclusion), (edge.terminus, edge.terminus_inclusion)):
            if end not in ranks:
                raise GraphOfGroupsError(f"edge '{edge.name}' uses unknown vertex '{end}'")
            if len(inclusion) != ranks[end] or any(len(row) != edge.rank for row in inclusion) or edge.rank < 1:
                raise GraphOfGroupsError(
                    f"inclusion of '{edge.name}' into '{end}' must be a {ranks[end]} x m matrix with m >= 1 "
                    "matching the other end"
                )
            if Matrix(inclusion).rank() != edge.rank:
                raise GraphOfGroupsError(f"inclusion of '{edge.name}' into '{end}' is not injective")

    graph = nx.MultiGraph()
    graph.add_nodes_from(names)
    graph.add_edges_from((edge.origin, edge.terminus) for edge in edges)
    if not nx.is_connected(graph):
        raise GraphOfGroupsError("graph of groups is disconnected")

    spanning = _spanning_tree(vertices, edges, tree if tree is not None else frozenset(edge_names))
    if tree is not None and spanning != tree:
        raise GraphOfGroupsError("marked tree edges do not form a spanning tree")
    return GraphOfGroupsZn(tuple(vertices), tuple(edges), spanning)


def _is_unimodular(inclusion: IntRows) -> bool:
    return len(inclusion) == len(inclusion[0]) and abs(Matrix(inclusion).det()) == 1


def _collapsible(edge: GogEdge) -> bool:
    return not edge.is_loop and (_is_unimodular(edge.origin_inclusion) or _is_unimodular(edge.terminus_inclusion))


def is_reduced(gamma: GraphOfGroupsZn) -> bool:
    return not any(_collapsible(edge) for edge in gamma.edges)


def _collapse(gamma: GraphOfGroupsZn, edge: GogEdge) -> GraphOfGroupsZn:
    # absorb the end whose inclusion is an isomorphism into the other end
    if _is_unimodular(edge.origin_inclusion):
        gone, kept, iso, into = edge.origin, edge.terminus, edge.origin_inclusion, edge.terminus_inclusion
    else:
        gone, kept, iso, into = edge.terminus, edge.origin, edge.terminus_inclusion, edge.origin_inclusion
    transfer = ImmutableMatrix(into) * ImmutableMatrix(iso).inv()

    def moved(end: str, inclusion: IntRows) -> tuple[str, IntRows]:
        if end != gone:
            return end, inclusion
        return kept, _rows(transfer * ImmutableMatrix(inclusion))

    edges: list[GogEdge] = []
    for other in gamma.edges:
        if other.name == edge.name:
            continue
        origin, origin_inclusion = moved(other.origin, other.origin_inclusion)
        terminus, terminus_inclusion = moved(other.terminus, other.terminus_inclusion)
        edges.append(GogEdge(other.name, origin, terminus, origin_inclusion, terminus_inclusion))

    vertices = [vertex for vertex in gamma.vertices if vertex.name != gone]
    logger.info(f"Collapsed edge '{edge.name}': vertex '{gone}' absorbed into '{kept}'")
    return GraphOfGroupsZn(tuple(vertices), tuple(edges), _spanning_tree(vertices, edges, gamma.tree - {edge.name}))


def reduce_gog(gamma: GraphOfGroupsZn) -> GraphOfGroupsZn:
    current = gamma
    while True:
        collapsible = next((edge for edge in current.edges if _collapsible(edge)), None)
        if collapsible is None:
            return current
        current = _collapse(current, collapsible)


def is_ascending_hnn(gamma: GraphOfGroupsZn) -> bool:
    if len(gamma.vertices) != 1 or len(gamma.edges) != 1 or not gamma.edges[0].is_loop:
        return False
    edge = gamma.edges[0]
    return _is_unimodular(edge.origin_inclusion) or _is_unimodular(edge.terminus_inclusion)


def _power_word(generators: Sequence[int], column: Sequence[int]) -> Word:
    return multiply(*(word_power((generator,), exponent) for generator, exponent in zip(generators, column)))


def gog_presentation(gamma: GraphOfGroupsZn) -> GroupPresentation:
    """Vertex generators, then stable letters; commutators, then one relator per edge basis vector."""
    generators: list[str] = []
    indices: dict[str, list[int]] = {}
    for vertex in gamma.vertices:
        indices[vertex.name] = []
        for name in gamma.vertex_generators(vertex.name):
            generators.append(name)
            indices[vertex.name].append(len(generators))
    stable: dict[str, int] = {}
    for name in gamma.stable_letters:
        generators.append(name)
        stable[name] = len(generators)

    relators: list[Word] = []
    for vertex in gamma.vertices:
        own = indices[vertex.name]
        for i, a in enumerate(own):
            for b in own[i + 1 :]:
                relators.append((-a, -b, a, b))
    for edge in gamma.edges:
        for column in range(edge.rank):
            into_origin = _power_word(indices[edge.origin], [row[column] for row in edge.origin_inclusion])
            into_terminus = _power_word(indices[edge.terminus], [row[column] for row in edge.terminus_inclusion])
            if edge.name in stable:
                t = stable[edge.name]
                relators.append(multiply((-t,), into_origin, (t,), invert_word(into_terminus)))
            else:
                relators.append(multiply(into_origin, invert_word(into_terminus)))
    return GroupPresentation(tuple(generators), tuple(relators))


def gog_membership(gamma: GraphOfGroupsZn, phi: CharacterClass) -> bool:
    """[phi] in Sigma(G) iff phi vanishes on no edge group, for reduced non-ascending graphs.

    ``phi`` must be a homomorphism on ``gog_presentation(gamma)``, matched by generator name.
    """
    pres = gog_presentation(gamma)
    values = dict(zip(phi.generators, phi.values))
    unknown = sorted(set(values) - set(pres.generators))
    if unknown:
        raise CharacterError(f"unknown generators in character: {', '.join(unknown)}")
    missing = [name for name in pres.generators if name not in values]
    if missing:
        raise CharacterError(f"character leaves generators unassigned: {', '.join(missing)}")
    validate_character(pres, [values[name] for name in pres.generators])

    if not is_reduced(gamma):
        raise GraphOfGroupsError("graph of groups is not reduced; run reduce_gog and restate the character")
    if is_ascending_hnn(gamma):
        raise GraphOfGroupsError("ascending HNN extension: the edge criterion is inapplicable")
    for edge in gamma.edges:
        generators = gamma.vertex_generators(edge.origin)
        images = [
            sum(row[column] * values[name] for row, name in zip(edge.origin_inclusion, generators))
            for column in range(edge.rank)
        ]
        if all(image == 0 for image in images):
            logger.info(f"Character vanishes on the edge group of '{edge.name}'")
            return False
    return True
