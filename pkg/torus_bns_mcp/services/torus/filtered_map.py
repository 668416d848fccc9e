"""Filtered graph self-maps fixing vertices: f(E_i) = E_i u_i with u_i a loop in lower strata.

Edge paths reuse the word encoding: ``+i`` crosses E_i from origin to terminus and
``-i`` crosses it backwards.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx

from torus_bns_mcp.errors import AutomorphismError, FilteredMapError
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, Word, reduce_word

STABLE_LETTER = "t"


@dataclass(slots=True, frozen=True)
class GraphEdge:
    name: str
    origin: str
    terminus: str

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(slots=True, frozen=True)
class FilteredGraphMap:
    vertices: tuple[str, ...]
    edges: tuple[GraphEdge, ...]
    suffixes: tuple[Word, ...]

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def edge(self, index: int) -> GraphEdge:
        return self.edges[abs(index) - 1]

    def edge_index(self, name: str) -> int:
        for index, edge in enumerate(self.edges, start=1):
            if edge.name == name:
                return index
        raise FilteredMapError(f"unknown edge '{name}'")

    def edge_names(self) -> tuple[str, ...]:
        return tuple(edge.name for edge in self.edges)

    def step(self, letter: int) -> tuple[str, str]:
        edge = self.edge(letter)
        return (edge.origin, edge.terminus) if letter > 0 else (edge.terminus, edge.origin)

    def path_endpoints(self, path: Word, start: str) -> str:
        """Follow ``path`` from ``start`` and return the end vertex; raises if it is not contiguous."""
        current = start
        for letter in path:
            source, target = self.step(letter)
            if source != current:
                raise FilteredMapError(f"edge path is not contiguous at '{self.edge(letter).name}'")
            current = target
        return current

    def image(self, index: int) -> Word:
        """f(E_index) as an edge path."""
        return (index, *self.suffixes[index - 1])

    def map_path(self, path: Word) -> Word:
        letters: list[int] = []
        for letter in path:
            image = self.image(abs(letter))
            letters.extend(image if letter > 0 else tuple(-x for x in reversed(image)))
        return reduce_word(letters)

    def graph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for index, edge in enumerate(self.edges, start=1):
            graph.add_edge(edge.origin, edge.terminus, key=index)
        return graph


def validate_filtered_map(
    vertices: Sequence[str], edges: Sequence[GraphEdge], suffixes: Sequence[Word]
) -> FilteredGraphMap:
    if len(set(vertices)) != len(vertices):
        raise FilteredMapError("duplicate vertex names")
    names = [edge.name for edge in edges]
    if len(set(names)) != len(names):
        raise FilteredMapError("duplicate edge names")
    if STABLE_LETTER in names:
        raise FilteredMapError(f"edge name '{STABLE_LETTER}' is reserved for the stable letter")
    if len(suffixes) != len(edges):
        raise FilteredMapError(f"expected {len(edges)} suffix paths, got {len(suffixes)}")
    known = set(vertices)
    for edge in edges:
        for endpoint in (edge.origin, edge.terminus):
            if endpoint not in known:
                raise FilteredMapError(f"edge '{edge.name}' uses unknown vertex '{endpoint}'")

    fmap = FilteredGraphMap(tuple(vertices), tuple(edges), tuple(reduce_word(u) for u in suffixes))
    if not vertices or not nx.is_connected(fmap.graph()):
        raise FilteredMapError("graph is disconnected")
    if fmap.rank < 1:
        raise FilteredMapError("graph has rank 0; a mapping torus needs a free group of rank at least 1")

    for index, (edge, suffix) in enumerate(zip(edges, fmap.suffixes), start=1):
        for letter in suffix:
            if abs(letter) > len(edges):
                raise FilteredMapError(f"suffix of '{edge.name}' uses an unknown edge index {abs(letter)}")
            if abs(letter) >= index:
                raise FilteredMapError(
                    f"stratum violation: suffix of '{edge.name}' uses '{fmap.edge(letter).name}', "
                    "which is not in a lower stratum"
                )
        end = fmap.path_endpoints(suffix, edge.terminus)
        if end != edge.terminus:
            raise FilteredMapError(f"suffix of '{edge.name}' is not a loop at its terminus '{edge.terminus}'")
    return fmap


def find_triangular_order(alpha: FreeAutomorphism) -> tuple[int, ...] | None:
    """A basis order in which every image is x_g u_g with u_g over earlier generators."""
    dependencies = nx.DiGraph()
    dependencies.add_nodes_from(range(1, alpha.rank + 1))
    for generator, image in enumerate(alpha.images, start=1):
        if not image or image[0] != generator or any(abs(letter) == generator for letter in image[1:]):
            return None
        for letter in image[1:]:
            dependencies.add_edge(abs(letter), generator)
    if not nx.is_directed_acyclic_graph(dependencies):
        return None
    return tuple(nx.lexicographical_topological_sort(dependencies))


def rose_from_triangular(alpha: FreeAutomorphism, order: Sequence[int] | None = None) -> FilteredGraphMap:
    order = tuple(order) if order is not None else tuple(range(1, alpha.rank + 1))
    if sorted(order) != list(range(1, alpha.rank + 1)):
        raise AutomorphismError(f"basis order {order} is not a permutation of 1..{alpha.rank}")
    position = {generator: stratum for stratum, generator in enumerate(order, start=1)}

    suffixes: list[Word] = []
    for stratum, generator in enumerate(order, start=1):
        image = alpha.image(generator)
        offending = (
            not image
            or image[0] != generator
            or any(position[abs(letter)] >= stratum for letter in image[1:])
        )
        if offending:
            raise AutomorphismError(f"not triangular for the given basis order: first offending generator x{generator}")
        suffixes.append(tuple(position[abs(letter)] * (1 if letter > 0 else -1) for letter in image[1:]))

    edges = [GraphEdge(f"x{generator}", "v", "v") for generator in order]
    return validate_filtered_map(["v"], edges, suffixes)
