"""Retract tree sides that the top-stratum recursion would otherwise split off.

Removing the top edge of a component either keeps it connected, or splits it in two.
When one side has rank 0, that side together with the removed edge is a tree. Collapsing
the tree onto its attaching vertex keeps pi_1 and the outer class of the map, and
keeps filtered form as long as

* the removed edge points into the tree (its suffix is then a loop in a tree, hence
  trivial), or its suffix is already trivial, or
* no later edge starts in the tree; later edges ending in it pick up the suffix of the
  removed edge.

Configurations that fail both are left alone; ``build_hierarchy`` absorbs them.
"""

from __future__ import annotations

from collections.abc import Iterable

import networkx as nx

from torus_bns_mcp.config import logger
from torus_bns_mcp.services.torus.filtered_map import FilteredGraphMap, GraphEdge, validate_filtered_map
from torus_bns_mcp.services.words.free_group import Word, reduce_word

Component = tuple[frozenset[str], tuple[int, ...]]


def component_rank(component: Component) -> int:
    vertices, edges = component
    return len(edges) - len(vertices) + 1


def split_components(fmap: FilteredGraphMap, vertices: Iterable[str], edges: Iterable[int]) -> list[Component]:
    """Connected components of the subgraph on ``vertices`` spanned by ``edges``, in vertex order."""
    edges = tuple(edges)
    graph = nx.MultiGraph()
    graph.add_nodes_from(vertices)
    for index in edges:
        edge = fmap.edge(index)
        graph.add_edge(edge.origin, edge.terminus, key=index)

    order = {vertex: position for position, vertex in enumerate(fmap.vertices)}
    components: list[Component] = []
    for part in nx.connected_components(graph):
        part = frozenset(part)
        components.append((part, tuple(index for index in edges if fmap.edge(index).origin in part)))
    components.sort(key=lambda component: min(order[vertex] for vertex in component[0]))
    return components


def _collapsible(fmap: FilteredGraphMap, top: int, side: frozenset[str]) -> bool:
    edge = fmap.edge(top)
    if edge.terminus in side or not fmap.suffixes[top - 1]:
        return True
    return not any(fmap.edge(later).origin in side for later in range(top + 1, len(fmap.edges) + 1))


def _find_collapse(fmap: FilteredGraphMap) -> tuple[int, Component] | None:
    pending: list[Component] = [(frozenset(fmap.vertices), tuple(range(1, len(fmap.edges) + 1)))]
    while pending:
        component = pending.pop()
        if component_rank(component) <= 1:
            continue
        vertices, edges = component
        top = edges[-1]
        parts = split_components(fmap, vertices, edges[:-1])
        trees = [part for part in parts if component_rank(part) == 0]
        if not trees:
            pending.extend(parts)
            continue
        if _collapsible(fmap, top, trees[0][0]):
            return top, trees[0]
        pending.extend(part for part in parts if component_rank(part) > 0)
    return None


def _collapse(fmap: FilteredGraphMap, top: int, tree: Component) -> FilteredGraphMap:
    side, side_edges = tree
    removed = set(side_edges) | {top}
    bridge = fmap.edge(top)
    anchor = bridge.terminus if bridge.origin in side else bridge.origin
    twist = fmap.suffixes[top - 1] if bridge.origin in side else ()

    survivors = [index for index in range(1, len(fmap.edges) + 1) if index not in removed]
    renumber = {old: new for new, old in enumerate(survivors, start=1)}

    def project(path: Word) -> Word:
        return reduce_word(renumber[abs(x)] * (1 if x > 0 else -1) for x in path if abs(x) not in removed)

    edges: list[GraphEdge] = []
    suffixes: list[Word] = []
    for index in survivors:
        edge = fmap.edge(index)
        edges.append(
            GraphEdge(
                edge.name,
                anchor if edge.origin in side else edge.origin,
                anchor if edge.terminus in side else edge.terminus,
            )
        )
        suffix = project(fmap.suffixes[index - 1])
        if edge.terminus in side and twist:
            suffix = reduce_word(suffix + project(twist))
        suffixes.append(suffix)

    vertices = [vertex for vertex in fmap.vertices if vertex not in side]
    logger.info(
        f"Retracted tree side {sorted(side)} through edge '{bridge.name}' onto '{anchor}'"
        f"{' (twisted)' if twist else ''}"
    )
    return validate_filtered_map(vertices, edges, suffixes)


def normalize_core(fmap: FilteredGraphMap) -> FilteredGraphMap:
    current = fmap
    while (found := _find_collapse(current)) is not None:
        current = _collapse(current, *found)
    return current


def retracted_edges(before: FilteredGraphMap, after: FilteredGraphMap) -> tuple[str, ...]:
    kept = set(after.edge_names())
    return tuple(name for name in before.edge_names() if name not in kept)
