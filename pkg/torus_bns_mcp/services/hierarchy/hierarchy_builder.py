"""Z-hierarchy of the mapping torus of a filtered graph map.

Peeling off the top edge of a connected piece K splits the mapping torus G_K over the
cyclic group generated by t_o, the stable letter at the origin of that edge: an HNN
extension when the edge does not separate K, an amalgam when it does. Rank-one pieces
end the recursion; their mapping tori are Z^2, generated by the core loop and the
stable letter at the piece's lowest vertex.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import HierarchyError
from torus_bns_mcp.services.hierarchy.normalize_core import Component, component_rank, split_components
from torus_bns_mcp.services.torus.characters import canonical_fibration
from torus_bns_mcp.services.torus.filtered_map import FilteredGraphMap
from torus_bns_mcp.services.torus.presentation import MappingTorusPresentation, presentation
from torus_bns_mcp.services.words.free_group import Word, invert_word, multiply, reduce_word

HNN = "hnn"
AMALGAM = "amalgam"


@dataclass(slots=True, frozen=True)
class HierarchyLeaf:
    base: str
    vertices: frozenset[str]
    edges: tuple[int, ...]
    core_loop: Word
    # (core loop, stable letter at base) in presentation generators
    generators: tuple[Word, Word]


@dataclass(slots=True, frozen=True)
class HierarchyNode:
    kind: str
    stratum: int
    edge_name: str
    edge_element: Word
    base: str
    vertices: frozenset[str]
    edges: tuple[int, ...]
    generators: tuple[Word, ...]
    children: tuple[HierarchyNode | HierarchyLeaf, ...]


@dataclass(slots=True, frozen=True)
class HierarchyTree:
    root: HierarchyNode | HierarchyLeaf
    rank: int
    # edges of rank-zero sides kept as trivial amalgams
    absorbed: tuple[str, ...] = ()

    def nodes(self) -> Iterator[HierarchyNode]:
        stack: list[HierarchyNode | HierarchyLeaf] = [self.root]
        while stack:
            current = stack.pop()
            if isinstance(current, HierarchyNode):
                yield current
                stack.extend(reversed(current.children))

    def leaves(self) -> Iterator[HierarchyLeaf]:
        stack: list[HierarchyNode | HierarchyLeaf] = [self.root]
        while stack:
            current = stack.pop()
            if isinstance(current, HierarchyLeaf):
                yield current
            else:
                stack.extend(reversed(current.children))

    @property
    def splitting_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def splittings(self) -> list[HierarchyNode]:
        """Splitting nodes in ascending stratum order."""
        return sorted(self.nodes(), key=lambda node: node.stratum)


def edge_elements(hierarchy: HierarchyTree) -> list[Word]:
    return [node.edge_element for node in hierarchy.splittings()]


def _tree_paths(fmap: FilteredGraphMap, base: str, edges: tuple[int, ...]) -> tuple[dict[str, Word], set[int]]:
    """Breadth-first paths from ``base`` inside a component, and the tree edges used."""
    incident: dict[str, list[int]] = {}
    for index in edges:
        edge = fmap.edge(index)
        if edge.is_loop:
            continue
        incident.setdefault(edge.origin, []).append(index)
        incident.setdefault(edge.terminus, []).append(-index)

    paths: dict[str, Word] = {base: ()}
    used: set[int] = set()
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for letter in incident.get(vertex, []):
            _, target = fmap.step(letter)
            if target not in paths:
                paths[target] = (*paths[vertex], letter)
                used.add(abs(letter))
                queue.append(target)
    return paths, used


class _Builder:
    def __init__(self, fmap: FilteredGraphMap, pres: MappingTorusPresentation) -> None:
        self.fmap = fmap
        self.pres = pres
        self.order = {vertex: position for position, vertex in enumerate(fmap.vertices)}
        self.absorbed: list[str] = []

    def base_of(self, vertices: frozenset[str]) -> str:
        return min(vertices, key=self.order.__getitem__)

    def loops(self, base: str, edges: tuple[int, ...]) -> list[tuple[int, Word]]:
        paths, tree = _tree_paths(self.fmap, base, edges)
        loops: list[tuple[int, Word]] = []
        for index in edges:
            if index in tree:
                continue
            edge = self.fmap.edge(index)
            loops.append((index, multiply(paths[edge.origin], (index,), invert_word(paths[edge.terminus]))))
        return loops

    def generators(self, base: str, edges: tuple[int, ...]) -> tuple[Word, ...]:
        words = [self.pres.path_word(loop) for _, loop in self.loops(base, edges)]
        return (*words, self.pres.vertex_word(base))

    def leaf(self, component: Component) -> HierarchyLeaf:
        vertices, edges = component
        base = self.base_of(vertices)
        ((cycle_edge, loop),) = self.loops(base, edges)
        _, tree = _tree_paths(self.fmap, base, edges)

        def in_component(path: Word) -> Word:
            if any(abs(letter) not in edges for letter in path):
                raise HierarchyError(f"image of the core loop at '{base}' leaves its rank-one piece")
            return reduce_word(letter for letter in path if abs(letter) not in tree)

        # t_base^-1 c t_base = f(c), so the leaf is Z^2 exactly when f fixes c in pi_1 of the piece
        if in_component(self.fmap.map_path(loop)) != in_component(loop):
            raise HierarchyError(
                f"leaf at '{base}' is not Z^2: the core loop through '{self.fmap.edge(cycle_edge).name}' is not fixed"
            )
        return HierarchyLeaf(
            base=base,
            vertices=vertices,
            edges=edges,
            core_loop=loop,
            generators=(self.pres.path_word(loop), self.pres.vertex_word(base)),
        )

    def build(self, component: Component) -> HierarchyNode | HierarchyLeaf:
        if component_rank(component) == 1:
            return self.leaf(component)

        vertices, edges = component
        top = edges[-1]
        edge = self.fmap.edge(top)
        parts = split_components(self.fmap, vertices, edges[:-1])

        if len(parts) == 2 and any(component_rank(part) == 0 for part in parts):
            tree, rest = parts if component_rank(parts[0]) == 0 else parts[::-1]
            self.absorbed.extend([edge.name, *(self.fmap.edge(index).name for index in tree[1])])
            logger.warning(f"Edge '{edge.name}' splits off a tree; absorbing it as a trivial amalgam")
            return self.build(rest)

        base = self.base_of(vertices)
        return HierarchyNode(
            kind=HNN if len(parts) == 1 else AMALGAM,
            stratum=top,
            edge_name=edge.name,
            edge_element=self.pres.vertex_word(edge.origin),
            base=base,
            vertices=vertices,
            edges=edges,
            generators=self.generators(base, edges),
            children=tuple(self.build(part) for part in parts),
        )


def build_hierarchy(fmap: FilteredGraphMap, pres: MappingTorusPresentation | None = None) -> HierarchyTree:
    pres = pres if pres is not None else presentation(fmap)
    builder = _Builder(fmap, pres)
    root = builder.build((frozenset(fmap.vertices), tuple(range(1, len(fmap.edges) + 1))))
    hierarchy = HierarchyTree(root=root, rank=fmap.rank, absorbed=tuple(builder.absorbed))

    if hierarchy.splitting_count != fmap.rank - 1:
        raise HierarchyError(f"expected {fmap.rank - 1} splittings, built {hierarchy.splitting_count}")
    amalgams = sum(1 for node in hierarchy.nodes() if node.kind == AMALGAM)
    if sum(1 for _ in hierarchy.leaves()) != amalgams + 1:
        raise HierarchyError("leaf count does not match the number of amalgams")
    phi0 = canonical_fibration(pres)
    for node in hierarchy.nodes():
        if phi0.value(node.edge_element) == 0:
            raise HierarchyError(f"edge element of '{node.edge_name}' lies in the fiber")

    logger.info(f"Built hierarchy: {hierarchy.splitting_count} splittings, {amalgams + 1} leaves")
    return hierarchy


def render_hierarchy(hierarchy: HierarchyTree, pres: MappingTorusPresentation) -> list[str]:
    lines: list[str] = []

    def visit(current: HierarchyNode | HierarchyLeaf, depth: int) -> None:
        indent = "  " * depth
        if isinstance(current, HierarchyLeaf):
            loop, stable = current.generators
            lines.append(f"{indent}leaf at {current.base}: Z^2 = <{pres.format(loop)}, {pres.format(stable)}>")
            return
        lines.append(
            f"{indent}{current.kind} over '{current.edge_name}' (stratum {current.stratum}): "
            f"edge element {pres.format(current.edge_element)}"
        )
        for child in current.children:
            visit(child, depth + 1)

    visit(hierarchy.root, 0)
    return lines
