from __future__ import annotations

import random
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, FilteredMapError
from torus_bns_mcp.services.torus.filtered_map import STABLE_LETTER, FilteredGraphMap
from torus_bns_mcp.services.words.free_group import (
    FreeAutomorphism,
    Word,
    format_word,
    invert_word,
    map_word,
    multiply,
    word_power,
)


@dataclass(slots=True, frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    @property
    def deficiency(self) -> int:
        return len(self.generators) - len(self.relators)

    def generator_index(self, name: str) -> int:
        try:
            return self.generators.index(name) + 1
        except ValueError:
            raise CharacterError(f"unknown generator '{name}'")

    def format(self, word: Word) -> str:
        return format_word(word, self.generators)

    def describe(self) -> str:
        relators = ", ".join(self.format(relator) for relator in self.relators)
        return f"< {', '.join(self.generators)} | {relators} >"


@dataclass(slots=True, frozen=True)
class MappingTorusPresentation(GroupPresentation):
    """Presentation of a mapping torus with the tree-elimination bookkeeping kept.

    ``edge_words`` rewrites every edge (tree edges to the empty word), ``vertex_words``
    gives the stable letter t_v of every vertex, and ``parents`` records the spanning
    tree as vertex -> (parent vertex, path letter from the parent).
    """

    root: str = "v"
    edge_words: tuple[Word, ...] = ()
    vertex_words: Mapping[str, Word] = field(default_factory=dict)
    parents: Mapping[str, tuple[str, int]] = field(default_factory=dict)
    tree_edges: frozenset[int] = frozenset()
    graph_map: FilteredGraphMap | None = None

    @property
    def stable_letter(self) -> Word:
        return (self.generator_index(STABLE_LETTER),)

    def vertex_word(self, vertex: str) -> Word:
        return self.vertex_words[vertex]

    def path_word(self, path: Word) -> Word:
        return map_word(path, self.edge_words)

    def tree_path(self, vertex: str) -> Word:
        """Edge path in the spanning tree from the root to ``vertex``."""
        letters: list[int] = []
        while vertex != self.root:
            parent, letter = self.parents[vertex]
            letters.append(letter)
            vertex = parent
        return tuple(reversed(letters))


def _spanning_tree(fmap: FilteredGraphMap, root: str, seed: int | None) -> dict[str, tuple[str, int]]:
    incident: dict[str, list[int]] = {vertex: [] for vertex in fmap.vertices}
    for index, edge in enumerate(fmap.edges, start=1):
        if edge.is_loop:
            continue
        incident[edge.origin].append(index)
        incident[edge.terminus].append(-index)
    rng = random.Random(seed) if seed is not None else None
    if rng is not None:
        for letters in incident.values():
            rng.shuffle(letters)

    parents: dict[str, tuple[str, int]] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        for letter in incident[vertex]:
            _, target = fmap.step(letter)
            if target not in seen:
                seen.add(target)
                parents[target] = (vertex, letter)
                queue.append(target)
    return parents


def presentation(fmap: FilteredGraphMap, root: str | None = None, seed: int | None = None) -> MappingTorusPresentation:
    """Mapping-torus presentation of a filtered map after eliminating a spanning tree.

    The tree is breadth-first from ``root`` (default: first vertex) in stratum order; a
    ``seed`` shuffles the neighbour order instead.
    """
    root = root if root is not None else fmap.vertices[0]
    if root not in fmap.vertices:
        raise FilteredMapError(f"unknown root vertex '{root}'")
    parents = _spanning_tree(fmap, root, seed)
    tree_edges = frozenset(abs(letter) for _, letter in parents.values())

    survivors = [index for index in range(1, len(fmap.edges) + 1) if index not in tree_edges]
    generators = tuple(fmap.edge(index).name for index in survivors) + (STABLE_LETTER,)
    generator_of = {index: position for position, index in enumerate(survivors, start=1)}
    edge_words = tuple(
        (generator_of[index],) if index in generator_of else () for index in range(1, len(fmap.edges) + 1)
    )

    def rewrite(path: Word) -> Word:
        return map_word(path, edge_words)

    vertex_words: dict[str, Word] = {root: (len(generators),)}
    # parents is filled in breadth-first order, so every parent precedes its children
    for child, (parent, letter) in parents.items():
        suffix = rewrite(fmap.suffixes[abs(letter) - 1])
        # t_terminus = t_origin * w(u) along a tree edge
        step = suffix if letter > 0 else invert_word(suffix)
        vertex_words[child] = multiply(vertex_words[parent], step)

    relators: list[Word] = []
    for index in survivors:
        edge = fmap.edge(index)
        letter = edge_words[index - 1]
        relators.append(
            multiply(
                invert_word(vertex_words[edge.origin]),
                letter,
                vertex_words[edge.terminus],
                invert_word(rewrite(fmap.suffixes[index - 1])),
                invert_word(letter),
            )
        )

    logger.info(
        f"Built mapping torus presentation: {len(generators)} generators, {len(relators)} relators, "
        f"{len(tree_edges)} tree edges eliminated"
    )
    return MappingTorusPresentation(
        generators=generators,
        relators=tuple(relators),
        root=root,
        edge_words=edge_words,
        vertex_words=vertex_words,
        parents=parents,
        tree_edges=tree_edges,
        graph_map=fmap,
    )


def rose_presentation(alpha: FreeAutomorphism) -> MappingTorusPresentation:
    """<x_1..x_n, t | t^-1 x_i t alpha(x_i)^-1> for an arbitrary automorphism."""
    n = alpha.rank
    t = n + 1
    relators = tuple(multiply((-t, index, t), invert_word(alpha.image(index))) for index in range(1, n + 1))
    return MappingTorusPresentation(
        generators=tuple(f"x{index}" for index in range(1, n + 1)) + (STABLE_LETTER,),
        relators=relators,
        root="v",
        edge_words=tuple((index,) for index in range(1, n + 1)),
        vertex_words={"v": (t,)},
    )


@dataclass(slots=True, frozen=True)
class PowerLift:
    """Embedding of the mapping torus of alpha^k into that of alpha.

    Edge letters go to their images in F_n and the stable letter goes to t^k w, where the
    twist w is empty unless the power is given on a marked graph.
    """

    power: int
    images: tuple[Word, ...]
    twist: Word = ()

    def lift(self, word: Word) -> Word:
        return map_word(word, self.images)


def power_lift(source: GroupPresentation, target: GroupPresentation, power: int) -> PowerLift:
    images: list[Word] = []
    for name in source.generators:
        if name == STABLE_LETTER:
            images.append(word_power((target.generator_index(STABLE_LETTER),), power))
        else:
            images.append((target.generator_index(name),))
    return PowerLift(power, tuple(images))


def identity_lift(source: GroupPresentation) -> PowerLift:
    return PowerLift(1, tuple((index,) for index in range(1, len(source.generators) + 1)))

