"""Words in free groups and automorphisms given by generator images.

A word is a flat tuple of nonzero integers: ``i`` stands for the generator ``x_i`` and
``-i`` for its inverse. Generators are numbered from 1.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import pairwise

import networkx as nx
from networkx.utils import UnionFind
from sympy import ImmutableMatrix

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import AutomorphismError, WordError

Word = tuple[int, ...]

EMPTY_WORD: Word = ()

_TOKEN_RE = re.compile(r"^([xX])(\d+)(?:\^(-?\d+))?$")


def reduce_word(letters: Iterable[int], rank: int | None = None) -> Word:
    """Freely reduce a raw letter sequence, checking indices against ``rank`` when given."""
    stack: list[int] = []
    for letter in letters:
        if letter == 0:
            raise WordError("generator index 0 is not allowed; generators are numbered from 1")
        if rank is not None and abs(letter) > rank:
            raise WordError(f"generator index {abs(letter)} out of range 1..{rank}")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def invert_word(word: Word) -> Word:
    return tuple(-letter for letter in reversed(word))


def multiply(*words: Word) -> Word:
    return reduce_word(letter for word in words for letter in word)


def word_power(word: Word, exponent: int) -> Word:
    base = word if exponent >= 0 else invert_word(word)
    return reduce_word(base * abs(exponent))


def cyclically_reduce(word: Word) -> Word:
    word = reduce_word(word)
    start, end = 0, len(word)
    while end - start >= 2 and word[start] == -word[end - 1]:
        start += 1
        end -= 1
    return word[start:end]


def exponent_sums(word: Word, rank: int) -> list[int]:
    sums = [0] * rank
    for letter in word:
        sums[abs(letter) - 1] += 1 if letter > 0 else -1
    return sums


def map_word(word: Word, images: Sequence[Word]) -> Word:
    """Apply the homomorphism sending generator ``i`` to ``images[i - 1]``."""
    out: list[int] = []
    for letter in word:
        index = abs(letter)
        if index > len(images):
            raise WordError(f"generator index {index} has no image (only {len(images)} images given)")
        image = images[index - 1]
        out.extend(image if letter > 0 else invert_word(image))
    return reduce_word(out)


def _folded_core(words: Sequence[Word], rank: int) -> set[tuple[int, int, int]]:
    """Stallings graph of the subgroup generated by ``words``, hanging trees pruned.

    Edges are (origin, generator, terminus) with a positive generator; vertex 0 is the base.
    """
    edges: list[tuple[int, int, int]] = []
    count = 1
    for word in words:
        word = reduce_word(word, rank)
        if not word:
            continue
        path = [0, *range(count, count + len(word) - 1), 0]
        count += len(word) - 1
        for (source, target), letter in zip(pairwise(path), word):
            edges.append((source, letter, target) if letter > 0 else (target, -letter, source))

    classes = UnionFind(range(count))
    folding = True
    while folding:
        folding = False
        outgoing: dict[tuple[int, int], int] = {}
        incoming: dict[tuple[int, int], int] = {}
        for origin, generator, terminus in edges:
            origin, terminus = classes[origin], classes[terminus]
            for table, key, value in (
                (outgoing, (origin, generator), terminus),
                (incoming, (terminus, generator), origin),
            ):
                seen = table.setdefault(key, value)
                if classes[seen] != classes[value]:
                    classes.union(seen, value)
                    folding = True

    base = classes[0]
    core = {(classes[origin], generator, classes[terminus]) for origin, generator, terminus in edges}
    while True:
        degree: Counter[int] = Counter()
        for origin, _, terminus in core:
            degree[origin] += 1
            degree[terminus] += 1
        leaves = {vertex for vertex, valence in degree.items() if valence == 1 and vertex != base}
        if not leaves:
            return core
        core = {edge for edge in core if edge[0] not in leaves and edge[2] not in leaves}


def generates_free_group(words: Sequence[Word], rank: int) -> bool:
    """Whether ``words`` generate all of F_rank: the folded core must be the rose on x_1..x_rank."""
    core = _folded_core(words, rank)
    if any(origin != terminus for origin, _, terminus in core) or len({origin for origin, _, _ in core}) > 1:
        return False
    return {generator for _, generator, _ in core} == set(range(1, rank + 1))


def letters_from_token(token: str) -> list[int]:
    """Letters for a single token such as ``x3``, ``x3^-1``, ``X3`` or ``x2^4``."""
    if token == "1":
        return []
    match = _TOKEN_RE.match(token)
    if match is None:
        raise WordError(f"malformed generator token '{token}'")
    index = int(match.group(2))
    if index == 0:
        raise WordError(f"malformed generator token '{token}': generators are numbered from 1")
    exponent = int(match.group(3)) if match.group(3) is not None else 1
    if match.group(1) == "X":
        exponent = -exponent
    letter = index if exponent > 0 else -index
    return [letter] * abs(exponent)


def parse_word(text: str, rank: int | None = None) -> Word:
    letters: list[int] = []
    for token in text.split():
        letters.extend(letters_from_token(token))
    return reduce_word(letters, rank)


def format_word(word: Word, names: Sequence[str] | None = None) -> str:
    if not word:
        return "1"
    parts: list[str] = []
    for letter in word:
        name = names[abs(letter) - 1] if names is not None else f"x{abs(letter)}"
        parts.append(name if letter > 0 else f"{name}^-1")
    return " ".join(parts)


@dataclass(slots=True, frozen=True)
class FreeAutomorphism:
    rank: int
    images: tuple[Word, ...]
    # True once an inverse has been found and checked in both directions.
    verified: bool = False

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise AutomorphismError(f"rank must be positive, got {self.rank}")
        if len(self.images) != self.rank:
            raise AutomorphismError(f"expected {self.rank} generator images, got {len(self.images)}")
        for index, image in enumerate(self.images, start=1):
            if reduce_word(image, self.rank) != image:
                raise AutomorphismError(f"image of x{index} is not freely reduced")
            if not image:
                raise AutomorphismError(f"image of x{index} is trivial; not an automorphism")

    def image(self, generator: int) -> Word:
        return self.images[generator - 1]

    def describe(self) -> list[str]:
        return [f"x{index} -> {format_word(image)}" for index, image in enumerate(self.images, start=1)]


def identity(rank: int) -> FreeAutomorphism:
    return FreeAutomorphism(rank, tuple((index,) for index in range(1, rank + 1)), verified=True)


def apply_automorphism(alpha: FreeAutomorphism, word: Word) -> Word:
    if any(abs(letter) > alpha.rank for letter in word):
        raise WordError(f"word uses generators beyond the rank {alpha.rank} of the automorphism")
    return map_word(word, alpha.images)


def compose(alpha: FreeAutomorphism, beta: FreeAutomorphism) -> FreeAutomorphism:
    """``alpha`` after ``beta``: x_i goes to alpha(beta(x_i))."""
    if alpha.rank != beta.rank:
        raise AutomorphismError(f"cannot compose automorphisms of ranks {alpha.rank} and {beta.rank}")
    images = tuple(map_word(image, alpha.images) for image in beta.images)
    return FreeAutomorphism(alpha.rank, images, verified=alpha.verified and beta.verified)


def power(alpha: FreeAutomorphism, exponent: int) -> FreeAutomorphism:
    if exponent < 0:
        raise AutomorphismError("negative powers need an inverse; only exponents >= 0 are supported")
    result = identity(alpha.rank)
    for _ in range(exponent):
        result = compose(alpha, result)
    return result


def abelianization_matrix(alpha: FreeAutomorphism) -> ImmutableMatrix:
    """Integer matrix whose column i is the exponent-sum vector of alpha(x_i)."""
    columns = [exponent_sums(image, alpha.rank) for image in alpha.images]
    return ImmutableMatrix(alpha.rank, alpha.rank, lambda row, col: columns[col][row])


def inverse_triangular(alpha: FreeAutomorphism) -> FreeAutomorphism | None:
    """Inverse by back-substitution, when every image has the shape v x_i^(+-1) w.

    Here v and w only involve generators already inverted. Returns ``None`` when no
    such order exists or the candidate fails the two-sided check.
    """
    dependencies = nx.DiGraph()
    dependencies.add_nodes_from(range(1, alpha.rank + 1))
    for generator, image in enumerate(alpha.images, start=1):
        if sum(1 for letter in image if abs(letter) == generator) != 1:
            return None
        for letter in image:
            if abs(letter) != generator:
                dependencies.add_edge(abs(letter), generator)
    if not nx.is_directed_acyclic_graph(dependencies):
        return None

    inverse: dict[int, Word] = {}
    for generator in nx.lexicographical_topological_sort(dependencies):
        image = alpha.image(generator)
        position = next(i for i, letter in enumerate(image) if abs(letter) == generator)
        prefix = map_word(image[:position], [inverse.get(i, (i,)) for i in range(1, alpha.rank + 1)])
        suffix = map_word(image[position + 1 :], [inverse.get(i, (i,)) for i in range(1, alpha.rank + 1)])
        core = multiply(invert_word(prefix), (generator,), invert_word(suffix))
        inverse[generator] = core if image[position] > 0 else invert_word(core)

    candidate = FreeAutomorphism(alpha.rank, tuple(inverse[i] for i in range(1, alpha.rank + 1)))
    if not _is_identity(compose(alpha, candidate)) or not _is_identity(compose(candidate, alpha)):
        return None
    return FreeAutomorphism(candidate.rank, candidate.images, verified=True)


def _is_identity(alpha: FreeAutomorphism) -> bool:
    return all(image == (index,) for index, image in enumerate(alpha.images, start=1))


def validate_automorphism(
    rank: int, images: Sequence[Word], inverse_images: Sequence[Word] | None = None
) -> FreeAutomorphism:
    """Build an automorphism, checking the determinant and, when possible, invertibility.

    Invertibility is certified when an explicit inverse is supplied and composes to the
    identity both ways, or when triangular back-substitution succeeds. Otherwise the
    automorphism is accepted unverified.
    """
    alpha = FreeAutomorphism(rank, tuple(images))
    determinant = abelianization_matrix(alpha).det()
    if abs(determinant) != 1:
        raise AutomorphismError(f"abelianization has determinant {determinant}; an automorphism needs +-1")

    if inverse_images is not None:
        beta = FreeAutomorphism(rank, tuple(inverse_images))
        if not _is_identity(compose(alpha, beta)) or not _is_identity(compose(beta, alpha)):
            raise AutomorphismError("the supplied inverse does not compose to the identity")
        return FreeAutomorphism(rank, alpha.images, verified=True)

    if inverse_triangular(alpha) is not None:
        return FreeAutomorphism(rank, alpha.images, verified=True)

    logger.warning(f"Automorphism of rank {rank} accepted unverified: determinant is +-1 but no inverse was found")
    return alpha
