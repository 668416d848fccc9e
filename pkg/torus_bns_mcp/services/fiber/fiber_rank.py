"""Fibration verdicts and fiber ranks for mapping tori of polynomially growing automorphisms.

For a primitive character phi and edge elements t_1..t_{n-1} of the hierarchy of alpha^k
pushed into G_alpha, phi is a fibration exactly when no phi(t_i) vanishes, and then the
fiber has rank 1 + (|phi(t_1)| + ... + |phi(t_{n-1})|) / k.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, HierarchyError
from torus_bns_mcp.services.hierarchy.hierarchy_builder import HierarchyLeaf, HierarchyNode, HierarchyTree
from torus_bns_mcp.services.torus.characters import CharacterClass, primitive_character
from torus_bns_mcp.services.torus.presentation import GroupPresentation, PowerLift
from torus_bns_mcp.services.words.free_group import Word, format_word

# index of the zero subgroup of Z
INFINITE_INDEX = 0

NOT_IN_SIGMA_VERDICT = "kernel virtually surjects onto F_infinity"


@dataclass(slots=True, frozen=True)
class InSigma:
    rank: int
    k: int
    indices: tuple[int, ...]


@dataclass(slots=True, frozen=True)
class NotInSigma:
    # 1-based position of the first edge element killed by phi
    witness: int
    witness_element: Word
    discrete: bool = True
    verdict: str = NOT_IN_SIGMA_VERDICT


FiberVerdict = InSigma | NotInSigma


def _integer_values(phi: CharacterClass, words: Sequence[Word]) -> list[int]:
    values = [phi.value(word) for word in words]
    if any(value.denominator != 1 for value in values):
        raise CharacterError("relative index needs an integer character")
    return [int(value) for value in values]


def relative_index(phi: CharacterClass, generators: Sequence[Word]) -> int:
    """[phi(G) : phi(H)] for H generated by ``generators``; ``INFINITE_INDEX`` when phi(H) = 0."""
    return math.gcd(*_integer_values(phi, generators)) if generators else INFINITE_INDEX


def classify(
    pres: GroupPresentation,
    hierarchy: HierarchyTree,
    phi: CharacterClass,
    k: int,
    lift: PowerLift | None = None,
) -> FiberVerdict:
    phi = primitive_character(pres, phi)
    elements = [node.edge_element for node in hierarchy.splittings()]
    if lift is not None:
        elements = [lift.lift(element) for element in elements]

    indices = [relative_index(phi, [element]) for element in elements]
    for position, (index, element) in enumerate(zip(indices, elements), start=1):
        if index == INFINITE_INDEX:
            logger.info(f"Character kills edge element t_{position} = {pres.format(element)}")
            return NotInSigma(witness=position, witness_element=element)

    total = sum(indices)
    if total % k:
        raise HierarchyError(f"edge indices sum to {total}, which is not divisible by k = {k}")
    return InSigma(rank=1 + total // k, k=k, indices=tuple(indices))


@dataclass(slots=True, frozen=True)
class OrbitCount:
    kind: str
    edge_name: str
    # one entry per child: [phi(G_K) : phi(G_child)]
    vertex_orbits: tuple[int, ...]
    edge_orbits: int
    betti: int
    free_factors: int


@dataclass(slots=True, frozen=True)
class KernelDecomposition:
    splittings: tuple[OrbitCount, ...]
    leaf_kernels: tuple[str, ...]
    betti: int
    free_factors: int
    # rank of ker phi inside the mapping torus of alpha^k
    power_rank: int
    power_index: int
    k: int
    rank: int


def kernel_decomposition(
    pres: GroupPresentation,
    hierarchy: HierarchyTree,
    phi: CharacterClass,
    k: int = 1,
    lift: PowerLift | None = None,
    power_pres: GroupPresentation | None = None,
) -> KernelDecomposition:
    """Rank of ker phi from the Bass-Serre orbit counts along the hierarchy.

    Node groups and edge elements live in ``power_pres`` (the mapping torus of alpha^k);
    ``lift`` carries them into ``pres``, where ``phi`` is given.
    """
    phi = primitive_character(pres, phi)
    power_pres = power_pres if power_pres is not None else pres

    def value(word: Word) -> int:
        image = lift.lift(word) if lift is not None else word
        return int(phi.value(image))

    def index(words: Sequence[Word]) -> int:
        return math.gcd(*(value(word) for word in words))

    splittings: list[OrbitCount] = []
    leaf_kernels: list[str] = []

    def visit(current: HierarchyNode | HierarchyLeaf) -> tuple[int, int]:
        if isinstance(current, HierarchyLeaf):
            if index(current.generators) == 0:
                raise HierarchyError(f"character vanishes on the Z^2 leaf at '{current.base}'")
            leaf_kernels.append("Z")
            return 0, 1

        own = index(current.generators)
        edge = abs(value(current.edge_element))
        if edge == 0:
            raise CharacterError(
                f"character kills the edge element of '{current.edge_name}' "
                f"({format_word(current.edge_element, power_pres.generators)}); it is not in Sigma"
            )
        children = [(index(child.generators), visit(child)) for child in current.children]
        orbits = tuple(child_index // own for child_index, _ in children)
        betti = sum(v * b for v, (_, (b, _)) in zip(orbits, children)) + edge // own - sum(orbits) + 1
        free = sum(v * z for v, (_, (_, z)) in zip(orbits, children))
        splittings.append(OrbitCount(current.kind, current.edge_name, orbits, edge // own, betti, free))
        return betti, free

    betti, free = visit(hierarchy.root)
    power_rank = betti + free
    power_index = index(hierarchy.root.generators)
    if ((power_rank - 1) * power_index) % k:
        raise HierarchyError(f"kernel rank {power_rank} of the power map does not descend through k = {k}")
    rank = 1 + (power_rank - 1) * power_index // k
    return KernelDecomposition(
        splittings=tuple(sorted(splittings, key=lambda count: count.edge_name)),
        leaf_kernels=tuple(leaf_kernels),
        betti=betti,
        free_factors=free,
        power_rank=power_rank,
        power_index=power_index,
        k=k,
        rank=rank,
    )
