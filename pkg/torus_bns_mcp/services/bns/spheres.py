from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, HierarchyError
from torus_bns_mcp.services.torus.characters import CharacterClass, CharacterLattice, character_lattice
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.words.free_group import Word, exponent_sums


@dataclass(slots=True, frozen=True)
class Sphere:
    """S(G, t): characters vanishing on t, with ``normal`` in lattice coordinates."""

    normal: tuple[int, ...]
    # exponent sums of the first defining element, in presentation generators
    exponents: tuple[int, ...]
    elements: tuple[Word, ...]


@dataclass(slots=True, frozen=True)
class SphereArrangement:
    generators: tuple[str, ...]
    lattice: CharacterLattice
    spheres: tuple[Sphere, ...]

    @property
    def dimension(self) -> int:
        return self.lattice.b1

    @property
    def normals(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sphere.normal for sphere in self.spheres)


def _primitive(vector: Sequence[int]) -> tuple[int, ...]:
    divisor = math.gcd(*vector)
    primitive = [entry // divisor for entry in vector]
    leading = next(entry for entry in primitive if entry != 0)
    return tuple(entry if leading > 0 else -entry for entry in primitive)


def sigma_arrangement(
    pres: GroupPresentation, elements: Sequence[Word], lattice: CharacterLattice | None = None
) -> SphereArrangement:
    """One sphere per edge element; ``elements`` are words in the generators of ``pres``."""
    lattice = lattice if lattice is not None else character_lattice(pres)
    width = len(pres.generators)
    merged: dict[tuple[int, ...], Sphere] = {}
    for element in elements:
        exponents = tuple(exponent_sums(element, width))
        normal = [sum(b * e for b, e in zip(vector, exponents)) for vector in lattice.basis]
        if not any(normal):
            raise HierarchyError(f"edge element {pres.format(element)} pairs to zero with every character")
        key = _primitive(normal)
        if key in merged:
            sphere = merged[key]
            merged[key] = Sphere(sphere.normal, sphere.exponents, (*sphere.elements, element))
        else:
            merged[key] = Sphere(key, exponents, (element,))

    spheres = tuple(merged[key] for key in sorted(merged))
    logger.info(f"Sphere arrangement: {len(spheres)} spheres in dimension {lattice.b1}")
    return SphereArrangement(pres.generators, lattice, spheres)


def _pairings(arrangement: SphereArrangement, phi: CharacterClass) -> list[Fraction]:
    if phi.generators != arrangement.generators:
        raise CharacterError(
            f"dimension mismatch: character is on ({', '.join(phi.generators)}), "
            f"arrangement on ({', '.join(arrangement.generators)})"
        )
    coordinates = arrangement.lattice.coordinates(phi)
    return [sum(y * n for y, n in zip(coordinates, sphere.normal)) for sphere in arrangement.spheres]


def sigma_contains(arrangement: SphereArrangement, phi: CharacterClass) -> bool:
    return all(value != 0 for value in _pairings(arrangement, phi))


def sigma_witness(arrangement: SphereArrangement, phi: CharacterClass) -> int | None:
    """Index of the first sphere containing ``phi``, or ``None``."""
    for index, value in enumerate(_pairings(arrangement, phi)):
        if value == 0:
            return index
    return None


def sphere_label(arrangement: SphereArrangement, sphere: Sphere) -> str:
    """The sphere as a linear equation on generator values, e.g. ``phi(t) + phi(a1) = 0``."""
    text = ""
    for name, coefficient in zip(arrangement.generators, sphere.exponents):
        if coefficient == 0:
            continue
        magnitude = "" if abs(coefficient) == 1 else f"{abs(coefficient)} "
        if not text:
            text = f"{'-' if coefficient < 0 else ''}{magnitude}phi({name})"
        else:
            text += f" {'-' if coefficient < 0 else '+'} {magnitude}phi({name})"
    return f"{text or '0'} = 0"
