"""Characters G -> Q on a presentation and the lattice Hom(G, Z) they live in."""

from __future__ import annotations

import math
import re
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy import ZZ, Matrix, Rational, eye
from sympy.matrices.normalforms import smith_normal_decomp

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, InputParseError
from torus_bns_mcp.services.torus.filtered_map import STABLE_LETTER
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.words.free_group import Word, exponent_sums

_ASSIGNMENT_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?\d+(?:/\d+)?)\s*$")


@dataclass(slots=True, frozen=True)
class CharacterClass:
    generators: tuple[str, ...]
    values: tuple[Fraction, ...]

    def value(self, word: Word) -> Fraction:
        return evaluate_character(self, word)

    @property
    def is_primitive_integer(self) -> bool:
        return all(v.denominator == 1 for v in self.values) and math.gcd(*(int(v) for v in self.values)) == 1

    def normalized(self) -> CharacterClass:
        """The positive multiple that is a primitive integer vector."""
        scale = math.lcm(*(v.denominator for v in self.values))
        integers = [int(v * scale) for v in self.values]
        divisor = math.gcd(*integers)
        return CharacterClass(self.generators, tuple(Fraction(x // divisor) for x in integers))

    def scaled(self, factor: Fraction | int) -> CharacterClass:
        return CharacterClass(self.generators, tuple(v * factor for v in self.values))

    def as_dict(self) -> dict[str, str]:
        return {name: str(value) for name, value in zip(self.generators, self.values)}


def evaluate_character(phi: CharacterClass, word: Word) -> Fraction:
    total = Fraction(0)
    for letter in word:
        index = abs(letter)
        if index > len(phi.values):
            raise CharacterError(f"unknown generator index {index} for a character on {len(phi.values)} generators")
        total += phi.values[index - 1] if letter > 0 else -phi.values[index - 1]
    return total


def validate_character(presentation: GroupPresentation, values: Sequence[Fraction | int]) -> CharacterClass:
    width = len(presentation.generators)
    if len(values) != width:
        raise CharacterError(f"character has {len(values)} values but the presentation has {width} generators")
    phi = CharacterClass(presentation.generators, tuple(Fraction(v) for v in values))
    if all(v == 0 for v in phi.values):
        raise CharacterError("the zero homomorphism is not a character class")
    for position, relator in enumerate(presentation.relators, start=1):
        if phi.value(relator) != 0:
            raise CharacterError(
                f"character does not vanish on relator {position} ({presentation.format(relator)}); "
                f"it evaluates to {phi.value(relator)}"
            )
    return phi


def parse_character(text: str, presentation: GroupPresentation) -> CharacterClass:
    """Parse ``"x1=0, x2=1/2, t=1"``; every generator must be assigned exactly once."""
    assigned: dict[str, Fraction] = {}
    for chunk in filter(None, (part.strip() for part in re.split(r"[,;]", text))):
        match = _ASSIGNMENT_RE.match(chunk)
        if match is None:
            raise InputParseError(f"malformed character assignment '{chunk}'; expected name=value")
        name, raw = match.groups()
        if name in assigned:
            raise InputParseError(f"generator '{name}' assigned twice")
        assigned[name] = Fraction(raw)

    unknown = sorted(set(assigned) - set(presentation.generators))
    if unknown:
        raise CharacterError(f"unknown generators in character: {', '.join(unknown)}")
    missing = [name for name in presentation.generators if name not in assigned]
    if missing:
        raise CharacterError(f"character leaves generators unassigned: {', '.join(missing)}")
    return validate_character(presentation, [assigned[name] for name in presentation.generators])


def canonical_fibration(presentation: GroupPresentation) -> CharacterClass:
    """phi_0: zero on every edge letter, one on the stable letter."""
    return CharacterClass(
        presentation.generators,
        tuple(Fraction(1 if name == STABLE_LETTER else 0) for name in presentation.generators),
    )


def relator_matrix(presentation: GroupPresentation) -> list[list[int]]:
    return [exponent_sums(relator, len(presentation.generators)) for relator in presentation.relators]


def _smith(rows: list[list[int]], width: int) -> tuple[list[int], Matrix]:
    """Diagonal of the Smith form S = U A V of the relation matrix A, and the column transform V."""
    if not rows:
        return [], eye(width)
    smith, _, transform = smith_normal_decomp(Matrix(rows), domain=ZZ)
    return [int(smith[i, i]) for i in range(min(smith.shape))], transform


def _kernel_columns(diagonal: list[int], transform: Matrix) -> list[tuple[int, ...]]:
    width = transform.rows
    free = [j for j in range(width) if j >= len(diagonal) or diagonal[j] == 0]
    return [tuple(int(transform[i, j]) for i in range(width)) for j in free]


def integer_kernel(rows: list[list[int]], width: int) -> list[tuple[int, ...]]:
    """A Z-basis of {c in Z^width : rows . c = 0}: the columns of V over zero Smith entries."""
    return _kernel_columns(*_smith(rows, width))


@dataclass(slots=True, frozen=True)
class CharacterLattice:
    b1: int
    basis: tuple[tuple[int, ...], ...]
    torsion: tuple[int, ...]

    def coordinates(self, phi: CharacterClass) -> tuple[Fraction, ...]:
        """Rational coordinates of ``phi`` in ``basis``."""
        if self.basis and len(phi.values) != len(self.basis[0]):
            raise CharacterError(f"character has {len(phi.values)} values, lattice vectors have {len(self.basis[0])}")
        if not self.basis:
            return ()
        b = Matrix([list(vector) for vector in self.basis]).T
        target = Matrix([Rational(v.numerator, v.denominator) for v in phi.values])
        solution = (b.T * b).LUsolve(b.T * target)
        if b * solution != target:
            raise CharacterError("character is not in the span of the character lattice")
        return tuple(Fraction(int(x.p), int(x.q)) for x in solution)


def character_lattice(presentation: GroupPresentation) -> CharacterLattice:
    width = len(presentation.generators)
    diagonal, transform = _smith(relator_matrix(presentation), width)
    basis = _kernel_columns(diagonal, transform)
    torsion = tuple(abs(d) for d in diagonal if abs(d) > 1)
    logger.info(f"Character lattice: b1 = {len(basis)}, torsion = {list(torsion)}")
    return CharacterLattice(len(basis), tuple(basis), torsion)


def primitive_character(presentation: GroupPresentation, phi: CharacterClass) -> CharacterClass:
    """Validate ``phi`` on ``presentation`` and rescale it to a primitive integer class if needed."""
    phi = validate_character(presentation, phi.values)
    if not phi.is_primitive_integer:
        normalized = phi.normalized()
        logger.warning(f"Character {phi.as_dict()} is not primitive; using {normalized.as_dict()}")
        phi = normalized
    return phi
