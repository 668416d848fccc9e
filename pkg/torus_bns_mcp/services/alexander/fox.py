"""Fox calculus on a deficiency-one presentation, specialized along a character.

Every generator h is sent to s^phi(h). The maximal minors of the resulting Alexander
matrix generate an ideal whose gcd, for a fibration phi, has exponent span equal to the
rank of the fiber.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from sympy import ZZ, Poly
from sympy.polys.matrices import DomainMatrix

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import AlexanderError, CharacterError
from torus_bns_mcp.services.alexander.laurent import S, LaurentPolynomial
from torus_bns_mcp.services.torus.characters import CharacterClass, primitive_character
from torus_bns_mcp.services.torus.presentation import GroupPresentation
from torus_bns_mcp.services.words.free_group import Word

_RING = ZZ[S]


def _integer_character(phi: CharacterClass) -> list[int]:
    if any(value.denominator != 1 for value in phi.values):
        raise CharacterError("Fox calculus needs an integer character")
    return [int(value) for value in phi.values]


def fox_derivative_specialized(relator: Word, generator: int, phi: CharacterClass) -> LaurentPolynomial:
    """d(relator)/d(generator) pushed through h -> s^phi(h); ``generator`` is a 1-based index."""
    values = _integer_character(phi)
    if not 1 <= generator <= len(values):
        raise CharacterError(f"unknown generator index {generator}")
    derivative: dict[int, int] = {}
    prefix = 0
    for letter in relator:
        index = abs(letter)
        if index > len(values):
            raise CharacterError(f"relator uses unknown generator index {index}")
        step = values[index - 1]
        if letter == generator:
            derivative[prefix] = derivative.get(prefix, 0) + 1
        elif letter == -generator:
            derivative[prefix - step] = derivative.get(prefix - step, 0) - 1
        prefix += step if letter > 0 else -step
    return LaurentPolynomial.from_dict(derivative)


def alexander_matrix(pres: GroupPresentation, phi: CharacterClass) -> list[list[LaurentPolynomial]]:
    """One row per relator, one column per generator."""
    width = len(pres.generators)
    return [
        [fox_derivative_specialized(relator, generator, phi) for generator in range(1, width + 1)]
        for relator in pres.relators
    ]


def fox_row_identity(row: Sequence[LaurentPolynomial], phi: CharacterClass) -> bool:
    """The fundamental identity sum_g (dr/dg)(s^phi(g) - 1) = s^phi(r) - 1, which is 0 for a relator."""
    total = LaurentPolynomial()
    for entry, value in zip(row, _integer_character(phi)):
        total = total + entry * (LaurentPolynomial.monomial(value) - LaurentPolynomial.monomial(0))
    return total.is_zero


@dataclass(slots=True, frozen=True)
class AlexanderResult:
    polynomial: LaurentPolynomial
    degenerate: bool
    # shifted maximal minors, one per deleted generator column
    minors: tuple[LaurentPolynomial, ...]

    @property
    def degree(self) -> int:
        return self.polynomial.degree


def _ring_element(entry: LaurentPolynomial, low: int):
    return _RING.from_sympy(sum((c * S**e for e, c in entry.shifted(-low).terms), start=0))


def _minor(rows: list[list], deleted: int) -> Poly:
    entries = [[entry for j, entry in enumerate(row) if j != deleted] for row in rows]
    size = len(entries)
    if size == 0:
        return Poly(1, S, domain="ZZ")
    determinant = DomainMatrix(entries, (size, size), _RING).det()
    return Poly(_RING.to_sympy(determinant), S, domain="ZZ")


def alexander_polynomial(pres: GroupPresentation, phi: CharacterClass) -> AlexanderResult:
    if pres.deficiency != 1:
        raise AlexanderError(
            f"presentation has deficiency {pres.deficiency}; the Alexander polynomial needs deficiency 1"
        )
    phi = primitive_character(pres, phi)
    matrix = alexander_matrix(pres, phi)
    for position, row in enumerate(matrix, start=1):
        if not fox_row_identity(row, phi):
            relator = pres.format(pres.relators[position - 1])
            raise AlexanderError(f"Fox identity fails on relator {position} ({relator})")

    # multiplying a row by a unit s^j leaves the minors unchanged up to units
    shifted_rows: list[list] = []
    for row in matrix:
        low = min((entry.min_exponent for entry in row if not entry.is_zero), default=0)
        shifted_rows.append([_ring_element(entry, low) for entry in row])

    minors = [_minor(shifted_rows, column) for column in range(len(pres.generators))]
    gcd = Poly(0, S, domain="ZZ")
    for minor in minors:
        gcd = gcd.gcd(minor)
    polynomial = LaurentPolynomial.from_poly(gcd).normalized()
    degenerate = polynomial.is_zero
    if degenerate:
        logger.warning(f"All maximal minors vanish for character {phi.as_dict()}")
    else:
        logger.info(f"Alexander polynomial {polynomial.format()} of span {polynomial.degree}")
    return AlexanderResult(
        polynomial=polynomial,
        degenerate=degenerate,
        minors=tuple(LaurentPolynomial.from_poly(minor) for minor in minors),
    )


def oracle_rank(pres: GroupPresentation, phi: CharacterClass) -> int:
    """Fiber rank read off as the exponent span of the Alexander polynomial."""
    result = alexander_polynomial(pres, phi)
    if result.degenerate:
        raise AlexanderError("Alexander polynomial is zero; the character is not a fibration")
    return result.degree
