from fractions import Fraction

import pytest

from torus_bns_mcp.errors import CharacterError, InputParseError
from torus_bns_mcp.services.torus.characters import (
    canonical_fibration,
    character_lattice,
    integer_kernel,
    parse_character,
    primitive_character,
    validate_character,
)
from torus_bns_mcp.services.torus.presentation import GroupPresentation, rose_presentation
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, identity


class TestParseCharacter:
    """Character assignments on presentation generators."""

    def test_parse(self) -> None:
        pres = rose_presentation(identity(2))
        phi = parse_character("x1=1, x2=-2; t=1/2", pres)
        assert phi.values == (Fraction(1), Fraction(-2), Fraction(1, 2))
        assert phi.as_dict() == {"x1": "1", "x2": "-2", "t": "1/2"}

    def test_missing_generator(self) -> None:
        pres = rose_presentation(identity(2))
        with pytest.raises(CharacterError, match="unassigned: t"):
            parse_character("x1=1, x2=0", pres)

    def test_unknown_generator(self) -> None:
        pres = rose_presentation(identity(2))
        with pytest.raises(CharacterError, match="unknown generators in character: y"):
            parse_character("x1=1, x2=0, t=0, y=1", pres)

    def test_malformed(self) -> None:
        pres = rose_presentation(identity(2))
        with pytest.raises(InputParseError, match="malformed character assignment"):
            parse_character("x1:1", pres)

    def test_assigned_twice(self) -> None:
        pres = rose_presentation(identity(2))
        with pytest.raises(InputParseError, match="assigned twice"):
            parse_character("x1=1, x1=2, x2=0, t=0", pres)

    def test_must_vanish_on_relators(self) -> None:
        pres = rose_presentation(FreeAutomorphism(2, ((2,), (1,))))
        with pytest.raises(CharacterError, match="does not vanish on relator 1"):
            parse_character("x1=1, x2=0, t=0", pres)

    def test_zero_character(self) -> None:
        pres = rose_presentation(identity(1))
        with pytest.raises(CharacterError, match="zero homomorphism"):
            validate_character(pres, [0, 0])


class TestCharacterClass:
    """Normalization and evaluation."""

    def test_normalized(self) -> None:
        pres = rose_presentation(identity(2))
        phi = validate_character(pres, [Fraction(1, 2), Fraction(3, 2), Fraction(1)])
        assert not phi.is_primitive_integer
        assert phi.normalized().values == (1, 3, 2)

    def test_primitive_character_rescales(self) -> None:
        pres = rose_presentation(identity(2))
        phi = validate_character(pres, [0, 0, 3])
        assert primitive_character(pres, phi).values == (0, 0, 1)

    def test_canonical_fibration(self) -> None:
        pres = rose_presentation(identity(3))
        phi = canonical_fibration(pres)
        assert phi.values == (0, 0, 0, 1)
        assert phi.value((4, 1, -4)) == 0


class TestCharacterLattice:
    """Hom(G, Z) from the relation matrix."""

    def test_integer_kernel(self) -> None:
        basis = integer_kernel([[1, -1, 0]], 3)
        assert len(basis) == 2
        for vector in basis:
            assert vector[0] == vector[1]

    def test_integer_kernel_is_saturated(self) -> None:
        # a Z-basis of the kernel of r spans a plane whose cross product is +-r/gcd(r)
        (a1, a2, a3), (b1, b2, b3) = integer_kernel([[2, 4, 6]], 3)
        cross = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
        assert cross in {(1, 2, 3), (-1, -2, -3)}

    def test_integer_kernel_with_torsion_rows(self) -> None:
        assert integer_kernel([[2, 0, 0], [0, 3, 0]], 3) in ([(0, 0, 1)], [(0, 0, -1)])

    def test_integer_kernel_without_rows(self) -> None:
        assert integer_kernel([], 2) == [(1, 0), (0, 1)]

    def test_identity_rose(self) -> None:
        lattice = character_lattice(rose_presentation(identity(2)))
        assert lattice.b1 == 3
        assert lattice.torsion == ()

    def test_swap_rose(self) -> None:
        pres = rose_presentation(FreeAutomorphism(2, ((2,), (1,))))
        lattice = character_lattice(pres)
        assert lattice.b1 == 2
        phi = parse_character("x1=1, x2=1, t=5", pres)
        coordinates = lattice.coordinates(phi)
        rebuilt = [sum(c * v[i] for c, v in zip(coordinates, lattice.basis)) for i in range(3)]
        assert rebuilt == [1, 1, 5]

    def test_torsion(self) -> None:
        # <a, b | a^2 b^-2>
        pres = GroupPresentation(("a", "b"), ((1, 1, -2, -2),))
        lattice = character_lattice(pres)
        assert lattice.b1 == 1
        assert lattice.torsion == (2,)
