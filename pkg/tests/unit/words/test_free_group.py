import pytest

from torus_bns_mcp.errors import AutomorphismError, WordError
from torus_bns_mcp.services.words.free_group import (
    FreeAutomorphism,
    abelianization_matrix,
    apply_automorphism,
    compose,
    cyclically_reduce,
    exponent_sums,
    format_word,
    generates_free_group,
    identity,
    inverse_triangular,
    letters_from_token,
    map_word,
    multiply,
    parse_word,
    power,
    reduce_word,
    validate_automorphism,
    word_power,
)


class TestWords:
    """Free reduction and word arithmetic."""

    def test_reduce_cancels_adjacent_inverses(self) -> None:
        assert reduce_word([1, 2, -2, -1, 3]) == (3,)

    def test_reduce_rejects_generator_zero(self) -> None:
        with pytest.raises(WordError, match="index 0"):
            reduce_word([1, 0])

    def test_reduce_checks_rank(self) -> None:
        with pytest.raises(WordError, match="out of range 1..2"):
            reduce_word([3], rank=2)

    def test_multiply_and_power(self) -> None:
        assert multiply((1, 2), (-2, 3)) == (1, 3)
        assert word_power((1, 2), 2) == (1, 2, 1, 2)
        assert word_power((1, 2), -1) == (-2, -1)
        assert word_power((1,), 0) == ()

    def test_cyclically_reduce(self) -> None:
        assert cyclically_reduce((-1, 2, 3, 1)) == (2, 3)
        assert cyclically_reduce((1, -1)) == ()

    def test_exponent_sums(self) -> None:
        assert exponent_sums((1, 2, -1, -1, 3), 3) == [-1, 1, 1]

    def test_map_word_inverts_images(self) -> None:
        images = [(1, 2), (2,)]
        assert map_word((-1, 2), images) == (-2, -1, 2)

    def test_map_word_missing_image(self) -> None:
        with pytest.raises(WordError, match="has no image"):
            map_word((3,), [(1,), (2,)])

    @pytest.mark.parametrize(
        ("token", "letters"),
        [
            ("x1", [1]),
            ("X2", [-2]),
            ("x3^2", [3, 3]),
            ("x2^-3", [-2, -2, -2]),
            ("X1^-1", [1]),
            ("1", []),
        ],
    )
    def test_letters_from_token(self, token: str, letters: list[int]) -> None:
        assert letters_from_token(token) == letters

    @pytest.mark.parametrize("token", ["x0", "y1", "x", "x1^", "x1x2"])
    def test_malformed_tokens(self, token: str) -> None:
        with pytest.raises(WordError, match="malformed generator token"):
            letters_from_token(token)

    def test_parse_and_format(self) -> None:
        word = parse_word("x1 x2^2 X2 x3^-1")
        assert word == (1, 2, -3)
        assert format_word(word) == "x1 x2 x3^-1"
        assert format_word(()) == "1"
        assert format_word((1, -2), ["a", "t"]) == "a t^-1"


class TestAutomorphisms:
    """Automorphisms, composition and certification."""

    def test_identity_is_verified(self) -> None:
        alpha = identity(3)
        assert alpha.verified
        assert alpha.describe() == ["x1 -> x1", "x2 -> x2", "x3 -> x3"]

    def test_trivial_image_rejected(self) -> None:
        with pytest.raises(AutomorphismError, match="trivial"):
            FreeAutomorphism(2, ((1,), ()))

    def test_unreduced_image_rejected(self) -> None:
        with pytest.raises(AutomorphismError, match="not freely reduced"):
            FreeAutomorphism(2, ((1, 2, -2), (2,)))

    def test_compose_applies_right_first(self) -> None:
        alpha = FreeAutomorphism(2, ((1,), (2, 1)))
        beta = FreeAutomorphism(2, ((2,), (1,)))
        # alpha(beta(x1)) = alpha(x2)
        assert compose(alpha, beta).images == ((2, 1), (1,))

    def test_power(self) -> None:
        alpha = FreeAutomorphism(2, ((1,), (2, 1)))
        assert power(alpha, 3).image(2) == (2, 1, 1, 1)
        assert power(alpha, 0).images == ((1,), (2,))

    def test_negative_power_rejected(self) -> None:
        with pytest.raises(AutomorphismError, match="negative powers"):
            power(identity(2), -1)

    def test_apply_checks_rank(self) -> None:
        with pytest.raises(WordError, match="beyond the rank"):
            apply_automorphism(identity(2), (3,))

    def test_abelianization_columns(self) -> None:
        alpha = FreeAutomorphism(2, ((1,), (2, 1)))
        assert abelianization_matrix(alpha).tolist() == [[1, 1], [0, 1]]

    def test_inverse_triangular(self) -> None:
        alpha = FreeAutomorphism(3, ((1,), (2, 1), (3, -2, 1)))
        inverse = inverse_triangular(alpha)
        assert inverse is not None
        assert inverse.verified
        assert compose(alpha, inverse).images == ((1,), (2,), (3,))

    def test_inverse_triangular_needs_single_occurrence(self) -> None:
        swap = FreeAutomorphism(2, ((2,), (1,)))
        assert inverse_triangular(swap) is None

    def test_validate_rejects_bad_determinant(self) -> None:
        with pytest.raises(AutomorphismError, match="determinant 2"):
            validate_automorphism(2, [(1, 1, 2), (2,)])

    def test_validate_with_explicit_inverse(self) -> None:
        alpha = validate_automorphism(2, [(2,), (1,)], [(2,), (1,)])
        assert alpha.verified

    def test_validate_rejects_wrong_inverse(self) -> None:
        with pytest.raises(AutomorphismError, match="does not compose to the identity"):
            validate_automorphism(2, [(1,), (2, 1)], [(1,), (2, 1)])

    def test_validate_accepts_unverified(self) -> None:
        alpha = validate_automorphism(2, [(2,), (1,)])
        assert not alpha.verified


class TestGeneratesFreeGroup:
    """Stallings folding decides whether a finite set of words generates F_n."""

    @pytest.mark.parametrize(
        "words",
        [
            [(1,), (2,)],
            [(1, 2), (2,)],
            [(1,), (1, 2, -1)],
            [(2, 1, -2), (2,)],
            [(1, 1, 2), (1, 2), (3,), (3, 2)],
        ],
    )
    def test_generating_sets(self, words: list[tuple[int, ...]]) -> None:
        rank = max(abs(letter) for word in words for letter in word)
        assert generates_free_group(words, rank)

    @pytest.mark.parametrize(
        ("words", "rank"),
        [
            ([(1, 1), (2,)], 2),
            ([(1,), (2, 1, -2)], 2),
            ([(1, 2, -1, -2)], 2),
            ([(1,), (2,)], 3),
            ([], 1),
        ],
    )
    def test_proper_subgroups(self, words: list[tuple[int, ...]], rank: int) -> None:
        assert not generates_free_group(words, rank)

    def test_rank_one(self) -> None:
        assert generates_free_group([(-1,)], 1)
        assert not generates_free_group([(1, 1), (1, 1, 1, 1)], 1)
        assert generates_free_group([(1, 1), (1, 1, 1)], 1)

    def test_checks_rank(self) -> None:
        with pytest.raises(WordError, match="out of range"):
            generates_free_group([(3,)], 2)
