import random

from torus_bns_mcp.services.fiber.corpus import (
    MAX_RANK,
    corpus_case,
    random_triangular_automorphism,
    run_corpus,
)
from torus_bns_mcp.services.torus.filtered_map import find_triangular_order


class TestRandomAutomorphisms:
    def test_triangular_and_verified(self) -> None:
        rng = random.Random(11)
        for _ in range(25):
            alpha = random_triangular_automorphism(rng)
            assert 2 <= alpha.rank <= MAX_RANK
            assert alpha.verified
            assert find_triangular_order(alpha) is not None

    def test_seeded_case_is_reproducible(self) -> None:
        first = corpus_case(0, random_triangular_automorphism(random.Random(5)), random.Random(6))
        second = corpus_case(0, random_triangular_automorphism(random.Random(5)), random.Random(6))
        assert first == second


class TestCorpus:
    """Hierarchy, orbit-count and Alexander ranks agree on random fibrations."""

    def test_three_way_agreement(self) -> None:
        cases = run_corpus(seed=0, count=200)
        assert len(cases) == 200
        for case in cases:
            assert case.agree, f"case {case.index}: {case.automorphism.describe()}"
            assert case.rank_bound_holds
            assert case.b1 >= 2
            assert len(case.ranks) == 3
