"""Seeded corpus of triangular automorphisms for cross-checking the three fiber rank computations."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError
from torus_bns_mcp.services.alexander import fox
from torus_bns_mcp.services.bns.analysis import TorusAnalysis, analyze_automorphism
from torus_bns_mcp.services.fiber.fiber_rank import InSigma, classify, kernel_decomposition
from torus_bns_mcp.services.torus.characters import CharacterClass
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, reduce_word, validate_automorphism

MAX_RANK = 4
MAX_SUFFIX = 4
CHARACTERS_PER_CASE = 3
COEFFICIENT_RANGE = 3
MAX_CHARACTER_ATTEMPTS = 200


@dataclass(slots=True, frozen=True)
class CorpusRanks:
    character: CharacterClass
    hierarchy: int
    kernel: int
    alexander: int

    @property
    def agree(self) -> bool:
        return self.hierarchy == self.kernel == self.alexander


@dataclass(slots=True, frozen=True)
class CorpusCase:
    index: int
    automorphism: FreeAutomorphism
    b1: int
    ranks: tuple[CorpusRanks, ...]

    @property
    def agree(self) -> bool:
        return all(entry.agree for entry in self.ranks)

    @property
    def rank_bound_holds(self) -> bool:
        return all(entry.hierarchy >= self.automorphism.rank for entry in self.ranks)


def random_triangular_automorphism(rng: random.Random) -> FreeAutomorphism:
    """x_g -> x_g u_g with u_g a reduced word of length at most 4 in generators earlier in a random order."""
    n = rng.randint(2, MAX_RANK)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    images: dict[int, tuple[int, ...]] = {}
    for position, generator in enumerate(order):
        earlier = order[:position]
        suffix: list[int] = []
        if earlier:
            for _ in range(rng.randint(0, MAX_SUFFIX)):
                suffix.append(rng.choice(earlier) * rng.choice((1, -1)))
        images[generator] = reduce_word([generator, *suffix])
    return validate_automorphism(n, [images[index] for index in range(1, n + 1)])


def random_fibrations(analysis: TorusAnalysis, rng: random.Random, count: int) -> list[CharacterClass]:
    """Primitive characters from random lattice combinations that kill no edge element."""
    pres = analysis.presentation
    basis = analysis.lattice.basis
    elements = analysis.edge_elements()
    found: list[CharacterClass] = []
    for _ in range(MAX_CHARACTER_ATTEMPTS):
        coefficients = [rng.randint(-COEFFICIENT_RANGE, COEFFICIENT_RANGE) for _ in basis]
        values = [sum(c * vector[i] for c, vector in zip(coefficients, basis)) for i in range(len(pres.generators))]
        divisor = math.gcd(*values)
        if divisor == 0:
            continue
        phi = CharacterClass(pres.generators, tuple(Fraction(value // divisor) for value in values))
        if any(phi.value(element) == 0 for element in elements) or phi in found:
            continue
        found.append(phi)
        if len(found) == count:
            return found
    raise CharacterError(f"found only {len(found)} of {count} fibrations after {MAX_CHARACTER_ATTEMPTS} attempts")


def corpus_case(index: int, alpha: FreeAutomorphism, rng: random.Random) -> CorpusCase:
    analysis = analyze_automorphism(alpha)
    pres = analysis.presentation
    ranks: list[CorpusRanks] = []
    for phi in random_fibrations(analysis, rng, CHARACTERS_PER_CASE):
        verdict = classify(pres, analysis.hierarchy, phi, analysis.power, analysis.lift)
        assert isinstance(verdict, InSigma)
        decomposition = kernel_decomposition(
            pres, analysis.hierarchy, phi, analysis.power, analysis.lift, analysis.power_presentation
        )
        ranks.append(CorpusRanks(phi, verdict.rank, decomposition.rank, fox.oracle_rank(pres, phi)))
    return CorpusCase(index, alpha, analysis.lattice.b1, tuple(ranks))


def run_corpus(seed: int, count: int) -> list[CorpusCase]:
    rng = random.Random(seed)
    cases = [corpus_case(index, random_triangular_automorphism(rng), rng) for index in range(count)]
    failures = sum(1 for case in cases if not case.agree)
    logger.info(f"Corpus of {count} automorphisms (seed {seed}): {failures} disagreements")
    return cases
