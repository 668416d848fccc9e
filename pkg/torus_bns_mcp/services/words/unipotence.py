from __future__ import annotations

import math
from dataclasses import dataclass

from sympy import Matrix, Poly, cyclotomic_poly, eye, factor_list, ilcm, symbols, totient, zeros

from torus_bns_mcp.config import MIN_TORUS_BNS_GROWTH_ITERATIONS, logger
from torus_bns_mcp.errors import AutomorphismError
from torus_bns_mcp.services.words.free_group import FreeAutomorphism, compose, cyclically_reduce

_X = symbols("x")

# Sum of cyclic lengths beyond which iteration stops.
LENGTH_CAP = 200_000
EXPONENTIAL_RATIO = 1.5


def _cyclotomic_orders(degree_bound: int) -> list[int]:
    """All m whose cyclotomic polynomial has degree at most ``degree_bound``."""
    # totient(m) >= sqrt(m / 2), so m <= 2 * bound**2 covers every candidate.
    return [m for m in range(1, 2 * degree_bound * degree_bound + 3) if totient(m) <= degree_bound]


def least_unipotent_power(matrix: Matrix) -> int | None:
    """Least k >= 1 with M^k unipotent, or ``None`` when an eigenvalue is not a root of unity."""
    matrix = Matrix(matrix)
    size = matrix.rows
    determinant = matrix.det()
    if abs(determinant) != 1:
        raise AutomorphismError(f"matrix has determinant {determinant}; expected +-1")

    _, factors = factor_list(matrix.charpoly(_X).as_expr(), _X)
    orders = _cyclotomic_orders(size)
    k = 1
    for factor, _multiplicity in factors:
        poly = Poly(factor, _X)
        if poly.LC() < 0:
            poly = -poly
        order = next(
            (m for m in orders if totient(m) == poly.degree() and poly == Poly(cyclotomic_poly(m, _X), _X)),
            None,
        )
        if order is None:
            logger.info(f"Characteristic polynomial factor {poly.as_expr()} is not cyclotomic")
            return None
        k = int(ilcm(k, order))

    nilpotent_part = matrix**k - eye(size)
    if nilpotent_part**size != zeros(size, size):
        raise AutomorphismError(f"internal check failed: M^{k} is not unipotent")
    return k


@dataclass(slots=True, frozen=True)
class GrowthEstimate:
    degree: int
    lengths: tuple[int, ...]
    suspected_exponential: bool
    heuristic: bool = True


def _differences(values: list[int]) -> list[int]:
    return [b - a for a, b in zip(values, values[1:])]


def growth_degree_estimate(alpha: FreeAutomorphism, iterations: int) -> GrowthEstimate:
    """Fit the polynomial degree of the total cyclic length of alpha^k(x_i), k = 1..iterations.

    The answer is a heuristic: the smallest d whose d-th finite differences take the same
    value three times on the tail of the sampled lengths, with a log-ratio fallback. A
    degree d fit therefore needs d + 3 samples. Exponential growth is only suspected when
    no exact fit exists, since early iterates of a polynomial can grow by large ratios.
    """
    if iterations < MIN_TORUS_BNS_GROWTH_ITERATIONS:
        logger.warning(f"growth estimate needs at least {MIN_TORUS_BNS_GROWTH_ITERATIONS} iterations, got {iterations}")
        iterations = MIN_TORUS_BNS_GROWTH_ITERATIONS

    lengths: list[int] = []
    current = alpha
    for _ in range(iterations):
        total = sum(len(cyclically_reduce(image)) for image in current.images)
        lengths.append(total)
        if total > LENGTH_CAP:
            logger.warning(f"growth estimate stopped after {len(lengths)} iterations: length {total} over cap")
            break
        current = compose(alpha, current)

    sequence = list(lengths)
    for degree in range(len(lengths) - 2):
        tail = sequence[-3:]
        if len(set(tail)) == 1:
            return GrowthEstimate(degree, tuple(lengths), suspected_exponential=False)
        sequence = _differences(sequence)

    ratios = [b / a for a, b in zip(lengths, lengths[1:]) if a > 0]
    suspected_exponential = len(ratios) >= 3 and all(ratio >= EXPONENTIAL_RATIO for ratio in ratios[-3:])

    # no exact polynomial fit on the sampled window
    half = max(1, len(lengths) // 2)
    slope = math.log(lengths[-1] / lengths[half - 1]) / math.log(len(lengths) / half) if len(lengths) > half else 0.0
    logger.warning(f"growth estimate fell back to a log-ratio fit (slope {slope:.2f})")
    return GrowthEstimate(max(0, round(slope)), tuple(lengths), suspected_exponential)
