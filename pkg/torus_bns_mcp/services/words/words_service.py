from __future__ import annotations

from typing import Any

from torus_bns_mcp.config import global_config
from torus_bns_mcp.document.input_document import AUTOMORPHISM, parse_document
from torus_bns_mcp.services import logged_operation
from torus_bns_mcp.services.torus.filtered_map import find_triangular_order
from torus_bns_mcp.services.words.free_group import abelianization_matrix
from torus_bns_mcp.services.words.unipotence import growth_degree_estimate, least_unipotent_power


@logged_operation
def words_growth(document: str, iterations: int | None = None) -> dict[str, Any]:
    """
    Inspect a free group automorphism: abelianization, least unipotent power k and an
    estimate of its polynomial growth degree.

    :param document: Input document with an [automorphism] section (see FORMAT.md)
    :param iterations: Number of iterates sampled for the growth estimate.
    Defaults to TORUS_BNS_GROWTH_ITERATIONS.
    :return: Growth report with the images, the abelianization matrix, k and the growth estimate
    """
    alpha = parse_document(document).require(AUTOMORPHISM).automorphism
    assert alpha is not None
    matrix = abelianization_matrix(alpha)
    k = least_unipotent_power(matrix)
    estimate = growth_degree_estimate(alpha, iterations if iterations is not None else global_config.growth_iterations)
    order = find_triangular_order(alpha)

    summary = [
        f"rank {alpha.rank}",
        f"k = {k}" if k is not None else "k: none (an eigenvalue is not a root of unity)",
        f"growth degree {estimate.degree} (heuristic)",
    ]
    if estimate.suspected_exponential:
        summary.append("lengths grow exponentially on the sampled window")
    return {
        "kind": "growth",
        "summary": summary,
        "rank": alpha.rank,
        "images": alpha.describe(),
        "verified": alpha.verified,
        "abelianization": [[int(entry) for entry in matrix.row(index)] for index in range(matrix.rows)],
        "unipotent_power": k,
        "triangular_order": list(order) if order is not None else None,
        "growth": {
            "degree": estimate.degree,
            "lengths": list(estimate.lengths),
            "suspected_exponential": estimate.suspected_exponential,
            "heuristic": estimate.heuristic,
        },
    }
