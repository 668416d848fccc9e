"""Center of a GBS group and the invariants (kappa, epsilon) that govern its fibrations.

With the modular map trivial, vertex weights w_v propagate along the tree from the base
(lambda_o w_o = lambda_t w_t on every edge). Z* is the least positive rational that is an
integer multiple of every edge weight lambda_o w_o, and the center is generated by
z = a_v^(Z*/w_v) for any vertex v.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import CharacterError, ElementaryGbsError, GbsError, TrivialCenterError
from torus_bns_mcp.services.gbs.gbs_graph import GbsGraph, fundamental_loops, gbs_presentation, graph_betti, reduce_gbs
from torus_bns_mcp.services.torus.characters import CharacterClass, primitive_character, validate_character
from torus_bns_mcp.services.words.free_group import Word


def modular_map_loop(gamma: GbsGraph, loop: Word) -> Fraction:
    """Product of terminus/origin label ratios along a closed edge path (inverse when traversed backwards)."""
    if not loop:
        return Fraction(1)
    value = Fraction(1)
    position: str | None = None
    start: str | None = None
    for letter in loop:
        if not 1 <= abs(letter) <= len(gamma.edges):
            raise GbsError(f"edge index {letter} is out of range")
        edge = gamma.edges[abs(letter) - 1]
        source, target = (edge.origin, edge.terminus) if letter > 0 else (edge.terminus, edge.origin)
        if position is not None and source != position:
            raise GbsError(f"edge path breaks at '{position}'")
        start = source if start is None else start
        ratio = Fraction(edge.terminus_label, edge.origin_label)
        value *= ratio if letter > 0 else 1 / ratio
        position = target
    if position != start:
        raise GbsError("edge path is not closed")
    return value


def _rational_lcm(values: Sequence[Fraction]) -> Fraction:
    return Fraction(math.lcm(*(v.numerator for v in values)), math.gcd(*(v.denominator for v in values)))


def _rational_gcd(values: Sequence[Fraction]) -> Fraction:
    return Fraction(math.gcd(*(v.numerator for v in values)), math.lcm(*(v.denominator for v in values)))


def _integral(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise GbsError(f"{what} = {value} is not an integer")
    return int(value)


@dataclass(slots=True, frozen=True)
class CenterData:
    graph: GbsGraph
    base: str
    # signed vertex weights, w_base = 1
    weights: dict[str, Fraction]
    edge_weights: dict[str, Fraction]
    z_star: Fraction
    vertex_kappas: dict[str, int]
    edge_kappas: dict[str, int]

    @property
    def center_exponent(self) -> int:
        """z = a_base^center_exponent."""
        return _integral(self.z_star / self.weights[self.base], "center exponent")

    def center_word(self) -> Word:
        index = self.graph.generators.index(self.base) + 1
        exponent = self.center_exponent
        return (index,) * exponent if exponent > 0 else (-index,) * -exponent

    def center_value(self, phi: CharacterClass) -> Fraction:
        return phi.value(self.center_word())


def check_elementary(gamma: GbsGraph) -> None:
    reduced = reduce_gbs(gamma)
    if not reduced.edges:
        raise ElementaryGbsError("elementary GBS group: infinite cyclic")
    if len(reduced.edges) == 1:
        edge = reduced.edges[0]
        labels = (abs(edge.origin_label), abs(edge.terminus_label))
        if edge.is_loop and labels == (1, 1):
            raise ElementaryGbsError("elementary GBS group: Z^2 or the Klein bottle group")
        if not edge.is_loop and labels == (2, 2):
            raise ElementaryGbsError("elementary GBS group: the Klein bottle group as an amalgam")


def _tree_weights(gamma: GbsGraph, base: str) -> dict[str, Fraction]:
    weights: dict[str, Fraction] = {base: Fraction(1)}
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for edge in gamma.edges:
            if not edge.tree:
                continue
            if edge.origin == vertex and edge.terminus not in weights:
                weights[edge.terminus] = Fraction(edge.origin_label) * weights[vertex] / edge.terminus_label
                queue.append(edge.terminus)
            elif edge.terminus == vertex and edge.origin not in weights:
                weights[edge.origin] = Fraction(edge.terminus_label) * weights[vertex] / edge.origin_label
                queue.append(edge.origin)
    return weights


def center(gamma: GbsGraph, base: str | None = None, check: bool = True) -> CenterData:
    if check:
        check_elementary(gamma)
    if not gamma.edges:
        raise ElementaryGbsError("elementary GBS group: infinite cyclic")
    base = base if base is not None else gamma.vertices[0]
    weights = _tree_weights(gamma, base)

    loops = iter(fundamental_loops(gamma, base))
    for edge in gamma.edges:
        if edge.tree:
            continue
        loop = next(loops)
        if edge.origin_label * weights[edge.origin] != edge.terminus_label * weights[edge.terminus]:
            value = modular_map_loop(gamma, loop)
            raise TrivialCenterError(
                f"non-trivial modular map: the loop through '{edge.name}' has modular value {value}; "
                "the center is trivial and Sigma(G) is empty",
                witness=loop,
                modular_value=str(value),
            )

    edge_weights = {edge.name: abs(edge.origin_label * weights[edge.origin]) for edge in gamma.edges}
    z_star = _rational_lcm(list(edge_weights.values()))
    vertex_kappas = {name: _integral(z_star / abs(weight), f"kappa_{name}") for name, weight in weights.items()}
    edge_kappas = {name: _integral(z_star / weight, f"kappa_{name}") for name, weight in edge_weights.items()}
    if math.gcd(*edge_kappas.values()) != 1:
        raise GbsError("Z* is not minimal: the edge indices share a factor")
    logger.info(f"Center generated by {base}^{z_star}; Z* = {z_star}")
    return CenterData(
        graph=gamma,
        base=base,
        weights=weights,
        edge_weights=edge_weights,
        z_star=z_star,
        vertex_kappas=vertex_kappas,
        edge_kappas=edge_kappas,
    )


def euler_characteristic(c: CenterData) -> Fraction:
    """Orbifold Euler characteristic of G/Z, a graph of finite cyclic groups."""
    return sum((Fraction(1, k) for k in c.vertex_kappas.values()), Fraction(0)) - sum(
        (Fraction(1, k) for k in c.edge_kappas.values()), Fraction(0)
    )


def kappa_epsilon(c: CenterData) -> tuple[int, int]:
    kappa = math.lcm(*c.vertex_kappas.values())
    epsilon = _integral(-kappa * euler_characteristic(c), "epsilon")
    return kappa, epsilon


def betti(gamma: GbsGraph) -> int:
    return 1 + graph_betti(gamma)


def _vertex_values(c: CenterData, phi: CharacterClass) -> list[int]:
    values = dict(zip(phi.generators, phi.values))
    result = [values[name] for name in c.graph.vertices]
    if any(value.denominator != 1 for value in result):
        raise CharacterError("character must be integral on the vertex generators")
    return [int(value) for value in result]


def kappa_via_elliptic(c: CenterData, phi: CharacterClass) -> int:
    """[phi(E) : phi(Z)], E the subgroup generated by the vertex groups."""
    phi = primitive_character(gbs_presentation(c.graph), phi)
    on_center = abs(c.center_value(phi))
    if on_center == 0:
        raise CharacterError("character vanishes on the center")
    return _integral(on_center / math.gcd(*_vertex_values(c, phi)), "elliptic index")


def admissible_parameters(c: CenterData, b1: int, k: int, n: int) -> bool:
    """Whether some fibration has monodromy of order k and fiber of rank n."""
    if k < 1 or n < 1:
        return False
    kappa, epsilon = kappa_epsilon(c)
    if k % kappa:
        return False
    p = k // kappa
    if b1 == 1 and p != 1:
        return False
    return n - 1 == p * epsilon


def admissibility_table(c: CenterData, b1: int, bound: int) -> list[tuple[int, int]]:
    return [(k, n) for k in range(1, bound + 1) for n in range(1, bound + 1) if admissible_parameters(c, b1, k, n)]


@dataclass(slots=True, frozen=True)
class GbsFibration:
    p: int
    character: CharacterClass
    monodromy_order: int
    fiber_rank: int


def enumerate_fibrations(c: CenterData, p: int, stable_value: int = 1) -> GbsFibration:
    """The character phi_p with phi_p(E) = pZ, stable letters sent to ``stable_value``."""
    if p < 1:
        raise GbsError("p must be a positive integer")
    gamma = c.graph
    b1 = betti(gamma)
    if b1 == 1 and p != 1:
        raise GbsError("with b1(G) = 1 only p = 1 gives a fibration")
    step = _rational_gcd([abs(c.weights[name]) for name in gamma.vertices])
    values = [Fraction(p) * c.weights[name] / step for name in gamma.vertices]
    values += [Fraction(stable_value)] * len(gamma.stable_letters)
    if math.gcd(*(int(value) for value in values)) != 1:
        raise GbsError(f"phi_{p} with stable letters at {stable_value} is not surjective; pick a value coprime to {p}")
    phi = validate_character(gbs_presentation(gamma), values)
    kappa, epsilon = kappa_epsilon(c)
    order = monodromy_order(c, phi)
    if order != p * kappa:
        raise GbsError(f"monodromy order {order} differs from p * kappa = {p * kappa}")
    return GbsFibration(p=p, character=phi, monodromy_order=order, fiber_rank=p * epsilon + 1)


def monodromy_order(c: CenterData, phi: CharacterClass) -> int:
    phi = validate_character(gbs_presentation(c.graph), phi.values)
    if not phi.is_primitive_integer:
        hint = phi.normalized().as_dict()
        raise CharacterError(f"character is not surjective onto Z; use its primitive multiple {hint}")
    value = abs(c.center_value(phi))
    if value == 0:
        raise CharacterError("character vanishes on the center; it is not a fibration")
    return int(value)


def gbs_membership(c: CenterData, phi: CharacterClass) -> bool:
    """[phi] in Sigma(G) iff phi does not vanish on the center."""
    phi = validate_character(gbs_presentation(c.graph), phi.values)
    return c.center_value(phi) != 0


def fiber_rank(c: CenterData, phi: CharacterClass) -> tuple[int, int]:
    """(monodromy order, fiber rank) of the fibration ``phi``."""
    phi = primitive_character(gbs_presentation(c.graph), phi)
    kappa, epsilon = kappa_epsilon(c)
    order = monodromy_order(c, phi)
    p = _integral(Fraction(order, kappa), "p")
    if p != math.gcd(*_vertex_values(c, phi)):
        raise GbsError(f"phi(E) is not {p}Z although phi(Z) = {order}Z")
    return order, p * epsilon + 1


def centrality_certificate(c: CenterData) -> dict[str, int]:
    """Per edge, the exponent m with z = c_e^m for the edge generator c_e.

    Equal exponents seen from both ends mean z is fixed by every stable letter and is a
    power of every vertex generator, so it commutes with the whole presentation.
    """
    exponents: dict[str, int] = {}
    for edge in c.graph.edges:
        from_origin = c.z_star / (c.weights[edge.origin] * edge.origin_label)
        from_terminus = c.z_star / (c.weights[edge.terminus] * edge.terminus_label)
        if from_origin != from_terminus:
            raise GbsError(f"z is not central: edge '{edge.name}' sees exponents {from_origin} and {from_terminus}")
        exponents[edge.name] = _integral(from_origin, f"exponent of z over '{edge.name}'")
    return exponents
