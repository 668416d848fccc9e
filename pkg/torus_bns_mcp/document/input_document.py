"""Line-oriented input documents: one object per file, described in FORMAT.md.

Every diagnostic carries the 1-based line and column of the offending token.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

from torus_bns_mcp.config import logger
from torus_bns_mcp.errors import InputParseError, TorusBnsError, WordError
from torus_bns_mcp.services.bns.graph_of_groups import GogEdge, GogVertex, GraphOfGroupsZn, validate_graph_of_groups
from torus_bns_mcp.services.gbs.gbs_graph import GbsEdge, GbsGraph, validate_gbs_graph
from torus_bns_mcp.services.torus.filtered_map import FilteredGraphMap, GraphEdge, validate_filtered_map
from torus_bns_mcp.services.torus.marked_power import MarkedPowerMap, validate_marked_power
from torus_bns_mcp.services.words.free_group import (
    FreeAutomorphism,
    Word,
    letters_from_token,
    reduce_word,
    validate_automorphism,
)

AUTOMORPHISM = "automorphism"
GRAPH = "graph"
GOG = "gog"
GBS = "gbs"

# secondary sections and the kind they belong to
_COMPANIONS = {"inverse": AUTOMORPHISM, "power": AUTOMORPHISM, "map": GRAPH}
_SECTION_RE = re.compile(r"^\[([a-z]+)\]$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_EDGE_TOKEN_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")
POWER_USAGE = "vertex, edge, E -> E path, mark E -> word or twist word"


@dataclass(slots=True, frozen=True)
class Token:
    text: str
    line: int
    column: int

    def error(self, message: str) -> InputParseError:
        return InputParseError(message, self.line, self.column)


Line = list[Token]


@dataclass(slots=True, frozen=True)
class InputDocument:
    kind: str
    automorphism: FreeAutomorphism | None = None
    # filtered representative of alpha^k from a [power] section
    power_map: MarkedPowerMap | None = None
    graph_map: FilteredGraphMap | None = None
    gog: GraphOfGroupsZn | None = None
    gbs: GbsGraph | None = None

    def require(self, *kinds: str) -> InputDocument:
        if self.kind not in kinds:
            raise TorusBnsError(f"expected a document of kind {' or '.join(kinds)}, got '{self.kind}'")
        return self


def _lines(text: str) -> Iterator[Line]:
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        tokens = [Token(match.group(), number, match.start() + 1) for match in re.finditer(r"\S+", content)]
        if tokens:
            yield tokens


def _sections(text: str) -> dict[str, list[Line]]:
    sections: dict[str, list[Line]] = {}
    current: str | None = None
    for line in _lines(text):
        header = _SECTION_RE.match(line[0].text)
        if header is not None and len(line) == 1:
            name = header.group(1)
            if name not in (AUTOMORPHISM, GRAPH, GOG, GBS, *_COMPANIONS):
                raise line[0].error(f"unknown section '[{name}]'")
            if name in sections:
                raise line[0].error(f"section '[{name}]' appears twice")
            sections[name] = []
            current = name
            continue
        if current is None:
            raise line[0].error("content before the first section header")
        sections[current].append(line)
    return sections


def _expect(line: Line, count: int, usage: str, at_least: bool = False) -> None:
    if len(line) < count or (not at_least and len(line) != count):
        raise line[0].error(f"expected '{usage}'")


def _integer(token: Token) -> int:
    try:
        return int(token.text)
    except ValueError:
        raise token.error(f"expected an integer, got '{token.text}'")


def _name(token: Token) -> str:
    if _NAME_RE.match(token.text) is None:
        raise token.error(f"invalid name '{token.text}'")
    return token.text


def _arrow(line: Line, usage: str) -> tuple[Token, list[Token]]:
    if len(line) < 3 or line[1].text != "->":
        raise line[0].error(f"expected '{usage}'")
    return line[0], line[2:]


def _generator_word(tokens: list[Token]) -> Word:
    letters: list[int] = []
    for token in tokens:
        try:
            letters.extend(letters_from_token(token.text))
        except WordError as error:
            raise token.error(str(error))
    return reduce_word(letters)


def _generator_index(token: Token) -> int:
    try:
        letters = letters_from_token(token.text)
    except WordError as error:
        raise token.error(str(error))
    if len(letters) != 1 or letters[0] < 0:
        raise token.error(f"left-hand side must be a single generator, got '{token.text}'")
    return letters[0]


def _image_table(lines: list[Line]) -> tuple[dict[int, Word], int | None, int]:
    images: dict[int, Word] = {}
    rank: int | None = None
    highest = 0
    for line in lines:
        if line[0].text == "rank":
            _expect(line, 2, "rank N")
            rank = _integer(line[1])
            continue
        head, rest = _arrow(line, "xI -> word")
        index = _generator_index(head)
        if index in images:
            raise head.error(f"image of x{index} given twice")
        images[index] = _generator_word(rest)
        highest = max([highest, index, *(abs(letter) for letter in images[index])])
    return images, rank, highest


def _automorphism(sections: dict[str, list[Line]]) -> FreeAutomorphism:
    images, rank, highest = _image_table(sections[AUTOMORPHISM])
    inverse = None
    if "inverse" in sections:
        inverse_images, _, inverse_highest = _image_table(sections["inverse"])
        highest = max(highest, inverse_highest)
        inverse = inverse_images
    rank = rank if rank is not None else highest
    if rank < 1:
        raise InputParseError("automorphism has no generators; give 'rank N' or at least one image")
    if highest > rank:
        raise InputParseError(f"generator x{highest} exceeds the declared rank {rank}")
    table = [images.get(index, (index,)) for index in range(1, rank + 1)]
    inverse_table = [inverse.get(index, (index,)) for index in range(1, rank + 1)] if inverse is not None else None
    return validate_automorphism(rank, table, inverse_table)


def _edge_path(tokens: list[Token], names: dict[str, int]) -> Word:
    letters: list[int] = []
    for token in tokens:
        if token.text == "1":
            continue
        match = _EDGE_TOKEN_RE.match(token.text)
        if match is None or match.group(1) not in names:
            raise token.error(f"unknown edge token '{token.text}'")
        index = names[match.group(1)]
        exponent = int(match.group(2)) if match.group(2) is not None else 1
        letters.extend([index if exponent > 0 else -index] * abs(exponent))
    return reduce_word(letters)


def _filtered_map(graph_lines: list[Line], map_lines: list[Line], section: str) -> FilteredGraphMap:
    vertices: list[str] = []
    edges: list[GraphEdge] = []
    for line in graph_lines:
        keyword = line[0].text
        if keyword in ("vertex", "vertices"):
            _expect(line, 2, "vertex NAME...", at_least=True)
            vertices.extend(_name(token) for token in line[1:])
        elif keyword == "edge":
            _expect(line, 4, "edge NAME ORIGIN TERMINUS")
            edges.append(GraphEdge(_name(line[1]), _name(line[2]), _name(line[3])))
        else:
            raise line[0].error(f"unknown [{section}] entry '{keyword}'")

    names = {edge.name: index for index, edge in enumerate(edges, start=1)}
    suffixes: list[Word] = [() for _ in edges]
    seen: set[str] = set()
    for line in map_lines:
        head, rest = _arrow(line, "E -> E path")
        if head.text not in names:
            raise head.error(f"unknown edge '{head.text}'")
        if head.text in seen:
            raise head.error(f"image of '{head.text}' given twice")
        if rest[0].text != head.text:
            raise rest[0].error(f"image of '{head.text}' must start with '{head.text}'")
        seen.add(head.text)
        suffixes[names[head.text] - 1] = _edge_path(rest[1:], names)
    return validate_filtered_map(vertices, edges, suffixes)


def _graph_map(sections: dict[str, list[Line]]) -> FilteredGraphMap:
    return _filtered_map(sections[GRAPH], sections.get("map", []), GRAPH)


def _bounded_word(tokens: list[Token], rank: int) -> Word:
    word = _generator_word(tokens)
    for token in tokens:
        if any(abs(letter) > rank for letter in _generator_word([token])):
            raise token.error(f"generator in '{token.text}' exceeds the rank {rank} of the automorphism")
    return word


def _power_map(lines: list[Line], rank: int) -> MarkedPowerMap:
    """The [power] section: a filtered map for alpha^k, a marking of its edges and a twist."""
    graph_lines: list[Line] = []
    map_lines: list[Line] = []
    marking: dict[str, Word] = {}
    twist: Word | None = None
    for line in lines:
        keyword = line[0].text
        if len(line) > 1 and line[1].text == "->":
            map_lines.append(line)
        elif keyword in ("vertex", "vertices", "edge"):
            graph_lines.append(line)
        elif keyword == "mark":
            _expect(line, 4, "mark E -> word", at_least=True)
            if line[2].text != "->":
                raise line[2].error("expected 'mark E -> word'")
            if line[1].text in marking:
                raise line[1].error(f"marking of '{line[1].text}' given twice")
            marking[_name(line[1])] = _bounded_word(line[3:], rank)
        elif keyword == "twist":
            _expect(line, 2, "twist word", at_least=True)
            if twist is not None:
                raise line[0].error("twist given twice")
            twist = _bounded_word(line[1:], rank)
        else:
            raise line[0].error(f"unknown [power] entry '{keyword}'; expected {POWER_USAGE}")
    return validate_marked_power(_filtered_map(graph_lines, map_lines, "power"), marking, twist or (), rank)


def _matrices(line: Line) -> list[list[list[int]]]:
    """The two bracketed integer matrices that end a [gog] edge line."""
    first = line[4]
    text = " ".join(token.text for token in line[4:])
    groups: list[str] = []
    depth = 0
    start = 0
    for position, char in enumerate(text):
        if char == "[":
            if depth == 0:
                start = position
            depth += 1
        elif char == "]":
            depth -= 1
            if depth < 0:
                raise first.error("unbalanced ']' in inclusion matrix")
            if depth == 0:
                groups.append(text[start : position + 1])
        elif depth == 0 and not char.isspace():
            raise first.error(f"unexpected '{char}' between inclusion matrices")
    if depth != 0 or len(groups) != 2:
        raise first.error("expected two inclusion matrices such as [[1]] [[2]]")
    matrices: list[list[list[int]]] = []
    for group in groups:
        try:
            matrix = json.loads(group)
        except json.JSONDecodeError as error:
            raise first.error(f"malformed matrix {group}: {error.msg}")
        if not isinstance(matrix, list) or not all(
            isinstance(row, list) and all(isinstance(entry, int) for entry in row) for row in matrix
        ):
            raise first.error(f"matrix {group} must be a list of integer rows")
        matrices.append(matrix)
    return matrices


def _graph_of_groups(sections: dict[str, list[Line]]) -> GraphOfGroupsZn:
    vertices: list[GogVertex] = []
    edges: list[GogEdge] = []
    tree: set[str] | None = None
    for line in sections[GOG]:
        keyword = line[0].text
        if keyword == "vertex":
            _expect(line, 3, "vertex NAME RANK")
            vertices.append(GogVertex(_name(line[1]), _integer(line[2])))
        elif keyword == "edge":
            _expect(line, 6, "edge NAME ORIGIN TERMINUS [[..]] [[..]]", at_least=True)
            origin_inclusion, terminus_inclusion = _matrices(line)
            edges.append(
                GogEdge(
                    _name(line[1]),
                    _name(line[2]),
                    _name(line[3]),
                    tuple(tuple(row) for row in origin_inclusion),
                    tuple(tuple(row) for row in terminus_inclusion),
                )
            )
        elif keyword == "tree":
            tree = (tree or set()) | {_name(token) for token in line[1:]}
        else:
            raise line[0].error(f"unknown [gog] entry '{keyword}'")
    return validate_graph_of_groups(vertices, edges, frozenset(tree) if tree is not None else None)


def _gbs_graph(sections: dict[str, list[Line]]) -> GbsGraph:
    vertices: list[str] = []
    edges: list[GbsEdge] = []
    for line in sections[GBS]:
        keyword = line[0].text
        if keyword in ("vertex", "vertices"):
            _expect(line, 2, "vertex NAME...", at_least=True)
            vertices.extend(_name(token) for token in line[1:])
        elif keyword == "edge":
            _expect(line, 6, "edge U V LU LV tree|loop NAME", at_least=True)
            origin, terminus = _name(line[1]), _name(line[2])
            labels = _integer(line[3]), _integer(line[4])
            if line[5].text == "tree":
                _expect(line, 6, "edge U V LU LV tree")
                edges.append(GbsEdge(origin, terminus, *labels, tree=True, name=f"e{len(edges) + 1}"))
            elif line[5].text == "loop":
                _expect(line, 7, "edge U V LU LV loop NAME")
                edges.append(GbsEdge(origin, terminus, *labels, tree=False, name=_name(line[6])))
            else:
                raise line[5].error(f"expected 'tree' or 'loop', got '{line[5].text}'")
        else:
            raise line[0].error(f"unknown [gbs] entry '{keyword}'")
    return validate_gbs_graph(vertices, edges)


def parse_document(text: str) -> InputDocument:
    sections = _sections(text)
    kinds = [name for name in sections if name not in _COMPANIONS]
    if len(kinds) != 1:
        found = ", ".join(f"[{name}]" for name in kinds) or "none"
        raise InputParseError(f"expected exactly one of [automorphism], [graph], [gog], [gbs]; found {found}")
    (kind,) = kinds
    for companion, owner in _COMPANIONS.items():
        if companion in sections and owner != kind:
            raise InputParseError(f"section [{companion}] only belongs with [{owner}]")

    logger.info(f"Parsing {kind} document")
    if kind == AUTOMORPHISM:
        alpha = _automorphism(sections)
        power_map = _power_map(sections["power"], alpha.rank) if "power" in sections else None
        return InputDocument(kind, automorphism=alpha, power_map=power_map)
    if kind == GRAPH:
        return InputDocument(kind, graph_map=_graph_map(sections))
    if kind == GOG:
        return InputDocument(kind, gog=_graph_of_groups(sections))
    return InputDocument(kind, gbs=_gbs_graph(sections))


def load_document(path: str | Path) -> InputDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))
