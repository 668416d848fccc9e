"""Error taxonomy shared by the services, the CLI and the MCP tools.

Everything derives from ``ValueError``. ``InputParseError`` is a malformed document
(CLI exit code 2); ``TorusBnsError`` and its subclasses are well-formed inputs that
violate a mathematical precondition (CLI exit code 3).
"""

from __future__ import annotations


class InputParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.message = message
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}")


class TorusBnsError(ValueError):
    """Semantic error: the input parsed but cannot be processed."""


class WordError(TorusBnsError):
    pass


class AutomorphismError(TorusBnsError):
    pass


class FilteredMapError(TorusBnsError):
    pass


class CharacterError(TorusBnsError):
    pass


class HierarchyError(TorusBnsError):
    """An internal invariant of the hierarchy construction failed."""


class GraphOfGroupsError(TorusBnsError):
    pass


class AlexanderError(TorusBnsError):
    pass


class GbsError(TorusBnsError):
    pass


class ElementaryGbsError(GbsError):
    pass


class TrivialCenterError(GbsError):
    def __init__(self, message: str, witness: tuple[int, ...], modular_value: str) -> None:
        self.witness = witness
        self.modular_value = modular_value
        super().__init__(message)
