from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.words import words_service


def register_tools(add_tool: AddTool) -> None:
    """Register the free group automorphism tools with the MCP server."""
    add_tool(
        words_service.words_growth,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
