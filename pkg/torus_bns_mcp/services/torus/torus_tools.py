from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.torus import torus_service


def register_tools(add_tool: AddTool) -> None:
    """Register the mapping torus tools with the MCP server."""
    add_tool(
        torus_service.torus_presentation,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
