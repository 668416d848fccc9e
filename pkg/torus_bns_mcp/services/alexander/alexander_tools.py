from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.alexander import alexander_service


def register_tools(add_tool: AddTool) -> None:
    """Register the Alexander polynomial tools with the MCP server."""
    add_tool(
        alexander_service.alexander_polynomial,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
