from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.fiber import fiber_service


def register_tools(add_tool: AddTool) -> None:
    """Register the fibration tools with the MCP server."""
    add_tool(
        fiber_service.fiber_classify,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
