from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.gbs import gbs_service


def register_tools(add_tool: AddTool) -> None:
    """Register the GBS group tools with the MCP server."""
    add_tool(
        gbs_service.gbs_analyze,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
