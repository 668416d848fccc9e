from mcp.types import ToolAnnotations

from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.bns import bns_service


def register_tools(add_tool: AddTool) -> None:
    """Register the BNS invariant tools with the MCP server."""
    add_tool(
        bns_service.bns_analyze,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )

    add_tool(
        bns_service.bns_sigma,
        annotations=ToolAnnotations(readOnlyHint=True, destructiveHint=False),
    )
