import asyncio
import json
from types import SimpleNamespace
from typing import Any

import pytest
from mcp.server.fastmcp import FastMCP

from torus_bns_mcp.config import GlobalTorusBnsConfig
from torus_bns_mcp.server import add_allowed_tools, build_server, health_check, register_tools
from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.bns import bns_tools
from torus_bns_mcp.services.gbs import gbs_tools

ALL_TOOLS = {
    "words_growth",
    "torus_presentation",
    "bns_analyze",
    "bns_sigma",
    "fiber_classify",
    "alexander_polynomial",
    "gbs_analyze",
}


def _tool_names(mcp: FastMCP) -> set[str]:
    return {tool.name for tool in asyncio.run(mcp.list_tools())}


def test_add_allowed_tools_skips_services_and_filters_tools() -> None:
    visited_services: list[str] = []
    registered_tools: list[str] = []

    def bns_analyze() -> None:
        pass

    def bns_sigma() -> None:
        pass

    def gbs_analyze() -> None:
        pass

    def fiber_classify() -> None:
        pass

    def service(name: str, *tools: Any) -> SimpleNamespace:
        def register_service_tools(add_tool: AddTool) -> None:
            visited_services.append(name)
            for tool in tools:
                add_tool(tool)

        return SimpleNamespace(
            __name__=f"torus_bns_mcp.services.{name}.{name}_tools",
            register_tools=register_service_tools,
        )

    services = (
        service("fiber", fiber_classify),
        service("bns", bns_analyze, bns_sigma),
        service("gbs", gbs_analyze),
    )

    add_allowed_tools(
        services,
        {"fiber", "bns_sigma"},
        lambda tool, **kwargs: registered_tools.append(tool.__name__),
    )

    assert visited_services == ["fiber", "bns"]
    assert registered_tools == ["fiber_classify", "bns_sigma"]


def test_register_tools_registers_every_service(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("TORUS_BNS_ALLOWED_TOOLS", raising=False)
    mcp = FastMCP("test")

    register_tools(mcp)

    assert _tool_names(mcp) == ALL_TOOLS


def test_register_tools_allows_services_and_full_tool_names(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("TORUS_BNS_ALLOWED_TOOLS", "fiber, bns_sigma")
    monkeypatch.setattr(
        gbs_tools,
        "register_tools",
        lambda add_tool: pytest.fail("Excluded gbs service should not be visited"),
    )
    mcp = FastMCP("test")

    register_tools(mcp)

    assert _tool_names(mcp) == {"fiber_classify", "bns_sigma"}


def test_register_tools_rejects_unknown_entries(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("TORUS_BNS_ALLOWED_TOOLS", "knots")
    mcp = FastMCP("test")

    with pytest.raises(ValueError, match="Unknown entries in TORUS_BNS_ALLOWED_TOOLS: knots"):
        register_tools(mcp)


def test_register_tools_rejects_unknown_tool_of_known_service(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("TORUS_BNS_ALLOWED_TOOLS", "bns_volume")
    mcp = FastMCP("test")

    with pytest.raises(ValueError, match="Unknown entries in TORUS_BNS_ALLOWED_TOOLS: bns_volume"):
        register_tools(mcp)


def test_tool_registration_metadata(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("TORUS_BNS_ALLOWED_TOOLS", raising=False)
    mcp = FastMCP("test")
    bns_tools.register_tools(mcp.add_tool)

    sigma = next(tool for tool in asyncio.run(mcp.list_tools()) if tool.name == "bns_sigma")

    assert sigma.description is not None
    assert sigma.annotations is not None
    assert sigma.annotations.readOnlyHint is True
    assert sigma.annotations.destructiveHint is False


def test_tool_call_returns_report(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("TORUS_BNS_ALLOWED_TOOLS", raising=False)
    mcp = FastMCP("test")
    register_tools(mcp)

    result = asyncio.run(
        mcp.call_tool("gbs_analyze", {"document": "[gbs]\nvertex a\nedge a a 1 2 loop t\n"})
    )

    assert "center trivial" in json.dumps(result, default=str)


def test_build_server_stdio(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("TORUS_BNS_ALLOWED_TOOLS", raising=False)

    server = build_server(GlobalTorusBnsConfig())

    assert _tool_names(server) == ALL_TOOLS


def test_build_server_http(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("TORUS_BNS_ALLOWED_TOOLS", "gbs")

    server = build_server(GlobalTorusBnsConfig(transport="http", http_port=3111, http_path="/torus"))

    assert server.settings.port == 3111
    assert server.settings.streamable_http_path == "/torus"
    assert _tool_names(server) == {"gbs_analyze"}


def test_health_check() -> None:
    response = asyncio.run(health_check(None))  # type: ignore[arg-type]

    body = json.loads(bytes(response.body))
    assert response.status_code == 200
    assert body["status"] == "healthy"
    assert body["server"] == "torus-bns-mcp"
    assert body["services"] == ["words", "torus", "bns", "fiber", "alexander", "gbs"]
    assert set(body["limits"]) == {"growth_iterations", "admissible_bound"}
    assert body["uptime_seconds"] >= 0
