import logging
import os
import signal
import sys
import types
from datetime import datetime, timezone
from typing import Any

from mcp.server.fastmcp import FastMCP
from starlette.requests import Request
from starlette.responses import JSONResponse

from torus_bns_mcp import __version__
from torus_bns_mcp.config import GlobalTorusBnsConfig, GlobalTorusBnsEnvVarNames, global_config, logger
from torus_bns_mcp.services import AddTool
from torus_bns_mcp.services.alexander import alexander_tools
from torus_bns_mcp.services.bns import bns_tools
from torus_bns_mcp.services.fiber import fiber_tools
from torus_bns_mcp.services.gbs import gbs_tools
from torus_bns_mcp.services.torus import torus_tools
from torus_bns_mcp.services.words import words_tools

SERVICE_TOOL_MODULES = (words_tools, torus_tools, bns_tools, fiber_tools, alexander_tools, gbs_tools)
SERVER_NAME = "torus-bns-mcp"

server_start_time = datetime.now(timezone.utc)


def _service_name(service_tools: Any) -> str:
    return service_tools.__name__.rsplit(".", 1)[-1].removesuffix("_tools")


def _allowed_entries() -> set[str]:
    raw = os.getenv(GlobalTorusBnsEnvVarNames.allowed_tools, "")
    return {entry.strip().lower() for entry in raw.split(",") if entry.strip()}


def shutdown_handler(sig: int, frame: types.FrameType | None) -> None:
    logger.info(f"Received {signal.Signals(sig).name}, stopping {SERVER_NAME}")
    sys.exit(0)


def add_allowed_tools(service_tool_modules: tuple[Any, ...], allowed_tools: set[str], add_tool: AddTool) -> None:
    """Register the tools named by ``allowed_tools``, a set of service prefixes and full tool names.

    An empty set registers everything. Entries that match neither a service nor a tool raise.
    """
    services = {_service_name(module): module for module in service_tool_modules}
    wanted_services = set(services) if not allowed_tools else {entry.split("_", 1)[0] for entry in allowed_tools}
    unknown_services = wanted_services - set(services)
    if unknown_services:
        raise ValueError(
            f"Unknown entries in {GlobalTorusBnsEnvVarNames.allowed_tools}: {', '.join(sorted(unknown_services))}"
        )

    seen_tools: set[str] = set()

    def filtered_add_tool(tool: Any, **kwargs: Any) -> None:
        tool_name = tool.__name__.lower()
        seen_tools.add(tool_name)
        if not allowed_tools or tool_name in allowed_tools or tool_name.split("_", 1)[0] in allowed_tools:
            add_tool(tool, **kwargs)

    for name, module in services.items():
        if name in wanted_services:
            module.register_tools(filtered_add_tool)

    unknown_tools = allowed_tools - set(services) - seen_tools
    if unknown_tools:
        raise ValueError(
            f"Unknown entries in {GlobalTorusBnsEnvVarNames.allowed_tools}: {', '.join(sorted(unknown_tools))}"
        )


def register_tools(mcp: FastMCP) -> None:
    logger.info(f"Configuration keys found in environment: {', '.join(GlobalTorusBnsConfig.existing_env_vars())}")
    add_allowed_tools(SERVICE_TOOL_MODULES, _allowed_entries(), mcp.add_tool)


async def health_check(request: Request) -> JSONResponse:
    """Liveness plus the services and limits this process computes with."""
    now = datetime.now(timezone.utc)
    logger.info(f"Health check at {now.isoformat()}")
    return JSONResponse(
        {
            "status": "healthy",
            "server": SERVER_NAME,
            "version": __version__,
            "start_time_utc": server_start_time.isoformat(),
            "uptime_seconds": int((now - server_start_time).total_seconds()),
            "services": [_service_name(module) for module in SERVICE_TOOL_MODULES],
            "limits": {
                "growth_iterations": global_config.growth_iterations,
                "admissible_bound": global_config.admissible_bound,
            },
        }
    )


def build_server(config: GlobalTorusBnsConfig) -> FastMCP:
    if config.transport == "http":
        server = FastMCP(
            SERVER_NAME, host=config.http_host, port=config.http_port, streamable_http_path=config.http_path
        )
        server.custom_route("/health", methods=["GET"])(health_check)
    else:
        server = FastMCP(SERVER_NAME)
    register_tools(server)
    return server


def _log_startup(config: GlobalTorusBnsConfig) -> None:
    logger.info(f"{SERVER_NAME} {__version__} on Python {sys.version.split()[0]} ({sys.platform}), PID {os.getpid()}")
    logger.info(
        f"Growth sampled over {config.growth_iterations} iterates; "
        f"admissibility table bounded by {config.admissible_bound}"
    )
    if config.transport == "http":
        logger.info(f"Streamable HTTP on {config.http_host}:{config.http_port}{config.http_path}, health at /health")
    else:
        logger.info("stdio transport")


def main() -> None:
    signal.signal(signal.SIGINT, shutdown_handler)
    signal.signal(signal.SIGTERM, shutdown_handler)

    config = GlobalTorusBnsConfig.with_args()
    # stdout carries the stdio transport
    logging.basicConfig(stream=sys.stderr, level=config.log_level)
    _log_startup(config)

    try:
        build_server(config).run(transport="streamable-http" if config.transport == "http" else "stdio")
    except KeyboardInterrupt:
        logger.info("Interrupted")
    except Exception as error:
        logger.error(f"Server stopped: {error}")
        raise


if __name__ == "__main__":
    main()
