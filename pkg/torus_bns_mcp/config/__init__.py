from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass

logger = logging.getLogger("torus-bns-mcp")


class GlobalTorusBnsEnvVarNames:
    transport = "TORUS_BNS_TRANSPORT"
    http_host = "TORUS_BNS_HTTP_HOST"
    http_port = "TORUS_BNS_HTTP_PORT"
    http_path = "TORUS_BNS_HTTP_PATH"
    growth_iterations = "TORUS_BNS_GROWTH_ITERATIONS"
    admissible_bound = "TORUS_BNS_ADMISSIBLE_BOUND"
    corpus_size = "TORUS_BNS_CORPUS_SIZE"
    log_level = "TORUS_BNS_LOG_LEVEL"
    allowed_tools = "TORUS_BNS_ALLOWED_TOOLS"

    @staticmethod
    def all() -> list[str]:
        return [
            GlobalTorusBnsEnvVarNames.transport,
            GlobalTorusBnsEnvVarNames.http_host,
            GlobalTorusBnsEnvVarNames.http_port,
            GlobalTorusBnsEnvVarNames.http_path,
            GlobalTorusBnsEnvVarNames.growth_iterations,
            GlobalTorusBnsEnvVarNames.admissible_bound,
            GlobalTorusBnsEnvVarNames.corpus_size,
            GlobalTorusBnsEnvVarNames.log_level,
            GlobalTorusBnsEnvVarNames.allowed_tools,
        ]


DEFAULT_TORUS_BNS_TRANSPORT = "stdio"
DEFAULT_TORUS_BNS_HTTP_HOST = "127.0.0.1"
DEFAULT_TORUS_BNS_HTTP_PORT = 3000
DEFAULT_TORUS_BNS_HTTP_PATH = "/mcp"
DEFAULT_TORUS_BNS_GROWTH_ITERATIONS = 8
MIN_TORUS_BNS_GROWTH_ITERATIONS = 6
DEFAULT_TORUS_BNS_ADMISSIBLE_BOUND = 16
DEFAULT_TORUS_BNS_CORPUS_SIZE = 200
DEFAULT_TORUS_BNS_LOG_LEVEL = "WARNING"


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Invalid value for {name}: '{raw}'. Falling back to default {default}.")
        return default
    if value < minimum:
        logger.warning(f"{name} must be at least {minimum}, got {value}. Falling back to default {default}.")
        return default
    return value


@dataclass(slots=True, frozen=True)
class GlobalTorusBnsConfig:
    transport: str = DEFAULT_TORUS_BNS_TRANSPORT
    http_host: str = DEFAULT_TORUS_BNS_HTTP_HOST
    http_port: int = DEFAULT_TORUS_BNS_HTTP_PORT
    http_path: str = DEFAULT_TORUS_BNS_HTTP_PATH
    growth_iterations: int = DEFAULT_TORUS_BNS_GROWTH_ITERATIONS
    admissible_bound: int = DEFAULT_TORUS_BNS_ADMISSIBLE_BOUND
    corpus_size: int = DEFAULT_TORUS_BNS_CORPUS_SIZE
    log_level: str = DEFAULT_TORUS_BNS_LOG_LEVEL

    @staticmethod
    def from_env() -> GlobalTorusBnsConfig:
        log_level = os.getenv(GlobalTorusBnsEnvVarNames.log_level, DEFAULT_TORUS_BNS_LOG_LEVEL).strip().upper()
        if not isinstance(logging.getLevelName(log_level), int):
            logger.warning(
                f"Unknown log level '{log_level}' in {GlobalTorusBnsEnvVarNames.log_level}. "
                f"Falling back to {DEFAULT_TORUS_BNS_LOG_LEVEL}."
            )
            log_level = DEFAULT_TORUS_BNS_LOG_LEVEL
        return GlobalTorusBnsConfig(
            transport=os.getenv(GlobalTorusBnsEnvVarNames.transport, DEFAULT_TORUS_BNS_TRANSPORT),
            http_host=os.getenv(GlobalTorusBnsEnvVarNames.http_host, DEFAULT_TORUS_BNS_HTTP_HOST),
            http_port=_env_int(GlobalTorusBnsEnvVarNames.http_port, DEFAULT_TORUS_BNS_HTTP_PORT),
            http_path=os.getenv(GlobalTorusBnsEnvVarNames.http_path, DEFAULT_TORUS_BNS_HTTP_PATH),
            growth_iterations=_env_int(
                GlobalTorusBnsEnvVarNames.growth_iterations,
                DEFAULT_TORUS_BNS_GROWTH_ITERATIONS,
                minimum=MIN_TORUS_BNS_GROWTH_ITERATIONS,
            ),
            admissible_bound=_env_int(GlobalTorusBnsEnvVarNames.admissible_bound, DEFAULT_TORUS_BNS_ADMISSIBLE_BOUND),
            corpus_size=_env_int(GlobalTorusBnsEnvVarNames.corpus_size, DEFAULT_TORUS_BNS_CORPUS_SIZE),
            log_level=log_level,
        )

    @staticmethod
    def existing_env_vars() -> list[str]:
        """Return a list of environment variable names that are currently set."""
        return [env_var for env_var in GlobalTorusBnsEnvVarNames.all() if os.getenv(env_var) is not None]

    @staticmethod
    def with_args() -> GlobalTorusBnsConfig:
        base_config = GlobalTorusBnsConfig.from_env()

        # a local client may pass these instead of the environment
        parser = argparse.ArgumentParser(description="Mapping torus BNS MCP server")
        parser.add_argument("--stdio", action="store_true", help="Use stdio transport")
        parser.add_argument("--http", action="store_true", help="Use HTTP transport")
        parser.add_argument("--host", type=str, help="HTTP host to listen on")
        parser.add_argument("--port", type=int, help="HTTP port to listen on")
        args, _ = parser.parse_known_args(sys.argv[1:])

        transport = base_config.transport
        if args.stdio:
            transport = "stdio"
        elif args.http:
            transport = "http"

        return GlobalTorusBnsConfig(
            transport=transport,
            http_host=args.host if args.host is not None else base_config.http_host,
            http_port=args.port if args.port is not None else base_config.http_port,
            http_path=base_config.http_path,
            growth_iterations=base_config.growth_iterations,
            admissible_bound=base_config.admissible_bound,
            corpus_size=base_config.corpus_size,
            log_level=base_config.log_level,
        )


# Global configuration instance
global_config = GlobalTorusBnsConfig.from_env()
