import json
from dataclasses import dataclass
from typing import Any

FORMATS = ("text", "json")


@dataclass(slots=True, frozen=True)
class ReportFormat:
    format: str
    data: str


class ReportFormatter:
    """Renders service reports; reports hold only JSON-native values."""

    @staticmethod
    def to_json(report: dict[str, Any]) -> ReportFormat:
        return ReportFormat(format="json", data=json.dumps(report, indent=2, sort_keys=False))

    @staticmethod
    def to_text(report: dict[str, Any]) -> ReportFormat:
        lines: list[str] = list(report.get("summary", []))
        body = {key: value for key, value in report.items() if key not in ("kind", "summary")}
        if lines and body:
            lines.append("")
        lines.extend(ReportFormatter._text_lines(body, 0))
        return ReportFormat(format="text", data="\n".join(lines))

    @staticmethod
    def _text_lines(value: Any, depth: int) -> list[str]:
        indent = "  " * depth
        lines: list[str] = []
        if isinstance(value, dict):
            for key, item in value.items():
                if isinstance(item, (dict, list)) and item and not ReportFormatter._is_flat(item):
                    lines.append(f"{indent}{key}:")
                    lines.extend(ReportFormatter._text_lines(item, depth + 1))
                else:
                    lines.append(f"{indent}{key}: {ReportFormatter._scalar(item)}")
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, dict):
                    nested = ReportFormatter._text_lines(item, depth + 1)
                    # first key on the bullet line
                    lines.append(f"{indent}- {nested[0].strip()}" if nested else f"{indent}- {{}}")
                    lines.extend(nested[1:])
                else:
                    lines.append(f"{indent}- {ReportFormatter._scalar(item)}")
        else:
            lines.append(f"{indent}{ReportFormatter._scalar(value)}")
        return lines

    @staticmethod
    def _is_flat(value: dict[str, Any] | list[Any]) -> bool:
        """Short lists of scalars (and of scalar lists) stay on one line."""
        if isinstance(value, dict):
            return False
        return all(
            not isinstance(item, (dict, list)) or (isinstance(item, list) and ReportFormatter._is_flat(item))
            for item in value
        ) and not any(isinstance(item, str) and " " in item for item in value)

    @staticmethod
    def _scalar(value: Any) -> str:
        if value is None:
            return "-"
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, (list, dict)):
            return json.dumps(value)
        return str(value)

    @staticmethod
    def render(report: dict[str, Any], fmt: str = "text") -> ReportFormat:
        if fmt == "json":
            return ReportFormatter.to_json(report)
        if fmt == "text":
            return ReportFormatter.to_text(report)
        raise ValueError(f"Unknown report format '{fmt}'. Choose one of: {', '.join(FORMATS)}")
