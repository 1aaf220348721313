"""Run-scoped buffer of warnings that end up in a report."""
import json
from collections import deque
from typing import Any, Dict, List, Optional


class LogBuffer:
    """Bounded buffer of warning entries collected during one CLI run."""

    def __init__(self, max_size: int = 1000) -> None:
        self._buffer: deque[Dict[str, Any]] = deque(maxlen=max_size)

    def add(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        self._buffer.append({"message": message, "context": context or {}})

    def as_strings(self) -> List[str]:
        """Render entries as stable one-line strings (message plus sorted context)."""
        lines = []
        for entry in self._buffer:
            if entry["context"]:
                context = json.dumps(entry["context"], sort_keys=True, default=str)
                lines.append(f"{entry['message']} {context}")
            else:
                lines.append(entry["message"])
        return lines

    def clear(self) -> None:
        self._buffer.clear()


# Global singleton
log_buffer = LogBuffer(max_size=2000)
