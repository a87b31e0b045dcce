"""Run configuration: defaults, ``key=value`` files and the config env var."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "ION_GATE_FORGE_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    eta: float = 0.178
    nu: float = 1.0
    target_theta: float = math.pi / 4
    dim_com: int | None = None
    dim_str: int | None = None
    output: str = "-"

    def __post_init__(self):
        if self.nu != 1.0:
            raise ValueError("nu is fixed to 1; times are in units of 1/nu")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        for d in (self.dim_com, self.dim_str):
            if d is not None and d < 2:
                raise ValueError("truncation dimensions must be at least 2")

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_TYPES = {"eta": float, "nu": float, "target_theta": float, "dim_com": int, "dim_str": int, "output": str}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        values[key] = _TYPES[key](value)
    return values


def load_config(path: str | None = None) -> RunConfig:
    """Defaults, overlaid by ``path`` or the file named in the environment variable."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return RunConfig(**parse_config_text(fh.read()))
