"""Parsing for the small ``key=value,key=value`` config strings.

Numeric kinds are inferred from the default value, so ``budget=2e6`` parses
to the integer 2000000 when the default budget is an int.
"""

from __future__ import annotations

from typing import Mapping

from .errors import ConfigError


def parse_kv(cfg, defaults: Mapping[str, object]) -> dict:
    """Merge ``cfg`` (None, dict, or "k=v,k=v" string) over ``defaults``."""
    out = dict(defaults)
    if cfg is None:
        return out
    if isinstance(cfg, Mapping):
        items = cfg.items()
    elif isinstance(cfg, str):
        if not cfg.strip():
            return out
        items = []
        for part in cfg.split(","):
            key, eq, raw = part.partition("=")
            if not eq:
                raise ConfigError(f"expected key=value, got {part!r}")
            items.append((key.strip(), raw.strip()))
    else:
        raise ConfigError(f"config must be a string or mapping, got {type(cfg).__name__}")
    for key, raw in items:
        if key not in out:
            raise ConfigError(f"unknown config key {key!r} (known: {', '.join(sorted(out))})")
        ref = out[key]
        try:
            if isinstance(ref, bool):
                out[key] = str(raw).lower() in ("1", "true", "yes", "on")
            elif isinstance(ref, int):
                out[key] = int(float(raw))
            elif isinstance(ref, float):
                out[key] = float(raw)
            else:
                out[key] = str(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return out
