"""Run configuration shared by the command-line front end.

A RunConfig can come from defaults, a JSON file, command-line flags, or a mix:
flags the user actually typed override the file, the file overrides defaults.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .exceptions import InvalidArgumentError
from .resolvent import WalkParams

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs to reproduce its output.

    All computation is deterministic, so the config alone fixes the output bytes.
    """

    omega: float = 1.0
    kappa: float = 1.0
    s0: int = 8
    t_max: float = 30.0
    dt: float = 0.1
    sites: Optional[int] = None
    format: str = "csv"
    output: Optional[str] = None
    eta_list: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    snapshots: Tuple[float, ...] = (0.0, 2.0, 4.0, 6.0)
    m_max: int = 60
    k_nodes: int = 128

    def __post_init__(self):
        # tuples arrive as lists from JSON
        object.__setattr__(self, "eta_list", tuple(float(e) for e in self.eta_list))
        object.__setattr__(self, "snapshots", tuple(float(t) for t in self.snapshots))

        WalkParams(self.omega, self.kappa)
        if self.s0 < 1:
            raise InvalidArgumentError(f"s0 must be >= 1, got {self.s0}")
        if not math.isfinite(self.dt) or self.dt <= 0.0:
            raise InvalidArgumentError(f"dt must be > 0, got {self.dt}")
        if not math.isfinite(self.t_max) or self.t_max < 0.0:
            raise InvalidArgumentError(f"t_max must be >= 0, got {self.t_max}")
        if self.sites is not None and self.sites < 2:
            raise InvalidArgumentError(f"sites must be >= 2, got {self.sites}")
        if self.format not in FORMATS:
            raise InvalidArgumentError(f"format must be one of {FORMATS}, got {self.format!r}")
        if any(not math.isfinite(e) or e < 0.0 for e in self.eta_list):
            raise InvalidArgumentError(f"eta values must be finite and >= 0, got {self.eta_list}")
        if any(not math.isfinite(t) or t < 0.0 for t in self.snapshots):
            raise InvalidArgumentError(f"snapshot times must be >= 0, got {self.snapshots}")
        if self.m_max < 2:
            raise InvalidArgumentError(f"m_max must be >= 2, got {self.m_max}")
        if self.k_nodes < 4:
            raise InvalidArgumentError(f"k_nodes must be >= 4, got {self.k_nodes}")

    @property
    def params(self) -> WalkParams:
        return WalkParams(self.omega, self.kappa)

    def times(self) -> List[float]:
        """Grid 0, dt, 2 dt, ... up to t_max, each point computed as j*dt."""
        steps = math.floor(self.t_max / self.dt + 1e-9)
        return [j * self.dt for j in range(steps + 1)]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["eta_list"] = list(self.eta_list)
        data["snapshots"] = list(self.snapshots)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build from a mapping; unknown keys are rejected."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def merged(self, **overrides: Any) -> "RunConfig":
        """Copy with the given fields replaced; None values are ignored."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self


def load_config(path: Path) -> RunConfig:
    """Read a RunConfig from a JSON file.

    Raises:
        InvalidArgumentError: If the file is unreadable, not JSON, or invalid
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"config {path} must hold a JSON object")
    logger.debug("loaded config from %s", path)
    return RunConfig.from_dict(data)
