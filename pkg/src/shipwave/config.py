"""Hull config files and run configuration.

Hull files are TOML:

    label = "two-corner stern"
    epsilon = 0.15            # optional default Froude parameter
    corners = [
        { K = 0.8, sigma = 0.25 },
        { K = 0.2, sigma = 0.25 },
    ]

K is the corner's potential magnitude (only ratios matter) and sigma the
exterior angle divided by pi.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, HullError
from .hull import HullSpec

__all__ = ["RunConfig", "load_hull_spec", "parse_hull_toml"]


def parse_hull_toml(text: str, label_fallback: str = "") -> HullSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"hull file is not valid TOML: {exc}") from exc
    corners = data.get("corners")
    if not corners or not isinstance(corners, list):
        raise ConfigError("hull file needs a non-empty [[corners]] array")
    pairs = []
    for i, c in enumerate(corners, start=1):
        if not isinstance(c, dict) or "K" not in c or "sigma" not in c:
            raise ConfigError(f"corner {i}: each entry needs K and sigma keys")
        pairs.append((c["K"], c["sigma"]))
    eps = data.get("epsilon")
    try:
        return HullSpec(
            corners=tuple(pairs),
            froude_param=eps,
            label=str(data.get("label", label_fallback)),
        )
    except HullError as exc:
        raise ConfigError(str(exc)) from exc


def load_hull_spec(path) -> HullSpec:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"hull file {p} does not exist")
    return parse_hull_toml(p.read_text(encoding="utf-8"), label_fallback=p.stem)


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: inputs, parameters, and output destination.

    ``deterministic`` is an assertion, not a switch: every algorithm in
    the package is entropy-free, so identical configs must reproduce
    byte-identical artifacts.
    """

    command: str
    outdir: Path
    hull_path: Path | None = None
    params: dict = field(default_factory=dict)
    deterministic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "outdir", Path(self.outdir))
        for key, val in self.params.items():
            if key.endswith("tol") and not (isinstance(val, (int, float)) and val > 0):
                raise ConfigError(f"tolerance {key}={val} must be positive")
        if self.hull_path is not None:
            object.__setattr__(self, "hull_path", Path(self.hull_path))

    def ensure_outdir(self) -> Path:
        try:
            self.outdir.mkdir(parents=True, exist_ok=True)
            probe = self.outdir / ".write-probe"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise ConfigError(f"output directory {self.outdir} is not writable: {exc}") from exc
        return self.outdir
