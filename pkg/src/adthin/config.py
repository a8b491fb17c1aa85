"""Run configuration: JSON files validated against a fixed schema.

Example::

    {
      "mode": "fpe-ad",
      "grid": {"num_slots": 24, "spacing": 0.5},
      "mask": {"type": "flat", "sll_db": -15},
      "ga": {"population_size": 20, "max_iterations": 200},
      "seed": 7
    }

``mask`` is either ``{"file": "path.json"}``, ``{"segments": [...]}`` or a
builder: ``{"type": "flat" | "tapered" | "irregular", ...}``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .layout import GridSpec, Mask, MaskError, flat_mask, irregular_mask, tapered_mask
from .optimizer import GaConfig

MODES = ("me-ad", "fpe-ad", "pd")


class ConfigError(ValueError):
    pass


def _reject_unknown(section: str, data: dict, allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"'{section}' must be an object")
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key '{section}.{extra[0]}'" if section else f"unknown key '{extra[0]}'")


_MASK_BUILDERS = {
    "flat": (flat_mask, {"sll_db", "halfwidth"}),
    "tapered": (tapered_mask, {"near_db", "far_db", "steps", "halfwidth"}),
    "irregular": (irregular_mask, {"kind", "halfwidth"}),
}


def build_mask(spec: dict, grid: GridSpec, base_dir: Path | None = None) -> Mask:
    if not isinstance(spec, dict):
        raise ConfigError("'mask' must be an object")
    try:
        if "file" in spec:
            _reject_unknown("mask", spec, {"file"})
            path = Path(spec["file"])
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            return Mask.load(path)
        if "segments" in spec:
            return Mask.from_dict(spec)
        kind = spec.get("type")
        if kind not in _MASK_BUILDERS:
            raise ConfigError(f"'mask.type' must be one of {sorted(_MASK_BUILDERS)}, got {kind!r}")
        builder, allowed = _MASK_BUILDERS[kind]
        _reject_unknown("mask", spec, allowed | {"type"})
        kwargs = {k: v for k, v in spec.items() if k != "type"}
        return builder(grid, **kwargs)
    except (MaskError, OSError, TypeError) as exc:
        raise ConfigError(f"invalid mask: {exc}") from exc


@dataclass
class RunConfig:
    mode: str
    grid: GridSpec
    mask_spec: dict
    num_elements: int | None = None
    ga: GaConfig = field(default_factory=GaConfig)
    dense_factor: int = 20
    metric: str = "step"
    afpa_objective: str = "gain"
    constrain_count: bool = True
    run_id: str | None = None
    base_dir: Path | None = None

    def mask(self) -> Mask:
        return build_mask(self.mask_spec, self.grid, self.base_dir)

    @property
    def resolved_run_id(self) -> str:
        return self.run_id or f"{self.mode}-P{self.grid.num_slots}-seed{self.ga.rng_seed}"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "grid": {"num_slots": self.grid.num_slots, "spacing": self.grid.spacing},
            "mask": self.mask_spec,
            "num_elements": self.num_elements,
            "ga": asdict(self.ga),
            "dense_factor": self.dense_factor,
            "metric": self.metric,
            "afpa_objective": self.afpa_objective,
            "constrain_count": self.constrain_count,
            "run_id": self.resolved_run_id,
        }


_TOP_KEYS = {"mode", "grid", "mask", "num_elements", "ga", "seed", "dense_factor", "metric",
             "afpa_objective", "constrain_count", "run_id"}
_GA_KEYS = {f.name for f in fields(GaConfig)}


def parse_run_config(data: dict, base_dir: Path | None = None, *, require_mode: bool = True) -> RunConfig:
    _reject_unknown("", data, _TOP_KEYS)
    mode = data.get("mode")
    if require_mode and mode not in MODES:
        raise ConfigError(f"'mode' must be one of {list(MODES)}, got {mode!r}")
    if "grid" not in data:
        raise ConfigError("missing key 'grid'")
    _reject_unknown("grid", data["grid"], {"num_slots", "spacing"})
    try:
        grid = GridSpec(**data["grid"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid 'grid': {exc}") from exc
    if "mask" not in data:
        raise ConfigError("missing key 'mask'")

    ga_data = dict(data.get("ga", {}))
    _reject_unknown("ga", ga_data, _GA_KEYS)
    if "seed" in data:
        ga_data["rng_seed"] = data["seed"]
    try:
        ga = GaConfig(**ga_data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid 'ga': {exc}") from exc

    N = data.get("num_elements")
    if N is not None and (not isinstance(N, int) or isinstance(N, bool) or not 1 <= N <= grid.num_slots):
        raise ConfigError(f"'num_elements' must be an integer in [1, {grid.num_slots}], got {N!r}")
    if mode == "me-ad" and N is None:
        raise ConfigError("'num_elements' is required for mode 'me-ad'")
    metric = data.get("metric", "step")
    if metric not in ("step", "ramp"):
        raise ConfigError(f"'metric' must be 'step' or 'ramp', got {metric!r}")
    afpa_obj = data.get("afpa_objective", "gain")
    if afpa_obj not in ("gain", "margin"):
        raise ConfigError(f"'afpa_objective' must be 'gain' or 'margin', got {afpa_obj!r}")
    dense = data.get("dense_factor", 20)
    if not isinstance(dense, int) or dense < 2:
        raise ConfigError("'dense_factor' must be an integer >= 2")

    cfg = RunConfig(mode=mode, grid=grid, mask_spec=data["mask"], num_elements=N, ga=ga,
                    dense_factor=dense, metric=metric, afpa_objective=afpa_obj,
                    constrain_count=bool(data.get("constrain_count", True)),
                    run_id=data.get("run_id"), base_dir=base_dir)
    cfg.mask()  # validate early
    return cfg


def load_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc


def load_run_config(path) -> RunConfig:
    path = Path(path)
    return parse_run_config(load_json(path), base_dir=path.parent)
