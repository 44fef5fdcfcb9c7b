"""Run configuration parsing and report serialization.

A run config is one JSON document (see README for the grammar).  Every
validation failure raises ConfigError naming the offending field path,
before any computation starts.

Reports serialize with deterministic key order; nonfinite values appear
as the strings "inf"/"-inf" (exponents and support values live in
[0, inf]), and floats round-trip exactly (shortest-repr encoding).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, body_from_dict
from .bounds import Layer, LayeredUnimodal, build_layered
from .errors import ConfigError
from .linalg import Covariance, Direction, build_covariance, identity_covariance
from .suites import SUITES

_NORMALIZE_WARN_TOL = 1e-6


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int
    z_threshold: float = 4.0


@dataclass(frozen=True)
class RunConfig:
    """A parsed, validated run configuration (all commands share it)."""

    raw: dict
    dim: int
    cov: Covariance
    u: Direction | None
    body: ConvexBody | None
    layers: LayeredUnimodal | None
    t_grid: tuple[float, ...] | None
    theta_grid: tuple[float, ...] | None
    alpha: float | None
    mc: McConfig | None
    suite: str | None
    fault_upper_scale: float
    directions: tuple[np.ndarray, ...] | None
    warnings: tuple[str, ...] = field(default=())


def parse_run_config(raw: object) -> RunConfig:
    """Validate a config document; command-specific requirements are
    checked by the commands themselves (a config may serve several)."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config: expected a JSON object, got {type(raw).__name__}")
    warnings: list[str] = []

    dim = raw.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ConfigError(f"dim: expected a positive integer, got {dim!r}")

    cov = _parse_sigma(raw.get("sigma"), dim)

    u = None
    if "u" in raw:
        u_raw = raw["u"]
        if not isinstance(u_raw, list) or len(u_raw) != dim:
            raise ConfigError(f"u: expected a list of {dim} numbers")
        try:
            vec = np.asarray(u_raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"u: not numeric: {exc}") from exc
        norm = float(np.linalg.norm(vec))
        if norm == 0.0 or not np.all(np.isfinite(vec)):
            raise ConfigError("u: must be a finite nonzero vector")
        if abs(norm - 1.0) > _NORMALIZE_WARN_TOL:
            warnings.append(f"u normalized on load (input norm was {norm!r})")
        u = Direction.from_vector(vec)

    body = None
    if "body" in raw:
        body = body_from_dict(raw["body"], "body")
        if body.dim != dim:
            raise ConfigError(f"body: dimension {body.dim} does not match dim {dim}")

    layers = None
    if "layers" in raw:
        layers = _parse_layers(raw["layers"], dim)

    if body is not None and layers is not None:
        raise ConfigError("body/layers: give one or the other, not both")

    t_grid = _parse_grid(raw, "t_grid")
    theta_grid = _parse_grid(raw, "theta_grid")

    alpha = None
    if "alpha" in raw:
        alpha_raw = raw["alpha"]
        if (
            isinstance(alpha_raw, bool)
            or not isinstance(alpha_raw, (int, float))
            or not 0.0 < float(alpha_raw) < 1.0
        ):
            raise ConfigError(f"alpha: expected a number in (0, 1), got {alpha_raw!r}")
        alpha = float(alpha_raw)

    mc = _parse_mc(raw.get("mc"))

    suite = None
    if "suite" in raw:
        suite = raw["suite"]
        if suite not in SUITES:
            raise ConfigError(
                f"suite: unknown suite {suite!r}; choose from {sorted(SUITES)}"
            )

    fault = raw.get("fault_upper_scale", 1.0)
    if isinstance(fault, bool) or not isinstance(fault, (int, float)) or not fault > 0:
        raise ConfigError(f"fault_upper_scale: expected a number > 0, got {fault!r}")

    directions = None
    if "directions" in raw:
        dirs_raw = raw["directions"]
        if not isinstance(dirs_raw, list) or not dirs_raw:
            raise ConfigError("directions: expected a nonempty list of vectors")
        collected = []
        for i, entry in enumerate(dirs_raw):
            if not isinstance(entry, list) or len(entry) != dim:
                raise ConfigError(f"directions[{i}]: expected a list of {dim} numbers")
            try:
                v = np.asarray(entry, dtype=float)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"directions[{i}]: not numeric: {exc}") from exc
            if not np.all(np.isfinite(v)):
                raise ConfigError(f"directions[{i}]: entries must be finite")
            collected.append(v)
        directions = tuple(collected)

    return RunConfig(
        raw=raw,
        dim=dim,
        cov=cov,
        u=u,
        body=body,
        layers=layers,
        t_grid=t_grid,
        theta_grid=theta_grid,
        alpha=alpha,
        mc=mc,
        suite=suite,
        fault_upper_scale=float(fault),
        directions=directions,
        warnings=tuple(warnings),
    )


def _parse_sigma(raw: object, dim: int) -> Covariance:
    if raw is None:
        return identity_covariance(dim)
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("sigma: expected an object with a \"kind\" field")
    kind = raw["kind"]
    try:
        if kind == "identity":
            return identity_covariance(dim)
        if kind == "diagonal":
            entries = raw.get("entries")
            if not isinstance(entries, list) or len(entries) != dim:
                raise ConfigError(f"sigma.entries: expected a list of {dim} numbers")
            return build_covariance(np.diag(np.asarray(entries, dtype=float)))
        if kind == "dense":
            matrix = raw.get("matrix")
            if not isinstance(matrix, list) or len(matrix) != dim:
                raise ConfigError(f"sigma.matrix: expected {dim} rows")
            return build_covariance(np.asarray(matrix, dtype=float))
    except ConfigError:
        raise
    except Exception as exc:  # validation errors from build_covariance
        raise ConfigError(f"sigma: {exc}") from exc
    raise ConfigError(f"sigma.kind: unknown kind {kind!r}")


def _parse_layers(raw: object, dim: int) -> LayeredUnimodal:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("layers: expected a nonempty list")
    parsed = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"layers[{i}]: expected an object")
        weight = entry.get("weight")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise ConfigError(f"layers[{i}].weight: expected a number, got {weight!r}")
        body = body_from_dict(entry.get("body"), f"layers[{i}].body")
        if body.dim != dim:
            raise ConfigError(
                f"layers[{i}].body: dimension {body.dim} does not match dim {dim}"
            )
        try:
            parsed.append(Layer(float(weight), body))
        except Exception as exc:
            raise ConfigError(f"layers[{i}]: {exc}") from exc
    try:
        return build_layered(parsed)
    except Exception as exc:
        raise ConfigError(f"layers: {exc}") from exc


def _parse_grid(raw: dict, key: str) -> tuple[float, ...] | None:
    if key not in raw:
        return None
    grid = raw[key]
    if not isinstance(grid, list) or not grid:
        raise ConfigError(f"{key}: expected a nonempty list of numbers")
    out = []
    for i, entry in enumerate(grid):
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise ConfigError(f"{key}[{i}]: expected a number, got {entry!r}")
        value = float(entry)
        if math.isnan(value) or value < 0.0:
            raise ConfigError(f"{key}[{i}]: must be >= 0, got {entry!r}")
        out.append(value)
    return tuple(out)


def _parse_mc(raw: object) -> McConfig | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("mc: expected an object")
    samples = raw.get("samples")
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        raise ConfigError(f"mc.samples: expected a positive integer, got {samples!r}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"mc.seed: expected a nonnegative integer, got {seed!r}")
    z = raw.get("z_threshold", 4.0)
    if isinstance(z, bool) or not isinstance(z, (int, float)) or not z > 0:
        raise ConfigError(f"mc.z_threshold: expected a number > 0, got {z!r}")
    return McConfig(samples=samples, seed=seed, z_threshold=float(z))


def jsonable(obj: object) -> object:
    """Make a report tree JSON-serializable: numpy -> builtin, inf -> "inf"."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isnan(obj):
            raise ConfigError("report contains NaN; refusing to serialize")
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    return obj


def encode_report(envelope: dict) -> str:
    """Serialize an envelope deterministically (sorted keys, exact floats)."""
    return json.dumps(jsonable(envelope), sort_keys=True, indent=2, allow_nan=False)
