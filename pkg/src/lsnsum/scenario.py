"""Scenario and network input files (TOML).

A sum scenario::

    means_db = 0.0          # scalar (needs ``n``) or list
    sigmas_db = 6.0         # scalar or list
    n = 20
    rho = 0.0               # or: correlation = [[1.0, 0.5], [0.5, 1.0]]
    levels = [0.01, 0.5, 0.99]

    [mc]
    samples = 10000000
    seed = 1
    streams = 16

A network file::

    cell_range_km = 1.0
    rings = 18
    eta = 3.0
    sigma_db = 3.0
    rho = 0.0
    placements = [{r_over_rc = 1.0}, {r_over_rc = 0.5, bearing_deg = 0.0}]
    delta_db = {start = -20.0, stop = 20.0, step = 0.5}   # or a list

    [mc]
    samples = 1000000
    seed = 1
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import NotPositiveDefiniteError
from .montecarlo import SampleSpec
from .outage import MobilePlacement, NetworkConfig
from .sln_model import SumModel

DEFAULT_LEVELS = (0.01, 0.1, 0.5, 0.9, 0.99, 0.999)


class ScenarioError(ValueError):
    """Input file could not be parsed or failed validation."""


def _read_toml(path) -> dict:
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"{path}: not a text file") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _number(data: dict, key: str, default=None, where="") -> float:
    if key not in data:
        if default is None:
            raise ScenarioError(f"{where}missing required field '{key}'")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{where}field '{key}' must be a finite number, got {v!r}")
    return float(v)


def _int(data: dict, key: str, default: int, where="") -> int:
    v = data.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{where}field '{key}' must be an integer, got {v!r}")
    return v


def _vector(data: dict, key: str, n: int | None) -> np.ndarray:
    if key not in data:
        raise ScenarioError(f"missing required field '{key}'")
    v = data[key]
    if isinstance(v, list):
        try:
            arr = np.array(v, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"field '{key}' must be a list of numbers") from exc
        if arr.ndim != 1 or arr.size == 0:
            raise ScenarioError(f"field '{key}' must be a non-empty list of numbers")
    else:
        if n is None:
            raise ScenarioError(f"field '{key}' is a scalar; set 'n' or give a list")
        arr = np.full(n, _number(data, key))
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"field '{key}' must contain finite numbers")
    return arr


def _levels(raw) -> tuple[float, ...]:
    if not isinstance(raw, list) or not raw:
        raise ScenarioError("field 'levels' must be a non-empty list")
    out = []
    for p in raw:
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p < 1.0:
            raise ScenarioError(f"field 'levels' entries must lie in (0, 1), got {p!r}")
        out.append(float(p))
    return tuple(out)


def _sample_spec(data: dict, default_samples: int) -> SampleSpec:
    mc = data.get("mc", {})
    if not isinstance(mc, dict):
        raise ScenarioError("'mc' must be a table")
    samples = _int(mc, "samples", default_samples, "mc: ")
    seed = _int(mc, "seed", 0, "mc: ")
    streams = _int(mc, "streams", 16, "mc: ")
    try:
        return SampleSpec(samples, seed, streams)
    except ValueError as exc:
        raise ScenarioError(f"mc: {exc}") from exc


@dataclass(frozen=True, eq=False)
class Scenario:
    means_db: np.ndarray
    sigmas_db: np.ndarray
    rho: float | None = 0.0
    correlation: np.ndarray | None = None
    mc: SampleSpec = field(default_factory=lambda: SampleSpec(10 ** 6))
    levels: tuple[float, ...] = DEFAULT_LEVELS

    def model(self) -> SumModel:
        if self.correlation is not None:
            return SumModel.from_db(self.means_db, self.sigmas_db, corr=self.correlation)
        return SumModel.from_db(self.means_db, self.sigmas_db, self.rho)


def parse_scenario(data: dict) -> Scenario:
    n = data.get("n")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 1):
        raise ScenarioError(f"field 'n' must be a positive integer, got {n!r}")
    means = _vector(data, "means_db", n)
    if n is None:
        n = means.size
    sigmas = _vector(data, "sigmas_db", n)
    if means.size != sigmas.size or means.size != n:
        raise ScenarioError(
            f"fields 'means_db' ({means.size}) and 'sigmas_db' ({sigmas.size}) must have length n = {n}")
    if np.any(sigmas <= 0):
        raise ScenarioError("field 'sigmas_db' entries must be positive")

    if "rho" in data and "correlation" in data:
        raise ScenarioError("give either 'rho' or 'correlation', not both")
    corr = None
    rho = None
    if "correlation" in data:
        try:
            corr = np.array(data["correlation"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ScenarioError("field 'correlation' must be a numeric matrix") from exc
        if corr.shape != (n, n):
            raise ScenarioError(f"field 'correlation' must be {n}x{n}, got shape {corr.shape}")
        if not np.allclose(np.diag(corr), 1.0, rtol=0, atol=1e-12):
            raise ScenarioError("field 'correlation' must have a unit diagonal")
        if not np.allclose(corr, corr.T, rtol=0, atol=1e-12):
            raise ScenarioError("field 'correlation' must be symmetric")
    else:
        rho = _number(data, "rho", 0.0)
        lo = -1.0 / (n - 1) if n > 1 else -1.0
        if not lo < rho < 1.0:
            raise ScenarioError(f"field 'rho' must lie in ({lo:g}, 1), got {rho:g}")

    levels = _levels(data["levels"]) if "levels" in data else DEFAULT_LEVELS
    sc = Scenario(means, sigmas, rho, corr, _sample_spec(data, 10 ** 6), levels)
    try:
        sc.model()
    except NotPositiveDefiniteError as exc:
        raise ScenarioError(f"field 'correlation': {exc}") from exc
    return sc


def load_scenario(path) -> Scenario:
    return parse_scenario(_read_toml(path))


@dataclass(frozen=True, eq=False)
class NetworkScenario:
    config: NetworkConfig
    placements: tuple[MobilePlacement, ...]
    delta_db: np.ndarray
    mc: SampleSpec


def _delta_grid(raw) -> np.ndarray:
    if raw is None:
        raw = {"start": -20.0, "stop": 20.0, "step": 0.5}
    if isinstance(raw, list):
        try:
            grid = np.array(raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ScenarioError("field 'delta_db' must be a list of numbers") from exc
    elif isinstance(raw, dict):
        start = _number(raw, "start", where="delta_db: ")
        stop = _number(raw, "stop", where="delta_db: ")
        step = _number(raw, "step", where="delta_db: ")
        if step <= 0 or stop < start:
            raise ScenarioError("delta_db: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = start + step * np.arange(count)
    else:
        raise ScenarioError("field 'delta_db' must be a list or a {start, stop, step} table")
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ScenarioError("field 'delta_db' must be a non-empty list of finite numbers")
    return grid


def parse_network(data: dict) -> NetworkScenario:
    try:
        cfg = NetworkConfig(
            cell_range_km=_number(data, "cell_range_km", 1.0),
            rings=_int(data, "rings", 18),
            eta=_number(data, "eta"),
            sigma_db=_number(data, "sigma_db"),
            rho=_number(data, "rho", 0.0),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc

    raw = data.get("placements", [{"r_over_rc": 1.0}])
    if not isinstance(raw, list) or not raw:
        raise ScenarioError("field 'placements' must be a non-empty list of tables")
    placements = []
    for i, item in enumerate(raw):
        where = f"placements[{i}]: "
        if not isinstance(item, dict):
            raise ScenarioError(f"{where}must be a table")
        bearing = math.radians(_number(item, "bearing_deg", 0.0, where))
        if "distance_km" in item:
            dist = _number(item, "distance_km", where=where)
        else:
            dist = _number(item, "r_over_rc", where=where) * cfg.rc_km
        if dist <= 0:
            raise ScenarioError(f"{where}distance must be positive")
        placements.append(MobilePlacement(dist, bearing))

    return NetworkScenario(cfg, tuple(placements), _delta_grid(data.get("delta_db")),
                           _sample_spec(data, 10 ** 6))


def load_network(path) -> NetworkScenario:
    return parse_network(_read_toml(path))
