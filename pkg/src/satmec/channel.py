"""Large-scale channel gains from radio maps, Shannon link rates and fading draws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .model import Link, LinkKind, Position


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance model: ``g0_db`` at ``d0`` meters, slope ``10*exponent`` dB/decade."""

    g0_db: float
    d0: float
    exponent: float

    def __post_init__(self) -> None:
        if not self.d0 > 0:
            raise ValueError("reference distance must be positive")
        if self.exponent < 0:
            raise ValueError("path-loss exponent must be nonnegative")

    def gain_db(self, distance: float | np.ndarray) -> float | np.ndarray:
        d = np.maximum(distance, self.d0)
        return self.g0_db - 10.0 * self.exponent * np.log10(d / self.d0)


@dataclass(frozen=True)
class GridSpec:
    origin: tuple[float, float]
    spacing: float
    nx: int
    ny: int

    def __post_init__(self) -> None:
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2x2 points")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.origin[0] + self.spacing * np.arange(self.nx)
        ys = self.origin[1] + self.spacing * np.arange(self.ny)
        return xs, ys


@dataclass(frozen=True)
class RadioMap:
    """Large-scale gain in dB on a ground lattice, one (ny, nx) array per link class."""

    grid: GridSpec
    values: Mapping[str, np.ndarray]
    epoch: float = 0.0

    def __post_init__(self) -> None:
        for cls, arr in self.values.items():
            if arr.shape != (self.grid.ny, self.grid.nx):
                raise ValueError(f"map for {cls} has shape {arr.shape}, grid is {(self.grid.ny, self.grid.nx)}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"map for {cls} has non-finite values")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadioMap):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.epoch == other.epoch
            and self.values.keys() == other.values.keys()
            and all(np.array_equal(self.values[k], other.values[k]) for k in self.values)
        )

    __hash__ = None  # type: ignore[assignment]


def _class_key(link_class: Union[str, LinkKind]) -> str:
    return link_class.value if isinstance(link_class, LinkKind) else str(link_class)


def build_radio_map(
    params: PathLossParams,
    grid: GridSpec,
    transmitter: Position,
    link_class: Union[str, LinkKind] = LinkKind.USER_ACCESS,
    epoch: float = 0.0,
) -> RadioMap:
    xs, ys = grid.axes()
    gx, gy = np.meshgrid(xs, ys)
    dist = np.sqrt((gx - transmitter.x) ** 2 + (gy - transmitter.y) ** 2 + transmitter.z**2)
    return RadioMap(grid, {_class_key(link_class): params.gain_db(dist)}, epoch)


def lookup_gain_db(map_: RadioMap, p: Position, link_class: Union[str, LinkKind, None] = None) -> float:
    """Bilinear interpolation in dB; points outside the lattice clamp to the edge."""
    if link_class is None:
        if len(map_.values) != 1:
            raise ValueError("map holds several link classes; pass link_class")
        arr = next(iter(map_.values.values()))
    else:
        arr = map_.values[_class_key(link_class)]
    g = map_.grid
    fx = (p.x - g.origin[0]) / g.spacing
    fy = (p.y - g.origin[1]) / g.spacing
    fx = min(max(fx, 0.0), g.nx - 1.0)
    fy = min(max(fy, 0.0), g.ny - 1.0)
    i0 = min(int(math.floor(fx)), g.nx - 2)
    j0 = min(int(math.floor(fy)), g.ny - 2)
    u, v = fx - i0, fy - j0
    return float(
        (1 - u) * (1 - v) * arr[j0, i0]
        + u * (1 - v) * arr[j0, i0 + 1]
        + (1 - u) * v * arr[j0 + 1, i0]
        + u * v * arr[j0 + 1, i0 + 1]
    )


def lookup_gain(map_: RadioMap, p: Position, link_class: Union[str, LinkKind, None] = None) -> float:
    """Linear power gain at ``p``."""
    return 10.0 ** (lookup_gain_db(map_, p, link_class) / 10.0)


def link_rate(p_tx: float, gain: float, link: Link) -> float:
    """Shannon rate in bit/s over ``link`` for transmit power ``p_tx``."""
    return shannon_rate(p_tx, gain, link.bandwidth, link.noise_psd)


def shannon_rate(p_tx, gain, bandwidth, noise_psd):
    if np.any(np.asarray(p_tx) < 0):
        raise ValueError("transmit power must be nonnegative")
    snr = np.asarray(p_tx) * gain / (noise_psd * bandwidth)
    rate = bandwidth * np.log2(1.0 + snr)
    return float(rate) if np.ndim(rate) == 0 else rate


class FadingKind(str, Enum):
    NONE = "none"
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"


@dataclass(frozen=True)
class FadingSpec:
    """Unit-mean small-scale power fading distribution."""

    kind: FadingKind = FadingKind.NONE
    k_factor: float = 0.0  # Rician only; math.inf gives a deterministic channel

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FadingKind(self.kind))
        if self.k_factor < 0:
            raise ValueError("K-factor must be nonnegative")

    @property
    def deterministic(self) -> bool:
        return self.kind == FadingKind.NONE or (
            self.kind == FadingKind.RICIAN and math.isinf(self.k_factor)
        )


def sample_fading(spec: FadingSpec, rng: np.random.Generator, size=None):
    """Draw power fading factors with unit mean."""
    if spec.deterministic:
        return 1.0 if size is None else np.ones(size)
    if spec.kind == FadingKind.RAYLEIGH:
        return rng.exponential(1.0, size)
    k = spec.k_factor
    los = math.sqrt(k / (k + 1.0))
    sigma = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    re = los + sigma * rng.standard_normal(size)
    im = sigma * rng.standard_normal(size)
    return re * re + im * im


_GROUND_RECEIVERS_Z = 0.0


@dataclass(frozen=True)
class ChannelModel:
    """Per-link-class path loss, optionally routed through ground radio maps.

    When ``grid`` is set, links of the ``mapped`` classes with one endpoint on
    the ground take their gain from a radio map built around the elevated
    endpoint and read at the ground endpoint. Every other link uses the
    closed-form log-distance model.
    """

    params: Mapping[str, PathLossParams]
    grid: Optional[GridSpec] = None
    mapped: tuple[str, ...] = (LinkKind.USER_ACCESS.value, LinkKind.USER_SATELLITE.value)
    _maps: dict = field(default_factory=dict, compare=False, repr=False)

    def gain_db(self, kind: Union[str, LinkKind], a: Position, b: Position) -> float:
        key = _class_key(kind)
        try:
            pl = self.params[key]
        except KeyError:
            raise KeyError(f"no path-loss parameters for link class {key!r}") from None
        ground, air = (a, b) if a.z <= b.z else (b, a)
        if self.grid is None or key not in self.mapped or ground.z > _GROUND_RECEIVERS_Z:
            return float(pl.gain_db(a.distance_to(b)))
        cache_key = (key, air)
        rmap = self._maps.get(cache_key)
        if rmap is None:
            rmap = build_radio_map(pl, self.grid, air, key)
            self._maps[cache_key] = rmap
        return lookup_gain_db(rmap, ground, key)

    def gain(self, kind: Union[str, LinkKind], a: Position, b: Position) -> float:
        return 10.0 ** (self.gain_db(kind, a, b) / 10.0)


# --- radio map files ---------------------------------------------------------


def save_radio_map(map_: RadioMap, path: Union[str, Path]) -> None:
    """Write one header + row-major body block per link class."""
    lines = []
    for cls, arr in map_.values.items():
        g = map_.grid
        lines.append(f"link_class: {cls}")
        lines.append(f"origin: {g.origin[0]!r} {g.origin[1]!r}")
        lines.append(f"spacing: {g.spacing!r}")
        lines.append(f"shape: {g.ny} {g.nx}")
        lines.append(f"epoch: {map_.epoch!r}")
        for row in arr:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append("")
    Path(path).write_text("\n".join(lines))


def load_radio_map(path: Union[str, Path]) -> RadioMap:
    text = Path(path).read_text().splitlines()
    values: dict[str, np.ndarray] = {}
    grid: Optional[GridSpec] = None
    epoch = 0.0
    i = 0
    while i < len(text):
        if not text[i].strip():
            i += 1
            continue
        header = {}
        for _ in range(5):
            key, _, val = text[i].partition(":")
            header[key.strip()] = val.strip()
            i += 1
        ny, nx = (int(v) for v in header["shape"].split())
        ox, oy = (float(v) for v in header["origin"].split())
        block_grid = GridSpec((ox, oy), float(header["spacing"]), nx, ny)
        if grid is not None and block_grid != grid:
            raise ValueError(f"{path}: link classes use different grids")
        grid = block_grid
        epoch = float(header["epoch"])
        rows = [[float(v) for v in text[i + r].split()] for r in range(ny)]
        values[header["link_class"]] = np.array(rows)
        i += ny
    if grid is None:
        raise ValueError(f"{path}: empty radio map file")
    return RadioMap(grid, values, epoch)
