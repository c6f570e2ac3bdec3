"""Areas of sublevel and superlevel sets of ``|f|`` inside the unit disk.

Two estimators are provided.  The Monte Carlo one draws uniform disk samples
from counter-based streams (see :mod:`diskmaps.sampling`); the grid one
classifies pixel centres of an ``n x n`` raster over ``[-1, 1]^2`` and brackets
the true area using pixel corners.  Both precompute the moduli once, so sweeps
over many levels ``t`` reuse a single sample set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .maps import DiskMap, DomainError, winding_number
from .sampling import DEFAULT_CHUNK, map_chunks

PI = math.pi
METHODS = ("monte_carlo", "grid")
VERDICTS = ("holds", "holds_within_error", "violated")


@dataclass(frozen=True)
class AreaEstimate:
    value: float
    stderr: float
    method: str
    samples: int
    bracket: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "stderr": self.stderr,
            "method": self.method,
            "samples": self.samples,
        }
        if self.bracket is not None:
            out["bracket"] = list(self.bracket)
        return out

    def complement(self) -> "AreaEstimate":
        """Area of the rest of the disk, with the bracket mirrored."""
        bracket = None
        if self.bracket is not None:
            bracket = (PI - self.bracket[1], PI - self.bracket[0])
        return AreaEstimate(PI - self.value, self.stderr, self.method, self.samples, bracket)


@dataclass(frozen=True)
class BoundReport:
    t: float
    d: int
    K: float
    measured_sublevel: AreaEstimate
    sharp_bound: float
    margin: float
    verdict: str

    CSV_HEADER = ("t", "d", "K", "measured", "stderr", "bound", "margin", "verdict")

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "d": self.d,
            "K": self.K,
            "measured_sublevel": self.measured_sublevel.to_dict(),
            "sharp_bound": self.sharp_bound,
            "margin": self.margin,
            "verdict": self.verdict,
        }

    def csv_row(self) -> tuple:
        m = self.measured_sublevel
        return (self.t, self.d, self.K, m.value, m.stderr, self.sharp_bound, self.margin, self.verdict)


@dataclass(frozen=True)
class RasterGrid:
    """Pixel mask; row 0 is the top edge ``y = 1``, column 0 the left edge ``x = -1``."""

    resolution: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.mask.shape != (self.resolution, self.resolution):
            raise ValueError("mask shape does not match resolution")

    @property
    def pixel_area(self) -> float:
        return (2.0 / self.resolution) ** 2

    def area(self) -> float:
        return self.pixel_area * int(np.count_nonzero(self.mask))


@dataclass(frozen=True)
class EstimatorConfig:
    method: str = "monte_carlo"
    n: int = 10**6
    seed: int = 0
    resolution: int = 2048
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown estimator {self.method!r}")
        if self.method == "monte_carlo" and self.n < 1000:
            raise DomainError("Monte Carlo needs n >= 1000")
        if self.method == "grid" and self.resolution < 64:
            raise DomainError("grid resolution must be >= 64")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")


def _check_level(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"level t={t} outside [0, 1]")
    return t


def _modulus_in_disk(f: DiskMap, z: np.ndarray) -> np.ndarray:
    """``|f(z)|`` inside the closed disk, ``inf`` outside it."""
    out = np.full(z.shape, np.inf)
    inside = np.abs(z) < 1.0
    out[inside] = f.modulus(z[inside])
    return out


class MonteCarloLevels:
    """Sorted moduli of ``|f|`` at ``n`` uniform disk samples."""

    method = "monte_carlo"

    def __init__(self, f: DiskMap, n: int = 10**6, seed: int = 0, workers: int = 1,
                 chunk_size: int = DEFAULT_CHUNK):
        if n < 1000:
            raise DomainError("Monte Carlo needs n >= 1000")
        self.n = int(n)
        self.seed = int(seed)
        moduli = map_chunks(f.modulus, self.n, self.seed, workers, chunk_size)
        moduli.sort()
        moduli.setflags(write=False)
        self.moduli = moduli

    def count_below(self, t: float) -> int:
        return int(np.searchsorted(self.moduli, t, side="left"))

    def sublevel(self, t: float) -> AreaEstimate:
        t = _check_level(t)
        if t == 0.0:
            return AreaEstimate(0.0, 0.0, self.method, self.n)
        if t == 1.0:
            return AreaEstimate(PI, 0.0, self.method, self.n)
        p = self.count_below(t) / self.n
        return AreaEstimate(PI * p, PI * math.sqrt(p * (1.0 - p) / self.n), self.method, self.n)

    def superlevel(self, t: float) -> AreaEstimate:
        return self.sublevel(t).complement()

    def mean_power(self, p: float) -> float:
        """Sample estimate of the integral of ``|f|^p`` over the disk."""
        return PI * float(np.mean(self.moduli**p))


class GridLevels:
    """Moduli of ``|f|`` at pixel centres and corners of an ``n x n`` raster."""

    method = "grid"

    def __init__(self, f: DiskMap, resolution: int = 2048, block_rows: int = 256):
        if resolution < 64:
            raise DomainError("grid resolution must be >= 64")
        n = self.resolution = int(resolution)
        h = 2.0 / n
        centres = -1.0 + (np.arange(n) + 0.5) * h
        corners = -1.0 + np.arange(n + 1) * h
        self.centre = self._sample(f, centres, centres[::-1], block_rows)
        self.corner = self._sample(f, corners, corners[::-1], block_rows)

    @staticmethod
    def _sample(f, xs, ys, block_rows):
        out = np.empty((len(ys), len(xs)))
        for lo in range(0, len(ys), block_rows):
            yb = ys[lo:lo + block_rows]
            z = xs[None, :] + 1j * yb[:, None]
            out[lo:lo + len(yb)] = _modulus_in_disk(f, z)
        out.setflags(write=False)
        return out

    @property
    def pixel_area(self) -> float:
        return (2.0 / self.resolution) ** 2

    def mask(self, t: float) -> np.ndarray:
        return self.centre < _check_level(t)

    def sublevel(self, t: float) -> AreaEstimate:
        t = _check_level(t)
        pixels = self.resolution**2
        if t == 0.0:
            return AreaEstimate(0.0, 0.0, self.method, pixels, (0.0, 0.0))
        if t == 1.0:
            return AreaEstimate(PI, 0.0, self.method, pixels, (PI, PI))
        inside = self.centre < t
        c = self.corner < t
        all_c = c[:-1, :-1] & c[1:, :-1] & c[:-1, 1:] & c[1:, 1:]
        any_c = c[:-1, :-1] | c[1:, :-1] | c[:-1, 1:] | c[1:, 1:]
        interior = inside & all_c
        touched = inside | any_c
        a = self.pixel_area
        value = a * int(np.count_nonzero(inside))
        bracket = (a * int(np.count_nonzero(interior)), a * int(np.count_nonzero(touched)))
        return AreaEstimate(value, 0.0, self.method, pixels, bracket)

    def superlevel(self, t: float) -> AreaEstimate:
        return self.sublevel(t).complement()


def level_sampler(f: DiskMap, config: EstimatorConfig = EstimatorConfig()):
    if config.method == "grid":
        return GridLevels(f, config.resolution)
    return MonteCarloLevels(f, config.n, config.seed, config.workers, config.chunk_size)


def sublevel_area_mc(f: DiskMap, t: float, n: int = 10**6, seed: int = 0, workers: int = 1,
                     chunk_size: int = DEFAULT_CHUNK) -> AreaEstimate:
    """Monte Carlo estimate of ``|{z in D : |f(z)| < t}|``."""
    _check_level(t)
    return MonteCarloLevels(f, n, seed, workers, chunk_size).sublevel(t)


def sublevel_area_grid(f: DiskMap, t: float, resolution: int = 2048) -> AreaEstimate:
    """Pixel-count estimate of the sublevel area with a corner-based bracket."""
    _check_level(t)
    return GridLevels(f, resolution).sublevel(t)


def superlevel_area(f: DiskMap, t: float, method: str = "monte_carlo", **params) -> AreaEstimate:
    """``|{|f| >= t}|`` as ``pi`` minus the sublevel estimate (level sets are null)."""
    config = EstimatorConfig(method=method, **params)
    _check_level(t)
    return level_sampler(f, config).superlevel(t)


def moebius_superlevel_closed_form(a_modulus: float, t: float) -> float:
    """Exact ``|{|f| > t}|`` for ``f(z) = (z + a)/(1 + z conj(a))``, depending on ``|a|`` only."""
    r = float(a_modulus)
    if not 0.0 <= r < 1.0:
        raise DomainError("need 0 <= |a| < 1")
    t = _check_level(t)
    r2t2 = (r * t) ** 2
    return PI * (1.0 - t * t) * (1.0 - r2t2 * r * r) / (1.0 - r2t2) ** 2


def moebius_monotonicity_check(t: float, grid_of_r: Sequence[float]) -> bool:
    """True iff the Moebius superlevel area is nondecreasing along ``grid_of_r``."""
    values = np.array([moebius_superlevel_closed_form(r, t) for r in grid_of_r])
    return bool(np.all(np.diff(values) >= 0.0))


def sharp_sublevel_bound(t: float, d: int, K: float = 1.0) -> float:
    """``pi t^{2/(K d)}``, attained by ``e^{i d arg z} |z|^{K d}``."""
    t = _check_level(t)
    if d < 1 or K < 1.0:
        raise DomainError("need d >= 1 and K >= 1")
    return PI * t ** (2.0 / (K * d))


def map_degree(f: DiskMap) -> int:
    d = f.degree_hint
    return int(d) if d is not None else winding_number(f)


def _verdict(estimate: AreaEstimate, bound: float) -> str:
    if estimate.bracket is not None and estimate.method == "grid":
        lo, hi = estimate.bracket
        if lo > bound:
            return "violated"
        return "holds_within_error" if hi >= bound else "holds"
    slack = 3.0 * estimate.stderr
    if abs(estimate.value - bound) <= slack:
        return "holds_within_error"
    if estimate.value - slack > bound:
        return "violated"
    return "holds"


def report_from_estimate(t: float, d: int, K: float, estimate: AreaEstimate) -> BoundReport:
    bound = sharp_sublevel_bound(t, d, K)
    return BoundReport(float(t), int(d), float(K), estimate, bound,
                       bound - estimate.value, _verdict(estimate, bound))


def check_bound(f: DiskMap, t: float, config: EstimatorConfig = EstimatorConfig(),
                sampler=None) -> BoundReport:
    """Compare the measured sublevel area with ``pi t^{2/(K d)}``.

    ``holds_within_error`` flags measurements statistically indistinguishable
    from the bound (candidate equality cases).  Pass ``sampler`` to reuse
    precomputed moduli.
    """
    sampler = sampler if sampler is not None else level_sampler(f, config)
    return report_from_estimate(t, map_degree(f), f.boundary_K, sampler.sublevel(t))


def bound_sweep(f: DiskMap, ts: Iterable[float],
                config: EstimatorConfig = EstimatorConfig()) -> list[BoundReport]:
    ts = [_check_level(t) for t in ts]
    sampler = level_sampler(f, config)
    d, K = map_degree(f), f.boundary_K
    return [report_from_estimate(t, d, K, sampler.sublevel(t)) for t in ts]


def rasterize_sublevel(f: DiskMap, t: float, resolution: int = 1024) -> RasterGrid:
    """Mask of pixels whose centre lies in the disk with ``|f| < t``."""
    t = _check_level(t)
    if resolution < 64:
        raise DomainError("resolution must be >= 64")
    n = int(resolution)
    centres = -1.0 + (np.arange(n) + 0.5) * (2.0 / n)
    z = centres[None, :] + 1j * centres[::-1, None]
    return RasterGrid(n, _modulus_in_disk(f, z) < t)


def count_components(grid: RasterGrid) -> int:
    """Number of 4-connected components of set pixels."""
    _, count = ndimage.label(grid.mask)
    return int(count)
