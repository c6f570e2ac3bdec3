"""Radial self-maps ``f(z) = g(|z|) e^{i arg z}`` built from a density ``h``.

The profile is

    log g(s) = -int_s^1 (a - H(u)) / u du,   H(u) = int_u^1 h(v) / 4 dv,

with ``h >= 0`` given by samples on a uniform grid and interpolated linearly.
Writing ``J(u) = int_0^u h/4`` (so ``H = J(1) - J``) splits the integrand into
``(a - J(1))/u`` plus the bounded ``J(u)/u``.  On each linear piece of ``h``,
``J`` is a quadratic in ``u`` and ``J(u)/u`` integrates in closed form, so the
profile is exact up to rounding for the interpolated density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .maps import DiskMap, DomainError, _check_in_disk


class AdmissibilityError(DomainError):
    """The density and exponent do not define an increasing self-map of the disk."""


@dataclass(frozen=True)
class DensitySpec:
    """Nonnegative density sampled on a uniform grid of ``[0, 1]``."""

    v: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if v.ndim != 1 or v.shape != h.shape or len(v) < 2:
            raise DomainError("density needs matching 1-d arrays of at least two samples")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(h))):
            raise DomainError("density samples must be finite")
        if v[0] != 0.0 or v[-1] != 1.0:
            raise DomainError("density grid must span [0, 1]")
        if not np.allclose(np.diff(v), 1.0 / (len(v) - 1), rtol=1e-9, atol=1e-12):
            raise DomainError("density grid must be uniform")
        if np.any(h < 0.0):
            raise AdmissibilityError("density must be nonnegative")
        v.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], n: int = 257) -> "DensitySpec":
        v = np.linspace(0.0, 1.0, n)
        return cls(v, np.broadcast_to(np.asarray(func(v), dtype=float), v.shape).copy())

    @classmethod
    def constant(cls, value: float, n: int = 2) -> "DensitySpec":
        return cls.from_function(lambda v: np.full_like(v, value), n)

    @classmethod
    def from_csv(cls, path) -> "DensitySpec":
        """Read two columns ``v, h``; a non-numeric first row is taken as a header."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise DomainError(f"{path}: malformed row {row!r}") from None
        if not rows:
            raise DomainError(f"{path}: no density samples")
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("v", "h"))
            w.writerows((repr(float(a)), repr(float(b))) for a, b in zip(self.v, self.h))

    def __call__(self, v):
        return np.interp(v, self.v, self.h)

    def integral(self) -> float:
        """``int_0^1 h``, exact for the piecewise-linear interpolant."""
        return float(np.sum(0.5 * (self.h[1:] + self.h[:-1]) * np.diff(self.v)))


class _Profile:
    """Exact ``log g`` for a piecewise-linear density."""

    def __init__(self, density: DensitySpec, a: float):
        v, h = density.v, density.h
        slope = np.diff(h) / np.diff(v)
        dv = np.diff(v)
        seg_j = (h[:-1] * dv + slope * dv**2 / 2.0) / 4.0
        j_nodes = np.concatenate(([0.0], np.cumsum(seg_j)))
        # J(u) = alpha + beta u + gamma u^2 on segment i
        self.gamma = slope / 8.0
        self.beta = (h[:-1] - slope * v[:-1]) / 4.0
        self.alpha = j_nodes[:-1] - h[:-1] * v[:-1] / 4.0 + slope * v[:-1] ** 2 / 8.0
        self.alpha[0] = 0.0
        self.v = v
        self.j_nodes = j_nodes
        self.total = float(j_nodes[-1])  # H(0) = int_0^1 h / 4
        self.exponent = a - self.total
        seg_q = self._segment_integral(np.arange(len(dv)), v[:-1], v[1:])
        # q_nodes[i] = int_{v_i}^1 J(u)/u du
        self.q_nodes = np.concatenate((np.cumsum(seg_q[::-1])[::-1], [0.0]))

    def _segment(self, r):
        return np.clip(np.searchsorted(self.v, r, side="right") - 1, 0, len(self.v) - 2)

    def _segment_integral(self, i, x, y):
        alpha = self.alpha[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(alpha == 0.0, 0.0, alpha * np.log(y / x))
        return logs + self.beta[i] * (y - x) + self.gamma[i] * (y * y - x * x) / 2.0

    def J(self, r):
        i = self._segment(r)
        return self.alpha[i] + self.beta[i] * r + self.gamma[i] * r * r

    def Q(self, r):
        """``int_r^1 J(u)/u du``."""
        i = self._segment(r)
        return self.q_nodes[i + 1] + self._segment_integral(i, r, self.v[i + 1])

    def log_g(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            out = self.exponent * np.log(r) - self.Q(r)
        return out


@dataclass(frozen=True, eq=False)
class RadialQCMap(DiskMap):
    """``f(z) = g(|z|) e^{i arg z}`` with ``g(1) = 1`` and ``r g'(r)/g(r) <= a``."""

    a: float
    K: float
    density: DensitySpec = field(repr=False)
    g_table: np.ndarray = field(repr=False)
    _profile: _Profile = field(repr=False)

    @property
    def degree_hint(self) -> int:
        return 1

    @property
    def boundary_K(self) -> float:
        return self.K

    def log_g(self, r):
        return self._profile.log_g(r)

    def g(self, r):
        r = np.asarray(r, dtype=float)
        out = np.exp(self.log_g(r))
        return out if out.ndim else float(out)

    def log_derivative_ratio(self, r):
        """``r g'(r) / g(r) = a - H(r)``."""
        p = self._profile
        return p.exponent + p.J(np.asarray(r, dtype=float))

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        r = np.abs(z)
        out = self.g(r) * np.exp(1j * np.angle(z))
        return out if out.ndim else complex(out)

    def modulus(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        out = np.asarray(self.g(np.abs(z)))
        return out if out.ndim else float(out)

    def boundary_speed_exact(self, s):
        s = np.asarray(s, dtype=float)
        out = np.ones(s.shape)
        return out if out.ndim else 1.0

    def table_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("r", "g"))
            w.writerows((repr(float(r)), repr(float(g))) for r, g in self.g_table)


def _table_grid(grid_size: int) -> np.ndarray:
    near_zero = np.geomspace(1e-8, 1e-2, grid_size // 4, endpoint=False)
    return np.concatenate(([0.0], near_zero, np.linspace(1e-2, 1.0, grid_size)))


def radial_qc_build(a: float, density: DensitySpec, K: float | None = None,
                    grid_size: int = 1024) -> RadialQCMap:
    """Build the radial map for exponent ``a``; ``K`` defaults to ``a``."""
    a = float(a)
    K = a if K is None else float(K)
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError("a must be positive")
    if K < a:
        raise AdmissibilityError(f"declared K={K} is below a={a}")
    if grid_size < 256:
        raise DomainError("grid_size must be >= 256")
    total = density.integral()
    if total >= 4.0 * a:
        raise AdmissibilityError(f"int_0^1 h = {total} must be < 4a = {4.0 * a}")
    profile = _Profile(density, a)
    # a - H(u) is smallest at u = 0
    if profile.exponent <= 0.0:
        raise AdmissibilityError("a - H(u) must stay positive")
    r = _table_grid(int(grid_size))
    with np.errstate(divide="ignore"):
        g = np.exp(profile.log_g(r))
    g[0] = 0.0
    if np.any(np.diff(g) <= 0.0):
        raise AdmissibilityError("profile is not strictly increasing")
    table = np.column_stack((r, g))
    table.setflags(write=False)
    return RadialQCMap(a, K, density, table, profile)


def radial_qc_eval(m: RadialQCMap, z):
    return m.eval(z)


def radial_laplacian(m: RadialQCMap, r, step: float = 1e-4):
    """``(log g)'' + (log g)'/r`` by central differences with spacing ``step``."""
    r = np.asarray(r, dtype=float)
    fp, f0, fm = m.log_g(r + step), m.log_g(r), m.log_g(r - step)
    return (fp - 2.0 * f0 + fm) / step**2 + (fp - fm) / (2.0 * step * r)


def verify_laplacian(m: RadialQCMap, r_probes: Sequence[float], step: float = 1e-4) -> float:
    """Largest ``|Delta log|f| - h(r)|`` over the probe radii."""
    r = np.asarray(r_probes, dtype=float)
    if np.any((r <= 0.05) | (r >= 0.95)):
        raise DomainError("probe radii must lie in (0.05, 0.95)")
    if not 0.0 < step <= 1e-3:
        raise DomainError("step must be in (0, 1e-3]")
    return float(np.max(np.abs(radial_laplacian(m, r, step) - m.density(r))))


def g_inverse(m: RadialQCMap, t: float, tol: float = 1e-12) -> float:
    """Radius where ``g`` reaches ``t``; ``pi g^{-1}(t)^2`` is the sublevel area."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must be in [0, 1]")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    r, g = m.g_table[:, 0], m.g_table[:, 1]
    k = int(np.searchsorted(g, t))
    # one extra node on each side absorbs rounding between the table and log_g
    lo, hi = float(r[max(k - 2, 0)]), float(r[min(k + 1, len(r) - 1)])
    if lo == 0.0:
        # below the table: g ~ C r^exponent, so bracket geometrically
        lo = hi
        while m.g(lo) > t:
            lo *= 0.5
    log_t = math.log(t)
    xtol = min(tol, 4 * np.finfo(float).eps * lo)
    return float(brentq(lambda x: float(m.log_g(x)) - log_t, lo, hi, xtol=xtol,
                        rtol=4 * np.finfo(float).eps))


def sublevel_area_exact(m: RadialQCMap, t: float) -> float:
    return math.pi * g_inverse(m, t) ** 2


def load_density(path: str | Path) -> DensitySpec:
    return DensitySpec.from_csv(path)
