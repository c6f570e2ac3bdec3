"""Self-maps of the closed unit disk and their boundary behaviour.

Points are plain Python ``complex`` numbers or numpy ``complex128`` arrays;
every evaluation method is vectorised over arrays.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "DiskMap",
    "BlaschkeProduct",
    "MoebiusTransform",
    "PowerRadialMap",
    "as_point",
    "blaschke_eval",
    "moebius_eval",
    "power_radial_eval",
    "boundary_speed",
    "boundary_length",
    "boundary_dilatation",
    "winding_number",
]

#: Largest admissible zero modulus; keeps factor denominators away from 0.
MAX_ZERO_MODULUS = 1.0 - 1e-9
#: Slack on |z| <= 1 accepted by the evaluators.
DISK_SLACK = 1e-9
MAX_WINDING_STEPS = 2**22


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical refinement loop did not converge."""


def as_point(value) -> complex:
    """Coerce ``value`` to a finite complex number.

    Accepts complex, real, ``(re, im)`` pairs and strings such as ``"0.5j"``.
    """
    if isinstance(value, str):
        value = complex(value.replace(" ", ""))
    elif isinstance(value, (tuple, list)):
        re, im = value
        value = complex(float(re), float(im))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite point {value!r}")
    return z


def _check_in_disk(z: np.ndarray) -> None:
    if np.any(np.abs(z) > 1.0 + DISK_SLACK):
        raise DomainError("evaluation point outside the closed unit disk")


class DiskMap(ABC):
    """Uniform handle on a smooth self-map of the unit disk.

    Subclasses fix the unit circle (unimodular boundary values) and report
    their winding degree and boundary dilatation where these are known.
    """

    @abstractmethod
    def eval(self, z):
        ...

    def modulus(self, z):
        return np.abs(self.eval(z))

    @property
    def degree_hint(self) -> int | None:
        return None

    @property
    def boundary_K(self) -> float:
        return 1.0

    def boundary_speed_exact(self, s):
        """``|d/ds f(e^{is})|`` in closed form, or ``None`` if unavailable."""
        return None

    def __call__(self, z):
        return self.eval(z)


@dataclass(frozen=True)
class BlaschkeProduct(DiskMap):
    """``B(z) = e^{i phase} * prod_k (z - a_k) / (1 - z conj(a_k))``."""

    zeros: tuple[complex, ...]
    phase: float = 0.0
    _zeros_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        zeros = tuple(as_point(a) for a in self.zeros)
        if not zeros:
            raise DomainError("a Blaschke product needs at least one zero")
        for a in zeros:
            if abs(a) > MAX_ZERO_MODULUS:
                raise DomainError(f"zero {a} is not strictly inside the disk")
        if not math.isfinite(self.phase):
            raise DomainError("phase must be finite")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "phase", float(self.phase))
        arr = np.array(zeros, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "_zeros_arr", arr)

    @classmethod
    def monomial(cls, d: int, phase: float = 0.0) -> "BlaschkeProduct":
        """``e^{i phase} z^d``."""
        return cls((0j,) * int(d), phase)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def degree_hint(self) -> int:
        return self.degree

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        out = np.full(z.shape, np.exp(1j * self.phase), dtype=complex)
        for a in self._zeros_arr:
            out *= (z - a) / (1.0 - z * np.conj(a))
        return out if out.ndim else complex(out)

    def modulus(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        out = np.ones(z.shape)
        for a in self._zeros_arr:
            out *= np.abs((z - a) / (1.0 - z * np.conj(a)))
        return out if out.ndim else float(out)

    def derivative(self, z):
        """Complex derivative ``B'(z)`` by the product rule over the factors."""
        z = np.asarray(z, dtype=complex)
        factors = [(z - a) / (1.0 - z * np.conj(a)) for a in self._zeros_arr]
        out = np.zeros(z.shape, dtype=complex)
        for k, a in enumerate(self._zeros_arr):
            term = (1.0 - abs(a) ** 2) / (1.0 - z * np.conj(a)) ** 2
            for j, fac in enumerate(factors):
                if j != k:
                    term = term * fac
            out += term
        out *= np.exp(1j * self.phase)
        return out if out.ndim else complex(out)

    def boundary_speed_exact(self, s):
        # on |z| = 1: |B'(z)| = sum_k (1 - |a_k|^2) / |z - a_k|^2
        z = np.exp(1j * np.asarray(s, dtype=float))
        out = np.zeros(z.shape)
        for a in self._zeros_arr:
            out += (1.0 - abs(a) ** 2) / np.abs(z - a) ** 2
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class MoebiusTransform(DiskMap):
    """Disk automorphism ``f(z) = (z + a) / (1 + z conj(a))``."""

    a: complex

    def __post_init__(self):
        a = as_point(self.a)
        if abs(a) > MAX_ZERO_MODULUS:
            raise DomainError(f"|a| = {abs(a)} must be < 1")
        object.__setattr__(self, "a", a)

    @property
    def degree_hint(self) -> int:
        return 1

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        out = (z + self.a) / (1.0 + z * self.a.conjugate())
        return out if out.ndim else complex(out)

    def inverse(self, w):
        """``g(w) = (w - a) / (1 - w conj(a))``."""
        w = np.asarray(w, dtype=complex)
        _check_in_disk(w)
        out = (w - self.a) / (1.0 - w * self.a.conjugate())
        return out if out.ndim else complex(out)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = (1.0 - abs(self.a) ** 2) / (1.0 + z * self.a.conjugate()) ** 2
        return out if out.ndim else complex(out)

    def boundary_speed_exact(self, s):
        z = np.exp(1j * np.asarray(s, dtype=float))
        out = np.abs(self.derivative(z))
        return out if np.ndim(out) else float(out)

    def as_blaschke(self) -> BlaschkeProduct:
        return BlaschkeProduct((-self.a,), 0.0)


@dataclass(frozen=True)
class PowerRadialMap(DiskMap):
    """Extremal map ``f(z) = e^{i d arg z} |z|^{K d}``."""

    d: int
    K: float = 1.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError("d must be a positive integer")
        if not (math.isfinite(self.K) and self.K >= 1.0):
            raise DomainError("K must be >= 1")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "K", float(self.K))

    @property
    def degree_hint(self) -> int:
        return self.d

    @property
    def boundary_K(self) -> float:
        return self.K

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        r = np.abs(z)
        theta = np.angle(z)
        out = r ** (self.K * self.d) * np.exp(1j * self.d * theta)
        return out if out.ndim else complex(out)

    def modulus(self, z):
        z = np.asarray(z, dtype=complex)
        _check_in_disk(z)
        out = np.abs(z) ** (self.K * self.d)
        return out if out.ndim else float(out)

    def boundary_speed_exact(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, float(self.d))
        return out if out.ndim else float(out)


def blaschke_eval(B: BlaschkeProduct, z):
    return B.eval(z)


def moebius_eval(m: MoebiusTransform, z):
    return m.eval(z)


def power_radial_eval(p: PowerRadialMap, z):
    return p.eval(z)


def boundary_speed(f: DiskMap, s, step: float = 1e-5, finite_difference: bool = False):
    """Speed ``|d/ds f(e^{is})|`` of the boundary curve.

    Closed forms are used when the map has one, unless ``finite_difference``
    forces symmetric differencing along the circle with half-width ``step``.
    """
    if not finite_difference:
        exact = f.boundary_speed_exact(s)
        if exact is not None:
            return exact
    if step <= 0:
        raise DomainError("step must be positive")
    s = np.asarray(s, dtype=float)
    fwd = np.asarray(f.eval(np.exp(1j * (s + step))))
    bwd = np.asarray(f.eval(np.exp(1j * (s - step))))
    out = np.abs(fwd - bwd) / (2.0 * step)
    return out if out.ndim else float(out)


def boundary_length(f: DiskMap, n_nodes: int = 2**16, **kwargs) -> float:
    """Length of the boundary curve, i.e. the integral of the boundary speed.

    Periodic trapezoid rule on ``n_nodes`` equispaced angles.
    """
    s = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    speed = boundary_speed(f, s, **kwargs)
    return float(2.0 * np.pi * np.mean(speed))


def boundary_dilatation(f: DiskMap, n_samples: int = 1024, step: float = 1e-5) -> float:
    """Estimate ``max |d_r f| / |d_s f|`` over the unit circle.

    The radial derivative is a one-sided second-order difference from inside
    the disk; the tangential one is symmetric along the circle.
    """
    s = 2.0 * np.pi * np.arange(n_samples) / n_samples
    u = np.exp(1j * s)
    f0 = np.asarray(f.eval(u))
    f1 = np.asarray(f.eval((1.0 - step) * u))
    f2 = np.asarray(f.eval((1.0 - 2.0 * step) * u))
    radial = np.abs(3.0 * f0 - 4.0 * f1 + f2) / (2.0 * step)
    tangential = np.asarray(boundary_speed(f, s, step=step, finite_difference=True))
    return float(np.max(radial / tangential))


def winding_number(f: DiskMap, n_steps: int = 256) -> int:
    """Index of the boundary curve ``s -> f(e^{is})`` around the origin.

    The argument is tracked continuously; the sampling is doubled until every
    step turns by less than a quarter turn.
    """
    if n_steps < 64:
        raise DomainError("n_steps must be at least 64")
    n = int(n_steps)
    while n <= MAX_WINDING_STEPS:
        s = 2.0 * np.pi * np.arange(n + 1) / n
        w = np.asarray(f.eval(np.exp(1j * s)))
        if np.any(np.abs(w) == 0.0):
            raise ConvergenceError("boundary curve passes through the origin")
        increments = np.angle(w[1:] / w[:-1])
        if np.all(np.abs(increments) < np.pi / 2):
            return int(round(float(np.sum(increments)) / (2.0 * np.pi)))
        n *= 2
    raise ConvergenceError(f"winding number did not settle below {MAX_WINDING_STEPS} steps")


def random_blaschke(rng: np.random.Generator, d: int, max_modulus: float = 0.9) -> BlaschkeProduct:
    """Random degree-``d`` product with zeros uniform in the disk of radius ``max_modulus``."""
    r = max_modulus * np.sqrt(rng.random(d))
    theta = 2.0 * np.pi * rng.random(d)
    phase = 2.0 * np.pi * rng.random()
    return BlaschkeProduct(tuple(r * np.exp(1j * theta)), float(phase))

