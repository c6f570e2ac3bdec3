"""``L^p`` norms on the unit disk with respect to plain Lebesgue measure.

``||f||_p^p = int_D |f|^p dA`` is computed two independent ways: through the
layer-cake identity ``p int_0^1 mu(t) t^{p-1} dt`` over superlevel areas, and
by direct tensor quadrature in polar coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .levelset import EstimatorConfig, level_sampler
from .maps import DiskMap, DomainError

PI = math.pi
NORM_METHODS = ("distributional", "quadrature2d", "closed_form")


@dataclass(frozen=True)
class NormResult:
    p: float
    value: float
    method: str
    error_estimate: float

    def to_dict(self) -> dict:
        return {"p": self.p, "value": self.value, "method": self.method,
                "error_estimate": self.error_estimate}


def _check_p(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and p >= 1.0):
        raise DomainError("p must be >= 1")
    return p


def _gauss_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _layer_cake(sampler, p: float, n: int) -> tuple[float, float]:
    t, w = _gauss_unit(n)
    est = [sampler.superlevel(ti) for ti in t]
    mu = np.array([e.value for e in est])
    sd = np.array([e.stderr for e in est])
    weights = p * w * t ** (p - 1.0)
    # every node reuses one sample set, so the errors add linearly
    return float(np.dot(weights, mu)), float(np.dot(weights, sd))


def _pth_root_error(power: float, power_err: float, p: float) -> float:
    if power <= 0.0:
        return power_err ** (1.0 / p)
    return power ** (1.0 / p - 1.0) * power_err / p


def lp_norm_distributional(f: DiskMap, p: float, t_nodes: int = 64,
                           config: EstimatorConfig = EstimatorConfig(),
                           sampler=None) -> NormResult:
    """Norm from superlevel areas at Gauss-Legendre levels in ``[0, 1]``.

    The quadrature error is the change against half as many nodes; it is
    combined root-sum-square with the propagated area standard error.
    """
    p = _check_p(p)
    if t_nodes < 16:
        raise DomainError("t_nodes must be >= 16")
    sampler = sampler if sampler is not None else level_sampler(f, config)
    power, area_err = _layer_cake(sampler, p, t_nodes)
    coarse, _ = _layer_cake(sampler, p, t_nodes // 2)
    err = math.hypot(abs(power - coarse), area_err)
    return NormResult(p, power ** (1.0 / p), "distributional", _pth_root_error(power, err, p))


def _polar_power(f: DiskMap, p: float, nr: int, na: int) -> float:
    r, w = _gauss_unit(nr)
    theta = 2.0 * PI * np.arange(na) / na
    z = r[:, None] * np.exp(1j * theta)[None, :]
    vals = np.asarray(f.modulus(z)) ** p
    return float(2.0 * PI * np.dot(w * r, vals.mean(axis=1)))


def lp_norm_quadrature2d(f: DiskMap, p: float, radial_nodes: int = 256,
                         angular_nodes: int = 512) -> NormResult:
    """Gauss-Legendre in ``r`` (weight ``r``) times the periodic trapezoid in ``theta``.

    The error estimate is the difference from the half-size rule.
    """
    p = _check_p(p)
    if radial_nodes < 16 or angular_nodes < 16:
        raise DomainError("need at least 16 nodes in each direction")
    fine = _polar_power(f, p, radial_nodes, angular_nodes)
    coarse = _polar_power(f, p, radial_nodes // 2, angular_nodes // 2)
    if not math.isfinite(fine):
        raise FloatingPointError("non-finite quadrature sum")
    value = fine ** (1.0 / p)
    return NormResult(p, value, "quadrature2d", abs(value - coarse ** (1.0 / p)))


def lp_lower_bound(K: float, d: int, p: float) -> float:
    """``(2 pi / (2 + K d p))^{1/p}``, the norm of ``e^{i d arg z}|z|^{K d}``."""
    p = _check_p(p)
    if K < 1.0 or d < 1:
        raise DomainError("need K >= 1 and d >= 1")
    return (2.0 * PI / (2.0 + K * d * p)) ** (1.0 / p)


def moebius_l2_closed_form(a_modulus: float) -> float:
    """``L^2`` norm of ``(z + a)/(1 + z conj(a))`` as a function of ``|a|``.

    The expression is ``0/0`` at ``a = 0``; below ``|a| = 1e-3`` its Taylor
    series ``1/2 + x/3 + x^2/12 + x^3/30`` in ``x = |a|^2`` is used instead.
    """
    r = float(a_modulus)
    if not 0.0 <= r < 1.0:
        raise DomainError("need 0 <= |a| < 1")
    x = r * r
    if r < 1e-3:
        bracket = 0.5 + x / 3.0 + x * x / 12.0 + x**3 / 30.0
    else:
        bracket = (2.0 * x * x - x - (1.0 - x) ** 2 * math.log1p(-x)) / (x * x)
    return math.sqrt(PI * bracket)


def closed_form_result(value: float, p: float) -> NormResult:
    return NormResult(_check_p(p), float(value), "closed_form", 0.0)
