"""Analytic GOE predictions for the fractal-dimension statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

EULER_GAMMA = 0.57721566490153286061
_EXACT_HARMONIC_MAX = 1_000_000


class QuadratureError(RuntimeError):
    pass


@lru_cache(maxsize=1)
def _harmonic_table() -> np.ndarray:
    # cumulative sums are accurate to ~1e-15 relative; exact enough for the contract
    return np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, 10_001, dtype=float))])


def harmonic_number(n: int) -> float:
    """h_n = sum_{k<=n} 1/k: direct summation up to 10**6, asymptotic series beyond."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    if n <= 10_000:
        return float(_harmonic_table()[n])
    if n <= _EXACT_HARMONIC_MAX:
        return math.fsum(1.0 / k for k in range(1, n + 1))
    inv2 = 1.0 / (n * n)
    return math.log(n) + EULER_GAMMA + 0.5 / n - inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 / 252))


# Bernoulli numbers B_2k for the asymptotic series
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def digamma(x: float) -> float:
    """psi(x) for x > 0 by upward recurrence to x >= 10 and the asymptotic series."""
    if x <= 0:
        raise ValueError(f"digamma implemented for x > 0, got {x}")
    acc = 0.0
    while x < 10:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    pw = inv2
    for k, b in enumerate(_B2K, start=1):
        series += b / (2 * k) * pw
        pw *= inv2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x: float) -> float:
    """psi'(x) for x > 0 by upward recurrence to x >= 10 and the asymptotic series."""
    if x <= 0:
        raise ValueError(f"trigamma implemented for x > 0, got {x}")
    acc = 0.0
    while x < 10:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    pw = inv2 * inv
    for b in _B2K:
        series += b * pw
        pw *= inv2
    return acc + inv + 0.5 * inv2 + series


def harmonic_real(x: float) -> float:
    """h_x = psi(x + 1) + gamma; equals harmonic_number for integer x."""
    if float(x).is_integer() and x >= 1:
        return harmonic_number(int(x))
    return digamma(x + 1.0) + EULER_GAMMA


def _check_dim(dim: int) -> float:
    if dim < 2:
        raise ValueError(f"GOE baselines need dim >= 2, got {dim}")
    return math.log(dim)


def goe_d1_stats(dim: int) -> tuple[float, float]:
    """Mean and variance of D̃1 over GOE eigenvectors of dimension ``dim``."""
    ln_n = _check_dim(dim)
    n = float(dim)
    mean = (harmonic_real(n / 2) - 2 + math.log(4)) / ln_n
    var = ((3 * math.pi**2 - 24) * (n + 2) - 8) / (2 * (n + 2) ** 2 * ln_n**2) - trigamma(2 + n / 2) / ln_n**2
    return mean, var


def goe_d2_stats(dim: int) -> tuple[float, float]:
    """D̃2 from the averaged participation ratio, and its variance."""
    ln_n = _check_dim(dim)
    n = float(dim)
    d2 = (math.log(n + 2) - math.log(3)) / ln_n
    var = 8 * (n - 1) / (3 * (n + 4) * (n + 6) * ln_n**2)
    return d2, var


def _log_erf_power(x: np.ndarray, power: float) -> np.ndarray:
    """power * ln Erf(x), accurate where Erf(x) is close to 1."""
    x = np.asarray(x, dtype=float)
    small = x < 1.0
    out = np.empty_like(x)
    with np.errstate(divide="ignore"):
        out[small] = power * np.log(special.erf(x[small]))
    out[~small] = power * np.log1p(-special.erfc(x[~small]))
    return out


def goe_dinf_moment(dim: int, k: int) -> float:
    """k-th moment of D̃∞ from the Erf-power integral, with s = exp(-u)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ln_n = _check_dim(dim)
    n = float(dim)

    # int_0^1 ds ln(s)^(k-1)/s Erf(sqrt(N s/2))^N  with s = e^{-u}:  int_0^inf (-u)^(k-1) Erf(...)^N du
    def f(u):
        return (-u) ** (k - 1) * math.exp(float(_log_erf_power(np.array([math.sqrt(n * math.exp(-u) / 2)]), n)[0]))

    # the integrand switches from ~1 to ~0 around u0 = ln(N / (2 ln N)); split there
    u0 = max(math.log(n / max(2 * math.log(n), 1.0)), 0.5)
    pts = [0.0, u0 / 2, u0, u0 + 2.0, u0 + 6.0]
    total = 0.0
    err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-11, limit=200)
        total += val
        err += e
    tail, e = integrate.quad(f, pts[-1], np.inf, epsabs=1e-300, epsrel=1e-11, limit=200)
    total += tail
    err += e
    if not math.isfinite(total) or err > 1e-8 * max(abs(total), 1e-300):
        raise QuadratureError(f"D-infinity moment quadrature failed (value {total}, error {err})")
    return k * (-1) ** (k + 1) / ln_n**k * total


def goe_dinf_stats(dim: int) -> tuple[float, float]:
    m1 = goe_dinf_moment(dim, 1)
    m2 = goe_dinf_moment(dim, 2)
    return m1, m2 - m1**2


def goe_dinf_pdf(dinf, dim: int) -> np.ndarray:
    """Density of D̃∞ for GOE eigenvectors, with t = dim**(-dinf)."""
    ln_n = _check_dim(dim)
    n = float(dim)
    x = np.asarray(dinf, dtype=float)
    t = np.exp(-x * ln_n)
    log_p = (
        1.5 * ln_n - 0.5 * np.log(2 * np.pi * t) - t * n / 2
        + _log_erf_power(np.sqrt(t * n / 2), n - 1) + np.log(t) + math.log(ln_n)
    )
    return np.exp(log_p)


def goe_dinf_cdf(dinf, dim: int) -> np.ndarray:
    """P(D̃∞ <= x) = 1 - Erf(sqrt(N t / 2))**N, the integral of :func:`goe_dinf_pdf`."""
    ln_n = _check_dim(dim)
    n = float(dim)
    t = np.exp(-np.asarray(dinf, dtype=float) * ln_n)
    return -np.expm1(_log_erf_power(np.sqrt(t * n / 2), n))


@dataclass(frozen=True)
class GoeBaseline:
    dim: int
    mean_d1: float
    var_d1: float
    d2_tilde: float
    var_d2: float
    dinf_moments: dict = field(default_factory=dict)

    @classmethod
    def compute(cls, dim: int, dinf_orders=(1, 2)) -> "GoeBaseline":
        m1, v1 = goe_d1_stats(dim)
        d2, v2 = goe_d2_stats(dim)
        return cls(dim, m1, v1, d2, v2, {k: goe_dinf_moment(dim, k) for k in dinf_orders})

    def rows(self) -> list[tuple[int, str, float]]:
        out = [(self.dim, "mean_d1", self.mean_d1), (self.dim, "var_d1", self.var_d1),
               (self.dim, "d2_tilde", self.d2_tilde), (self.dim, "var_d2", self.var_d2)]
        out += [(self.dim, f"dinf_moment_{k}", v) for k, v in sorted(self.dinf_moments.items())]
        return out
