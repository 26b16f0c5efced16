"""Distribution-level comparisons between BHH, EGOE and GOE."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .spectra import Spectrum

DENSITY_FLOOR = 1e-12
MIN_BINS = 20
MIN_EDGEWORTH_SAMPLES = 50


@dataclass(frozen=True)
class HistogramDensity:
    edges: np.ndarray
    densities: np.ndarray
    n_samples: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def freedman_diaconis_bins(x: np.ndarray, lo: float, hi: float, min_bins: int = MIN_BINS) -> int:
    q75, q25 = np.percentile(x, [75, 25])
    iqr = q75 - q25
    if iqr <= 0 or x.size < 2:
        return min_bins
    width = 2 * iqr / x.size ** (1 / 3)
    return max(min_bins, int(math.ceil((hi - lo) / width)))


def histogram_density(samples, bins: int | None = None, range_: tuple[float, float] | None = None) -> HistogramDensity:
    """Normalized histogram; Freedman-Diaconis bin count (at least 20) over the sample range by default."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no samples")
    lo, hi = range_ if range_ is not None else (float(x.min()), float(x.max()))
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 1e-9
        lo, hi = lo - pad, hi + pad
    nb = bins if bins is not None else freedman_diaconis_bins(x, lo, hi)
    counts, edges = np.histogram(x, bins=nb, range=(lo, hi))
    dens = counts / (counts.sum() * np.diff(edges))
    return HistogramDensity(edges, dens, int(x.size))


def _hermite_terms(z: np.ndarray):
    he3 = z**3 - 3 * z
    he4 = z**4 - 6 * z**2 + 3
    he6 = z**6 - 15 * z**4 + 45 * z**2 - 15
    return he3, he4, he6


@dataclass(frozen=True)
class EdgeworthModel:
    """Second-order Edgeworth density, clipped at zero and renormalized."""

    mu: float
    sigma: float
    gamma1: float
    gamma2: float
    norm: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def _raw(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        he3, he4, he6 = _hermite_terms(z)
        poly = 1 + self.gamma1 / 6 * he3 + self.gamma2 / 24 * he4 + self.gamma1**2 / 72 * he6
        phi = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        return np.clip(phi * poly, 0.0, None) / self.sigma

    def pdf(self, x) -> np.ndarray:
        return self._raw(x) / self.norm

    __call__ = pdf

    def mode(self, lo: float | None = None, hi: float | None = None, points: int = 20001) -> float:
        lo = self.mu - 4 * self.sigma if lo is None else lo
        hi = self.mu + 4 * self.sigma if hi is None else hi
        x = np.linspace(lo, hi, points)
        return float(x[np.argmax(self.pdf(x))])


@dataclass(frozen=True)
class GaussianModel:
    mu: float
    sigma: float

    def pdf(self, x) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    __call__ = pdf


def _clipped_norm(m: EdgeworthModel) -> float:
    # the polynomial has degree 6, so the density vanishes well inside +-12 sigma
    val, _ = integrate.quad(m._raw, m.mu - 12 * m.sigma, m.mu + 12 * m.sigma, limit=400, points=[m.mu])
    return val


def edgeworth_fit(samples) -> EdgeworthModel:
    """Moment-matched Edgeworth model (sample skewness and excess kurtosis, no fitting)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_EDGEWORTH_SAMPLES:
        raise ValueError(f"Edgeworth fit needs at least {MIN_EDGEWORTH_SAMPLES} samples, got {x.size}")
    mu = float(x.mean())
    dev = x - mu
    m2 = float(np.mean(dev**2))
    g1 = float(np.mean(dev**3) / m2**1.5)
    g2 = float(np.mean(dev**4) / m2**2 - 3.0)
    model = EdgeworthModel(mu, math.sqrt(m2), g1, g2)
    return EdgeworthModel(mu, math.sqrt(m2), g1, g2, _clipped_norm(model))


def gaussian_fit(samples) -> GaussianModel:
    x = np.asarray(samples, dtype=float).ravel()
    return GaussianModel(float(x.mean()), float(x.std()))


def integrated_squared_error(h: HistogramDensity, model: Callable) -> float:
    return float(np.sum((h.densities - model(h.centers)) ** 2 * h.widths))


class ZeroVarianceError(ValueError):
    pass


def d_q_distance(ref_mean: float, bhh_mean: float, bhh_var: float) -> float:
    """Difference of means in units of the BHH standard deviation."""
    if not bhh_var > 0:
        raise ZeroVarianceError("BHH variance must be positive")
    return (ref_mean - bhh_mean) / math.sqrt(bhh_var)


def kl_divergence(p: HistogramDensity, q_density: Callable) -> float:
    """Riemann sum of P ln(P/Q) over the bins of ``p``, Q evaluated at bin centres."""
    P = np.maximum(p.densities, DENSITY_FLOOR)
    Q = np.maximum(np.asarray(q_density(p.centers), dtype=float), DENSITY_FLOOR)
    # empty bins contribute nothing in the limit P -> 0
    contrib = np.where(p.densities > 0, P * np.log(P / Q), 0.0)
    return float(np.sum(contrib * p.widths))


def histogram_as_density(h: HistogramDensity) -> Callable:
    """Piecewise-constant density of ``h``; zero outside its edges."""

    def f(x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(h.edges, x, side="right") - 1
        inside = (idx >= 0) & (idx < h.densities.size)
        out = np.zeros_like(x)
        out[inside] = h.densities[idx[inside]]
        return out

    return f


@dataclass(frozen=True)
class DistanceReport:
    q: float | str
    d_q: float
    kl: float
    pair: tuple[str, str]
    n_samples: int = 0
    dim: int = 0
    bins: int = 0

    @property
    def sqrt_kl(self) -> float:
        return math.sqrt(max(self.kl, 0.0))

    def as_dict(self) -> dict:
        q = "inf" if isinstance(self.q, float) and math.isinf(self.q) else self.q
        return {"pair": "-".join(self.pair), "q": q, "dim": self.dim, "d_q": self.d_q, "kl": self.kl,
                "n_samples": self.n_samples, "bins": self.bins}


def compare_to_model(bhh_samples, ref_mean: float, ref_density: Callable, q, pair, dim: int = 0,
                     histogram: HistogramDensity | None = None) -> DistanceReport:
    """d_q and KL(BHH histogram || reference density)."""
    x = np.asarray(bhh_samples, dtype=float)
    h = histogram if histogram is not None else histogram_density(x)
    return DistanceReport(q, d_q_distance(ref_mean, float(x.mean()), float(x.var())), kl_divergence(h, ref_density),
                          tuple(pair), int(x.size), dim, int(h.densities.size))


class MissingDosMaximumError(KeyError):
    pass


def eps_egoe_map(eps_bhh: float, eta: float, dos_max_curve, fold: bool = False) -> float:
    """Shift so that the BHH bulk centre ε*(η) maps to 0.5; optionally fold above 0.5."""
    if callable(dos_max_curve):
        star = dos_max_curve(eta)
    else:
        try:
            star = dos_max_curve[eta]
        except KeyError:
            raise MissingDosMaximumError(f"no DOS maximum tabulated for eta={eta}") from None
    if star is None:
        raise MissingDosMaximumError(f"no DOS maximum available for eta={eta}")
    val = min(max(eps_bhh - star + 0.5, 0.0), 1.0)
    return 1.0 - val if fold and val > 0.5 else val


def _cumulative(eps: np.ndarray):
    eps = np.sort(np.asarray(eps, dtype=float))
    frac = np.arange(eps.size) / (eps.size - 1)
    return eps, frac


def eps_egoe_percentile(eps_bhh: float, bhh_spectrum, egoe_spectrum) -> float:
    """Level with the same cumulative spectral fraction in the EGOE spectrum."""
    b = bhh_spectrum.eps if isinstance(bhh_spectrum, Spectrum) else np.asarray(bhh_spectrum)
    e = egoe_spectrum.eps if isinstance(egoe_spectrum, Spectrum) else np.asarray(egoe_spectrum)
    xb, fb = _cumulative(b)
    xe, fe = _cumulative(e)
    f = float(np.interp(eps_bhh, xb, fb))
    return float(np.interp(f, fe, xe))


def dos_maximum(eps, lo: float = 0.0, hi: float = 1.0) -> float:
    """Bulk centre of a scaled spectrum: mode of its moment-matched Edgeworth density."""
    return edgeworth_fit(eps).mode(lo, hi)
