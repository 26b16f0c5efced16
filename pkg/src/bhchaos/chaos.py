"""Level-spacing ratios, generalized fractal dimensions and energy-resolved moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectra import Spectrum, eps_bin_index

R_GOE = 0.5307
R_POISSON = 2 * math.log(2) - 1  # 0.3863
MIN_LEVELS = 10
INNER_FRACTIONS = (40, 60, 80, 100)
NORM_TOL = 1e-8


class DegenerateSpectrumError(ValueError):
    def __init__(self, count: int):
        super().__init__(f"{count} exactly vanishing level spacing(s)")
        self.count = count


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class RatioResult:
    r: np.ndarray
    excluded: int  # ratios dropped because a neighbouring spacing vanished


def spacing_ratios(E, on_degenerate: str = "raise") -> np.ndarray:
    """r_n = min(s_{n+1}/s_n, s_n/s_{n+1}) for ascending levels ``E``.

    Exactly vanishing spacings raise :class:`DegenerateSpectrumError`; with
    ``on_degenerate="drop"`` the affected ratios are removed instead (use
    :func:`spacing_ratios_counted` to also get the count).
    """
    return spacing_ratios_counted(E, on_degenerate).r


def spacing_ratios_counted(E, on_degenerate: str = "drop") -> RatioResult:
    E = np.asarray(E, dtype=float)
    if E.size < 3:
        raise ValueError(f"need at least 3 levels, got {E.size}")
    s = np.diff(E)
    if np.any(s < 0):
        raise ValueError("levels must be sorted ascending")
    a, b = s[:-1], s[1:]
    bad = (a == 0) | (b == 0)
    if bad.any() and on_degenerate == "raise":
        raise DegenerateSpectrumError(int(np.count_nonzero(s == 0)))
    a, b = a[~bad], b[~bad]
    return RatioResult(np.minimum(a, b) / np.maximum(a, b), int(bad.sum()))


def _check_norm(p: np.ndarray) -> None:
    norms = p.sum(axis=0)
    if np.any(np.abs(norms - 1.0) > NORM_TOL):
        raise NormalizationError(f"eigenvector norm deviates from 1 by {np.abs(norms - 1).max():.3g}")


def gfd_columns(V: np.ndarray, q: float, dim: int | None = None) -> np.ndarray:
    """D̃_q of every column of ``V``; ``dim`` defaults to the number of rows."""
    V = np.asarray(V)
    if V.ndim == 1:
        V = V[:, None]
    n = V.shape[0] if dim is None else dim
    if n < 2:
        raise ValueError("dimension must be >= 2")
    p = np.abs(V) ** 2
    _check_norm(p)
    ln_n = math.log(n)
    if q == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
        return -plogp.sum(axis=0) / ln_n
    if math.isinf(q):
        return -np.log(p.max(axis=0)) / ln_n
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    return -np.log(np.sum(p**q, axis=0)) / ((q - 1) * ln_n)


def gfd(v, q: float, dim: int | None = None) -> float:
    return float(gfd_columns(np.asarray(v), q, dim)[0])


@dataclass(frozen=True)
class GfdRecord:
    state_index: int
    E: float
    eps: float
    d1: float
    d2: float
    dinf: float
    dq_extra: dict = field(default_factory=dict)


def gfd_records(s: Spectrum, idx=None, extra_q=()) -> list[GfdRecord]:
    idx = s.has_vectors if idx is None else np.atleast_1d(idx)
    V = s.vectors_for(idx)
    d1, d2, dinf = (gfd_columns(V, q) for q in (1, 2, math.inf))
    extra = {q: gfd_columns(V, q) for q in extra_q}
    eps = s.eps[idx]
    return [
        GfdRecord(int(i), float(s.eigenvalues[i]), float(eps[c]), float(d1[c]), float(d2[c]), float(dinf[c]),
                  {q: float(extra[q][c]) for q in extra_q})
        for c, i in enumerate(idx)
    ]


@dataclass(frozen=True)
class MomentStats:
    count: int
    mean: float
    var: float  # population variance
    skew: float | None
    stderr_mean: float
    stderr_var: float

    @property
    def std(self) -> float:
        return math.sqrt(self.var)


def moment_stats(samples) -> MomentStats:
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 1:
        raise ValueError("need at least one sample")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    m4 = float(np.mean(dev**4))
    skew = float(np.mean(dev**3) / m2**1.5) if n >= 3 and m2 > 0 else None
    # large-sample standard error of the population variance
    se_var = math.sqrt(max(m4 - m2**2, 0.0) / n)
    return MomentStats(n, mean, m2, skew, math.sqrt(m2 / n), se_var)


def inner_fraction_mask(eps: np.ndarray, p: float) -> np.ndarray:
    """Levels in the central ``p`` percent of the spectrum by level count."""
    n = eps.size
    drop = int(round(n * (1 - p / 100.0) / 2))
    mask = np.zeros(n, dtype=bool)
    mask[drop:n - drop] = True
    return mask


@dataclass(frozen=True)
class ScanRow:
    eta: float
    eps_bin_center: float
    quantifier: str
    value: float
    stderr: float
    count: int


@dataclass(frozen=True)
class ScanTable:
    rows: list[ScanRow]
    metadata: dict

    def get(self, eta: float, quantifier: str) -> list[ScanRow]:
        return [r for r in self.rows if r.eta == eta and r.quantifier == quantifier]


NAN = float("nan")


def _cell_rows(eta, centre, stats: dict[str, MomentStats | None], r: np.ndarray | None, n_levels: int):
    rows = []
    if r is not None:
        if n_levels >= MIN_LEVELS and r.size:
            ms = moment_stats(r)
            rows.append(ScanRow(eta, centre, "r_mean", ms.mean, ms.stderr_mean, ms.count))
        else:
            rows.append(ScanRow(eta, centre, "r_mean", NAN, NAN, int(r.size)))
    for name, ms in stats.items():
        if ms is None:
            for tag in ("mean", "var", "skew"):
                rows.append(ScanRow(eta, centre, f"{name}_{tag}", NAN, NAN, 0))
            continue
        skew = NAN if ms.skew is None else ms.skew
        rows.append(ScanRow(eta, centre, f"{name}_mean", ms.mean, ms.stderr_mean, ms.count))
        rows.append(ScanRow(eta, centre, f"{name}_var", ms.var, ms.stderr_var, ms.count))
        rows.append(ScanRow(eta, centre, f"{name}_skew", skew, NAN, ms.count))
    return rows


def energy_resolved_scan(
    spectra: dict[float, Spectrum],
    bins: int = 100,
    quantifiers=("r", "d1", "d2", "dinf"),
    min_levels: int = MIN_LEVELS,
) -> ScanTable:
    """Per (η, ε-bin) ⟨r⟩ and D̃_q moments, plus inner-p% ⟨r⟩ per η.

    A ratio r_n is assigned to the bin of its middle level E_n.  Cells with
    fewer than ``min_levels`` levels carry NaN values.
    """
    gfd_q = {"d1": 1, "d2": 2, "dinf": math.inf}
    wanted = [q for q in quantifiers if q in gfd_q]
    rows: list[ScanRow] = []
    excluded = {}
    degenerate = {}
    centres = (np.arange(bins) + 0.5) / bins
    for eta in sorted(spectra):
        s = spectra[eta]
        eps = s.eps
        rr = None
        if "r" in quantifiers:
            if not s.complete:
                raise ValueError("spacing ratios need the complete spectrum")
            res = spacing_ratios_counted(s.eigenvalues, "drop")
            excluded[eta] = res.excluded
            s_all = np.diff(s.eigenvalues)
            degenerate[eta] = int(np.count_nonzero(s_all == 0))
            valid = np.ones(eps.size - 2, dtype=bool)
            valid &= (s_all[:-1] != 0) & (s_all[1:] != 0)
            r_full = np.full(eps.size - 2, np.nan)
            r_full[valid] = res.r
            mid_bin = eps_bin_index(eps[1:-1], bins)
            for p in INNER_FRACTIONS:
                mask = inner_fraction_mask(eps, p)[1:-1] & valid
                ms = moment_stats(r_full[mask]) if mask.any() else None
                rows.append(ScanRow(eta, NAN, f"r_inner{p}",
                                    ms.mean if ms else NAN, ms.stderr_mean if ms else NAN, ms.count if ms else 0))
        level_bin = eps_bin_index(eps, bins)
        counts = np.bincount(level_bin, minlength=bins)
        gfds = {}
        if wanted:
            have = s.has_vectors
            V = s.vectors_for(have)
            vbin = level_bin[have]
            gfds = {name: gfd_columns(V, gfd_q[name]) for name in wanted}
        for b in range(bins):
            if counts[b] == 0:
                continue
            if "r" in quantifiers:
                sel = (mid_bin == b) & valid
                rr = r_full[sel]
            stats = {}
            for name in wanted:
                vals = gfds[name][vbin == b]
                stats[name] = moment_stats(vals) if vals.size >= min_levels else None
            rows.extend(_cell_rows(eta, float(centres[b]), stats, rr, int(counts[b])))
    meta = {"bins": bins, "min_levels": min_levels, "excluded_ratios": excluded, "zero_spacings": degenerate}
    return ScanTable(rows, meta)
