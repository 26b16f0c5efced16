"""Reusable experiment building blocks shared by the CLI, scripts and tests."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bhh import BhhParams, build_H
from .chaos import MomentStats, gfd_columns, moment_stats
from .egoe import EgoeParams, sample_egoe
from .fock import SectorBasis, SectorSpec, build_sector_basis
from .spectra import Spectrum, eigenpairs_near, full_diagonalize, window_of

QS = {"d1": 1.0, "d2": 2.0, "dinf": math.inf}


@dataclass(frozen=True, eq=False)
class GfdSample:
    """Fractal dimensions of a set of eigenstates."""

    eps: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    dinf: np.ndarray

    @classmethod
    def from_vectors(cls, eps: np.ndarray, V: np.ndarray) -> "GfdSample":
        return cls(np.asarray(eps), *(gfd_columns(V, q) for q in QS.values()))

    @classmethod
    def concat(cls, parts) -> "GfdSample":
        parts = list(parts)
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("eps", "d1", "d2", "dinf")))

    def values(self, q: str) -> np.ndarray:
        return getattr(self, q)

    def stats(self, q: str) -> MomentStats:
        return moment_stats(self.values(q))

    @property
    def size(self) -> int:
        return int(self.eps.size)


def windows(s: Spectrum, targets, k: int) -> dict[float, GfdSample]:
    out = {}
    for t in targets:
        idx = window_of(s, t, k)
        out[float(t)] = GfdSample.from_vectors(s.eps[idx], s.vectors_for(idx))
    return out


def bhh_windows(p: BhhParams, b: SectorBasis, targets, k: int = 100, method: str = "auto") -> dict[float, GfdSample]:
    """GFDs of the k BHH eigenstates nearest each scaled-energy target."""
    s = eigenpairs_near(build_H(p, b), list(targets), k, method)
    return windows(s, targets, k)


def bhh_eta_scan(spec: SectorSpec, etas, eps_target: float, k: int = 100, method: str = "auto",
                 threads: int = 1) -> list[GfdSample]:
    b = build_sector_basis(spec)

    def one(eta):
        p = BhhParams.from_eta(eta, spec.N, spec.L, spec.bc, spec.basis)
        return bhh_windows(p, b, [eps_target], k, method)[float(eps_target)]

    return _ordered_map(one, list(etas), threads)


def bhh_spectrum(spec: SectorSpec, eta: float, want_vectors: bool = True, b: SectorBasis | None = None) -> Spectrum:
    b = build_sector_basis(spec) if b is None else b
    return full_diagonalize(build_H(BhhParams.from_eta(eta, spec.N, spec.L, spec.bc, spec.basis), b), want_vectors)


@dataclass(frozen=True, eq=False)
class EgoeRealization:
    index: int
    E_min: float
    E_max: float
    windows: dict[float, GfdSample]
    eps_all: np.ndarray | None = None  # complete scaled spectrum when it was computed


def egoe_windows(p: EgoeParams, b: SectorBasis, targets, k: int = 100, realizations: int = 100,
                 method: str = "auto", threads: int = 1, start: int = 0) -> list[EgoeRealization]:
    """Per-realization GFDs of the k eigenstates nearest each target, ordered by realization index."""
    targets = [float(t) for t in targets]

    def one(r):
        s = eigenpairs_near(sample_egoe(p, b, r), targets, k, method)
        return EgoeRealization(r, s.E_min, s.E_max, windows(s, targets, k), s.eps if s.complete else None)

    return _ordered_map(one, range(start, start + realizations), threads)


@dataclass(frozen=True)
class EnsembleStats:
    """Ensemble average of per-realization moments; errors from the realization scatter."""

    mean: float
    stderr_mean: float
    var: float
    stderr_var: float
    realizations: int
    states: int


def ensemble_stats(samples: list[GfdSample], q: str) -> EnsembleStats:
    per = [moment_stats(s.values(q)) for s in samples]
    means = np.array([m.mean for m in per])
    vars_ = np.array([m.var for m in per])
    n = len(per)
    if n > 1:
        se_m = float(means.std(ddof=1) / math.sqrt(n))
        se_v = float(vars_.std(ddof=1) / math.sqrt(n))
    else:
        se_m, se_v = per[0].stderr_mean, per[0].stderr_var
    return EnsembleStats(float(means.mean()), se_m, float(vars_.mean()), se_v, n, int(sum(m.count for m in per)))


def _ordered_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def steepest_rise(etas, means) -> int:
    """Grid index of the largest central-difference slope of ``means`` against ln(eta)."""
    g = np.gradient(np.asarray(means, dtype=float), np.log(np.asarray(etas, dtype=float)))
    return int(np.argmax(g))
