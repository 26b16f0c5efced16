"""Bosonic two-body embedded GOE and plain GOE samplers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import BC, Basis, SectorBasis
from .matrix import SymmetricMatrix
from .operators import one_body_structure, pair_list, two_body_structure


@dataclass(frozen=True)
class EgoeParams:
    N: int
    L: int
    lam: float = 1.0
    reflection_symmetric: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"two-body strength must be >= 0, got {self.lam}")


@dataclass(frozen=True, eq=False)
class GoeSample:
    dim: int
    matrix: np.ndarray
    seed: int


def realization_rng(seed: int, realization: int = 0) -> np.random.Generator:
    """Independent Philox stream per (seed, realization)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, realization])))


def _goe(rng: np.random.Generator, dim: int) -> np.ndarray:
    # off-diagonal variance 1, diagonal variance 2
    a = rng.standard_normal((dim, dim))
    return (a + a.T) / np.sqrt(2.0)


def sample_goe(dim: int, seed: int, realization: int = 0) -> GoeSample:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return GoeSample(dim, _goe(realization_rng(seed, realization), dim), seed)


def _mirror(a: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Impose a[i, j] == a[perm i, perm j] by copying each orbit representative's draw."""
    n = a.shape[0]
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    pi, pj = perm[i], perm[j]
    cands = np.stack([i * n + j, j * n + i, pi * n + pj, pj * n + pi])
    rep = cands.min(axis=0)
    return a.ravel()[rep]


def reflection_perms(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps of i -> L+1-i on single modes and on ordered pairs."""
    single = np.arange(L)[::-1].copy()
    pairs = pair_list(L)
    lookup = {tuple(p): n for n, p in enumerate(pairs.tolist())}
    pair = np.array([lookup[tuple(sorted((single[i], single[j])))] for i, j in pairs])
    return single, pair


def egoe_couplings(p: EgoeParams, realization: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """One-body matrix G1 (L x L) and two-body matrix G2 over ordered pairs."""
    rng = realization_rng(p.seed, realization)
    g1 = _goe(rng, p.L)
    g2 = _goe(rng, p.L * (p.L + 1) // 2)
    if p.reflection_symmetric:
        single, pair = reflection_perms(p.L)
        g1 = _mirror(g1, single)
        g2 = _mirror(g2, pair)
    return g1, g2


def two_body_weights(g2: np.ndarray, L: int) -> np.ndarray:
    pairs = pair_list(L)
    w = 1.0 / np.sqrt(1.0 + (pairs[:, 0] == pairs[:, 1]))
    return g2 * np.outer(w, w)


def sample_egoe(p: EgoeParams, b: SectorBasis, realization: int = 0) -> SymmetricMatrix:
    """H = H1 + lam * H2 represented in ``b``."""
    spec = b.spec
    if (spec.N, spec.L) != (p.N, p.L):
        raise ValueError(f"basis {spec.label()} does not match N={p.N}, L={p.L}")
    if spec.basis is not Basis.INTERACTION:
        raise ValueError("the embedded ensemble is defined on the site-mode Fock basis")
    if not spec.is_full:
        if spec.bc is not BC.HWBC:
            raise ValueError("the embedded ensemble has no translation symmetry; use a parity sector")
        if not p.reflection_symmetric:
            raise ValueError("parity sectors need reflection-symmetric couplings")
    g1, g2 = egoe_couplings(p, realization)
    one = one_body_structure(b)
    two = two_body_structure(b)
    return SymmetricMatrix.from_entries(
        b.dim,
        np.concatenate([one.rows, two.rows]),
        np.concatenate([one.cols, two.cols]),
        np.concatenate([one.values(g1), two.values(p.lam * two_body_weights(g2, p.L))]),
    )
