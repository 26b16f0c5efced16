"""Bose-Hubbard Hamiltonian in the interaction (site) and tunneling (mode) bases."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import BC, Basis, SectorBasis
from .matrix import SymmetricMatrix
from .operators import one_body_structure, pair_list, two_body_structure


class SectorMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class BhhParams:
    J: float
    U: float
    N: int
    L: int
    bc: BC = BC.HWBC
    basis: Basis = Basis.INTERACTION

    def __post_init__(self):
        object.__setattr__(self, "bc", BC(self.bc))
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.J < 0:
            raise ValueError(f"tunneling strength must be >= 0, got J={self.J}")
        if self.U < 0:
            raise ValueError(f"interaction strength must be >= 0, got U={self.U}")

    @property
    def eta(self) -> float:
        """Scaled tunneling strength J / (U N)."""
        return self.J / (self.U * self.N)

    @classmethod
    def from_eta(cls, eta: float, N: int, L: int, bc=BC.HWBC, basis=Basis.INTERACTION, U: float = 1.0):
        return cls(J=eta * U * N, U=U, N=N, L=L, bc=bc, basis=basis)


def _check(p: BhhParams, b: SectorBasis, basis: Basis) -> None:
    if p.basis is not basis:
        raise SectorMismatchError(f"parameters request the {p.basis.value} basis, not {basis.value}")
    s = b.spec
    if (s.N, s.L, s.bc, s.basis) != (p.N, p.L, p.bc, p.basis):
        raise SectorMismatchError(f"sector {s.label()} does not match N={p.N}, L={p.L}, {p.bc.value}, {p.basis.value}")


def hopping_matrix(L: int, bc: BC) -> np.ndarray:
    """Adjacency of the chain: sum over bonds of (e_j e_{j+1}^T + h.c.)."""
    h = np.zeros((L, L))
    bonds = L - 1 if BC(bc) is BC.HWBC else L
    for j in range(bonds):
        h[j, (j + 1) % L] += 1.0
        h[(j + 1) % L, j] += 1.0
    return h


def build_interaction_H(p: BhhParams, b: SectorBasis) -> SymmetricMatrix:
    """H = -J sum_j (a_j^+ a_{j+1} + h.c.) + U/2 sum_j n_j (n_j - 1) in the site basis."""
    _check(p, b, Basis.INTERACTION)
    kinetic = one_body_structure(b)
    occ = b.reps.astype(float)
    diag = 0.5 * p.U * np.sum(occ * (occ - 1.0), axis=1)
    idx = np.arange(b.dim)
    return SymmetricMatrix.from_entries(
        b.dim,
        np.concatenate([kinetic.rows, idx]),
        np.concatenate([kinetic.cols, idx]),
        np.concatenate([kinetic.values(-p.J * hopping_matrix(p.L, p.bc)), diag]),
    )


def mode_phase(L: int, bc: BC) -> np.ndarray:
    """phi(k) for k = 1..L."""
    k = np.arange(1, L + 1)
    if BC(bc) is BC.PBC:
        return 2 * np.pi * k / L
    return np.pi * k / (L + 1)


def delta_tensor(k: int, l: int, m: int, n: int, L: int, bc: BC) -> float:
    """Two-body coefficient of b_k^+ b_l^+ b_m b_n in H_int / U (indices 1..L)."""
    for idx in (k, l, m, n):
        if not 1 <= idx <= L:
            raise IndexError(f"mode index {idx} outside [1, {L}]")
    if BC(bc) is BC.PBC:
        return 1.0 / (2 * L) if (k + l - m - n) % L == 0 else 0.0
    mod = 2 * (L + 1)
    total = 0
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                if (k + s1 * l - s2 * m - s3 * n) % mod == 0:
                    total += s1 * s2 * s3
    return total / (4 * (L + 1))


@lru_cache(maxsize=32)
def delta_array(L: int, bc: BC) -> np.ndarray:
    """Delta[k-1, l-1, m-1, n-1] for all mode indices."""
    k = np.arange(1, L + 1)
    K, Lq, M, Nn = np.meshgrid(k, k, k, k, indexing="ij")
    if BC(bc) is BC.PBC:
        return np.where((K + Lq - M - Nn) % L == 0, 1.0 / (2 * L), 0.0)
    mod = 2 * (L + 1)
    out = np.zeros((L,) * 4)
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                out += s1 * s2 * s3 * ((K + s1 * Lq - s2 * M - s3 * Nn) % mod == 0)
    return out / (4 * (L + 1))


def pair_weights(V: np.ndarray) -> np.ndarray:
    """Fold sum_{klmn} V[k,l,m,n] b_k^+ b_l^+ b_m b_n onto ordered pairs (k<=l), (m<=n)."""
    L = V.shape[0]
    pairs = pair_list(L)
    W = np.zeros((len(pairs), len(pairs)))
    for a, (k, l) in enumerate(pairs):
        lefts = {(k, l), (l, k)}
        for c, (m, n) in enumerate(pairs):
            rights = {(m, n), (n, m)}
            W[a, c] = sum(V[x, y, u, v] for x, y in lefts for u, v in rights)
    return W


def build_tunneling_H(p: BhhParams, b: SectorBasis) -> SymmetricMatrix:
    """H = -2J sum_k cos(phi_k) n_k + U sum Delta b^+ b^+ b b in the tunneling basis."""
    _check(p, b, Basis.TUNNELING)
    occ = b.reps.astype(float)
    idx = np.arange(b.dim)
    kinetic = -2.0 * p.J * occ @ np.cos(mode_phase(p.L, p.bc))
    inter = two_body_structure(b)
    W = p.U * pair_weights(delta_array(p.L, p.bc))
    return SymmetricMatrix.from_entries(
        b.dim,
        np.concatenate([inter.rows, idx]),
        np.concatenate([inter.cols, idx]),
        np.concatenate([inter.values(W), kinetic]),
    )


def build_H(p: BhhParams, b: SectorBasis) -> SymmetricMatrix:
    if p.basis is Basis.INTERACTION:
        return build_interaction_H(p, b)
    return build_tunneling_H(p, b)
