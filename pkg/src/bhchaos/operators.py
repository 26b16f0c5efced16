"""One- and two-body bosonic operators represented in a sector basis.

An operator ``sum_{ab} w[a, b] X_ab`` (``X_ab`` a fixed product of ladder
operators) is linear in the weights ``w``.  The connectivity of every
``X_ab`` in a given basis is computed once as an :class:`OperatorStructure`;
assembling a matrix for new weights (e.g. a new random realization) is then
a gather plus a segmented sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import SectorBasis, rank_states
from .matrix import SymmetricMatrix


def pair_list(L: int) -> np.ndarray:
    """Ordered mode pairs (i, j), i <= j, in row-major order."""
    return np.array([(i, j) for i in range(L) for j in range(i, L)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class OperatorStructure:
    dim: int
    rows: np.ndarray  # unique (row, col) keys, sorted
    cols: np.ndarray
    starts: np.ndarray  # segment starts into the contribution arrays
    a_idx: np.ndarray  # weight-matrix row index of each contribution
    b_idx: np.ndarray
    coef: np.ndarray

    def values(self, weights: np.ndarray) -> np.ndarray:
        if self.coef.size == 0:
            return np.zeros(0)
        contrib = np.asarray(weights, dtype=float)[self.a_idx, self.b_idx] * self.coef
        return np.add.reduceat(contrib, self.starts)

    def assemble(self, weights: np.ndarray) -> SymmetricMatrix:
        return SymmetricMatrix.from_entries(self.dim, self.rows, self.cols, self.values(weights))


def _finish(basis: SectorBasis, rows, cols, a_idx, b_idx, coef) -> OperatorStructure:
    keep = rows >= 0
    rows, cols, a_idx, b_idx, coef = rows[keep], cols[keep], a_idx[keep], b_idx[keep], coef[keep]
    key = rows * max(basis.dim, 1) + cols
    order = np.argsort(key, kind="stable")
    key, a_idx, b_idx, coef = key[order], a_idx[order], b_idx[order], coef[order]
    if key.size:
        starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    else:
        starts = np.zeros(0, dtype=np.int64)
    ukey = key[starts]
    return OperatorStructure(
        basis.dim, ukey // max(basis.dim, 1), ukey % max(basis.dim, 1), starts,
        a_idx.astype(np.int32), b_idx.astype(np.int32), coef,
    )


def _targets(basis: SectorBasis, mids: np.ndarray, created: list[np.ndarray]):
    """Lookup of ``mids + c`` for each creation pattern c: (rows, amplitude*coefficient)."""
    rows = np.empty((mids.shape[0], len(created)), dtype=np.int64)
    amps = np.zeros((mids.shape[0], len(created)))
    for p, c in enumerate(created):
        t = mids + c
        amp = np.ones(mids.shape[0])
        occ = mids.astype(np.int64)
        for mode in np.flatnonzero(c):
            for _ in range(c[mode]):
                occ[:, mode] += 1
                amp *= np.sqrt(occ[:, mode])
        r, sign = basis.lookup(t)
        rows[:, p] = r
        amps[:, p] = amp * sign
    return rows, amps


def _structure(basis: SectorBasis, removed: list[np.ndarray], created: list[np.ndarray], k: int):
    """Generic k-body structure: annihilate pattern b, create pattern a."""
    if not removed or basis.dim == 0:
        empty = np.zeros(0, dtype=np.int64)
        return _finish(basis, empty, empty, empty, empty, np.zeros(0))
    S = basis.reps.astype(np.int64)
    src, b_list, alpha, mids = [], [], [], []
    for b, r in enumerate(removed):
        occ = S.copy()
        amp = np.ones(S.shape[0])
        for mode in np.flatnonzero(r):
            for _ in range(r[mode]):
                amp *= np.sqrt(np.clip(occ[:, mode], 0, None))
                occ[:, mode] -= 1
        ok = amp > 0
        src.append(np.flatnonzero(ok))
        b_list.append(np.full(ok.sum(), b))
        alpha.append(amp[ok])
        mids.append(occ[ok])
    src = np.concatenate(src)
    b_all = np.concatenate(b_list)
    alpha = np.concatenate(alpha)
    mids = np.concatenate(mids).astype(basis.reps.dtype)
    if src.size == 0:
        return _structure(basis, [], created, k)
    mid_rank = rank_states(mids, basis.N - k)
    uniq, first, inv = np.unique(mid_rank, return_index=True, return_inverse=True)
    rows_tab, amp_tab = _targets(basis, mids[first], created)
    n_a = len(created)
    rows = rows_tab[inv].ravel()
    coef = (alpha[:, None] * amp_tab[inv]).ravel()
    cols = np.repeat(src, n_a)
    a_idx = np.tile(np.arange(n_a), src.size)
    b_idx = np.repeat(b_all, n_a)
    valid = rows >= 0
    coef[valid] *= basis.norms[cols[valid]] / basis.norms[rows[valid]]
    return _finish(basis, rows, cols, a_idx, b_idx, coef)


@lru_cache(maxsize=8)
def one_body_structure(basis: SectorBasis) -> OperatorStructure:
    """Structure of ``sum_ij h[i, j] a_i^+ a_j``; weights are an L x L matrix."""
    L = basis.L
    unit = [np.eye(L, dtype=np.int64)[i] for i in range(L)]
    return _structure(basis, unit if basis.N >= 1 else [], unit, 1)


@lru_cache(maxsize=4)
def two_body_structure(basis: SectorBasis) -> OperatorStructure:
    """Structure of ``sum_{P,Q} w[P, Q] a_i^+ a_j^+ a_k a_l`` over pairs P=(i<=j), Q=(k<=l)."""
    L = basis.L
    pats = []
    for i, j in pair_list(L):
        v = np.zeros(L, dtype=np.int64)
        v[i] += 1
        v[j] += 1
        pats.append(v)
    return _structure(basis, pats if basis.N >= 2 else [], pats, 2)
