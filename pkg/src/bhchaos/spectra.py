"""Diagonalization, scaled energies, density of states and target-energy selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.linalg.lapack import dsytrd, dsytrd_lwork
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .fock import CapacityError
from .matrix import SymmetricMatrix

DENSE_CAP = 16_384
# above this dimension a full dense eigendecomposition is replaced by a partial one
FULL_EIGH_MAX = 2_500
# sparse shift-invert is used above this dimension when the fill fraction is below SPARSE_FILL
SHIFT_INVERT_MIN = 8_000
SPARSE_FILL = 0.005


class SpectrumError(RuntimeError):
    """Numerical failure: non-convergence or an ill-defined spectrum."""


class DimensionCapError(CapacityError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in ascending order with optional eigenvector columns.

    ``vector_index[c]`` is the position in ``eigenvalues`` of column ``c``
    of ``eigenvectors``.  ``complete`` is False when only a window of the
    spectrum was computed; ``E_min``/``E_max`` are always the true extremes.
    """

    eigenvalues: np.ndarray
    E_min: float
    E_max: float
    eigenvectors: np.ndarray | None = None
    vector_index: np.ndarray | None = None
    complete: bool = True
    dim: int = 0

    @property
    def eps(self) -> np.ndarray:
        return scaled_energies(self.eigenvalues, self.E_min, self.E_max)

    def vectors_for(self, idx) -> np.ndarray:
        """Eigenvector columns for positions ``idx`` in ``eigenvalues``."""
        if self.eigenvectors is None:
            raise ValueError("spectrum has no eigenvectors")
        idx = np.atleast_1d(np.asarray(idx))
        if self.vector_index is None:
            return self.eigenvectors[:, idx]
        where = np.searchsorted(self.vector_index, idx)
        if np.any(where >= self.vector_index.size) or np.any(self.vector_index[np.minimum(where, self.vector_index.size - 1)] != idx):
            raise KeyError("requested eigenvectors were not computed")
        return self.eigenvectors[:, where]

    @property
    def has_vectors(self) -> np.ndarray:
        """Positions in ``eigenvalues`` with an available eigenvector."""
        if self.eigenvectors is None:
            return np.zeros(0, dtype=np.int64)
        if self.vector_index is None:
            return np.arange(self.eigenvalues.size)
        return self.vector_index


def scaled_energies(E, E_min: float, E_max: float) -> np.ndarray:
    if not E_max > E_min:
        raise SpectrumError(f"degenerate energy range [{E_min}, {E_max}]; scaled energy undefined")
    return (np.asarray(E, dtype=float) - E_min) / (E_max - E_min)


def _dense(m) -> np.ndarray:
    return m.to_dense() if isinstance(m, SymmetricMatrix) else np.asarray(m, dtype=float)


def _dim(m) -> int:
    return m.dim if isinstance(m, SymmetricMatrix) else np.asarray(m).shape[0]


def full_diagonalize(m, want_vectors: bool = True, cap: int = DENSE_CAP) -> Spectrum:
    """All eigenpairs of the dense view (LAPACK divide and conquer)."""
    n = _dim(m)
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds the dense cap {cap}")
    if n == 0:
        raise SpectrumError("empty matrix")
    a = _dense(m)
    try:
        if want_vectors:
            w, v = np.linalg.eigh(a)
        else:
            w, v = np.linalg.eigvalsh(a), None
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver did not converge: {exc}") from exc
    return Spectrum(w, float(w[0]), float(w[-1]), v, None, True, n)


def residuals(m, s: Spectrum, idx) -> np.ndarray:
    """‖A v − E v‖ for the eigenpairs at positions ``idx``."""
    idx = np.atleast_1d(np.asarray(idx))
    v = s.vectors_for(idx)
    A = m.to_sparse() if isinstance(m, SymmetricMatrix) else np.asarray(m)
    return np.linalg.norm(A @ v - v * s.eigenvalues[idx], axis=0)


def select_near_target(eps: np.ndarray, eps_target: float, k: int) -> np.ndarray:
    """Indices of the ``k`` values of ``eps`` closest to the target, ties toward lower energy.

    The result is sorted ascending.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    eps = np.asarray(eps, dtype=float)
    order = np.lexsort((np.arange(eps.size), np.abs(eps - eps_target)))
    return np.sort(order[:k])


def _window(w: np.ndarray, target: float, k: int) -> tuple[int, int]:
    """Contiguous index range [lo, hi) containing the k levels nearest ``target``."""
    idx = select_near_target(w, target, min(k, w.size))
    return int(idx[0]), int(idx[-1]) + 1


def _apply_householder(c: np.ndarray, tau: np.ndarray, Z: np.ndarray, block: int = 64) -> np.ndarray:
    """Z <- Q Z for Q = H(0) ... H(n-2) as returned by dsytrd with lower storage."""
    n = c.shape[0]
    nref = n - 1
    for start in reversed(range(0, nref, block)):
        stop = min(start + block, nref)
        r0 = start + 1
        nb = stop - start
        V = np.zeros((n - r0, nb))
        for j, i in enumerate(range(start, stop)):
            V[i + 1 - r0, j] = 1.0
            V[i + 2 - r0:, j] = c[i + 2:, i]
        T = np.zeros((nb, nb))
        for j, i in enumerate(range(start, stop)):
            T[j, j] = tau[i]
            if j:
                T[:j, j] = -tau[i] * (T[:j, :j] @ (V[:, :j].T @ V[:, j]))
        Z[r0:] -= V @ (T @ (V.T @ Z[r0:]))
    return Z


def _tridiagonal_window(m, targets, k: int) -> Spectrum:
    """One Householder reduction: all eigenvalues plus the k eigenvectors nearest each target."""
    a = _dense(m)
    n = a.shape[0]
    if n == 1:
        return Spectrum(a[0].copy(), float(a[0, 0]), float(a[0, 0]), np.ones((1, 1)), np.arange(1), True, 1)
    lwork, info = dsytrd_lwork(n, lower=1)
    c, d, e, tau, info = dsytrd(a, lower=1, lwork=int(lwork), overwrite_a=1)
    if info != 0:
        raise SpectrumError(f"tridiagonal reduction failed (info={info})")
    try:
        w = sla.eigh_tridiagonal(d, e, eigvals_only=True)
        E_min, E_max = float(w[0]), float(w[-1])
        ranges = sorted(_window(w, E_min + t * (E_max - E_min), k) for t in targets)
        merged = [list(ranges[0])]
        for lo, hi in ranges[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        blocks = [sla.eigh_tridiagonal(d, e, select="i", select_range=(lo, hi - 1))[1] for lo, hi in merged]
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise SpectrumError(f"tridiagonal eigensolver failed: {exc}") from exc
    z = np.ascontiguousarray(np.hstack(blocks))
    v = _apply_householder(c, tau, z)
    index = np.concatenate([np.arange(lo, hi) for lo, hi in merged])
    return Spectrum(w, E_min, E_max, v, index, True, n)


def spectral_extremes(m, tol: float = 1e-12) -> tuple[float, float]:
    A = m.to_sparse() if isinstance(m, SymmetricMatrix) else sparse.csr_matrix(m)
    if A.shape[0] <= 2:
        w = np.linalg.eigvalsh(A.toarray())
        return float(w[0]), float(w[-1])
    try:
        lo = eigsh(A, k=1, which="SA", return_eigenvectors=False, tol=tol)[0]
        hi = eigsh(A, k=1, which="LA", return_eigenvectors=False, tol=tol)[0]
    except ArpackNoConvergence as exc:
        raise SpectrumError(f"Lanczos did not converge for the spectral extremes: {exc}") from exc
    return float(lo), float(hi)


def _shift_invert_window(m: SymmetricMatrix, targets, k: int, extra: int = 8) -> Spectrum:
    E_min, E_max = spectral_extremes(m)
    A = m.to_sparse().tocsc()
    n = m.dim
    kk = min(k + extra, n - 1)
    ws, vs = [], []
    for t in targets:
        sigma = E_min + t * (E_max - E_min)
        try:
            w, v = eigsh(A, k=kk, sigma=sigma, which="LM", tol=1e-12)
        except (ArpackNoConvergence, RuntimeError) as exc:
            raise SpectrumError(f"shift-invert Lanczos failed: {exc}") from exc
        keep = select_near_target(w, sigma, min(k, w.size))
        ws.append(w[keep])
        vs.append(v[:, keep])
    w = np.concatenate(ws)
    v = np.hstack(vs)
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    # overlapping windows return the same eigenpair twice, with eigenvalues equal to rounding
    tol = 1e-9 * (E_max - E_min)
    keep = np.ones(w.size, dtype=bool)
    for i in range(1, w.size):
        j = i - 1
        while j >= 0 and not keep[j]:
            j -= 1
        if j >= 0 and w[i] - w[j] <= tol and abs(v[:, i] @ v[:, j]) > 0.5:
            keep[i] = False
    return Spectrum(w[keep], E_min, E_max, v[:, keep], np.arange(int(keep.sum())), False, n)


def eigenpairs_near(m, eps_target, k: int, method: str = "auto", cap: int = DENSE_CAP) -> Spectrum:
    """Eigenpairs for the ``k`` levels closest to scaled energy ``eps_target`` (a number or a sequence).

    ``method`` is ``"full"`` (every eigenvector), ``"dense"`` (one Householder
    reduction and ``k`` back-transformed vectors), ``"shift-invert"`` (sparse
    LU and Lanczos, returns only the window) or ``"auto"``.
    """
    n = _dim(m)
    targets = [float(t) for t in np.atleast_1d(eps_target)]
    if not all(0.0 <= t <= 1.0 for t in targets):
        raise ValueError(f"targets must lie in [0, 1], got {targets}")
    if method == "auto":
        fill = m.nnz / float(n) ** 2 if isinstance(m, SymmetricMatrix) and n else 1.0
        if n <= FULL_EIGH_MAX:
            method = "full"
        elif n >= SHIFT_INVERT_MIN and fill < SPARSE_FILL:
            method = "shift-invert"
        else:
            method = "dense"
    if method == "shift-invert":
        if not isinstance(m, SymmetricMatrix):
            m = SymmetricMatrix.from_dense(m)
        return _shift_invert_window(m, targets, k)
    if n > cap:
        raise DimensionCapError(f"dimension {n} exceeds the dense cap {cap}")
    if method == "full":
        return full_diagonalize(m, want_vectors=True, cap=cap)
    if method == "dense":
        return _tridiagonal_window(m, targets, k)
    raise ValueError(f"unknown method {method!r}")


def window_of(s: Spectrum, eps_target: float, k: int) -> np.ndarray:
    """Positions of the k levels with eigenvectors that lie nearest ``eps_target``."""
    avail = s.has_vectors
    return avail[select_near_target(s.eps[avail], eps_target, min(k, avail.size))]


def states_near(m, eps_target: float, k: int, method: str = "auto") -> tuple[np.ndarray, np.ndarray, Spectrum]:
    """(eps, eigenvectors) of the k states nearest ``eps_target`` plus the underlying spectrum."""
    s = eigenpairs_near(m, eps_target, k, method)
    pick = window_of(s, eps_target, k)
    return s.eps[pick], s.vectors_for(pick), s


@dataclass(frozen=True)
class DosHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    eps_star: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def eps_bin_index(eps, bins: int = 100) -> np.ndarray:
    """Bin of each scaled energy on a uniform [0, 1] grid; right-open except the last bin."""
    idx = np.floor(np.asarray(eps, dtype=float) * bins).astype(np.int64)
    return np.clip(idx, 0, bins - 1)


def dos_histogram(s: Spectrum | np.ndarray, bins: int = 100) -> DosHistogram:
    """Level counts on ``bins`` uniform ε bins; ``eps_star`` is the centre of the fullest bin."""
    if isinstance(s, Spectrum):
        if not s.complete:
            raise ValueError("density of states needs the complete spectrum")
        eps = s.eps
    else:
        eps = np.asarray(s, dtype=float)
    if eps.size < 2:
        raise ValueError("need at least two levels")
    counts = np.bincount(eps_bin_index(eps, bins), minlength=bins)
    edges = np.linspace(0.0, 1.0, bins + 1)
    star = int(np.argmax(counts))  # first maximum, i.e. the lower one on ties
    return DosHistogram(edges, counts, float(0.5 * (edges[star] + edges[star + 1])))
