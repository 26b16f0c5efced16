"""Bosonic Fock bases and symmetry-adapted sector bases.

States of ``N`` bosons on ``L`` modes are stored as rows of an integer
array.  The full basis is ordered reverse-lexicographically, i.e.
``(N, 0, ..., 0)`` has index 0 and ``(0, ..., 0, N)`` is last, which admits
an O(L) ranking formula and makes ``np.arange`` the rank of the enumeration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numba
import numpy as np

DEFAULT_MAX_DIM = 20_000_000


class CapacityError(ValueError):
    """Requested Hilbert space exceeds the configured maximum dimension."""


class InvalidStateError(ValueError):
    pass


class UnsupportedSectorError(ValueError):
    pass


class BC(str, enum.Enum):
    HWBC = "hwbc"
    PBC = "pbc"


class Basis(str, enum.Enum):
    """Which single-particle modes the Fock states refer to."""

    INTERACTION = "interaction"
    TUNNELING = "tunneling"


def basis_dimension(N: int, L: int) -> int:
    return math.comb(N + L - 1, N)


@lru_cache(maxsize=64)
def _binomial_table(size: int) -> np.ndarray:
    table = np.zeros((size + 1, size + 1), dtype=np.int64)
    for a in range(size + 1):
        for b in range(a + 1):
            table[a, b] = math.comb(a, b)
    return table


def _state_dtype(N: int):
    return np.int8 if N < 128 else np.int32


def enumerate_basis(N: int, L: int, max_dim: Optional[int] = None) -> np.ndarray:
    """All occupation vectors with ``sum == N`` and ``len == L``, as a (D, L) array."""
    if N < 0 or L < 1:
        raise ValueError(f"need N >= 0 and L >= 1, got N={N}, L={L}")
    dim = basis_dimension(N, L)
    cap = DEFAULT_MAX_DIM if max_dim is None else max_dim
    if dim > cap:
        raise CapacityError(f"dimension C({N + L - 1},{N}) = {dim} exceeds cap {cap}")
    dtype = _state_dtype(N)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def comps(n: int, m: int) -> np.ndarray:
        if (n, m) in cache:
            return cache[(n, m)]
        if m == 1:
            out = np.array([[n]], dtype=dtype)
        else:
            blocks = []
            for v in range(n, -1, -1):
                tail = comps(n - v, m - 1)
                head = np.full((tail.shape[0], 1), v, dtype=dtype)
                blocks.append(np.hstack([head, tail]))
            out = np.vstack(blocks)
        cache[(n, m)] = out
        return out

    states = comps(N, L)
    cache.clear()
    return states


@numba.njit(cache=True)
def _rank_rows(states, perm, table, N):
    D, L = states.shape
    out = np.empty(D, dtype=np.int64)
    for d in range(D):
        remaining = N
        r = 0
        for j in range(L - 1):
            n_j = states[d, perm[j]]
            # states sharing the prefix with a larger entry at position j
            r += table[remaining - n_j - 1 + L - j - 1, L - j - 1]
            remaining -= n_j
        out[d] = r
    return out


@numba.njit(cache=True)
def _orbit_scan(states, perms, chars, weights, table, N):
    """Per state: largest image rank, coefficient of that image, stabilizer size, killed flag."""
    D, L = states.shape
    G = perms.shape[0]
    best = np.full(D, -1, dtype=np.int64)
    coef = np.zeros(D, dtype=np.int8)
    stab = np.zeros(D, dtype=np.int16)
    killed = np.zeros(D, dtype=np.bool_)
    for d in range(D):
        own = -1
        for g in range(G):
            remaining = N
            r = 0
            odd = 0
            for j in range(L):
                n_j = states[d, perms[g, j]]
                odd += weights[g, j] * states[d, j]
                if j < L - 1:
                    r += table[remaining - n_j - 1 + L - j - 1, L - j - 1]
                    remaining -= n_j
            c = chars[g]
            if odd % 2 == 1:
                c = -c
            if g == 0:
                own = r
            if r > best[d]:
                best[d] = r
                coef[d] = c
            if r == own:
                stab[d] += 1
                if c != 1:
                    killed[d] = True
    return best, coef, stab, killed


@numba.njit(cache=True)
def _rep_scan(states, perms, chars, weights):
    """Per state: is it the lexicographically smallest orbit member, stabilizer size, killed flag."""
    D, L = states.shape
    G = perms.shape[0]
    is_rep = np.ones(D, dtype=np.bool_)
    stab = np.zeros(D, dtype=np.int16)
    killed = np.zeros(D, dtype=np.bool_)
    for d in range(D):
        for g in range(G):
            cmp = 0
            for j in range(L):
                a = states[d, perms[g, j]]
                b = states[d, j]
                if a != b:
                    cmp = -1 if a < b else 1
                    break
            if cmp < 0:
                is_rep[d] = False
                break
            if cmp == 0:
                stab[d] += 1
                odd = 0
                for j in range(L):
                    odd += weights[g, j] * states[d, j]
                c = chars[g]
                if odd % 2 == 1:
                    c = -c
                if c != 1:
                    killed[d] = True
    return is_rep, stab, killed


def rank_states(states: np.ndarray, N: int) -> np.ndarray:
    """Vectorized rank of each row in the order of :func:`enumerate_basis`.

    Rows are assumed valid (non-negative, summing to ``N``).
    """
    states = np.ascontiguousarray(np.atleast_2d(states))
    L = states.shape[1]
    return _rank_rows(states, np.arange(L), _binomial_table(N + L), N)


def state_index(state, N: int, L: int) -> int:
    s = np.asarray(state)
    if s.ndim != 1 or s.shape[0] != L:
        raise InvalidStateError(f"state must have length {L}, got shape {s.shape}")
    if np.any(s < 0) or int(s.sum()) != N:
        raise InvalidStateError(f"state {s.tolist()} is not a valid {N}-particle state")
    return int(rank_states(s[None, :], N)[0])


def reflect(state) -> np.ndarray:
    return np.asarray(state)[..., ::-1].copy()


def translate(state, shift: int) -> np.ndarray:
    return np.roll(np.asarray(state), shift, axis=-1)


@dataclass(frozen=True)
class SectorSpec:
    """Symmetry sector label.

    ``parity=None`` with ``Q=None`` selects the full, unsymmetrized space.
    ``basis`` selects whether states are site (interaction) or tunneling-mode
    occupations, since the symmetry group acts differently on the two.
    """

    bc: BC
    N: int
    L: int
    Q: Optional[int] = None
    parity: Optional[int] = None
    basis: Basis = Basis.INTERACTION

    def __post_init__(self):
        object.__setattr__(self, "bc", BC(self.bc))
        object.__setattr__(self, "basis", Basis(self.basis))
        if self.N < 0 or self.L < 1:
            raise ValueError(f"need N >= 0 and L >= 1, got N={self.N}, L={self.L}")
        if self.parity not in (None, 1, -1):
            raise ValueError(f"parity must be +1, -1 or None, got {self.parity}")
        if self.bc is BC.HWBC:
            if self.Q is not None:
                raise ValueError("quasimomentum Q is only defined for PBC")
        else:
            if self.Q is None:
                if self.parity is not None:
                    raise ValueError("PBC parity sectors require Q (0 or L/2)")
            else:
                if not 0 <= self.Q < self.L:
                    raise ValueError(f"Q must lie in [0, {self.L - 1}], got {self.Q}")
                if self.parity is not None and not (self.Q == 0 or 2 * self.Q == self.L):
                    raise ValueError("parity is a good quantum number only for Q=0 or Q=L/2")
                if self.Q != 0:
                    raise UnsupportedSectorError(
                        f"PBC sector Q={self.Q} needs complex amplitudes; only Q=0 is implemented"
                    )

    @property
    def is_full(self) -> bool:
        return self.Q is None and self.parity is None

    def label(self) -> str:
        parts = [self.bc.value, f"N{self.N}", f"L{self.L}"]
        if self.Q is not None:
            parts.append(f"Q{self.Q}")
        if self.parity is not None:
            parts.append("p+" if self.parity > 0 else "p-")
        parts.append(self.basis.value)
        return "_".join(parts)


@dataclass(frozen=True)
class _Group:
    """Symmetry group acting on Fock states; element 0 is the identity.

    Element ``g`` maps ``state`` to ``state[perms[g]]`` with coefficient
    ``chars[g] * (-1)**(state @ weights[g])``.
    """

    perms: np.ndarray
    chars: np.ndarray
    weights: np.ndarray
    momentum: Optional[np.ndarray] = None  # keep states with state @ momentum == Q (mod L)

    @property
    def order(self) -> int:
        return int(self.perms.shape[0])

    def scan(self, states: np.ndarray, N: int):
        L = states.shape[1]
        return _orbit_scan(
            np.ascontiguousarray(states), self.perms, self.chars, self.weights,
            _binomial_table(N + L), N,
        )

    def images(self, states: np.ndarray):
        for g in range(self.order):
            image = states[:, self.perms[g]]
            odd = (states.astype(np.int64) @ self.weights[g]) % 2
            yield image, np.where(odd == 1, -self.chars[g], self.chars[g])


def _group_for(spec: SectorSpec) -> _Group:
    L = spec.L
    ident = np.arange(L)
    perms = [ident]
    chars = [1]
    momentum = None
    pi = spec.parity
    if spec.is_full:
        pass
    elif spec.basis is Basis.INTERACTION:
        if spec.bc is BC.HWBC:
            perms.append(ident[::-1])
            chars.append(pi)
        else:
            perms = [np.roll(ident, -a) for a in range(L)]
            chars = [1] * L
            if pi is not None:
                perms += [p[::-1] for p in perms]
                chars += [pi] * L
    else:
        k = np.arange(1, L + 1)
        if spec.bc is BC.HWBC:
            # b_k -> (-1)**(k+1) b_k under j -> L+1-j
            perms.append(ident)
            chars.append(pi)
        else:
            # translations act diagonally on tunneling modes: a momentum filter
            momentum = k % L
            if pi is not None:
                # b_k -> b_{L-k} at Q=0; mode k=L (zero momentum) is fixed
                perm = (L - k) % L - 1
                perm[perm < 0] = L - 1
                perms.append(perm)
                chars.append(pi)
    weights = np.zeros((len(perms), L), dtype=np.int64)
    if spec.basis is Basis.TUNNELING and spec.bc is BC.HWBC and not spec.is_full:
        weights[1] = np.arange(2, L + 2) % 2
    return _Group(np.array(perms, dtype=np.int64), np.array(chars, dtype=np.int8), weights, momentum)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Symmetry-adapted orthonormal basis of one sector.

    Basis vector ``a`` is ``(1/norms[a]) * sum_t c_t |t>`` over the orbit of
    ``reps[a]`` with ``c_t = +-1``; ``norms`` is the square root of the orbit
    size.  Representatives are the lexicographically smallest orbit members
    and are listed in increasing full-basis rank.
    """

    spec: SectorSpec
    reps: np.ndarray
    norms: np.ndarray
    rep_ranks: np.ndarray
    group: _Group = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.reps.shape[0])

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def L(self) -> int:
        return self.spec.L

    def lookup(self, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map Fock states to (sector index or -1, coefficient c).

        ``<state|basis vector> = c / norms[index]``; index -1 marks states
        annihilated by (or filtered out of) the sector projection.
        """
        states = np.atleast_2d(states)
        n = states.shape[0]
        if self.dim == 0:
            return np.full(n, -1, dtype=np.int64), np.zeros(n, dtype=np.int8)
        best, coef, _, _ = self.group.scan(states, self.N)
        pos = np.minimum(np.searchsorted(self.rep_ranks, best), self.dim - 1)
        found = self.rep_ranks[pos] == best
        if self.group.momentum is not None:
            found &= (states.astype(np.int64) @ self.group.momentum) % self.L == self.spec.Q
        return np.where(found, pos, -1), np.where(found, coef, 0).astype(np.int8)

    def index_of(self, state) -> int:
        """Sector index of the basis vector containing ``state``, or -1."""
        s = np.asarray(state)
        if s.shape != (self.L,) or np.any(s < 0) or int(s.sum()) != self.N:
            raise InvalidStateError(f"{s.tolist()} is not a {self.N}-boson state on {self.L} modes")
        return int(self.lookup(s[None, :])[0][0])

    def projector(self):
        """Sparse isometry (full dim x sector dim) whose columns are the basis vectors."""
        from scipy import sparse

        rows, cols, vals = [], [], []
        for image, c in self.group.images(self.reps):
            rows.append(rank_states(image, self.N))
            cols.append(np.arange(self.dim))
            vals.append(c.astype(float))
        full = basis_dimension(self.N, self.L)
        P = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(full, self.dim),
        ).tocsc()
        P.sum_duplicates()
        # orbit members appear |stabilizer| times with equal coefficients
        col_norms = np.sqrt(np.asarray(P.multiply(P).sum(axis=0))).ravel()
        return (P @ sparse.diags(1.0 / col_norms)).tocsc()


def build_sector_basis(spec: SectorSpec, max_dim: Optional[int] = None) -> SectorBasis:
    states = enumerate_basis(spec.N, spec.L, max_dim=max_dim)
    group = _group_for(spec)
    is_rep, stab, killed = _rep_scan(states, group.perms, group.chars, group.weights)
    keep = is_rep & ~killed
    if group.momentum is not None:
        keep &= (states.astype(np.int64) @ group.momentum) % spec.L == spec.Q
    idx = np.flatnonzero(keep)
    reps = states[idx]
    norms = np.sqrt(group.order / stab[idx].astype(float))
    for arr in (reps, norms, idx):
        arr.setflags(write=False)
    return SectorBasis(spec, reps, norms, idx.astype(np.int64), group)
