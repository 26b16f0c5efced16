"""Sparse real symmetric matrices in triplet form, plus export formats."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

# relative size below which accumulated contributions count as exact cancellation
CANCEL_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Upper-triangle triplets (row <= col), sorted by (row, col), no zeros stored."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    @classmethod
    def from_entries(cls, dim, rows, cols, values, rtol: float = CANCEL_RTOL) -> "SymmetricMatrix":
        """Sum (row, col, value) contributions covering both triangles and symmetrize."""
        A = sparse.coo_matrix(
            (np.asarray(values, dtype=float), (np.asarray(rows), np.asarray(cols))),
            shape=(dim, dim),
        ).tocsr()
        A.sum_duplicates()
        A = 0.5 * (A + A.T)
        U = sparse.triu(A).tocoo()
        vals = U.data
        scale = np.abs(vals).max() if vals.size else 0.0
        keep = np.abs(vals) > rtol * scale
        r, c, v = U.row[keep], U.col[keep], vals[keep]
        order = np.lexsort((c, r))
        return cls(dim, r[order].astype(np.int64), c[order].astype(np.int64), v[order])

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "SymmetricMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        r, c = np.nonzero(a)
        return cls.from_entries(a.shape[0], r, c, a[r, c], rtol=0.0)

    @property
    def nnz(self) -> int:
        """Nonzeros of the full (both-triangle) matrix."""
        return int(2 * self.values.size - np.count_nonzero(self.rows == self.cols))

    def triplets(self) -> list[tuple[int, int, float]]:
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()))

    def to_sparse(self) -> sparse.csr_matrix:
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.values, self.values[off]])
        return sparse.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        a[self.rows, self.cols] = self.values
        a[self.cols, self.rows] = self.values
        return a

    def norm_estimate(self) -> float:
        """Frobenius norm (upper bound on the spectral norm)."""
        off = self.rows != self.cols
        return float(np.sqrt(np.sum(self.values**2) + np.sum(self.values[off] ** 2)))

    def __add__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return SymmetricMatrix.from_entries(
            self.dim,
            np.concatenate([self.rows, other.rows]),
            np.concatenate([self.cols, other.cols]),
            np.concatenate([self.values, other.values]),
            rtol=0.0,
        )

    def scaled(self, factor: float) -> "SymmetricMatrix":
        return SymmetricMatrix(self.dim, self.rows, self.cols, self.values * factor)


def sparsity_pattern(m: SymmetricMatrix) -> set[tuple[int, int]]:
    """Upper-triangle positions of stored (structurally nonzero) entries."""
    return set(zip(m.rows.tolist(), m.cols.tolist()))


def write_triplets_csv(m: SymmetricMatrix, path, header: dict | None = None) -> None:
    with open(path, "w") as fh:
        for key, val in (header or {}).items():
            fh.write(f"# {key}: {val}\n")
        fh.write("row,col,value\n")
        for r, c, v in zip(m.rows.tolist(), m.cols.tolist(), m.values.tolist()):
            fh.write(f"{r},{c},{v!r}\n")


_BIN_MAGIC = b"SYMT"


def write_binary(m: SymmetricMatrix, path) -> None:
    """Little-endian dump: magic, uint64 dim, uint64 nnz, then int64 rows, int64 cols, float64 values."""
    with open(path, "wb") as fh:
        fh.write(_BIN_MAGIC)
        fh.write(struct.pack("<QQ", m.dim, m.values.size))
        fh.write(m.rows.astype("<i8").tobytes())
        fh.write(m.cols.astype("<i8").tobytes())
        fh.write(m.values.astype("<f8").tobytes())


def read_binary(path) -> SymmetricMatrix:
    raw = Path(path).read_bytes()
    if raw[:4] != _BIN_MAGIC:
        raise ValueError(f"{path} is not a symmetric-matrix dump")
    dim, nnz = struct.unpack("<QQ", raw[4:20])
    off = 20
    rows = np.frombuffer(raw, "<i8", nnz, off)
    cols = np.frombuffer(raw, "<i8", nnz, off + 8 * nnz)
    vals = np.frombuffer(raw, "<f8", nnz, off + 16 * nnz)
    return SymmetricMatrix(int(dim), rows.astype(np.int64), cols.astype(np.int64), vals.astype(float))
