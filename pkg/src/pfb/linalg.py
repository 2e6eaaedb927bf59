"""Sparse assembly buffers and a direct LU solver for indefinite systems.

The factorization is SuperLU (via scipy) with threshold-1 partial pivoting,
applied to a two-sided equilibrated copy of the matrix.  Equilibration matters
here: Darcy systems mix entries of order ``mu/k`` (up to 1e9) with geometric
entries of order ``h``, and an unscaled pivot test would misreport singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AssemblyError, SingularMatrixError

PIVOT_TOL = 1e-14
RESIDUAL_TOL = 1e-10


class TripletBuffer:
    """Accumulates (row, col, value) contributions; duplicates sum on compression."""

    def __init__(self):
        self._rows = []
        self._cols = []
        self._vals = []

    def add(self, rows, cols, vals):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=float).ravel()
        if not (len(rows) == len(cols) == len(vals)):
            raise AssemblyError("rows, cols and vals must have equal length")
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(vals)

    def add_block(self, row_idx, col_idx, blocks):
        """Scatter dense element blocks ``blocks[t]`` (shape (T, a, b))."""
        row_idx = np.asarray(row_idx)
        col_idx = np.asarray(col_idx)
        r = np.broadcast_to(row_idx[:, :, None], blocks.shape)
        c = np.broadcast_to(col_idx[:, None, :], blocks.shape)
        self.add(r, c, blocks)

    def arrays(self):
        if not self._rows:
            e = np.zeros(0, dtype=np.int64)
            return e, e, np.zeros(0)
        return np.concatenate(self._rows), np.concatenate(self._cols), np.concatenate(self._vals)

    def __len__(self):
        return sum(len(r) for r in self._rows)


def compress(buf: TripletBuffer, n: int) -> sp.csr_matrix:
    """Canonical CSR: duplicates summed, sorted column indices, no stored zeros."""
    rows, cols, vals = buf.arrays()
    if len(rows) and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        bad = np.flatnonzero((rows < 0) | (cols < 0) | (rows >= n) | (cols >= n))[0]
        raise AssemblyError(f"entry ({rows[bad]}, {cols[bad]}) outside dimension {n}")
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    return A


def _equilibrate(A: sp.csr_matrix):
    absA = abs(A)
    r = np.asarray(absA.max(axis=1).toarray()).ravel()
    if np.any(r == 0):
        raise SingularMatrixError(f"structurally singular: row {int(np.flatnonzero(r == 0)[0])} is empty")
    r = 1.0 / r
    c = np.asarray((sp.diags(r) @ absA).max(axis=0).toarray()).ravel()
    if np.any(c == 0):
        raise SingularMatrixError(f"structurally singular: column {int(np.flatnonzero(c == 0)[0])} is empty")
    c = 1.0 / c
    return r, c


class Factorization:
    """Reusable LU factorization of an equilibrated matrix."""

    def __init__(self, A: sp.csr_matrix, ordering="COLAMD"):
        A = sp.csr_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise AssemblyError(f"matrix must be square, got {A.shape}")
        self.n = A.shape[0]
        self.A = A
        self.r, self.c = _equilibrate(A)
        S = (sp.diags(self.r) @ A @ sp.diags(self.c)).tocsc()
        norm = spla.norm(S, np.inf)
        try:
            self.lu = spla.splu(S, permc_spec=ordering, diag_pivot_thresh=1.0)
        except RuntimeError as exc:
            raise SingularMatrixError(str(exc)) from None
        pivots = np.abs(self.lu.U.diagonal())
        if pivots.min() < PIVOT_TOL * norm:
            raise SingularMatrixError(
                f"pivot {pivots.min():.3e} below {PIVOT_TOL:g} * ||A|| = {PIVOT_TOL * norm:.3e}"
            )

    def solve(self, b, refine=2):
        b = np.asarray(b, dtype=float)
        x = self.c * self.lu.solve(self.r * b)
        for _ in range(refine):
            res = b - self.A @ x
            if _relative_residual(self.A, x, b, res) <= 0.1 * RESIDUAL_TOL:
                break
            x = x + self.c * self.lu.solve(self.r * res)
        return x


def _relative_residual(A, x, b, res=None):
    if res is None:
        res = b - A @ x
    scale = spla.norm(A, np.inf) * np.max(np.abs(x), initial=0.0) + np.max(np.abs(b), initial=0.0)
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(res), initial=0.0) / scale)


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    _factor: Factorization | None = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return self.matrix.shape[0]

    def factorize(self, ordering="COLAMD") -> Factorization:
        if self._factor is None:
            self._factor = Factorization(self.matrix, ordering)
        return self._factor

    def relative_residual(self, x):
        return _relative_residual(self.matrix, x, self.rhs)


def solve_direct(system: SparseSystem, ordering="COLAMD") -> np.ndarray:
    """Solve ``A x = b`` by pivoted sparse LU."""
    return system.factorize(ordering).solve(system.rhs)


def residual_norm(system: SparseSystem, x) -> float:
    """Euclidean norm of ``A x - b``."""
    return float(np.linalg.norm(system.matrix @ np.asarray(x, dtype=float) - system.rhs))


def write_matrix_market(system: SparseSystem, path):
    import scipy.io

    scipy.io.mmwrite(str(path), system.matrix.tocoo(), field="real", symmetry="general")


def apply_dirichlet(A: sp.csr_matrix, b: np.ndarray, dofs, values):
    """Impose ``x[dofs] = values`` by lifting and row/column replacement.

    Keeps a symmetric matrix symmetric.  Returns new ``(A, b)``.
    """
    dofs = np.asarray(dofs, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if len(dofs) == 0:
        return A, b
    n = A.shape[0]
    xd = np.zeros(n)
    xd[dofs] = values
    b = b - A @ xd
    keep = np.ones(n)
    keep[dofs] = 0.0
    K = sp.diags(keep)
    fixed = sp.diags(1.0 - keep)
    A = (K @ A @ K + fixed).tocsr()
    A.eliminate_zeros()
    A.sort_indices()
    b[dofs] = values
    return A, b
