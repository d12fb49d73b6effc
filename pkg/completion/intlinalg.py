"""
Exact integer matrix algebra and Smith normal form.

Orientation convention (used everywhere in the package): an r x c matrix is
the map Z^c -> Z^r acting on column vectors, and a chain-complex
differential d_n maps degree n to degree n-1.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)


# ---------- Matrices ----------
@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major with arbitrary-precision entries."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"negative shape {self.rows}x{self.cols}")
        entries = tuple(self.entries)
        if len(entries) != self.rows * self.cols:
            raise ValueError(
                f"{len(entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )
        for x in entries:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise TypeError(f"matrix entries must be integers, got {x!r}")
        object.__setattr__(self, 'entries', tuple(int(x) for x in entries))

    # ----- construction -----
    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols is required for a matrix without rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n):
        return cls.diagonal([1] * n, n, n)

    @classmethod
    def diagonal(cls, values, rows=None, cols=None):
        values = list(values)
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, x in enumerate(values):
            out[i][i] = x
        return cls.from_rows(out, cols)

    @classmethod
    def from_numpy(cls, arr):
        arr = np.asarray(arr, dtype=object)
        r, c = arr.shape
        return cls(r, c, tuple(int(x) for x in arr.reshape(-1)))

    @classmethod
    def block(cls, blocks):
        """Assemble a block matrix from a grid of IntMatrix blocks."""
        grid = [[b.to_numpy() for b in row] for row in blocks]
        if not grid or not grid[0]:
            raise ValueError("empty block grid")
        heights = [row[0].shape[0] for row in grid]
        widths = [b.shape[1] for b in grid[0]]
        for i, row in enumerate(grid):
            for j, b in enumerate(row):
                if b.shape != (heights[i], widths[j]):
                    raise ValueError(f"block ({i}, {j}) has shape {b.shape}")
        out = np.zeros((sum(heights), sum(widths)), dtype=object)
        r0 = 0
        for i, row in enumerate(grid):
            c0 = 0
            for j, b in enumerate(row):
                out[r0:r0 + heights[i], c0:c0 + widths[j]] = b
                c0 += widths[j]
            r0 += heights[i]
        return cls.from_numpy(out)

    # ----- access -----
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self):
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def to_numpy(self):
        arr = np.zeros((self.rows, self.cols), dtype=object)
        for i, row in enumerate(self.to_rows()):
            arr[i, :] = row
        return arr

    def column(self, j):
        return [self[i, j] for i in range(self.rows)]

    def select_rows(self, indices):
        rows = self.to_rows()
        return IntMatrix.from_rows([rows[i] for i in indices], self.cols)

    def select_cols(self, indices):
        indices = list(indices)
        return IntMatrix.from_rows([[r[j] for j in indices] for r in self.to_rows()], len(indices))

    def max_abs(self):
        return max((abs(x) for x in self.entries), default=0)

    def is_zero(self):
        return not any(self.entries)

    # ----- arithmetic -----
    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix.from_numpy(self.to_numpy().dot(other.to_numpy()))

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return IntMatrix(self.rows, self.cols, tuple(k * x for x in self.entries))

    def transpose(self):
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        a, b = self.to_rows(), other.to_rows()
        return IntMatrix.from_rows([x + y for x, y in zip(a, b)], self.cols + other.cols)

    def reduce_rows(self, moduli):
        """Reduce row i modulo moduli[i]; a modulus of 0 leaves the row alone."""
        rows = self.to_rows()
        for i, m in enumerate(moduli):
            if m:
                rows[i] = [x % m for x in rows[i]]
        return IntMatrix.from_rows(rows, self.cols)

    def determinant(self):
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __str__(self):
        return '[' + '; '.join(', '.join(str(x) for x in r) for r in self.to_rows()) + ']'


# ---------- Smith normal form ----------
@dataclass(frozen=True)
class SnfDecomposition:
    """u @ m @ v == d with u, v unimodular and d diagonal with d_1 | d_2 | ... ."""

    d: IntMatrix
    u: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix
    v_inv: IntMatrix

    @property
    def diagonal(self):
        return [self.d[i, i] for i in range(min(self.d.rows, self.d.cols))]

    @property
    def rank(self):
        return sum(1 for x in self.diagonal if x != 0)


class _Reducer:
    """Mutable working state of one Smith normal form computation."""

    def __init__(self, m):
        self.r, self.c = m.rows, m.cols
        self.a = m.to_rows()
        self.u = IntMatrix.identity(self.r).to_rows()
        self.u_inv = IntMatrix.identity(self.r).to_rows()
        self.v = IntMatrix.identity(self.c).to_rows()
        self.v_inv = IntMatrix.identity(self.c).to_rows()

    # Row operations act on a and u; their inverses act on the columns of u_inv.
    def swap_rows(self, i, j):
        if i == j:
            return
        for m in (self.a, self.u):
            m[i], m[j] = m[j], m[i]
        for row in self.u_inv:
            row[i], row[j] = row[j], row[i]

    def add_row(self, target, source, q):
        """row[target] += q * row[source]"""
        for m in (self.a, self.u):
            m[target] = [x + q * y for x, y in zip(m[target], m[source])]
        for row in self.u_inv:
            row[source] -= q * row[target]

    def negate_row(self, i):
        for m in (self.a, self.u):
            m[i] = [-x for x in m[i]]
        for row in self.u_inv:
            row[i] = -row[i]

    # Column operations act on a and v; their inverses act on the rows of v_inv.
    def swap_cols(self, i, j):
        if i == j:
            return
        for m in (self.a, self.v):
            for row in m:
                row[i], row[j] = row[j], row[i]
        self.v_inv[i], self.v_inv[j] = self.v_inv[j], self.v_inv[i]

    def add_col(self, target, source, q):
        """col[target] += q * col[source]"""
        for m in (self.a, self.v):
            for row in m:
                row[target] += q * row[source]
        self.v_inv[source] = [x - q * y for x, y in zip(self.v_inv[source], self.v_inv[target])]

    def smallest_in(self, cells):
        best = None
        for i, j in cells:
            x = self.a[i][j]
            if x != 0 and (best is None or abs(x) < abs(self.a[best[0]][best[1]])):
                best = (i, j)
        return best

    def run(self):
        a = self.a
        for t in range(min(self.r, self.c)):
            pivot = self.smallest_in((i, j) for i in range(t, self.r) for j in range(t, self.c))
            if pivot is None:
                break
            self.swap_rows(t, pivot[0])
            self.swap_cols(t, pivot[1])
            while True:
                for i in range(t + 1, self.r):
                    q = a[i][t] // a[t][t]
                    if q:
                        self.add_row(i, t, -q)
                for j in range(t + 1, self.c):
                    q = a[t][j] // a[t][t]
                    if q:
                        self.add_col(j, t, -q)
                line = [(i, t) for i in range(t, self.r)] + [(t, j) for j in range(t + 1, self.c)]
                if any(a[i][j] for i, j in line if (i, j) != (t, t)):
                    # a remainder smaller than the pivot survived: it becomes the pivot
                    i, j = self.smallest_in(line)
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                bad = next(
                    (i for i in range(t + 1, self.r) for j in range(t + 1, self.c)
                     if a[i][j] % a[t][t] != 0),
                    None,
                )
                if bad is None:
                    break
                self.add_row(t, bad, 1)
            if a[t][t] < 0:
                self.negate_row(t)
        return SnfDecomposition(
            d=IntMatrix.from_rows(a, self.c),
            u=IntMatrix.from_rows(self.u, self.r),
            v=IntMatrix.from_rows(self.v, self.c),
            u_inv=IntMatrix.from_rows(self.u_inv, self.r),
            v_inv=IntMatrix.from_rows(self.v_inv, self.c),
        )


def smith_normal_form(m: IntMatrix) -> SnfDecomposition:
    """Diagonalize m by unimodular row and column operations.

    Pivoting always picks the nonzero entry of smallest absolute value, which
    keeps intermediate entries small at desk scale.
    """
    logger.debug("smith normal form of a %dx%d matrix", m.rows, m.cols)
    return _Reducer(m).run()


class CokernelInvariants(NamedTuple):
    torsion: tuple
    free_rank: int

    @property
    def order(self):
        """Order of the cokernel, or None when it is infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out


def cokernel_invariants(m: IntMatrix) -> CokernelInvariants:
    """Invariant factors (each >= 2, d_1 | d_2 | ...) and free rank of Z^rows / im(m)."""
    snf = smith_normal_form(m)
    diagonal = snf.diagonal
    torsion = tuple(d for d in diagonal if d >= 2)
    return CokernelInvariants(torsion, m.rows - snf.rank)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of ker(m: Z^cols -> Z^rows)."""
    snf = smith_normal_form(m)
    return snf.v.select_cols(range(snf.rank, m.cols))


def image_invariants(phi: IntMatrix, moduli: Sequence[int]) -> CokernelInvariants:
    """Invariants of the subgroup generated by the columns of phi in ⊕ Z/moduli[i].

    A modulus of 0 stands for a free summand Z.
    """
    k = phi.rows
    if len(moduli) != k:
        raise ValueError("one modulus per row is required")
    relations = IntMatrix.diagonal(moduli, k, k)
    snf = smith_normal_form(phi.hstack(relations))
    diagonal = snf.diagonal
    s = snf.rank
    # coordinates of the relation lattice in the basis u^{-1} d_i e_i of the generated lattice
    z = (snf.u @ relations).to_rows()
    coords = []
    for i in range(s):
        row = []
        for x in z[i]:
            q, rem = divmod(x, diagonal[i])
            if rem:
                raise ArithmeticError("relation lattice escapes the generated lattice")
            row.append(q)
        coords.append(row)
    return cokernel_invariants(IntMatrix.from_rows(coords, k))
