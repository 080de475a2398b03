"""Dense exact linear algebra over any FieldSpec.

Matrices over GF(p) are stored as ``int64`` numpy arrays and reduced with
vectorised row operations (p < 2^31 keeps every product below 2^62).  Over Q
and GF(p^k) entries are raw field values in nested lists.

Pivoting is deterministic: leftmost column with a nonzero entry, first row
holding it.  The RREF is therefore bit-stable.
"""

from __future__ import annotations

import numpy as np

from .errors import FieldMismatch
from .exactfield import FieldElement, FieldSpec, PrimeField


def _is_np(field) -> bool:
    return isinstance(field, PrimeField)


def _raw(field, v):
    if isinstance(v, FieldElement):
        return field.coerce(v)
    if _is_np(field):
        return int(v) % field.p
    if isinstance(v, int):
        return field.from_int(v)
    return v


class ExactMatrix:
    """A rows x cols matrix over ``field``."""

    __slots__ = ("field", "data", "rows", "cols")

    def __init__(self, field: FieldSpec, data, rows: int, cols: int):
        self.field = field
        self.data = data
        self.rows = rows
        self.cols = cols

    # --- construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, field, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        if _is_np(field):
            data = np.zeros((len(rows), cols), dtype=np.int64)
            for i, r in enumerate(rows):
                for j, v in enumerate(r):
                    data[i, j] = _raw(field, v)
        else:
            data = [[_raw(field, v) for v in r] for r in rows]
        return cls(field, data, len(rows), cols)

    @classmethod
    def zeros(cls, field, rows, cols):
        if _is_np(field):
            return cls(field, np.zeros((rows, cols), dtype=np.int64), rows, cols)
        z = field.zero
        return cls(field, [[z] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, field, n):
        M = cls.zeros(field, n, n)
        for i in range(n):
            M.set(i, i, field.one)
        return M

    @classmethod
    def from_numpy(cls, field, arr):
        arr = np.asarray(arr, dtype=np.int64) % field.p
        return cls(field, arr, arr.shape[0], arr.shape[1])

    # --- access -----------------------------------------------------------
    def get(self, i, j):
        v = self.data[i][j]
        return int(v) if _is_np(self.field) else v

    def set(self, i, j, v):
        self.data[i][j] = _raw(self.field, v)

    def __getitem__(self, ij):
        i, j = ij
        return FieldElement(self.field, self.get(i, j))

    def row(self, i):
        r = self.data[i]
        return [int(v) for v in r] if _is_np(self.field) else list(r)

    def tolist(self):
        return [self.row(i) for i in range(self.rows)]

    def copy(self):
        if _is_np(self.field):
            return ExactMatrix(self.field, self.data.copy(), self.rows, self.cols)
        return ExactMatrix(self.field, [list(r) for r in self.data], self.rows, self.cols)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.tolist() == other.tolist()
        )

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format_element(v) for v in r) for r in self.tolist())
        return f"ExactMatrix({self.field}, {self.rows}x{self.cols}, [{body}])"

    # --- structure ----------------------------------------------------------
    def transpose(self):
        if _is_np(self.field):
            return ExactMatrix(self.field, self.data.T.copy(), self.cols, self.rows)
        return ExactMatrix(self.field, [list(c) for c in zip(*self.data)] if self.rows else [[] for _ in range(self.cols)],
                           self.cols, self.rows)

    T = property(transpose)

    def take_columns(self, cols):
        cols = list(cols)
        if _is_np(self.field):
            return ExactMatrix(self.field, self.data[:, cols], self.rows, len(cols))
        return ExactMatrix(self.field, [[r[c] for c in cols] for r in self.data], self.rows, len(cols))

    def take_rows(self, rows):
        rows = list(rows)
        if _is_np(self.field):
            return ExactMatrix(self.field, self.data[rows, :], len(rows), self.cols)
        return ExactMatrix(self.field, [list(self.data[r]) for r in rows], len(rows), self.cols)

    def scatter_columns(self, index, ncols):
        """New rows x ncols matrix with column j of self placed at column index[j]."""
        out = ExactMatrix.zeros(self.field, self.rows, ncols)
        if _is_np(self.field):
            out.data[:, list(index)] = self.data
        else:
            for r_in, r_out in zip(self.data, out.data):
                for j, c in enumerate(index):
                    r_out[c] = r_in[j]
        return out

    def vstack(self, *others):
        mats = [self, *others]
        for m in others:
            _same(self, m)
            if m.cols != self.cols:
                raise ValueError("column mismatch in vstack")
        rows = sum(m.rows for m in mats)
        if _is_np(self.field):
            return ExactMatrix(self.field, np.vstack([m.data.reshape(m.rows, self.cols) for m in mats]), rows, self.cols)
        data = []
        for m in mats:
            data.extend(list(r) for r in m.data)
        return ExactMatrix(self.field, data, rows, self.cols)

    def hstack(self, *others):
        mats = [self, *others]
        for m in others:
            _same(self, m)
            if m.rows != self.rows:
                raise ValueError("row mismatch in hstack")
        cols = sum(m.cols for m in mats)
        if _is_np(self.field):
            return ExactMatrix(self.field, np.hstack([m.data.reshape(self.rows, m.cols) for m in mats]), self.rows, cols)
        data = [[] for _ in range(self.rows)]
        for m in mats:
            for acc, r in zip(data, m.data):
                acc.extend(r)
        return ExactMatrix(self.field, data, self.rows, cols)

    # --- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        _same(self, other)
        F = self.field
        if _is_np(F):
            return ExactMatrix(F, (self.data + other.data) % F.p, self.rows, self.cols)
        return ExactMatrix(F, [[F.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                           self.rows, self.cols)

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        F = self.field
        c = _raw(F, c)
        if _is_np(F):
            return ExactMatrix(F, (self.data * c) % F.p, self.rows, self.cols)
        return ExactMatrix(F, [[F.mul(a, c) for a in r] for r in self.data], self.rows, self.cols)

    def __matmul__(self, other):
        _same(self, other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matmul")
        F = self.field
        if _is_np(F):
            return ExactMatrix(F, _np_matmul(self.data, other.data, F.p), self.rows, other.cols)
        add, mul, zero = F.add, F.mul, F.zero
        cols = list(zip(*other.data)) if other.rows else [() for _ in range(other.cols)]
        out = []
        for r in self.data:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    acc = add(acc, mul(a, b))
                row.append(acc)
            out.append(row)
        return ExactMatrix(F, out, self.rows, other.cols)

    def apply(self, vec):
        """M v for a raw column vector."""
        col = ExactMatrix.from_rows(self.field, [[v] for v in vec], 1)
        return [r[0] for r in (self @ col).tolist()]

    def is_zero(self):
        if _is_np(self.field):
            return not self.data.any()
        return all(self.field.is_zero(v) for r in self.data for v in r)

    # --- elimination --------------------------------------------------------
    def rref(self):
        return rref(self)

    def rank(self):
        return rank(self)

    def kernel_basis(self):
        return kernel_basis(self)


def _same(a, b):
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")


def _np_matmul(a, b, p):
    # split to keep partial sums below 2^63
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if p < 2**26 and a.shape[1] < 2**10:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = (out + np.outer(a[:, k], b[k, :]) % p) % p
    return out


def _np_rref(A, p):
    A = A % p
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = A[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        piv = int(A[r, c])
        if piv != 1:
            A[r] = (A[r] * pow(piv, p - 2, p)) % p
        colv = A[:, c].copy()
        colv[r] = 0
        others = np.flatnonzero(colv)
        if others.size:
            A[others] = (A[others] - np.outer(colv[others], A[r]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r].copy(), pivots


def _generic_rref(rows, F, ncols):
    A = [list(r) for r in rows]
    m = len(A)
    is_zero, mul, sub, inv = F.is_zero, F.mul, F.sub, F.inv
    one = F.one
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        i = next((k for k in range(r, m) if not is_zero(A[k][c])), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        piv = A[r][c]
        if piv != one:
            pinv = inv(piv)
            A[r] = [mul(v, pinv) for v in A[r]]
        prow = A[r]
        for k in range(m):
            if k != r:
                f = A[k][c]
                if not is_zero(f):
                    A[k] = [sub(a, mul(f, b)) for a, b in zip(A[k], prow)]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rref(M: ExactMatrix):
    """Return ``(R, rank, pivot_cols)`` with R the nonzero rows of the RREF."""
    F = M.field
    if _is_np(F):
        R, piv = _np_rref(M.data, F.p)
        return ExactMatrix(F, R, len(piv), M.cols), len(piv), piv
    R, piv = _generic_rref(M.data, F, M.cols)
    return ExactMatrix(F, R, len(piv), M.cols), len(piv), piv


def rank(M: ExactMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.rows > M.cols and not _is_np(M.field):
        M = M.transpose()
    return rref(M)[1]


def _kernel_from_rref(R: ExactMatrix, pivots, ncols):
    F = R.field
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    rows = R.tolist()
    for f in free:
        v = [F.zero] * ncols
        v[f] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(rows[r][f])
        basis.append(v)
    return basis


def kernel_basis(M: ExactMatrix):
    """Basis of {v : M v = 0}; free variables set to standard basis vectors."""
    R, _, piv = rref(M)
    return _kernel_from_rref(R, piv, M.cols)


def kernel_matrix(M: ExactMatrix) -> ExactMatrix:
    basis = kernel_basis(M)
    return ExactMatrix.from_rows(M.field, basis, M.cols) if basis else ExactMatrix.zeros(M.field, 0, M.cols)


def left_kernel_matrix(M: ExactMatrix) -> ExactMatrix:
    """Rows u with u M = 0."""
    return kernel_matrix(M.transpose())


def row_space_intersection(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    """RREF basis of rowspace(A) ∩ rowspace(B)."""
    _same(A, B)
    if A.cols != B.cols:
        raise ValueError("column mismatch")
    F = A.field
    Ra = rref(A)[0]
    Rb = rref(B)[0]
    if Ra.rows == 0 or Rb.rows == 0:
        return ExactMatrix.zeros(F, 0, A.cols)
    K = left_kernel_matrix(Ra.vstack(Rb))
    if K.rows == 0:
        return ExactMatrix.zeros(F, 0, A.cols)
    U = K.take_columns(range(Ra.rows))
    return rref(U @ Ra)[0]


def solve(M: ExactMatrix, b):
    """Some x with M x = b, or None when the system is inconsistent."""
    F = M.field
    aug = M.hstack(ExactMatrix.from_rows(F, [[v] for v in b], 1))
    R, _, piv = rref(aug)
    if piv and piv[-1] == M.cols:
        return None
    x = [F.zero] * M.cols
    rows = R.tolist()
    for r, pc in enumerate(piv):
        x[pc] = rows[r][M.cols]
    return x


def reduce_rows(V: ExactMatrix, R: ExactMatrix, pivots) -> ExactMatrix:
    """Reduce the rows of V modulo the RREF rows R (pivot entries of the result vanish)."""
    if R.rows == 0 or V.rows == 0:
        return V.copy()
    F = V.field
    if _is_np(F):
        coeff = V.data[:, pivots]
        return ExactMatrix(F, (V.data - _np_matmul(coeff, R.data, F.p)) % F.p, V.rows, V.cols)
    rrows = R.data
    out = []
    sub, mul, is_zero = F.sub, F.mul, F.is_zero
    for v in V.data:
        v = list(v)
        for r, pc in enumerate(pivots):
            f = v[pc]
            if not is_zero(f):
                v = [sub(a, mul(f, b)) for a, b in zip(v, rrows[r])]
        out.append(v)
    return ExactMatrix(F, out, V.rows, V.cols)
