"""Exact dense/sparse linear algebra over duck scalars (Fraction | Cyc).

Deterministic throughout: pivots are always the first nonzero entry in a
fixed key order.  Used for desk-scale solves (eigenspaces, R-space
coordinates, membership witnesses); large graded blocks go through the
mod-p layer in :mod:`affloop.modp` instead.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import sc_inv

_ZERO = Fraction(0)


class SparseRowSpace:
    """Incremental row-echelon span of sparse vectors (dicts key -> scalar).

    Keys must be mutually comparable; rows are normalized to pivot 1.  With
    ``track=True`` every stored row remembers its expansion over the
    originally inserted vectors, so exact membership witnesses can be
    recovered.
    """

    def __init__(self, track: bool = False):
        self.pivots: list = []
        self.rows: list[dict] = []
        self.track = track
        self.history: list[dict] = []
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _eliminate(self, vec: dict):
        vec = dict(vec)
        coords: dict[int, object] = {}
        for idx, (piv, row) in enumerate(zip(self.pivots, self.rows)):
            f = vec.get(piv)
            if f:
                for k, v in row.items():
                    w = vec.get(k, _ZERO) - f * v
                    if w:
                        vec[k] = w
                    else:
                        vec.pop(k, None)
                if self.track:
                    for j, c in self.history[idx].items():
                        coords[j] = coords.get(j, _ZERO) + f * c
        return vec, coords

    def reduce(self, vec: dict):
        """Residual of ``vec`` against the current span (and, when tracking,
        its coordinates over the inserted vectors)."""
        return self._eliminate(vec)

    def add(self, vec: dict):
        """Insert a vector.  Returns None if dependent, else the insertion
        index."""
        res, coords = self._eliminate(vec)
        idx = self.n_inserted
        self.n_inserted += 1
        if not res:
            return None
        piv = min(res)
        inv = sc_inv(res[piv])
        row = {k: v * inv for k, v in res.items()}
        if self.track:
            # res = vec - sum_i coords[i] * orig_i, so row = inv * res
            expansion = {idx: inv}
            for j, c in coords.items():
                expansion[j] = expansion.get(j, _ZERO) - inv * c
            self.history.append(expansion)
        self.pivots.append(piv)
        self.rows.append(row)
        return idx

    def coords_of(self, vec: dict):
        """Expansion of ``vec`` over the inserted vectors, or None if it is
        outside the span (requires track=True)."""
        if not self.track:
            raise ValueError("row space built without coordinate tracking")
        res, coords = self._eliminate(vec)
        if res:
            return None
        return {j: c for j, c in coords.items() if c}


def rref_dense(mat):
    """Reduced row-echelon form of a dense matrix (list of row lists).
    Returns (rows, pivot_columns)."""
    rows = [list(r) for r in mat]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = sc_inv(rows[r][col])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank_dense(mat) -> int:
    return len(rref_dense(mat)[0])


def nullspace_dense(mat, ncols: int):
    """Basis of the right kernel of a dense matrix, as dense lists."""
    rows, pivots = rref_dense(mat) if mat else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [_ZERO] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def solve_dense(mat, rhs):
    """One exact solution of A x = b (dense), or None if inconsistent."""
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    rows, pivots = rref_dense(aug)
    n = len(mat[0]) if mat else 0
    if n in pivots:
        return None
    sol = [_ZERO] * n
    for r, pc in enumerate(pivots):
        sol[pc] = rows[r][n]
    return sol


def invert_dense(mat):
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    rows, pivots = rref_dense(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in rows]


def primitive_integer_kernel(mat, ncols: int):
    """The kernel of an integer matrix, required 1-dimensional, scaled to a
    primitive integer vector with positive entries."""
    basis = nullspace_dense(mat, ncols)
    if len(basis) != 1:
        raise ValueError(f"kernel dimension {len(basis)}, expected 1")
    vec = [Fraction(x) for x in basis[0]]
    from math import gcd, lcm as _lcm
    denom = 1
    for x in vec:
        denom = _lcm(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    if any(x < 0 for x in ints):
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise ValueError("kernel vector is not sign-definite")
    return ints
