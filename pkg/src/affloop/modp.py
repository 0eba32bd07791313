"""Mod-p linear algebra used to certify dimensions of large graded blocks.

A dimension claim is never taken from a single mod-p computation: ranks over
F_p are exact lower bounds for ranks over the ground field (the reduction is
a ring homomorphism on p-integral scalars), and the engine only reports a
dimension as exact when an independent exact upper bound pins it to the same
value (see fields.py verifiers).  Primes are chosen deterministically with
p = 1 mod N so every cyclotomic scalar of conductor dividing N reduces.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .scalars import Cyc

# products inside a matmul accumulate n*(p-1)^2 < 2^63; with p < 2^25 this
# allows blocks up to ~8000 columns, far above anything materialized here.
_PRIME_FLOOR = 1 << 24
MAX_BLOCK = 8000


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pick_prime(N: int, index: int = 0) -> int:
    """The (index+1)-th prime p >= 2^24 with p = 1 mod N."""
    p = _PRIME_FLOOR - (_PRIME_FLOOR - 1) % N + N
    found = 0
    while True:
        if _is_prime(p):
            if found == index:
                return p
            found += 1
        p += N
    raise AssertionError


def _primitive_root(p: int) -> int:
    n = p - 1
    fac = []
    m, q = n, 2
    while q * q <= m:
        if m % q == 0:
            fac.append(q)
            while m % q == 0:
                m //= q
        q += 1
    if m > 1:
        fac.append(m)
    for g in range(2, p):
        if all(pow(g, n // q, p) != 1 for q in fac):
            return g
    raise AssertionError


class ModMap:
    """Reduction of duck scalars (Fraction | Cyc of conductor dividing N)
    to F_p, p = 1 mod N."""

    def __init__(self, N: int, p: int | None = None, index: int = 0):
        self.N = N
        self.p = p if p is not None else pick_prime(N, index)
        if (self.p - 1) % N:
            raise ValueError("prime incompatible with conductor")
        g = _primitive_root(self.p)
        self.w = pow(g, (self.p - 1) // N, self.p)

    def __call__(self, x) -> int:
        p = self.p
        if isinstance(x, Cyc):
            if self.N % x.N:
                raise ValueError(f"conductor {x.N} does not divide {self.N}")
            k = self.N // x.N
            total = 0
            for e, v in x.c.items():
                total += pow(self.w, e * k, p) * (
                    v.numerator * pow(v.denominator, p - 2, p))
            return total % p
        x = Fraction(x)
        return x.numerator * pow(x.denominator, p - 2, p) % p

    def vector(self, vec: dict, index: dict) -> np.ndarray:
        """Sparse dict -> dense int64 row using a key -> column map."""
        out = np.zeros(len(index), dtype=np.int64)
        for k, v in vec.items():
            out[index[k]] = self(v)
        return out


class ModpSpace:
    """Incremental row echelon over F_p on numpy rows."""

    def __init__(self, ncols: int, p: int):
        # row elimination only forms pairwise products, safe at any width;
        # the MAX_BLOCK guard matters for matmul contractions only
        self.ncols = ncols
        self.p = p
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        p = self.p
        v = np.mod(vec, p)
        for piv, row in zip(self.pivots, self.rows):
            f = v[piv]
            if f:
                v = (v - f * row) % p
        return v

    def add(self, vec: np.ndarray) -> bool:
        v = self.reduce(vec)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        piv = int(nz[0])
        inv = pow(int(v[piv]), self.p - 2, self.p)
        row = (v * inv) % self.p
        # keep stored rows fully reduced against each other
        for i, (pv, rw) in enumerate(zip(self.pivots, self.rows)):
            f = rw[piv]
            if f:
                self.rows[i] = (rw - f * row) % self.p
        self.pivots.append(piv)
        self.rows.append(row)
        return True

    def add_matrix(self, mat: np.ndarray) -> int:
        added = 0
        for r in np.atleast_2d(mat):
            if self.add(r):
                added += 1
        return added


def rank_mod_pivots(mat: np.ndarray, p: int):
    """(rank, pivot_columns) over F_p by in-place elimination."""
    a = np.mod(np.array(mat, dtype=np.int64, copy=True), p)
    nrows, ncols = a.shape
    rank = 0
    pivots = []
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if a[r, col]:
                piv = r
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        mask = np.nonzero(a[rank + 1:, col])[0]
        if mask.size:
            rows = rank + 1 + mask
            a[rows] = (a[rows] - np.outer(a[rows, col], a[rank])) % p
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots


def rank_mod(mat: np.ndarray, p: int) -> int:
    """Rank over F_p by in-place elimination (mat is consumed)."""
    return rank_mod_pivots(mat, p)[0]


def nullity_mod(mat: np.ndarray, p: int) -> int:
    a = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    return a.shape[1] - rank_mod(a, p)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] > MAX_BLOCK:
        raise ValueError("contracted dimension too wide for int64 safety")
    return np.mod(a @ b, p)
