"""Exact scalars: rationals and cyclotomic field elements.

Scalars in the engine are duck-typed: plain ``fractions.Fraction`` wherever a
value is rational, and :class:`Cyc` only when it is genuinely irrational
(sqrt(2), roots of unity).  Arithmetic between the two kinds promotes
automatically, and Cyc results that reduce to a rational collapse back to
Fraction, so rational-only pipelines run at native Fraction speed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# dense polynomial helpers over Fraction (low-to-high coefficient lists)
# ---------------------------------------------------------------------------

def _poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(num, den):
    num = list(num)
    out = [_ZERO] * (max(len(num) - len(den) + 1, 0))
    inv_lead = 1 / Fraction(den[-1])
    for i in range(len(num) - len(den), -1, -1):
        q = num[i + len(den) - 1] * inv_lead
        if q:
            out[i] = q
            for j, d in enumerate(den):
                num[i + j] -= q * d
    return _poly_trim(out), _poly_trim(num[: len(den) - 1])


def _poly_xgcd(a, b):
    # returns (g, u) with u*a = g mod b and g constant (b irreducible, a != 0)
    r0, r1 = list(b), list(a)
    s0, s1 = [], [_ONE]
    while _poly_trim(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        new_s = list(s0)
        for i, qc in enumerate(q):
            if qc:
                for j, sc in enumerate(s1):
                    k = i + j
                    while len(new_s) <= k:
                        new_s.append(_ZERO)
                    new_s[k] -= qc * sc
        s0, s1 = s1, _poly_trim(new_s)
    return r0, s0


_PHI_CACHE: dict[int, list[Fraction]] = {}


def cyclotomic_polynomial(N: int) -> list[Fraction]:
    """Dense coefficients of Phi_N, computed by dividing x^N - 1 by all
    Phi_d for proper divisors d."""
    if N in _PHI_CACHE:
        return _PHI_CACHE[N]
    p = [-_ONE] + [_ZERO] * (N - 1) + [_ONE]
    for d in range(1, N):
        if N % d == 0:
            p, rem = _poly_divmod(p, cyclotomic_polynomial(d))
            if rem:
                raise AssertionError("cyclotomic division left a remainder")
    _PHI_CACHE[N] = p
    return p


def euler_phi(N: int) -> int:
    return len(cyclotomic_polynomial(N)) - 1


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------

def _reduce_coeffs(N: int, coeffs) -> dict[int, Fraction]:
    """Canonical representative mod Phi_N: exponents mod N, then polynomial
    remainder mod Phi_N, zero coefficients dropped."""
    dense = [_ZERO] * N
    for e, v in coeffs.items():
        if v:
            dense[e % N] += Fraction(v)
    deg = euler_phi(N)
    if any(dense[deg:]):
        _, dense = _poly_divmod(dense, cyclotomic_polynomial(N))
    return {e: v for e, v in enumerate(dense) if v}


class Cyc:
    """Element of Q(zeta_N) in canonical reduced form.

    Immutable.  ``c`` maps exponents e in [0, phi(N)) to Fraction, empty map
    is zero; purely rational values always carry N == 1.  Not hashable: equal
    values may live at different conductors.
    """

    __slots__ = ("N", "c")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, N: int, coeffs, _canonical: bool = False):
        if N < 1:
            raise ValueError("conductor must be >= 1")
        c = dict(coeffs) if _canonical else _reduce_coeffs(N, coeffs)
        if set(c) <= {0}:
            N = 1
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "c", c)

    def __setattr__(self, *a):
        raise AttributeError("Cyc is immutable")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_rational(q) -> "Cyc":
        q = Fraction(q)
        return Cyc(1, {0: q} if q else {}, _canonical=True)

    def promote(self, M: int) -> "Cyc":
        """Re-express in Q(zeta_M); requires N | M."""
        if M % self.N:
            raise ValueError(f"cannot promote conductor {self.N} to {M}")
        k = M // self.N
        return Cyc(M, {e * k: v for e, v in self.c.items()})

    def demote(self, M: int) -> "Cyc":
        """Re-express in Q(zeta_M) for M | N; raises ValueError if the value
        does not lie in the subfield."""
        if self.N % M:
            raise ValueError(f"{M} does not divide conductor {self.N}")
        k = self.N // M
        degm = euler_phi(M)
        # columns: zeta_N^(k*t) reduced, t = 0..phi(M)-1
        cols = [_reduce_coeffs(self.N, {k * t: _ONE}) for t in range(degm)]
        rows = sorted({e for col in cols for e in col} | set(self.c))
        mat = [[col.get(e, _ZERO) for col in cols] + [self.c.get(e, _ZERO)]
               for e in rows]
        sol = _solve_small(mat, degm)
        if sol is None:
            raise ValueError("value is not in the requested subfield")
        return Cyc(M, {t: sol[t] for t in range(degm)})

    # -- predicates ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.c)

    def is_rational(self) -> bool:
        return self.N == 1

    def rational_value(self) -> Fraction:
        if self.N != 1:
            raise ValueError("not a rational value")
        return self.c.get(0, _ZERO)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, Cyc):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyc.from_rational(x)
        return None

    def _common(self, other):
        M = lcm(self.N, other.N)
        return M, self.promote(M), other.promote(M)

    def __add__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        M, a, b = self._common(other)
        c = dict(a.c)
        for e, v in b.c.items():
            w = c.get(e, _ZERO) + v
            if w:
                c[e] = w
            else:
                c.pop(e, None)
        return _collapse(Cyc(M, c, _canonical=True))

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.N, {e: -v for e, v in self.c.items()}, _canonical=True)

    def __sub__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        return other.__add__(-self)

    def __mul__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        if other.N == 1:
            q = other.c.get(0, _ZERO)
            if not q:
                return _ZERO
            return _collapse(Cyc(self.N, {e: v * q for e, v in self.c.items()},
                                 _canonical=True))
        if self.N == 1:
            return other.__mul__(self)
        M, a, b = self._common(other)
        c: dict[int, Fraction] = {}
        for e1, v1 in a.c.items():
            for e2, v2 in b.c.items():
                e = e1 + e2
                c[e] = c.get(e, _ZERO) + v1 * v2
        return _collapse(Cyc(M, c))

    __rmul__ = __mul__

    def inv(self) -> "Cyc | Fraction":
        if not self.c:
            raise ZeroDivisionError("cyclotomic division by zero")
        if self.N == 1:
            return _collapse(Cyc.from_rational(1 / self.c[0]))
        deg = max(self.c)
        dense = [self.c.get(e, _ZERO) for e in range(deg + 1)]
        g, u = _poly_xgcd(dense, cyclotomic_polynomial(self.N))
        if len(g) != 1:
            raise AssertionError("Phi_N not coprime to a nonzero element")
        scale = 1 / g[0]
        return _collapse(Cyc(self.N, {e: v * scale for e, v in enumerate(u)}))

    def __truediv__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        return self.__mul__(other.inv())

    def __rtruediv__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        return other.__mul__(self.inv())

    def __pow__(self, n: int):
        if n < 0:
            base, n = cyc_inv(self), -n
        else:
            base = self
        out = _ONE
        for _ in range(n):
            out = base * out
        return out

    def conj(self) -> "Cyc":
        """Complex conjugation zeta -> zeta^-1."""
        return Cyc(self.N, {-e % self.N: v for e, v in self.c.items()})

    # -- comparison / display --------------------------------------------------

    def __eq__(self, other):
        other = Cyc._coerce(other)
        if other is None:
            return NotImplemented
        if self.N == other.N:
            return self.c == other.c
        M, a, b = self._common(other)
        return a.c == b.c

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            if e == 0:
                parts.append(str(v))
            elif v == 1:
                parts.append(f"z{self.N}^{e}")
            else:
                parts.append(f"{v}*z{self.N}^{e}")
        return " + ".join(parts)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"N": self.N,
                "c": {str(e): [str(v.numerator), str(v.denominator)]
                      for e, v in sorted(self.c.items())}}

    @staticmethod
    def from_json(obj: dict) -> "Cyc":
        return Cyc(obj["N"], {int(e): Fraction(int(nd[0]), int(nd[1]))
                              for e, nd in obj["c"].items()})


def _solve_small(aug, ncols):
    """Tiny exact solver for an augmented matrix (list of rows, last column is
    the target); returns the solution or None if inconsistent."""
    rows = [list(r) for r in aug]
    piv = []
    r = 0
    for col in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if k is None:
            piv.append(None)
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(r)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1]:
            return None
    sol = []
    for col in range(ncols):
        sol.append(rows[piv[col]][-1] if piv[col] is not None else _ZERO)
    return sol


def _collapse(x: Cyc):
    """Cyc -> Fraction when the canonical value is rational."""
    if x.N == 1:
        return x.c.get(0, _ZERO)
    return x


# ---------------------------------------------------------------------------
# public constructors / spec operations
# ---------------------------------------------------------------------------

def cyc_make(N: int, coeffs) -> Cyc:
    """Canonical element of Q(zeta_N) from an exponent -> rational map."""
    return Cyc(N, {int(e): Fraction(v) for e, v in coeffs.items()})


def cyc_arith(a, b, op: str):
    """add | sub | mul on scalars, always returning a Cyc."""
    a, b = as_cyc(a), as_cyc(b)
    if op == "add":
        r = a + b
    elif op == "sub":
        r = a - b
    elif op == "mul":
        r = a * b
    else:
        raise ValueError(f"unknown op {op!r}")
    return as_cyc(r)


def cyc_inv(a):
    """Multiplicative inverse, always returning a Cyc."""
    return as_cyc(as_cyc(a).inv())


def zeta(N: int, e: int = 1):
    """zeta_N^e as a scalar (collapses to Fraction for N <= 2)."""
    return _collapse(Cyc(N, {e: _ONE}))


def sqrt2():
    """sqrt(2) = zeta_8 + zeta_8^-1; its square is exactly 2."""
    return Cyc(8, {1: _ONE, 7: _ONE})


def epsilon3():
    """Primitive cube root of unity."""
    return Cyc(3, {1: _ONE})


# ---------------------------------------------------------------------------
# duck-typed helpers shared by the rest of the engine
# ---------------------------------------------------------------------------

def as_cyc(x) -> Cyc:
    if isinstance(x, Cyc):
        return x
    return Cyc.from_rational(x)


def sc_conj(x):
    """Conjugate of a duck scalar (identity on rationals)."""
    if isinstance(x, Cyc):
        return _collapse(x.conj())
    return x


def snap(x):
    """Integral Fractions collapse to plain int (fast dict arithmetic in the
    module engine; never divide snapped scalars directly)."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def sc_inv(x):
    if isinstance(x, Cyc):
        return x.inv()
    return 1 / Fraction(x)


def scalar_to_json(x) -> dict:
    return as_cyc(x).to_json()


def scalar_from_json(obj: dict):
    return _collapse(Cyc.from_json(obj))


def scalar_repr(x) -> str:
    return repr(x) if isinstance(x, Cyc) else str(Fraction(x))
