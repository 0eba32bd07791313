"""The twisted affine algebra: elements, the exact bracket with central
term, canonical generators e_j, f_j, h_j, and the triangular decomposition.

Terms are kept over the realization's sigma-eigenbasis with degrees m in
(1/T)Z stored as integer numerators q = m*T; a term (q, b) requires the
class of eigenvector b to equal q mod T.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import scalar_repr
from .twist import TwistRealization


class GradingError(ValueError):
    """Term incompatible with the sigma-gradation."""


class AffineElement:
    """Finite sum of eigenbasis terms b (x) t^{q/T} plus central and
    derivation parts.  Immutable by convention."""

    __slots__ = ("real", "terms", "c", "d")

    def __init__(self, real: TwistRealization, terms=None, c=0, d=0):
        self.real = real
        clean = {}
        for (q, b), v in (terms or {}).items():
            if not v:
                continue
            if real.eig_class[b] != q % real.T:
                raise GradingError(
                    f"term ({q}, {b}): class {real.eig_class[b]} != "
                    f"{q} mod {real.T}")
            clean[(q, b)] = v
        self.terms = clean
        self.c = c
        self.d = d

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_finite(real, elem: dict, q: int) -> "AffineElement":
        """A finite algebra element placed at degree q/T (must be
        sigma-homogeneous of class q mod T)."""
        eig = real.to_eigen(elem)
        return AffineElement(real, {(q, b): v for b, v in eig.items()})

    @staticmethod
    def central(real, coeff=1) -> "AffineElement":
        return AffineElement(real, {}, c=coeff)

    @staticmethod
    def derivation(real, coeff=1) -> "AffineElement":
        return AffineElement(real, {}, d=coeff)

    # -- arithmetic -------------------------------------------------------------

    def add(self, other: "AffineElement", scale=1) -> "AffineElement":
        terms = dict(self.terms)
        for k, v in other.terms.items():
            w = terms.get(k, 0) + scale * v
            if w:
                terms[k] = w
            else:
                terms.pop(k, None)
        return AffineElement(self.real, terms, self.c + scale * other.c,
                             self.d + scale * other.d)

    def scale(self, s) -> "AffineElement":
        if not s:
            return AffineElement(self.real)
        return AffineElement(self.real,
                             {k: s * v for k, v in self.terms.items()},
                             s * self.c, s * self.d)

    def __eq__(self, other):
        return (isinstance(other, AffineElement) and self.terms == other.terms
                and self.c == other.c and self.d == other.d)

    def is_zero(self) -> bool:
        return not self.terms and not self.c and not self.d

    def __repr__(self):
        return self.text_form()

    def text_form(self) -> str:
        T = self.real.T
        parts = []
        for (q, b), v in sorted(self.terms.items()):
            parts.append(f"({scalar_repr(v)})*e{b}@{q}/{T}")
        if self.c:
            parts.append(f"({scalar_repr(self.c)})*c")
        if self.d:
            parts.append(f"({scalar_repr(self.d)})*d")
        return " + ".join(parts) if parts else "0"


def affine_bracket(a: AffineElement, b: AffineElement) -> AffineElement:
    """[x (x) t^m, y (x) t^n] = [x,y] (x) t^{m+n} + m delta_{m+n,0} <x,y> c,
    with c central and [d, x (x) t^m] = m x (x) t^m."""
    if a.real is not b.real:
        raise ValueError("elements over different realizations")
    real = a.real
    T = real.T
    terms: dict = {}
    c_out = 0

    def put(key, val):
        if not val:
            return
        w = terms.get(key, 0) + val
        if w:
            terms[key] = w
        else:
            terms.pop(key, None)

    for (q1, b1), v1 in a.terms.items():
        for (q2, b2), v2 in b.terms.items():
            coeff = v1 * v2
            for k, s in real.eig_bracket_pair(b1, b2).items():
                put((q1 + q2, k), coeff * s)
            if q1 + q2 == 0:
                f = real.eig_form.get((b1, b2))
                if f:
                    c_out = c_out + Fraction(q1, T) * f * coeff
    if a.d:
        for (q2, b2), v2 in b.terms.items():
            put((q2, b2), a.d * Fraction(q2, T) * v2)
    if b.d:
        for (q1, b1), v1 in a.terms.items():
            put((q1, b1), -b.d * Fraction(q1, T) * v1)
    return AffineElement(real, terms, c=c_out)


class AffineGenerators:
    """Canonical generators e_j, f_j, h_j (Eq-style: e_j = E_j (x) t^{s_j/T},
    h_j = H_j + (2 s_j / (T <beta_j, beta_j>)) c) plus d."""

    def __init__(self, real: TwistRealization):
        self.real = real
        self.e, self.f, self.h = [], [], []
        for j in range(real.ell + 1):
            sj = real.s[j]
            self.e.append(AffineElement.from_finite(real, real.gens.E[j], sj))
            self.f.append(AffineElement.from_finite(real, real.gens.F[j], -sj))
            hj = AffineElement.from_finite(real, real.gens.H[j], 0)
            cc = Fraction(2 * sj) / (real.T * real.beta_norms[j])
            self.h.append(hj.add(AffineElement.central(real, cc)))
        self.d = AffineElement.derivation(real)


def affine_generators(real: TwistRealization) -> AffineGenerators:
    return AffineGenerators(real)


def nu_degree(a: AffineElement) -> dict:
    """Multiset of degrees q/T carried by the element's terms."""
    out: dict = {}
    for (q, _b), _v in a.terms.items():
        key = Fraction(q, a.real.T)
        out[key] = out.get(key, 0) + 1
    return out


def triangular_part(a: AffineElement) -> dict:
    """Split into n_-, Cartan (t_[0](0) + Cc + Cd) and n_+ pieces."""
    real = a.real
    neg, cart, pos = {}, {}, {}
    for (q, b), v in a.terms.items():
        if q > 0:
            pos[(q, b)] = v
        elif q < 0:
            neg[(q, b)] = v
        else:
            sign = real.eig_sign[b]
            if sign > 0:
                pos[(q, b)] = v
            elif sign < 0:
                neg[(q, b)] = v
            else:
                cart[(q, b)] = v
    return {
        "neg": AffineElement(real, neg),
        "cartan": AffineElement(real, cart, c=a.c, d=a.d),
        "pos": AffineElement(real, pos),
    }
