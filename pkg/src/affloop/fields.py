"""Annihilating fields: the space R = U(g) x_theta(-1)^{k+1} 1, loop-module
operators r_n on twisted modules, the Delta(h,z) deformation, and the
executable verifiers behind the theorem-level acceptance checks.

Mode indices n in (1/T)Z are stored as integer numerators nq = n*T.  With
the convention Y(r, z) = sum r_n z^{-n-1}, the coefficient of the nfac-th
power field of a homogeneous element a collects the ordered products
a(m_1)...a(m_nfac) with sum m_i = n - (nfac - 1); the factors commute for
a = x_theta, so multisets with multinomial counts suffice.  A coefficient
r_n of conformal weight w maps depth p to p - (n - w + 1).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np

from .linalg import SparseRowSpace
from .modp import ModMap, ModpSpace, rank_mod
from .modules import HWModule, in_radical_exact
from .scalars import as_cyc, sc_conj, zeta
from .twist import TwistRealization


def _merge(out: dict, key, val):
    w = out.get(key, 0) + val
    if w:
        out[key] = w
    else:
        out.pop(key, None)


def _merge_scaled(out: dict, vec: dict, scale):
    if not scale:
        return
    get = out.get
    if scale == 1:
        for k, v in vec.items():
            w = get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    else:
        for k, v in vec.items():
            w = get(k, 0) + scale * v
            if w:
                out[k] = w
            else:
                out.pop(k, None)


class RSpace:
    """R = U(g) x_theta(-1)^{k+1} 1 inside the untwisted vacuum
    N(k Lambda_0), with recorded generation paths.

    Generation applies sigma-homogeneous eigenvectors of the twisted
    realization, so every basis vector carries a definite sigma-class.
    paths[i] is None for the highest vector, else (parent_index, eig_b).
    With trivial=True the space is C.1 (the counterexample of Theorem
    2.1(ii): a one-dimensional trivial g-module)."""

    def __init__(self, twisted: TwistRealization, k: int,
                 trivial: bool = False):
        if k < 1:
            raise ValueError("level must be a positive integer")
        self.twisted = twisted
        self.k = k
        comp = twisted.untwisted_companion()
        self.comp = comp
        self.vac = HWModule(comp, "vacuum", level=k, depth_q=k + 2)
        self.trivial = trivial
        self.conformal_weight = 0 if trivial else k + 1

        # twisted eigenvector b as degree-0 action terms on the vacuum
        self._deg0_terms = {}
        for b in range(twisted.n_eig):
            eig = comp.to_eigen(twisted.eig_vectors[b])
            self._deg0_terms[b] = [((0, t), v) for t, v in eig.items()]

        hw = self.vac.highest_weight_vector()
        if trivial:
            vec = dict(hw)
        else:
            th = comp.theta_eig
            vec = dict(hw)
            for _ in range(k + 1):
                vec = self.vac.act_terms([((-1, th), 1)], vec)
        hw_class = (self.conformal_weight *
                    twisted.eig_class[twisted.theta_eig]) % twisted.T
        self.space = SparseRowSpace(track=True)
        self.vectors = [vec]
        self.paths = [None]
        self.classes = [hw_class]
        self._ins2basis = {self.space.add(vec): 0}

        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for b in range(twisted.n_eig):
                    img = self.vac.act_terms(self._deg0_terms[b],
                                             self.vectors[i])
                    if not img:
                        continue
                    ins = self.space.add(img)
                    if ins is not None:
                        self.vectors.append(img)
                        self.paths.append((i, b))
                        self.classes.append(
                            (self.classes[i] + twisted.eig_class[b])
                            % twisted.T)
                        self._ins2basis[ins] = len(self.vectors) - 1
                        nxt.append(len(self.vectors) - 1)
            frontier = nxt
        self.dim = len(self.vectors)

    def coords(self, vec: dict):
        """Exact coordinates over the R-basis, or None if outside R."""
        raw = self.space.coords_of(vec)
        if raw is None:
            return None
        return {self._ins2basis[j]: c for j, c in raw.items()}

    def act0_coords(self, b: int, i: int) -> dict:
        """Coordinates of x_b(0) . r_i over the R-basis."""
        img = self.vac.act_terms(self._deg0_terms[b], self.vectors[i])
        if not img:
            return {}
        out = self.coords(img)
        if out is None:
            raise AssertionError("g(0) image left R")
        return out

    def sigma_on_vacuum(self, vec: dict) -> dict:
        """The twisted automorphism acting on vacuum vectors (applied factor
        by factor, re-straightened exactly)."""
        tw, comp, vac = self.twisted, self.comp, self.vac
        out: dict = {}
        for mono, c in vec.items():
            acc = {(): c}
            for (q, t) in reversed(mono):
                base_idx = next(iter(comp.eig_vectors[t]))
                img = tw.sigma.image_of_basis(base_idx)
                step: dict = {}
                for tgt_idx, s in img.items():
                    for t2, cc in comp.to_eigen({tgt_idx: 1}).items():
                        scale = s * cc
                        for m0, c0 in acc.items():
                            for m1, c1 in vac.act_symbol((q, t2),
                                                         m0).items():
                                _merge(step, m1, c0 * c1 * scale)
                acc = step
            _merge_scaled(out, acc, 1)
        return out

    def verify_sigma_homogeneous(self) -> bool:
        """Each basis vector satisfies sigma(r) = eta^class r exactly."""
        tw = self.twisted
        for i, vec in enumerate(self.vectors):
            img = self.sigma_on_vacuum(vec)
            scale = as_cyc(zeta(tw.T, self.classes[i])) if tw.T > 1 \
                else Fraction(1)
            want = {m: scale * v for m, v in vec.items()}
            if img != want:
                raise AssertionError(
                    f"R basis vector {i} not sigma-homogeneous")
        return True


class LoopOps:
    """Coefficients r_n of annihilating fields on a twisted highest-weight
    module M, generated from the power-field coefficients of x_theta by the
    commutator recursion [x(m), r_n] = (x(0) r)_{m+n}."""

    def __init__(self, R: RSpace, M: HWModule):
        self.R = R
        self.M = M
        self.tw = R.twisted
        self.T = self.tw.T
        self._apply_memo: dict = {}

    def depth_shift_q(self, nq: int) -> int:
        """r_n maps depth p to p - shift, in q-units."""
        return nq - (self.R.conformal_weight - 1) * self.T

    def valid_index(self, i: int, nq: int) -> bool:
        return (nq - self.R.classes[i]) % self.T == 0

    # -- power-field coefficients ------------------------------------------------

    def _power_total_q(self, nfac: int, nq: int) -> int:
        return nq - (nfac - 1) * self.T

    def _power_multisets(self, cls: int, nfac: int, total_q: int,
                         u_depth: int):
        """Multisets (q_1 <= ... <= q_nfac), q_i = cls mod T, sum = total_q,
        with multinomial counts.  u_depth is the depth of the vector the
        product acts on: any factor with q > u_depth kills it, which bounds
        the enumeration both ways."""
        hi = u_depth
        lo = total_q - (nfac - 1) * hi if nfac else 0
        q0 = lo + ((cls - lo) % self.T) if nfac else 0
        out = []

        def rec(rest, minq, acc, ssum):
            if rest == 0:
                if ssum == total_q:
                    out.append(tuple(acc))
                return
            q = minq
            while q <= hi:
                if ssum + q * rest > total_q:
                    break
                rec(rest - 1, q, acc + [q], ssum + q)
                q += self.T

        rec(nfac, q0, [], 0)
        result = []
        for tup in out:
            mult = factorial(nfac)
            cnt: dict = {}
            for q in tup:
                cnt[q] = cnt.get(q, 0) + 1
            for m in cnt.values():
                mult //= factorial(m)
            result.append((tup, mult))
        return result

    def power_apply(self, eig_idx: int, nfac: int, nq: int,
                    vec: dict) -> dict:
        """Coefficient at z^{-n-1} of the nfac-th power field of the (single
        eigenvector) element, applied to a module vector; the factors must
        commute."""
        M = self.M
        cls = self.tw.eig_class[eig_idx]
        total_q = self._power_total_q(nfac, nq)
        out: dict = {}
        for mono, cv in vec.items():
            if not cv:
                continue
            u_depth = -sum(q for q, _ in mono)
            if u_depth - total_q < 0:
                continue
            for tup, mult in self._power_multisets(cls, nfac, total_q,
                                                   u_depth):
                cur = {mono: mult * cv}
                for q in sorted(tup, reverse=True):
                    cur = M.act_terms([((q, eig_idx), 1)], cur)
                    if not cur:
                        break
                _merge_scaled(out, cur, 1)
        return out

    # -- general r via generation paths ----------------------------------------------

    def m_choice(self, b: int) -> int:
        """Deterministic recursion mode for x_b: smallest-magnitude valid
        numerator."""
        cls = self.tw.eig_class[b]
        return cls if 2 * cls <= self.T else cls - self.T

    def apply(self, i: int, nq: int, vec: dict, m_offsets=None) -> dict:
        """r_n applied to an exact module vector (r = i-th R-basis element).
        m_offsets, when given, maps path position -> extra multiple of T for
        the recursion mode (path-independence testing)."""
        if not self.valid_index(i, nq):
            return {}
        out: dict = {}
        for mono, cv in vec.items():
            vecpart = self._apply_mono(i, nq, mono, m_offsets)
            _merge_scaled(out, vecpart, cv)
        return out

    def _apply_mono(self, i: int, nq: int, mono, m_offsets=None) -> dict:
        key = (i, nq, mono, m_offsets)
        hit = self._apply_memo.get(key)
        if hit is not None:
            return hit
        path = self.R.paths[i]
        if path is None:
            out = self.power_apply(self.tw.theta_eig,
                                   self.R.conformal_weight, nq, {mono: 1})
        else:
            parent, b = path
            depth_i = self._path_depth(i)
            mq = self.m_choice(b)
            if m_offsets is not None:
                mq += self.T * m_offsets.get(depth_i, 0)
            xterms = [((mq, b), 1)]
            out = {}
            # (x(0) r')_{n} = [x(m), r'_{n-m}]
            inner = self._apply_mono(parent, nq - mq, mono, m_offsets)
            for m2, c2 in self.M.act_terms(xterms, inner).items():
                _merge(out, m2, c2)
            for m1, c1 in self.M.act_terms(xterms, {mono: 1}).items():
                inner2 = self._apply_mono(parent, nq - mq, m1, m_offsets)
                _merge_scaled(out, inner2, -c1)
        self._apply_memo[key] = out
        return out

    def _path_depth(self, i: int) -> int:
        d = 0
        while self.R.paths[i] is not None:
            i = self.R.paths[i][0]
            d += 1
        return d

    def apply_coords(self, coords: dict, nq: int, vec: dict) -> dict:
        """r_n for r = sum coords[i] * basis_i."""
        out: dict = {}
        for i, c in coords.items():
            _merge_scaled(out, self.apply(i, nq, vec), c)
        return out

    # -- contravariant adjoints ---------------------------------------------------------

    def adjoint_apply(self, i: int, nq: int, vec: dict) -> dict:
        """adj(r_n) with <r_n u, w> = <u, adj(r_n) w>; for the highest
        vector this is the x_{-theta} power coefficient with negated modes,
        and adj([X, P]) = [adj P, adj X] along generation paths."""
        out: dict = {}
        for mono, cv in vec.items():
            if cv:
                _merge_scaled(out, self._adjoint_mono(i, nq, mono), cv)
        return out

    def _adjoint_mono(self, i: int, nq: int, mono) -> dict:
        key = ("adj", i, nq, mono)
        hit = self._apply_memo.get(key)
        if hit is not None:
            return hit
        tw = self.tw
        path = self.R.paths[i]
        if path is None:
            nfac = self.R.conformal_weight
            total_q = self._power_total_q(nfac, nq)
            tau = tw.eig_tau[tw.theta_eig]
            (tgt, tcoef), = tau.items()
            out: dict = {}
            w_depth = -sum(q for q, _ in mono)
            u_depth = w_depth + total_q
            if u_depth >= 0:
                scale0 = 1
                for _ in range(nfac):
                    scale0 = tcoef * scale0
                for tup, mult in self._power_multisets(
                        tw.eig_class[tw.theta_eig], nfac, total_q, u_depth):
                    cur = {mono: mult * scale0}
                    for q in sorted(tup):
                        cur = self.M.act_terms([((-q, tgt), 1)], cur)
                        if not cur:
                            break
                    _merge_scaled(out, cur, 1)
        else:
            parent, b = path
            mq = self.m_choice(b)
            # eig_tau already implements the conjugate-linear transpose
            xterms = [((-mq, t), v) for t, v in tw.eig_tau[b].items()]
            out = {}
            xv = self.M.act_terms(xterms, {mono: 1})
            for m1, c1 in xv.items():
                _merge_scaled(out, self._adjoint_mono(parent, nq - mq, m1),
                              c1)
            inner = self._adjoint_mono(parent, nq - mq, mono)
            for m1, c1 in self.M.act_terms(xterms, inner).items():
                _merge(out, m1, -c1)
        self._apply_memo[key] = out
        return out

    def pairing_with_hw_image(self, i: int, nq: int, w_vec: dict):
        """<w, r_n v_Lambda> up to conjugation: the empty-monomial
        coefficient of adj(r_n) w; exact, no Gram matrix required."""
        img = self.adjoint_apply(i, nq, w_vec)
        return img.get((), 0)

    def seed_orthogonal_to_block(self, i: int, nq: int) -> bool:
        """Exact check that r_n v_Lambda is orthogonal to its whole block
        (i.e. lies in the Gram radical), via the adjoint pairing."""
        img = self.apply(i, nq, self.M.highest_weight_vector())
        if not img:
            return True
        key = self.M.vector_block(img)
        for w in self.M.block_basis(key):
            if self.pairing_with_hw_image(i, nq, {w: 1}):
                return False
        return True

    # -- mod-p operator matrices ------------------------------------------------------

    def op_matrix_modp(self, i: int, nq: int, src_key, mmap: ModMap):
        """Block matrix of r_n from a source block over F_p, built by the
        same commutator recursion at matrix level."""
        ck = (i, nq, src_key, mmap.p)
        hit = self._apply_memo.get(ck)
        if hit is not None:
            return hit
        M = self.M
        shift = self.depth_shift_q(nq)
        src = M.block_basis(src_key)
        if not self.valid_index(i, nq):
            tgt_key = src_key
            out = np.zeros((0, len(src)), dtype=np.int64)
            self._apply_memo[ck] = (tgt_key, out)
            return tgt_key, out
        path = self.R.paths[i]
        if path is None:
            nfac = self.R.conformal_weight
            wt_th = self.tw.eig_weight[self.tw.theta_eig]
            wshift = tuple(nfac * w for w in wt_th)
            tgt_key = (src_key[0] - shift,
                       tuple(a + b for a, b in zip(src_key[1], wshift)))
            tgt = M.block_basis(tgt_key)
            pos = {m: r for r, m in enumerate(tgt)}
            out = np.zeros((len(tgt), len(src)), dtype=np.int64)
            for j, mono in enumerate(src):
                for m, c in self._apply_mono(i, nq, mono).items():
                    out[pos[m], j] = mmap(c)
            self._apply_memo[ck] = (tgt_key, out)
            return tgt_key, out
        parent, b = path
        mq = self.m_choice(b)
        p = mmap.p
        Xsrc = M.op_terms_matrix_modp([((mq, b), 1)], src_key, mmap)
        mid2_key, Xs = Xsrc
        Pk1, P1 = self.op_matrix_modp(parent, nq - mq, src_key, mmap)
        Xp = M.op_terms_matrix_modp([((mq, b), 1)], Pk1, mmap)
        tgt_key, Xm = Xp
        Pk2, P2 = self.op_matrix_modp(parent, nq - mq, mid2_key, mmap)
        if P2.shape[0] and Xm.shape[0]:
            if Pk2 != tgt_key:
                raise AssertionError("block bookkeeping mismatch")
        n_tgt = len(M.block_basis(tgt_key))
        out = np.zeros((n_tgt, len(src)), dtype=np.int64)
        if Xm.shape[0] and P1.shape[0]:
            out = (out + Xm @ P1) % p
        if P2.shape[0] and Xs.shape[0]:
            out = (out - P2 @ Xs) % p
        self._apply_memo[ck] = (tgt_key, out)
        return tgt_key, out


# ---------------------------------------------------------------------------
# standalone power fields (Proposition 2.6 machinery)
# ---------------------------------------------------------------------------

def power_field_apply(M: HWModule, eig_idx: int, nfac: int, nq: int,
                      vec: dict) -> dict:
    """Coefficient of the nfac-th power of the field of a single eigenvector
    whose factors commute ([x, x] = 0 and <x, x> = 0), applied exactly."""
    real = M.real
    tw_like = real
    cls = real.eig_class[eig_idx]
    T = real.T
    total_q = nq - (nfac - 1) * T
    out: dict = {}
    for mono, cv in vec.items():
        if not cv:
            continue
        u_depth = -sum(q for q, _ in mono)
        if u_depth - total_q < 0:
            continue
        hi = u_depth
        lo = total_q - (nfac - 1) * hi if nfac else 0
        q0 = lo + ((cls - lo) % T) if nfac else 0
        tuples = []

        def rec(rest, minq, acc, ssum):
            if rest == 0:
                if ssum == total_q:
                    tuples.append(tuple(acc))
                return
            q = minq
            while q <= hi:
                if ssum + q * rest > total_q:
                    break
                rec(rest - 1, q, acc + [q], ssum + q)
                q += T

        rec(nfac, q0, [], 0)
        for tup in tuples:
            mult = factorial(nfac)
            cnt: dict = {}
            for q in tup:
                cnt[q] = cnt.get(q, 0) + 1
            for m in cnt.values():
                mult //= factorial(m)
            cur = {mono: mult * cv}
            for q in sorted(tup, reverse=True):
                cur = M.act_terms([((q, eig_idx), 1)], cur)
                if not cur:
                    break
            _merge_scaled(out, cur, 1)
    return out


def prop26_exponent(rs, root) -> int:
    """t in x_alpha(z)^{tk+1} = 0: 1 for long roots, 2 for short roots, 3
    for the short roots of G_2."""
    if rs.is_long(root):
        return 1
    return 3 if rs.label == "G2" else 2


# ---------------------------------------------------------------------------
# Eq (2.6) commutator checks
# ---------------------------------------------------------------------------

def verify_commutator_26(ops: LoopOps, b: int, i: int, mq: int, nq: int,
                         monos, xr_coords=None) -> bool:
    """Exact [x(m), r_n] u = (x(0) r)_{m+n} u over the given monomials."""
    M = ops.M
    if xr_coords is None:
        xr_coords = ops.R.act0_coords(b, i)
    sym = (mq, b)
    act = M.act_symbol
    apply_mono = ops._apply_mono
    xr_items = list(xr_coords.items())
    for mono in monos:
        diff: dict = {}
        get = diff.get
        for m1, c1 in apply_mono(i, nq, mono).items():
            for m2, c2 in act(sym, m1).items():
                w = get(m2, 0) + c1 * c2
                if w:
                    diff[m2] = w
                else:
                    del diff[m2]
        for m1, c1 in act(sym, mono).items():
            for m2, c2 in apply_mono(i, nq, m1).items():
                w = get(m2, 0) - c1 * c2
                if w:
                    diff[m2] = w
                else:
                    del diff[m2]
        for j, cj in xr_items:
            for m2, c2 in apply_mono(j, mq + nq, mono).items():
                w = get(m2, 0) - cj * c2
                if w:
                    diff[m2] = w
                else:
                    del diff[m2]
        if diff:
            return False
    return True


def _dict_to_int_matrix(cols, tgt_basis):
    """Columns of exact rational dicts -> (int64 matrix, denominator)."""
    den = 1
    for col in cols:
        for v in col.values():
            if isinstance(v, Fraction):
                den = den * v.denominator // np.gcd(den, v.denominator)
            elif isinstance(v, int):
                pass
            else:
                raise NotImplementedError("integer matrix sweep needs "
                                          "rational scalars")
    pos = {m: r for r, m in enumerate(tgt_basis)}
    out = np.zeros((len(tgt_basis), len(cols)), dtype=np.int64)
    for j, col in enumerate(cols):
        for m, v in col.items():
            out[pos[m], j] = int(v * den)
    if out.size and np.abs(out).max() > (1 << 42):
        raise OverflowError("integer sweep entries too large")
    return out, den


class Eq26Sweep:
    """Exhaustive Eq (2.6) verification as exact integer block matrices on
    the truncation window.  Only source columns whose intermediate images
    stay inside the window are compared (the spec's block-wise operator
    equality); everything compared is exact."""

    def __init__(self, real: TwistRealization, k: int, labels, depth_q: int,
                 psi_cap):
        self.real = real
        self.M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
        self.R = RSpace(real, k)
        self.ops = LoopOps(self.R, self.M)
        self.depth_q = depth_q
        self.window = self.M.window_blocks(depth_q, psi_cap)
        self.window_set = set(self.window)
        self.n_monos = sum(len(self.M.block_basis(key))
                           for key in self.window)
        # weight shift of each R-basis operator
        tw = real
        wt_theta = tw.eig_weight[tw.theta_eig]
        self.r_wt = []
        for i in range(self.R.dim):
            wt = tuple((self.R.conformal_weight) * w for w in wt_theta)
            j = i
            while self.R.paths[j] is not None:
                parent, b = self.R.paths[j]
                wt = tuple(a + c for a, c in
                           zip(wt, tw.eig_weight[b]))
                j = parent
            self.r_wt.append(wt)
        self._rmat: dict = {}
        self._xmat: dict = {}

    def r_target(self, i, nq, src_key):
        shift = self.ops.depth_shift_q(nq)
        return (src_key[0] - shift,
                tuple(a + b for a, b in zip(src_key[1], self.r_wt[i])))

    def r_matrix(self, i, nq, src_key):
        """(tgt_key, int matrix, den) of r_n restricted to a window source
        block, or None when the target leaves the window."""
        ck = (i, nq, src_key)
        if ck in self._rmat:
            return self._rmat[ck]
        tgt_key = self.r_target(i, nq, src_key)
        out = None
        if 0 <= tgt_key[0] <= self.depth_q:
            src = self.M.block_basis(src_key)
            tgt = self.M.block_basis(tgt_key)
            if not self.ops.valid_index(i, nq):
                out = (tgt_key, np.zeros((len(tgt), len(src)),
                                         dtype=np.int64), 1)
            else:
                cols = [self.ops._apply_mono(i, nq, mono) for mono in src]
                mat, den = _dict_to_int_matrix(cols, tgt)
                out = (tgt_key, mat, den)
        self._rmat[ck] = out
        return out

    def x_matrix(self, b, mq, src_key):
        ck = (b, mq, src_key)
        if ck in self._xmat:
            return self._xmat[ck]
        tgt_key = (src_key[0] - mq,
                   tuple(a + c for a, c in
                         zip(src_key[1], self.real.eig_weight[b])))
        out = None
        if 0 <= tgt_key[0] <= self.depth_q:
            src = self.M.block_basis(src_key)
            tgt = self.M.block_basis(tgt_key)
            cols = [self.M.act_symbol((mq, b), mono) for mono in src]
            mat, den = _dict_to_int_matrix(cols, tgt)
            out = (tgt_key, mat, den)
        self._xmat[ck] = out
        return out

    def check_combo(self, b, i, mq, nq, xr_coords) -> tuple:
        """(columns compared, failures) for one (x, r, m, n)."""
        compared = failures = 0
        den_c = 1
        for cj in xr_coords.values():
            if isinstance(cj, Fraction):
                den_c = den_c * cj.denominator // \
                    np.gcd(den_c, cj.denominator)
        for src_key in self.window:
            nsrc = len(self.M.block_basis(src_key))
            if not nsrc:
                continue
            rA = self.r_matrix(i, nq, src_key)
            if rA is None:
                continue
            mid1, Rm, dR1 = rA
            xA = self.x_matrix(b, mq, mid1)
            xB = self.x_matrix(b, mq, src_key)
            if xA is None or xB is None:
                continue
            tgt, Xm, dX1 = xA
            mid2, Xs, dX2 = xB
            rB = self.r_matrix(i, nq, mid2)
            if rB is None:
                continue
            tgt2, Rm2, dR2 = rB
            if tgt2 != tgt:
                raise AssertionError("block bookkeeping mismatch")
            ntgt = len(self.M.block_basis(tgt))
            rhs = np.zeros((ntgt, nsrc), dtype=np.int64)
            ok_rhs = True
            for j, cj in xr_coords.items():
                rj = self.r_matrix(j, mq + nq, src_key)
                if rj is None:
                    ok_rhs = False
                    break
                tgt3, Rj, dRj = rj
                if Rj.size and np.any(Rj):
                    if tgt3 != tgt:
                        raise AssertionError("rhs block mismatch")
                    scale = Fraction(cj) * den_c / dRj
                    assert scale.denominator == 1
                    rhs = rhs + int(scale) * Rj
            if not ok_rhs:
                continue
            compared += nsrc
            dL1 = dX1 * dR1
            dL2 = dR2 * dX2
            L = int(np.lcm(np.lcm(dL1, dL2), den_c))
            t1 = (L // dL1) * (Xm @ Rm)
            t2 = (L // dL2) * (Rm2 @ Xs)
            rr = (L // den_c) * rhs
            if np.any(t1 - t2 - rr):
                failures += nsrc
        return compared, failures

    def run(self, m_bound_q: int) -> dict:
        T = self.real.T
        checks = columns = failures = 0
        for b in range(self.real.n_eig):
            cls_b = self.real.eig_class[b]
            for i in range(self.R.dim):
                xr = self.R.act0_coords(b, i)
                for mq in range(-m_bound_q, m_bound_q + 1):
                    if (mq - cls_b) % T:
                        continue
                    for nq in range(-m_bound_q, m_bound_q + 1):
                        if (nq - self.R.classes[i]) % T:
                            continue
                        checks += 1
                        comp, fail = self.check_combo(b, i, mq, nq, xr)
                        columns += comp
                        failures += fail
        return {"checks": checks, "columns_compared": columns,
                "failures": failures, "monomials": self.n_monos,
                "x_count": self.real.n_eig, "paths": self.R.dim,
                "status": "pass" if failures == 0 else "fail"}


def commutator_sweep(real: TwistRealization, k: int, labels, depth_q: int,
                     psi_cap, m_bound_q: int) -> dict:
    """Exhaustive Eq (2.6) sweep: all eigenbasis x, all R-basis generation
    paths, all valid |m|, |n| <= m_bound_q / T, compared exactly block-wise
    on the truncation window."""
    return Eq26Sweep(real, k, labels, depth_q, psi_cap).run(m_bound_q)


def path_independence_check(real: TwistRealization, k: int, labels,
                            depth_q: int, psi_cap, n_range_q) -> bool:
    """Loop operators are independent of the recursion mode choices: shifting
    any path step's mode by multiples of T leaves every matrix unchanged
    (the executable well-definedness of Theorem 2.1)."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k)
    ops = LoopOps(R, M)
    window = M.window_blocks(depth_q, psi_cap)
    monos = [m for key in window for m in M.block_basis(key)]
    for i in range(R.dim):
        depth_i = ops._path_depth(i)
        if depth_i == 0:
            continue
        for nq in n_range_q:
            if not ops.valid_index(i, nq):
                continue
            for mono in monos:
                base = ops._apply_mono(i, nq, mono)
                for lvl in range(depth_i):
                    for off in (1, -1):
                        alt = ops._apply_mono(i, nq, mono,
                                              _freeze({lvl: off}))
                        if alt != base:
                            return False
    return True


def _freeze(d: dict):
    return _FrozenOffsets(tuple(sorted(d.items())))


class _FrozenOffsets:
    """Hashable mode-offset table for path-independence tests."""

    def __init__(self, items):
        self.items = items
        self._map = dict(items)

    def get(self, k, default=0):
        return self._map.get(k, default)

    def __hash__(self):
        return hash(self.items)

    def __eq__(self, other):
        return isinstance(other, _FrozenOffsets) and self.items == other.items


# ---------------------------------------------------------------------------
# Theorem 2.9 / 2.12 / 2.13 / 2.14 verifiers
# ---------------------------------------------------------------------------

def _seed_list(ops: LoopOps, depth_q: int):
    """All (i, nq) with r_n v_Lambda landing at depth <= depth_q."""
    out = []
    wq = (ops.R.conformal_weight - 1) * ops.T
    for i in range(ops.R.dim):
        for nq in range(wq - depth_q, wq + 1):
            if ops.valid_index(i, nq):
                out.append((i, nq))
    return out


def annihilation_report(real: TwistRealization, k: int, labels,
                        depth_q: int, psi_cap, direct_exact_depth: int = 2,
                        modp_sweep_depth: int = None,
                        prime_index: int = 0) -> dict:
    """Certified check that every loop operator kills L(Lambda) on the
    window, i.e. the image of every r_n lies in the Gram radical.

    Layers: (a) exact: r_n v_Lambda orthogonal to its whole block, for every
    generation path and index (the adjoint-pairing certificate); together
    with radical invariance (contravariance) and R-bar M = U(n_-) . R-bar
    v_Lambda (Eq 2.6) this pins the claim exactly.  (b) direct exact check
    of every operator column against the radical on blocks of depth <=
    direct_exact_depth.  (c) a mod-p sweep G . Mat(r_n) = 0 over all window
    blocks up to modp_sweep_depth."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k)
    ops = LoopOps(R, M)
    hw = M.highest_weight_vector()
    report = {"realization": real.fingerprint(), "k": k,
              "labels": [str(x) for x in M.labels], "depth_q": depth_q,
              "T": real.T, "checks": []}

    seeds = _seed_list(ops, depth_q)
    nonzero = 0
    bad = []
    for i, nq in seeds:
        img = ops.apply(i, nq, hw)
        if not img:
            continue
        nonzero += 1
        if not ops.seed_orthogonal_to_block(i, nq):
            bad.append((i, nq))
    report["checks"].append({
        "name": "seeds_in_radical_exact",
        "seeds_nonzero": nonzero, "violations": len(bad),
        "status": "pass" if not bad else "fail"})

    window = M.window_blocks(depth_q, psi_cap)
    direct_bad = 0
    direct_checked = 0
    for key in window:
        if key[0] > direct_exact_depth:
            continue
        for i, nq in seeds:
            if not ops.valid_index(i, nq):
                continue
            for mono in M.block_basis(key):
                img = ops.apply(i, nq, {mono: 1})
                if not img:
                    continue
                tgt = M.vector_block(img)
                if tgt[0] > depth_q:
                    continue
                direct_checked += 1
                if not in_radical_exact(M, img):
                    direct_bad += 1
    report["checks"].append({
        "name": "columns_in_radical_exact_small_depth",
        "depth_bound_q": direct_exact_depth,
        "columns": direct_checked, "violations": direct_bad,
        "status": "pass" if direct_bad == 0 else "fail"})

    sweep_depth = modp_sweep_depth if modp_sweep_depth is not None \
        else depth_q
    mmap = ModMap(real.working_conductor, index=prime_index)
    modp_bad = 0
    modp_mats = 0
    for key in window:
        for i, nq in seeds:
            if not ops.valid_index(i, nq):
                continue
            shift = ops.depth_shift_q(nq)
            tgt_depth = key[0] - shift
            if tgt_depth < 0 or tgt_depth > sweep_depth or \
                    key[0] > sweep_depth:
                continue
            try:
                tgt_key, mat = ops.op_matrix_modp(i, nq, key, mmap)
            except Exception:
                continue
            if not mat.size or not np.any(mat):
                continue
            modp_mats += 1
            G = M.gram_block_modp(tgt_key, mmap)
            if np.any(np.mod(G @ mat, mmap.p)):
                modp_bad += 1
    report["checks"].append({
        "name": "gram_times_operator_modp",
        "prime": mmap.p, "matrices": modp_mats, "violations": modp_bad,
        "status": "pass" if modp_bad == 0 else "fail"})

    report["status"] = "pass" if all(c["status"] == "pass"
                                     for c in report["checks"]) else "fail"
    return report


def radical_invariance_spot(real: TwistRealization, labels, depth_q: int,
                            psi_cap, max_block: int = 40) -> bool:
    """Exhaustive small-scale validation of the contravariance lemma: exact
    radical vectors stay in the radical under every lowering symbol."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    window = M.window_blocks(depth_q, psi_cap)
    from .linalg import nullspace_dense
    for key in window:
        basis = M.block_basis(key)
        if not basis or len(basis) > max_block:
            continue
        G = M.gram_block(key)
        null = nullspace_dense(G, len(basis))
        for coeffs in null:
            vec = {m: c for m, c in zip(basis, coeffs) if c}
            for sym in M.symbols:
                img = M.act_terms([(sym, 1)], vec)
                if not img:
                    continue
                tgt = M.vector_block(img)
                if tgt[0] > depth_q:
                    continue
                if not in_radical_exact(M, img):
                    return False
    return True


def maximal_submodule_report(real: TwistRealization, k: int, labels,
                             depth_q: int, psi_cap,
                             exact_block_cap: int = 60,
                             rbar_direct_cap: int = 120,
                             sketch_margin: int = 8) -> dict:
    """Theorem 2.12 / Eq (1.6) cross-oracle, exactly certified per block.

    Per (depth, weight) block B of dimension n: (1) the Eq-1.6 closure dim
    c = rank of all PBW words applied to the f_i^{Lambda(h_i)+1} v seeds
    (exact, dependency-free); (2) the Gram rank bounded below by an exact
    nonsingular minor on the complement of the closure pivots (single
    act-chain entries).  The seeds are exactly singular, so the closure sits
    inside the radical and c + minor_rank = n pins nullity = closure = c.
    R-bar M equals the same spaces: its seeds r_n v_Lambda are exactly
    orthogonal to their blocks (adjoint pairing), it contains both Eq-1.6
    seeds (exact membership witnesses in the word span), and on blocks of
    dim <= rbar_direct_cap its dims are recomputed independently."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k)
    ops = LoopOps(R, M)
    window = M.window_blocks(depth_q, psi_cap)
    report = {"realization": real.fingerprint(), "k": k,
              "labels": [str(x) for x in M.labels],
              "depth_q": depth_q, "T": real.T}

    eq16 = M.maximal_submodule_generators()
    singular_ok = all(M.is_singular(vec) for _key, vec in eq16)

    hw = M.highest_weight_vector()
    rbar_seeds = []
    seed_orth_ok = True
    window_set = set(window)
    for i, nq in _seed_list(ops, depth_q):
        img = ops.apply(i, nq, hw)
        if not img:
            continue
        key = M.vector_block(img)
        if key in window_set:
            rbar_seeds.append((key, img))
        if not ops.seed_orthogonal_to_block(i, nq):
            seed_orth_ok = False

    # R-bar M contains the Eq-1.6 generators (exact membership witnesses)
    membership_ok = True
    for skey, svec in eq16:
        if skey not in window_set:
            continue
        sp = M.nminus_span_multi(rbar_seeds, skey, track=True)
        if sp.coords_of(svec) is None:
            membership_ok = False

    from .modules import span_rank_modp
    from .modp import ModMap
    mmap = ModMap(real.working_conductor)
    report["prime"] = mmap.p
    blocks = []
    all_match = True
    rbar_checked = 0
    rbar_ok = True
    exact_span_cap = rbar_direct_cap
    for key in window:
        basis = M.block_basis(key)
        n = len(basis)
        if n <= exact_span_cap:
            sp16 = M.nminus_span_multi(eq16, key)
            c = sp16.rank
            pivots = set(sp16.pivots)
            complement = [m for m in basis if m not in pivots]
            method = "exact"
        else:
            c, free = span_rank_modp(M, eq16, key, mmap,
                                     with_free_columns=True)
            complement = [basis[j] for j in free]
            method = "modp-squeeze"
        ell = M.gram_minor_rank_exact(complement)
        tries = 0
        while c + ell != n and tries < 3:
            tries += 1
            extra = [m for m in basis if m not in set(complement)]
            complement = complement + extra[: sketch_margin * tries]
            ell = M.gram_minor_rank_exact(complement)
        certified = (c + ell == n)
        row = {"depth_q": key[0], "weight": list(key[1]), "dim_M": n,
               "closure_eq16": c, "gram_rank_minor": ell,
               "gram_nullity": n - ell, "certified": certified,
               "method": method}
        if n <= rbar_direct_cap:
            rb = M.nminus_span_multi(rbar_seeds, key, stop_at=c + 1).rank
            row["closure_rbar"] = rb
            rbar_checked += 1
            if rb != c:
                rbar_ok = False
        all_match = all_match and certified
        blocks.append(row)

    # desk-scale cross-check with the independent block-matrix oracles
    exact_rows = 0
    exact_ok = True
    for key in window:
        if key[0] <= min(depth_q, 4) and \
                len(M.block_basis(key)) <= exact_block_cap:
            exact_rows += 1
            n = len(M.block_basis(key))
            row = next(r for r in blocks
                       if (r["depth_q"], tuple(r["weight"])) == key)
            if row["closure_eq16"] != n - M.gram_rank_exact(key):
                exact_ok = False

    per_depth: dict = {}
    for row in blocks:
        d = row["depth_q"]
        agg = per_depth.setdefault(d, {"dim_M": 0, "dim_M1": 0, "dim_L": 0})
        agg["dim_M"] += row["dim_M"]
        agg["dim_M1"] += row["gram_nullity"]
        agg["dim_L"] += row["dim_M"] - row["gram_nullity"]

    status_ok = (all_match and singular_ok and seed_orth_ok and
                 membership_ok and exact_ok and rbar_ok)
    report.update({
        "eq16_seeds_singular": singular_ok,
        "rbar_seeds_orthogonal": seed_orth_ok,
        "rbar_contains_eq16_seeds": membership_ok,
        "blocks": blocks,
        "all_blocks_match": all_match,
        "rbar_blocks_checked_directly": rbar_checked,
        "rbar_direct_consistent": rbar_ok,
        "exact_blocks_checked": exact_rows,
        "exact_blocks_consistent": exact_ok,
        "per_depth": {str(d): v for d, v in sorted(per_depth.items())},
        "status": "pass" if status_ok else "fail"})
    return report


def nonvanishing_witness(real: TwistRealization, k: int, labels,
                         depth_q: int, on_quotient: bool) -> dict | None:
    """A concrete nonzero r_n . v witness: nonzero vector on the Verma, or a
    vector with nonzero Gram pairing (hence nonzero in L) when
    on_quotient."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k)
    ops = LoopOps(R, M)
    hw = M.highest_weight_vector()
    for i, nq in _seed_list(ops, depth_q):
        img = ops.apply(i, nq, hw)
        if not img:
            continue
        if not on_quotient:
            return {"path_index": i, "nq": nq, "vector": _vec_json(img)}
        key = M.vector_block(img)
        for w in M.block_basis(key):
            val = ops.pairing_with_hw_image(i, nq, {w: 1})
            if val:
                return {"path_index": i, "nq": nq,
                        "vector": _vec_json(img),
                        "pairing_witness_monomial": _mono_json(w),
                        "pairing_value": _sc_json(val)}
    return None


def standard_iff_report(real: TwistRealization, k: int, dominant_labels,
                        nondominant_labels, depth_q: int, psi_cap) -> dict:
    """Theorem 2.14, both directions at desk scale: the annihilation table
    on the standard quotient is all-zero, and a nonzero witness exists on
    the Verma module and on the non-standard quotient L(Lambda')."""
    ann = annihilation_report(real, k, dominant_labels, depth_q, psi_cap)
    verma_wit = nonvanishing_witness(real, k, dominant_labels, depth_q,
                                     on_quotient=False)
    bad_wit = nonvanishing_witness(real, k, nondominant_labels, depth_q,
                                   on_quotient=True)
    Mbad = HWModule(real, "verma", labels=nondominant_labels,
                    depth_q=depth_q)
    from .modules import integrability_check
    out = {
        "annihilation_on_standard": ann,
        "verma_nonzero_witness": verma_wit,
        "nonstandard_nonzero_witness": bad_wit,
        "nonstandard_integrable": integrability_check(Mbad),
        "status": "pass" if (ann["status"] == "pass" and verma_wit
                             and bad_wit) else "fail",
    }
    return out


def nilpotent_field_report(real: TwistRealization, k: int, root,
                           depth_q: int, psi_cap) -> dict:
    """Proposition 2.6 at desk scale on L(k Lambda_0): the (tk+1)-st power
    field of x_root kills the quotient (image in the radical, exact), while
    the (tk)-th power does not (sharpness witness); on the Verma module the
    (tk+1)-st power is nonzero."""
    rs = real.rs
    t = prop26_exponent(rs, root)
    nfac = t * k + 1
    labels = (k,) + (0,) * real.ell
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    eig = real.to_eigen(real.alg.x(root))
    (eig_idx, coef), = eig.items()
    window = M.window_blocks(depth_q, psi_cap)

    def sweep(power):
        """(all_in_radical, verma_nonzero, witness)"""
        all_rad = True
        nonzero = False
        witness = None
        for key in window:
            for mono in M.block_basis(key):
                for nq in range(-depth_q - power * real.T,
                                depth_q + power * real.T + 1):
                    img = power_field_apply(M, eig_idx, power, nq, {mono: 1})
                    if not img:
                        continue
                    if M.vector_block(img)[0] > depth_q:
                        continue
                    nonzero = True
                    if not in_radical_exact(M, img):
                        all_rad = False
                        if witness is None:
                            witness = {"nq": nq, "source": _mono_json(mono)}
        return all_rad, nonzero, witness

    killed, verma_nonzero, _ = sweep(nfac)
    sharp_rad, sharp_nonzero, sharp_wit = sweep(t * k) if t * k else \
        (False, True, {"nq": 0, "source": None})
    return {
        "t": t, "power": nfac, "root": list(root),
        "power_kills_quotient": killed,
        "power_nonzero_on_verma": verma_nonzero,
        "lower_power_nonzero_on_quotient": (not sharp_rad) and sharp_nonzero,
        "sharpness_witness": sharp_wit,
        "status": "pass" if (killed and verma_nonzero and not sharp_rad)
        else "fail",
    }


def f_power_membership(real: TwistRealization, k: int, gen_index: int,
                       t_max: int = 4) -> dict:
    """Proposition 2.11 / Eq (2.17): minimal t <= t_max with
    F_i(-1)^{tk+1} 1 inside U(n_-) x_theta(-1)^{k+1} 1, decided per weight
    component by exact membership, witnesses re-substituted."""
    comp = real.untwisted_companion()
    for t in range(1, t_max + 1):
        n = t * k + 1
        vac = HWModule(comp, "vacuum", level=k, depth_q=n)
        th = comp.theta_eig
        sing = vac.highest_weight_vector()
        for _ in range(k + 1):
            sing = vac.act_terms([((-1, th), 1)], sing)
        fterms = [((-1, b), v)
                  for b, v in comp.to_eigen(real.gens.F[gen_index]).items()]
        fvec = vac.highest_weight_vector()
        for _ in range(n):
            fvec = vac.act_terms(fterms, fvec)
        if not fvec:
            return {"t": t, "power": n, "witness": "zero vector",
                    "status": "pass"}
        comps: dict = {}
        for mono, c in fvec.items():
            comps.setdefault(vac.mono_block(mono), {})[mono] = c
        ok = True
        witnesses = {}
        for key, vec in comps.items():
            space, gens = vac.nminus_span_of(sing, key, track=True)
            coords = space.coords_of(vec)
            if coords is None:
                ok = False
                break
            # re-substitution against the generating vectors
            back: dict = {}
            for gidx, f in coords.items():
                for m, v in gens[gidx].items() if gidx < len(gens) else ():
                    w = back.get(m, 0) + f * v
                    if w:
                        back[m] = w
                    else:
                        back.pop(m, None)
            if back != vec:
                raise AssertionError("witness failed re-substitution")
            witnesses[str(key)] = {str(g): _sc_json(c)
                                   for g, c in sorted(coords.items())}
        if ok:
            return {"t": t, "power": n, "witness_blocks": len(comps),
                    "witnesses": witnesses, "status": "pass"}
    return {"t": None, "status": "fail",
            "error": f"no t <= {t_max} gives membership"}


# ---------------------------------------------------------------------------
# Delta(h, z) deformation (Proposition 2.3 / Eq 2.13 / Eq 2.16)
# ---------------------------------------------------------------------------

class DeltaOperator:
    """Delta(h, z) = z^{h(0)} exp(sum_{n>=1} (-1)^{n-1} h(n)/n z^{-n}) on a
    vacuum-module truncation; values are finite sums {z-exponent: vector}."""

    def __init__(self, vac: HWModule, h_coords: dict):
        self.vac = vac
        real = vac.real
        elem = {i: Fraction(c) for i, c in h_coords.items() if c}
        self.h_terms0 = [(b, v) for b, v in real.to_eigen(elem).items()]
        # h(0)-eigenvalue of each eigenbasis symbol's weight
        self._eig_val = {}
        for bidx in range(real.n_eig):
            vec = real.eig_vectors[bidx]
            val = Fraction(0)
            idx0 = min(vec)
            root = real.alg.root_of(idx0)
            if root is not None:
                val = sum(Fraction(elem.get(i, 0)) *
                          sum(real.rs.cartan[i][j] * root[j]
                              for j in range(real.rs.rank))
                          for i in range(real.rs.rank))
            self._eig_val[bidx] = val

    def h0_eigenvalue(self, mono) -> Fraction:
        return sum((self._eig_val[b] for _q, b in mono), Fraction(0))

    def h_mode_terms(self, n: int):
        return [((n, b), v) for b, v in self.h_terms0]

    def apply(self, vec: dict) -> dict:
        """Delta(h, z) v as {exponent: vector}; exact on the truncation
        (h(n) with n >= 1 lowers depth, so the exponential is finite)."""
        out: dict = {}
        for mono, c in vec.items():
            series = {Fraction(0): {mono: c}}
            depth_left = self.vac.depth_q
            m = 1
            term = {Fraction(0): {mono: c}}
            # exp as iterated application of E = sum_n (-1)^{n-1}h(n)/n z^-n
            while term:
                nxt: dict = {}
                for expo, v in term.items():
                    for n in range(1, depth_left + 1):
                        img = self.vac.act_terms(self.h_mode_terms(n), v)
                        if not img:
                            continue
                        scale = Fraction((-1) ** (n - 1), n * m)
                        tgt = nxt.setdefault(expo - n, {})
                        _merge_scaled(tgt, img, scale)
                term = {e: v for e, v in nxt.items() if v}
                for e, v in term.items():
                    tgt = series.setdefault(e, {})
                    _merge_scaled(tgt, v, 1)
                m += 1
                if m > depth_left + 2:
                    break
            for e, v in series.items():
                for m2, c2 in v.items():
                    ee = e + self.h0_eigenvalue(m2)
                    tgt = out.setdefault(ee, {})
                    _merge(tgt, m2, c2)
        return {e: v for e, v in out.items() if v}

    def apply_series(self, series: dict) -> dict:
        out: dict = {}
        for e0, vec in series.items():
            for e1, v in self.apply(vec).items():
                tgt = out.setdefault(e0 + e1, {})
                _merge_scaled(tgt, v, 1)
        return {e: v for e, v in out.items() if v}


def delta_report(real_untwisted: TwistRealization, k: int, depth_q: int,
                 h_coords: dict, powers) -> dict:
    """Eq (2.16) data at desk scale: Delta(h,z) x_theta(-1)^p 1 =
    z^{-p/2} x_theta(-1)^p 1 for p in powers, and Delta(h) Delta(-h) = id on
    every vacuum basis vector within the truncation."""
    vac = HWModule(real_untwisted, "vacuum", level=k, depth_q=depth_q)
    delta = DeltaOperator(vac, h_coords)
    delta_inv = DeltaOperator(vac, {i: -c for i, c in h_coords.items()})
    th = real_untwisted.theta_eig
    eigen_ok = True
    for p in powers:
        vec = vac.highest_weight_vector()
        for _ in range(p):
            vec = vac.act_terms([((-1, th), 1)], vec)
        got = delta.apply(vec)
        want_expo = delta.h0_eigenvalue(next(iter(vec)))
        if got != {want_expo: vec}:
            eigen_ok = False
    inv_ok = True
    window = vac.window_blocks(depth_q, Fraction(4 * depth_q + 8))
    for key in window:
        for mono in vac.block_basis(key):
            one = {mono: 1}
            composed = delta_inv.apply_series(delta.apply(one))
            if composed != {Fraction(0): one}:
                inv_ok = False
    return {"eigenvector_identity": eigen_ok, "invertible": inv_ok,
            "status": "pass" if (eigen_ok and inv_ok) else "fail"}


# ---------------------------------------------------------------------------
# irreducible loop module probe (Theorem 2.1(ii) / Corollary 2.8)
# ---------------------------------------------------------------------------

def irreducibility_probe(real: TwistRealization, k: int, labels,
                         depth_q: int, psi_cap, n_window_q,
                         trivial: bool = False) -> dict:
    """From every nonzero seed coefficient r_n, the adjoint action reaches
    every R-bar(m) block inside the window: U(g).r = R (exact 27-dim linear
    algebra) plus nonvanishing of the seed operators on the truncation.
    With trivial=True runs the 1-dimensional trivial counterexample."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k, trivial=trivial)
    ops = LoopOps(R, M)
    window = M.window_blocks(depth_q, psi_cap)
    monos = [m for key in window for m in M.block_basis(key)]

    # (i) generation: U(g) . r = R for every basis element
    gen_ok = True
    for i in range(R.dim):
        space = SparseRowSpace()
        space.add({i: 1})
        frontier = [{i: 1}]
        while frontier:
            nxt = []
            for cur in frontier:
                for b in range(real.n_eig):
                    img: dict = {}
                    for j, c in cur.items():
                        _merge_scaled(img, R.act0_coords(b, j), c)
                    if img and space.add(img) is not None:
                        nxt.append(img)
            frontier = nxt
        if space.rank != R.dim:
            gen_ok = False
    if trivial:
        gen_ok = R.dim > 1 and gen_ok

    # (ii) seed operators nonzero on the window
    vacuous = True
    seeds_checked = 0
    seeds_nonzero = 0
    for i in range(R.dim):
        for nq in n_window_q:
            if not ops.valid_index(i, nq):
                continue
            seeds_checked += 1
            found = False
            for mono in monos:
                img = ops.apply(i, nq, {mono: 1})
                if img:
                    found = True
                    break
            if found:
                seeds_nonzero += 1
                vacuous = False
    status = "pass" if (gen_ok and not vacuous) else "fail"
    return {"generation_spans_R": gen_ok, "dim_R": R.dim,
            "seeds_checked": seeds_checked, "seeds_nonzero": seeds_nonzero,
            "vacuous_window": vacuous, "trivial_mode": trivial,
            "status": status}


def loop_module_dims(real: TwistRealization, k: int, labels, depth_q: int,
                     psi_cap, n_window_q, prime_index: int = 0) -> dict:
    """Graded data of R-bar: per index nq the operator-span dimension on the
    truncation (mod-p flattened rank), the Eq (2.5) class-vanishing rule,
    and per-block image dims of R-bar . M (the closure table)."""
    M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
    R = RSpace(real, k)
    ops = LoopOps(R, M)
    mmap = ModMap(real.working_conductor, index=prime_index)
    window = M.window_blocks(depth_q, psi_cap)
    monos = [m for key in window for m in M.block_basis(key)]
    mono_pos = {m: i for i, m in enumerate(monos)}
    nm = len(monos)
    per_n = {}
    for nq in n_window_q:
        flat_rows = []
        for i in range(R.dim):
            if not ops.valid_index(i, nq):
                # (2.5): incompatible classes give the zero operator
                hw_img = ops.apply(i, nq, M.highest_weight_vector())
                if hw_img:
                    raise AssertionError("class-vanishing rule violated")
                continue
            # operator flattened over (source, target) window monomials
            row = np.zeros(nm * nm, dtype=np.int64)
            nonzero = False
            for jcol, mono in enumerate(monos):
                for m2, c in ops._apply_mono(i, nq, mono).items():
                    r2 = mono_pos.get(m2)
                    if r2 is not None:
                        row[r2 * nm + jcol] = mmap(c)
                        nonzero = True
            if nonzero:
                flat_rows.append(row)
        if flat_rows:
            mat = np.stack(flat_rows)
            per_n[str(nq)] = int(rank_mod(mat, mmap.p))
        else:
            per_n[str(nq)] = 0
    hw = M.highest_weight_vector()
    rbar_seeds = []
    for i, nq in _seed_list(ops, depth_q):
        img = ops.apply(i, nq, hw)
        if img:
            key = M.vector_block(img)
            if key in set(window):
                rbar_seeds.append((key, img))
    image = M.closure_modp(rbar_seeds, window, mmap)
    return {"operator_span_dims": per_n, "prime": mmap.p,
            "image_dims": {str(key): d for key, d in image.items()}}


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _sc_json(v):
    from .scalars import scalar_to_json
    return scalar_to_json(v)


def _mono_json(mono):
    return [[q, b] for q, b in mono]


def _vec_json(vec: dict) -> dict:
    return {repr(_mono_json(m)): _sc_json(c) for m, c in sorted(vec.items())}
