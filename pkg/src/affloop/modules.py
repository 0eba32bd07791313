"""Depth-truncated highest-weight modules over a twisted realization.

Vectors live in the PBW basis of ordered monomials in lowering symbols
(q, b) with q = T*degree < 0, plus degree-0 negative-root symbols for Verma
modules.  Everything is organized per (depth, t_[0]-weight) block: these are
genuine affine weight spaces, always finite-dimensional, and every operator
image of a block vector is again block-homogeneous, so windowed computations
are exact per block.

Two computation modes share one recursion structure: fully exact (Fraction /
Cyc scalars) for desk-scale blocks, and mod-p (numpy) for the certified
dimension squeeze on large blocks.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .affine import AffineElement
from .linalg import SparseRowSpace, rank_dense
from .modp import ModMap, ModpSpace
from .scalars import sc_conj, snap
from .twist import TwistRealization

_ZERO_F = Fraction(0)


class TruncationOverflow(Exception):
    """An operator left the materialized depth window."""


def _wt_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _wt_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class HWModule:
    """Shared engine for Verma modules M(Lambda) (kind="verma", labels =
    affine labels Lambda(h_0..h_l)) and vacuum modules N(k Lambda_0) over
    the untwisted companion (kind="vacuum", level k, g(0).1 = 0)."""

    def __init__(self, real: TwistRealization, kind: str, labels=None,
                 level=None, depth_q: int = 0):
        if kind not in ("verma", "vacuum"):
            raise ValueError("kind must be 'verma' or 'vacuum'")
        self.real = real
        self.kind = kind
        self.T = real.T
        self.ell = real.ell
        self.depth_q = depth_q
        if kind == "verma":
            if labels is None:
                raise ValueError("Verma module needs weight labels")
            self.labels = tuple(Fraction(x) for x in labels)
            self.level = snap(real.level_of(self.labels))
        else:
            if level is None:
                raise ValueError("vacuum module needs a level")
            if labels is not None:
                raise ValueError("vacuum module takes no labels")
            self.labels = None
            self.level = snap(Fraction(level))

        # lowering symbols: (q, b) with q < 0, class-compatible; plus the
        # degree-0 negative part of g_(0) for Verma modules
        zero_ops = [(0, b) for b in range(real.n_eig)
                    if real.eig_class[b] == 0 and real.eig_sign[b] < 0]
        self.zero_symbols = list(zero_ops) if kind == "verma" else []
        self.neg_symbols = []
        for q in range(-1, -depth_q - 1, -1):
            for b in range(real.n_eig):
                if real.eig_class[b] == q % real.T:
                    self.neg_symbols.append((q, b))
        self.symbols = sorted(self.zero_symbols + self.neg_symbols,
                              key=self._skey)
        # operators generating U(n_-): on the vacuum the degree-0 negative
        # root vectors act (killing 1) without being monomial symbols
        self.closure_symbols = sorted(zero_ops + self.neg_symbols,
                                      key=self._skey)

        # strictly dominant functional phi on t_[0]-weights: phi(beta_i) = 1
        # for the finite simple roots; orders the block DP
        from .linalg import solve_dense
        ell = real.ell
        mat = [[Fraction(real.gens.H[i].get(k, 0)) for i in range(1, ell + 1)]
               for k in range(real.rs.rank)]
        # h_phi = sum y_i H_i with beta_j(h_phi) = 1: solve over the finite A
        amat = [[Fraction(real.A[i][j]) for i in range(1, ell + 1)]
                for j in range(1, ell + 1)]
        y = solve_dense(amat, [Fraction(1)] * ell)
        if y is None:
            raise AssertionError("finite Cartan block is singular")
        self._phi_y = y

        self._lam_cache: dict = {}
        self._act_memo: dict = {}
        self._basis_cache: dict = {}
        self._gram_cache: dict = {}
        self._gram_modp_cache: dict = {}
        self._symmat_modp_cache: dict = {}

        rates = [Fraction(self.phi_weight(real.eig_weight[b]), -q)
                 for (q, b) in self.neg_symbols]
        self._phi_rate_hi = max(rates) if rates else _ZERO_F
        self._phi_rate_lo = min(rates) if rates else _ZERO_F

    # -- ordering and weights ----------------------------------------------------

    def _skey(self, sym):
        q, b = sym
        return (-q, self.real.eig_class[b], b)

    def phi_weight(self, wt) -> Fraction:
        return sum(y * w for y, w in zip(self._phi_y, wt))

    def sym_weight(self, sym):
        return self.real.eig_weight[sym[1]]

    def mono_block(self, mono):
        depth = -sum(q for q, _ in mono)
        wt = (0,) * self.ell
        for _, b in mono:
            wt = _wt_add(wt, self.real.eig_weight[b])
        return (depth, wt)

    def vector_block(self, vec: dict):
        """Common block of a homogeneous vector (asserted)."""
        blocks = {self.mono_block(m) for m in vec}
        if len(blocks) != 1:
            raise AssertionError(f"vector is not block-homogeneous: {blocks}")
        return next(iter(blocks))

    # -- block bases ----------------------------------------------------------------

    def _feasible(self, rem_depth: int, rem_wt, past_zeros: bool) -> bool:
        """Can symbols fill a remainder of this depth and weight?  Sound
        pruning bounds on the phi-height of the remainder."""
        if rem_depth < 0:
            return False
        phi = self.phi_weight(rem_wt)
        if phi - rem_depth * self._phi_rate_hi > 0:
            return False
        if past_zeros and phi - rem_depth * self._phi_rate_lo < 0:
            return False
        return True

    def _enumerate_multisets(self, syms, nzero, depth, wt):
        """Ordered multisets over a sorted symbol list with exact total
        depth and weight; the first nzero entries are degree-0 symbols."""
        out = []
        nsyms = len(syms)

        def rec(idx, rem_depth, rem_wt, acc):
            if idx == nsyms:
                if rem_depth == 0 and not any(rem_wt):
                    out.append(tuple(acc))
                return
            if not self._feasible(rem_depth, rem_wt, idx >= nzero):
                return
            q, b = syms[idx]
            w = self.real.eig_weight[b]
            m = 0
            while True:
                d2 = rem_depth + m * q
                if d2 < 0:
                    break
                w2 = _wt_sub(rem_wt, tuple(x * m for x in w))
                if m and q == 0 and \
                        self.phi_weight(w2) - d2 * self._phi_rate_hi > 0:
                    break   # zero symbols strictly raise the remainder's phi
                rec(idx + 1, d2, w2, acc + [syms[idx]] * m)
                m += 1

        rec(0, depth, wt, [])
        return out

    def block_basis(self, key) -> tuple:
        """All PBW monomials of the exact (depth_q, weight) block, sorted."""
        if key in self._basis_cache:
            return self._basis_cache[key]
        depth, wt = key
        if depth > self.depth_q:
            raise TruncationOverflow(
                f"block at depth {depth} beyond materialized bound "
                f"{self.depth_q}")
        for dq, cap in getattr(self, "_materialized", ()):
            if depth <= dq and -self.phi_weight(wt) <= cap:
                self._basis_cache[key] = ()
                return ()
        out = self._enumerate_multisets(self.symbols,
                                        len(self.zero_symbols), depth, wt)
        basis = tuple(sorted(out))
        self._basis_cache[key] = basis
        return basis

    def word_images(self, seed_vec: dict, block_key):
        """Yield the images of all ordered PBW words in the closure symbols
        carrying the seed into the given block (deepest symbol applied
        first: intermediate vectors stay small)."""
        seed_key = self.vector_block(seed_vec)
        ddq = block_key[0] - seed_key[0]
        if ddq < 0:
            return
        dwt = _wt_sub(block_key[1], seed_key[1])
        nzero = sum(1 for (q, _b) in self.closure_symbols if q == 0)
        words = self._enumerate_multisets(self.closure_symbols, nzero,
                                          ddq, dwt)
        for word in words:
            cur = seed_vec
            for sym in reversed(word):
                cur = self.act_terms([(sym, 1)], cur)
                if not cur:
                    break
            if cur:
                yield cur

    def nminus_span_of(self, seed_vec: dict, block_key, track: bool = True):
        """Exact spanning row space of U(n_-) . seed intersected with one
        block (PBW word images, no global closure needed)."""
        space = SparseRowSpace(track=track)
        vecs = list(self.word_images(seed_vec, block_key))
        for vec in vecs:
            space.add(vec)
        return space, vecs

    def nminus_span_multi(self, seeds, block_key, track: bool = False,
                          stop_at: int = None):
        """U(n_-)-span of several seed vectors inside one block (exact),
        optionally stopping once a target rank is reached."""
        space = SparseRowSpace(track=track)
        for _key, vec in seeds:
            for img in self.word_images(vec, block_key):
                space.add(img)
                if stop_at is not None and space.rank >= stop_at:
                    return space
        return space

    def window_blocks(self, depth_q: int, psi_cap: Fraction):
        """Nonempty blocks with depth <= depth_q and weight-height
        -phi(wt) <= psi_cap, in dependency (DP) order.  One bulk enumeration
        fills the basis cache for the whole window."""
        wkey = (depth_q, psi_cap)
        if wkey in getattr(self, "_window_cache", {}):
            return self._window_cache[wkey]
        if not hasattr(self, "_window_cache"):
            self._window_cache = {}
        rate = self._phi_rate_hi
        buckets: dict = {}
        negs = self.neg_symbols
        zeros = self.zero_symbols
        weights = self.real.eig_weight

        def rec_zero(idx, depth, wt, zacc, nacc):
            if -self.phi_weight(wt) > psi_cap:
                return
            if idx == len(zeros):
                buckets.setdefault((depth, wt), []).append(
                    tuple(zacc) + tuple(nacc))
                return
            q, b = zeros[idx]
            w = weights[b]
            m = 0
            cur = wt
            while -self.phi_weight(cur) <= psi_cap:
                rec_zero(idx + 1, depth, cur, zacc + [zeros[idx]] * m, nacc)
                m += 1
                cur = _wt_add(cur, w)

        def rec_neg(idx, depth, wt, nacc):
            if -self.phi_weight(wt) - (depth_q - depth) * rate > psi_cap:
                return
            if idx == len(negs):
                rec_zero(0, depth, wt, [], nacc)
                return
            q, b = negs[idx]
            w = weights[b]
            m = 0
            while depth - m * q <= depth_q:
                rec_neg(idx + 1, depth - m * q,
                        tuple(a + m * x for a, x in zip(wt, w)),
                        nacc + [negs[idx]] * m)
                m += 1

        rec_neg(0, 0, (0,) * self.ell, [])
        keys = []
        for key, monos in buckets.items():
            basis = tuple(sorted(monos))
            self._basis_cache[key] = basis
            keys.append(key)
        self._materialized = getattr(self, "_materialized", [])
        self._materialized.append(wkey)
        keys.sort(key=lambda k: (k[0], -self.phi_weight(k[1]), k[1]))
        self._window_cache[wkey] = keys
        return keys

    # -- highest-weight data ---------------------------------------------------------

    def lam_scalar(self, b: int):
        """Lambda(eigenvector b) for class-0 Cartan b (0 on the vacuum)."""
        if self.kind == "vacuum":
            return _ZERO_F
        if b not in self._lam_cache:
            self._lam_cache[b] = snap(self.real.lam_value(b, self.labels))
        return self._lam_cache[b]

    def is_lowering(self, sym) -> bool:
        q, b = sym
        if q < 0:
            return True
        return (q == 0 and self.kind == "verma"
                and self.real.eig_sign[b] < 0)

    # -- the straightening action ------------------------------------------------------

    def act_symbol(self, sym, mono) -> dict:
        """x_b (x) t^{q/T} applied to a PBW basis monomial; exact sparse
        result, memoized."""
        key = (sym, mono)
        hit = self._act_memo.get(key)
        if hit is not None:
            return hit
        out = self._insert(sym, mono) if self.is_lowering(sym) \
            else self._raise(sym, mono)
        self._act_memo[key] = out
        return out

    def _insert(self, sym, mono) -> dict:
        if not mono or self._skey(sym) <= self._skey(mono[0]):
            return {(sym,) + mono: 1}
        u, rest = mono[0], mono[1:]
        out: dict = {}
        for m2, c2 in self.act_symbol(sym, rest).items():
            if not m2 or self._skey(u) <= self._skey(m2[0]):
                m3 = (u,) + m2
                w = out.get(m3, 0) + c2
                if w:
                    out[m3] = w
                else:
                    out.pop(m3, None)
            else:
                for m4, c4 in self.act_symbol(u, m2).items():
                    w = out.get(m4, 0) + c2 * c4
                    if w:
                        out[m4] = w
                    else:
                        out.pop(m4, None)
        qn = sym[0] + u[0]
        for k, cb in self.real.eig_bracket_pair(sym[1], u[1]).items():
            nsym = (qn, k)
            if not self.is_lowering(nsym):
                raise AssertionError("bracket of lowerings is not lowering")
            for m4, c4 in self.act_symbol(nsym, rest).items():
                w = out.get(m4, 0) + cb * c4
                if w:
                    out[m4] = w
                else:
                    out.pop(m4, None)
        return out

    def _raise(self, sym, mono) -> dict:
        q, b = sym
        if not mono:
            if q > 0:
                return {}
            sign = self.real.eig_sign[b]
            if self.kind == "vacuum" or sign != 0:
                return {}
            lam = self.lam_scalar(b)
            return {(): lam} if lam else {}
        u, rest = mono[0], mono[1:]
        out: dict = {}
        qn = q + u[0]
        if qn == 0:
            f = self.real.eig_form.get((b, u[1]))
            if f:
                coeff = snap(Fraction(q, self.T) * f * self.level)
                if coeff:
                    out[rest] = coeff
        for k, cb in self.real.eig_bracket_pair(b, u[1]).items():
            for m4, c4 in self.act_symbol((qn, k), rest).items():
                w = out.get(m4, 0) + cb * c4
                if w:
                    out[m4] = w
                else:
                    out.pop(m4, None)
        for m2, c2 in self.act_symbol(sym, rest).items():
            for m4, c4 in self.act_symbol(u, m2).items():
                w = out.get(m4, 0) + c2 * c4
                if w:
                    out[m4] = w
                else:
                    out.pop(m4, None)
        return out

    def act_terms(self, terms, vec: dict, c_coeff=0) -> dict:
        """Apply a list of (symbol, coefficient) plus a central part."""
        out: dict = {}
        get = out.get
        act = self.act_symbol
        for mono, cv in vec.items():
            if not cv:
                continue
            for sym, cs in terms:
                coeff = cs * cv if cs != 1 else cv
                if coeff == 1:
                    for m2, c2 in act(sym, mono).items():
                        w = get(m2, 0) + c2
                        if w:
                            out[m2] = w
                        else:
                            out.pop(m2, None)
                else:
                    for m2, c2 in act(sym, mono).items():
                        w = get(m2, 0) + coeff * c2
                        if w:
                            out[m2] = w
                        else:
                            out.pop(m2, None)
            if c_coeff:
                w = get(mono, 0) + c_coeff * self.level * cv
                if w:
                    out[mono] = w
                else:
                    out.pop(mono, None)
        return out

    def act_affine(self, el: AffineElement, vec: dict) -> dict:
        if el.d:
            raise ValueError("d does not act on module vectors; use depth")
        terms = [((q, b), v) for (q, b), v in el.terms.items()]
        return self.act_terms(terms, vec, c_coeff=el.c)

    def affine_terms(self, el: AffineElement):
        if el.d:
            raise ValueError("d does not act on module vectors")
        return [((q, b), v) for (q, b), v in el.terms.items()], el.c

    def highest_weight_vector(self) -> dict:
        return {(): 1}

    # -- generator shortcuts -----------------------------------------------------------

    def gen_terms(self, which: str, j: int):
        """e_j / f_j as action terms (list of (symbol, coeff), central)."""
        real = self.real
        elem = real.gens.E[j] if which == "e" else real.gens.F[j]
        q = real.s[j] if which == "e" else -real.s[j]
        eig = real.to_eigen(elem)
        return [((q, b), v) for b, v in eig.items()]

    def apply_gen_power(self, which: str, j: int, power: int,
                        vec=None) -> dict:
        out = dict(vec) if vec is not None else self.highest_weight_vector()
        terms = self.gen_terms(which, j)
        for _ in range(power):
            out = self.act_terms(terms, out)
        return out

    def is_singular(self, vec: dict) -> bool:
        """Killed by all raising generators e_j (exact)."""
        if not vec:
            return False
        for j in range(self.ell + 1):
            if self.act_terms(self.gen_terms("e", j), vec):
                return False
        return True

    # -- contravariant Gram blocks --------------------------------------------------------

    def _tau_terms(self, sym):
        """tau of a lowering symbol: raising terms [(symbol, coeff)] with
        scalars conjugated."""
        q, b = sym
        return [((-q, t), v) for t, v in self.real.eig_tau[b].items()]

    def gram_block(self, key) -> list:
        """Exact sesquilinear contravariant Gram matrix of a block
        (conjugate-linear in the row index)."""
        if key in self._gram_cache:
            return self._gram_cache[key]
        basis = self.block_basis(key)
        n = len(basis)
        if key == (0, (0,) * self.ell):
            if n != 1:
                raise AssertionError("top block is not one-dimensional")
            G = [[Fraction(1)]]
            self._gram_cache[key] = G
            return G
        G = [[_ZERO_F] * n for _ in range(n)]
        by_first: dict = {}
        for i, m in enumerate(basis):
            by_first.setdefault(m[0], []).append(i)
        for s, rows in by_first.items():
            low_key = (key[0] + s[0], _wt_sub(key[1], self.sym_weight(s)))
            Glow = self.gram_block(low_key)
            low_basis = self.block_basis(low_key)
            low_pos = {m: i for i, m in enumerate(low_basis)}
            tau = self._tau_terms(s)
            for jcol, mj in enumerate(basis):
                img = self.act_terms(tau, {mj: 1})
                if not img:
                    continue
                img_idx = [(low_pos[m], c) for m, c in img.items()]
                for i in rows:
                    ri = low_pos[basis[i][1:]]
                    acc = _ZERO_F
                    for mpos, c in img_idx:
                        g = Glow[ri][mpos]
                        if g:
                            acc = acc + c * g
                    if acc:
                        G[i][jcol] = acc
        self._gram_cache[key] = G
        return G

    def gram_entry(self, w1, w2):
        """One contravariant pairing <w1 v, w2 v>: the empty-monomial
        coefficient of tau(s_L)...tau(s_1) applied to w2 (a single exact
        act chain; no block matrix needed)."""
        cur = {w2: 1}
        for s in w1:
            cur = self.act_terms(self._tau_terms(s), cur)
            if not cur:
                return _ZERO_F
        return cur.get((), _ZERO_F)

    def gram_minor_rank_exact(self, subset_monos) -> int:
        """Exact rank of the Gram minor on a small set of monomials."""
        G = [[self.gram_entry(w1, w2) for w2 in subset_monos]
             for w1 in subset_monos]
        return rank_dense(G) if G else 0

    def gram_block_modp(self, key, mmap: ModMap) -> np.ndarray:
        ck = (key, mmap.p)
        if ck in self._gram_modp_cache:
            return self._gram_modp_cache[ck]
        basis = self.block_basis(key)
        n = len(basis)
        p = mmap.p
        if key == (0, (0,) * self.ell):
            G = np.ones((n, n), dtype=np.int64)
            self._gram_modp_cache[ck] = G
            return G
        G = np.zeros((n, n), dtype=np.int64)
        by_first: dict = {}
        for i, m in enumerate(basis):
            by_first.setdefault(m[0], []).append(i)
        for s, rows in by_first.items():
            low_key = (key[0] + s[0], _wt_sub(key[1], self.sym_weight(s)))
            Glow = self.gram_block_modp(low_key, mmap)
            low_basis = self.block_basis(low_key)
            low_pos = {m: i for i, m in enumerate(low_basis)}
            tau = self._tau_terms(s)
            Vec = np.zeros((len(low_basis), n), dtype=np.int64)
            for jcol, mj in enumerate(basis):
                img = self.act_terms(tau, {mj: 1})
                for m, c in img.items():
                    Vec[low_pos[m], jcol] = mmap(c)
            rest_rows = np.array([low_pos[basis[i][1:]] for i in rows])
            block = np.mod(Glow[rest_rows, :] @ Vec, p)
            for a, i in enumerate(rows):
                G[i, :] = block[a, :]
        self._gram_modp_cache[ck] = G
        return G

    def gram_nullity_modp(self, key, mmap: ModMap) -> int:
        from .modp import rank_mod
        G = self.gram_block_modp(key, mmap)
        if G.shape[0] == 0:
            return 0
        return G.shape[0] - rank_mod(G, mmap.p)

    def gram_rank_exact(self, key) -> int:
        G = self.gram_block(key)
        if not G:
            return 0
        return rank_dense(G)

    # -- mod-p symbol matrices ----------------------------------------------------------

    def symbol_matrix_modp(self, sym, src_key, mmap: ModMap) -> np.ndarray:
        """Matrix (target x source) of a lowering symbol from the source
        block, over F_p."""
        ck = (sym, src_key, mmap.p)
        if ck in self._symmat_modp_cache:
            return self._symmat_modp_cache[ck]
        src = self.block_basis(src_key)
        tgt_key = (src_key[0] - sym[0], _wt_add(src_key[1],
                                                self.sym_weight(sym)))
        tgt = self.block_basis(tgt_key)
        tpos = {m: i for i, m in enumerate(tgt)}
        M = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for jcol, mono in enumerate(src):
            for m, c in self.act_symbol(sym, mono).items():
                M[tpos[m], jcol] = mmap(c)
        self._symmat_modp_cache[ck] = M
        return M

    def op_terms_matrix_modp(self, terms, src_key, mmap: ModMap):
        """Block matrix over F_p of a weight-homogeneous action-terms list
        (all terms share one mode q and one weight shift).  Returns
        (target_key, matrix)."""
        q0 = terms[0][0][0]
        w0 = self.sym_weight(terms[0][0])
        for (q, b), _ in terms:
            if q != q0 or self.sym_weight((q, b)) != w0:
                raise ValueError("terms are not block-homogeneous")
        tgt_key = (src_key[0] - q0, _wt_add(src_key[1], w0))
        src = self.block_basis(src_key)
        tgt = self.block_basis(tgt_key)
        pos = {m: r for r, m in enumerate(tgt)}
        out = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for j, mono in enumerate(src):
            img: dict = {}
            for sym, cs in terms:
                for m, c in self.act_symbol(sym, mono).items():
                    w = img.get(m, 0) + cs * c
                    if w:
                        img[m] = w
                    else:
                        img.pop(m, None)
            for m, c in img.items():
                out[pos[m], j] = mmap(c)
        return tgt_key, out

    # -- submodule closure (single pass over blocks in DP order) --------------------------

    def closure_modp(self, seeds, window, mmap: ModMap) -> dict:
        """Per-block dimensions over F_p of the U(n_-)-closure of seed
        vectors.  ``seeds`` is a list of (block_key, vector dict); every seed
        block must lie in the window.  Exact lower bound for the true dims."""
        p = mmap.p
        seed_map: dict = {}
        for key, vec in seeds:
            seed_map.setdefault(key, []).append(vec)
        window_set = set(window)
        for key in seed_map:
            if key not in window_set:
                raise TruncationOverflow(f"seed block {key} outside window")
        spaces: dict = {}
        for key in window:
            basis = self.block_basis(key)
            idx = {m: i for i, m in enumerate(basis)}
            sp = ModpSpace(len(basis), p)
            for vec in seed_map.get(key, []):
                sp.add(mmap.vector(vec, idx))
            for sym in self.closure_symbols:
                src_key = (key[0] + sym[0], _wt_sub(key[1],
                                                    self.sym_weight(sym)))
                src_sp = spaces.get(src_key)
                if not src_sp or not src_sp.rank:
                    continue
                M = self.symbol_matrix_modp(sym, src_key, mmap)
                rows = np.array(src_sp.rows, dtype=np.int64)
                cand = np.mod(rows @ M.T, p)
                sp.add_matrix(cand)
            spaces[key] = sp
        return {key: spaces[key].rank for key in window}

    def closure_exact(self, seeds, window) -> dict:
        """Exact closure bases per block (SparseRowSpace), for desk-scale
        windows."""
        seed_map: dict = {}
        for key, vec in seeds:
            seed_map.setdefault(key, []).append(vec)
        spaces: dict = {}
        for key in window:
            sp = SparseRowSpace()
            for vec in seed_map.get(key, []):
                sp.add(vec)
            for sym in self.closure_symbols:
                src_key = (key[0] + sym[0], _wt_sub(key[1],
                                                    self.sym_weight(sym)))
                src_sp = spaces.get(src_key)
                if not src_sp or not src_sp.rank:
                    continue
                for row in list(src_sp.rows):
                    img = self.act_terms([(sym, 1)], row)
                    if img:
                        sp.add(img)
            spaces[key] = sp
        return spaces

    # -- spec operations ------------------------------------------------------------------

    def verma_basis(self, depth_q: int, weight=None):
        """With a weight: the exact (depth, weight) block.  Without one: all
        ordered monomials in the strictly-negative-degree generators of that
        total depth (the PBW generating-function count)."""
        if depth_q < 0 or depth_q > self.depth_q:
            raise TruncationOverflow("depth beyond materialized bound")
        if weight is not None:
            return self.block_basis((depth_q, weight))
        out = []

        def rec(idx, rem, acc):
            if rem == 0:
                out.append(tuple(acc))
                return
            if idx == len(self.neg_symbols):
                return
            q, b = self.neg_symbols[idx]
            m = 0
            while -m * q <= rem:
                rec(idx + 1, rem + m * q, acc + [(q, b)] * m)
                m += 1

        rec(0, depth_q, [])
        return tuple(sorted(out))

    def maximal_submodule_generators(self):
        """{f_i^{Lambda(h_i)+1} v : i = 0..l} (Eq-1.6 seeds); requires
        dominant integral labels."""
        if self.kind != "verma":
            raise ValueError("only Verma modules carry Eq-1.6 seeds")
        out = []
        for i in range(self.ell + 1):
            lab = self.labels[i]
            if lab.denominator != 1 or lab < 0:
                raise ValueError("labels must be dominant integral")
            vec = self.apply_gen_power("f", i, int(lab) + 1)
            if not vec:
                raise AssertionError("Eq-1.6 seed vanished in the Verma")
            out.append((self.vector_block(vec), vec))
        return out


# ---------------------------------------------------------------------------
# standard module dimensions and integrability
# ---------------------------------------------------------------------------

def standard_dims_exact(mod: HWModule, window) -> dict:
    """Per-block dims of L(Lambda) = M/rad as exact Gram ranks (desk scale)."""
    return {key: mod.gram_rank_exact(key) for key in window}


def standard_dims_modp(mod: HWModule, window, mmap: ModMap) -> dict:
    """Per-block Gram ranks over F_p: exact upper bounds for dim L; combined
    with the closure lower bound by the callers in fields.py."""
    out = {}
    for key in window:
        n = len(mod.block_basis(key))
        out[key] = n - mod.gram_nullity_modp(key, mmap)
    return out


def integrability_check(mod: HWModule, max_power: int = 6) -> bool:
    """True iff every f_i^{m} v_Lambda eventually vanishes in the quotient
    L(Lambda), with m <= Lambda(h_i) + 1 (checked through the Gram radical:
    a singular vector of positive depth-or-drop lies in the radical; a
    non-singular candidate is tested by exact pairing against its block)."""
    if mod.kind != "verma":
        # Verma modules themselves are never integrable: f_i^m v != 0
        return False
    for i in range(mod.ell + 1):
        lab = mod.labels[i]
        if lab.denominator != 1 or lab < 0:
            return False
        vec = mod.apply_gen_power("f", i, int(lab) + 1)
        if not vec:
            continue
        if not mod.is_singular(vec):
            return False
        # singular and not proportional to the highest-weight vector:
        # contained in the maximal submodule, so zero in the quotient
        if mod.vector_block(vec) == (0, (0,) * mod.ell):
            return False
    return True


def in_radical_exact(mod: HWModule, vec: dict) -> bool:
    """Exact membership of a block vector in the Gram radical, by pairing
    against the block basis (desk scale)."""
    if not vec:
        return True
    key = mod.vector_block(vec)
    basis = mod.block_basis(key)
    pos = {m: i for i, m in enumerate(basis)}
    G = mod.gram_block(key)
    for i in range(len(basis)):
        acc = Fraction(0)
        for m, c in vec.items():
            g = G[i][pos[m]]
            if g:
                acc = acc + g * c
        if acc:
            return False
    return True


# ---------------------------------------------------------------------------
# the Heisenberg straightening checker (desk-scale combinatorial lemma)
# ---------------------------------------------------------------------------

def _heis_mul_x(vec: dict) -> dict:
    """Right-multiply by x in U(heis): x^a y^b z^c * x =
    x^{a+1} y^b z^c - b x^a y^{b-1} z^{c+1}   (from yx = xy - z)."""
    out: dict = {}
    for (a, b, c), v in vec.items():
        out[(a + 1, b, c)] = out.get((a + 1, b, c), 0) + v
        if b:
            key = (a, b - 1, c + 1)
            w = out.get(key, 0) - b * v
            if w:
                out[key] = w
            else:
                out.pop(key, None)
    return out


def _heis_mul_y(vec: dict) -> dict:
    return {(a, b + 1, c): v for (a, b, c), v in vec.items()}


def _heis_mul_z(vec: dict) -> dict:
    return {(a, b, c + 1): v for (a, b, c), v in vec.items()}


def heisenberg_membership(m: int, bound: int = 10):
    """Expand (x+y)^m in U of the Heisenberg algebra ([x,y] = z central) and
    decide membership in span{x^a y^b z^c : a+b+2c = m, a <= b} +
    span{y^b x^a z^c : a+b+2c = m, b <= a}.  Returns (True, witness) with
    witness coefficients verified by re-substitution."""
    if m < 0 or m > bound:
        raise ValueError(f"m = {m} outside configured bound {bound}")
    power: dict = {(0, 0, 0): 1}
    for _ in range(m):
        nxt = _heis_mul_x(power)
        for k, v in _heis_mul_y(power).items():
            w = nxt.get(k, 0) + v
            if w:
                nxt[k] = w
            else:
                nxt.pop(k, None)
        power = nxt

    targets = []
    for c in range(m // 2 + 1):
        rest = m - 2 * c
        for a in range(rest + 1):
            b = rest - a
            if a <= b:
                vec: dict = {(0, 0, 0): 1}
                for _ in range(a):
                    vec = _heis_mul_x(vec)
                for _ in range(b):
                    vec = _heis_mul_y(vec)
                for _ in range(c):
                    vec = _heis_mul_z(vec)
                targets.append((("x", a, b, c), vec))
            if b <= a:
                vec = {(0, 0, 0): 1}
                for _ in range(b):
                    vec = _heis_mul_y(vec)
                for _ in range(a):
                    vec = _heis_mul_x(vec)
                for _ in range(c):
                    vec = _heis_mul_z(vec)
                targets.append((("y", b, a, c), vec))

    space = SparseRowSpace(track=True)
    names = []
    for name, vec in targets:
        names.append(name)
        space.add(vec)
    coords = space.coords_of(power)
    if coords is None:
        return False, None
    witness = {names[i]: c for i, c in coords.items()}
    # re-substitution
    check: dict = {}
    for i, c in coords.items():
        for k, v in targets[i][1].items():
            w = check.get(k, 0) + c * v
            if w:
                check[k] = w
            else:
                check.pop(k, None)
    if check != power:
        raise AssertionError("witness failed re-substitution")
    return True, witness


def span_rank_modp(mod: HWModule, seeds, block_key, mmap,
                   with_free_columns: bool = False):
    """Rank over F_p of all PBW words applied to the seeds inside one block
    (exact lower bound for the exact span dimension).  Optionally also
    returns the non-pivot column positions: a canonical complement used as
    the Gram-minor sketch."""
    from .modp import rank_mod_pivots
    basis = mod.block_basis(block_key)
    pos = {m: i for i, m in enumerate(basis)}
    n = len(basis)
    if n == 0:
        return (0, []) if with_free_columns else 0
    rows = []
    for _skey, seed_vec in seeds:
        for img in mod.word_images(seed_vec, block_key):
            row = np.zeros(n, dtype=np.int64)
            for m, c in img.items():
                row[pos[m]] = mmap(c)
            rows.append(row)
    if not rows:
        return (0, list(range(n))) if with_free_columns else 0
    rank, pivots = rank_mod_pivots(np.stack(rows), mmap.p)
    if not with_free_columns:
        return rank
    free = [j for j in range(n) if j not in set(pivots)]
    return rank, free
