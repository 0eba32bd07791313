"""Root systems and Chevalley-basis realizations of the finite simple Lie
algebras, with the invariant form normalized so long roots have norm 2.

Simple roots are enumerated as in Kac's tables (0-indexed internally); roots
are stored as integer coordinate tuples over the simple basis.  Structure
constant signs are fixed by the extraspecial-pair algorithm with roots
ordered by (height, coordinates), so every construction is deterministic.
"""

from __future__ import annotations

from fractions import Fraction

_FAMILIES = "ABCDEFG"


def _parse_label(label: str):
    fam = label[0].upper()
    if fam not in _FAMILIES or not label[1:].isdigit():
        raise ValueError(f"unsupported type label {label!r}")
    n = int(label[1:])
    ok = {
        "A": n >= 1, "B": n >= 2, "C": n >= 3, "D": n >= 3,
        "E": n in (6, 7, 8), "F": n == 4, "G": n == 2,
    }[fam]
    if not ok:
        raise ValueError(f"unsupported type label {label!r}")
    return fam, n


def cartan_matrix(family: str, n: int):
    """GCM in Kac's Table Fin enumeration (0-indexed)."""
    A = [[2 * (i == j) for j in range(n)] for i in range(n)]

    def edge(i, j, aij=-1, aji=-1):
        A[i][j] = aij
        A[j][i] = aji

    if family in "ABC":
        for i in range(n - 2):
            edge(i, i + 1)
        if n >= 2:
            if family == "A":
                edge(n - 2, n - 1)
            elif family == "B":   # alpha_n short
                edge(n - 2, n - 1, -1, -2)
            else:                 # C: alpha_n long
                edge(n - 2, n - 1, -2, -1)
    elif family == "D":
        for i in range(n - 3):
            edge(i, i + 1)
        edge(n - 3, n - 2)
        edge(n - 3, n - 1)
    elif family == "E":
        chain = {6: 5, 7: 6, 8: 7}[n]
        for i in range(chain - 1):
            edge(i, i + 1)
        branch = {6: 2, 7: 2, 8: 4}[n]
        edge(branch, n - 1)
    elif family == "F":
        edge(0, 1)
        edge(1, 2, -1, -2)   # alpha_1, alpha_2 long
        edge(2, 3)
    elif family == "G":
        edge(0, 1, -1, -3)   # alpha_1 long, alpha_2 short
    return tuple(tuple(row) for row in A)


_ROOT_COUNT = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
    "F": lambda n: 48,
    "G": lambda n: 12,
}


def _ht(root) -> int:
    return sum(root)


def root_sort_key(root):
    return (_ht(root), root)


class RootSystem:
    """Roots of a finite simple type as integer vectors over the simple
    basis, plus the normalized invariant form on t*."""

    def __init__(self, label: str):
        fam, n = _parse_label(label)
        self.label = f"{fam}{n}"
        self.family = fam
        self.rank = n
        self.cartan = cartan_matrix(fam, n)

        # symmetrizer: d_i a_ij = d_j a_ji, scaled so long roots have norm 2
        d = [None] * n
        d[0] = Fraction(1)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if self.cartan[i][j] and d[i] is not None and d[j] is None:
                        d[j] = d[i] * self.cartan[i][j] / self.cartan[j][i]
                        changed = True
        dmax = max(d)
        self.simple_norms = tuple(2 * di / dmax for di in d)

        roots = set()
        frontier = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        while frontier:
            nxt = []
            for beta in frontier:
                if beta in roots:
                    continue
                roots.add(beta)
                for i in range(n):
                    c = sum(self.cartan[i][j] * beta[j] for j in range(n))
                    ref = list(beta)
                    ref[i] -= c
                    nxt.append(tuple(ref))
            frontier = nxt
        roots |= {tuple(-x for x in r) for r in roots}
        self.roots = sorted(roots, key=root_sort_key)
        if len(self.roots) != _ROOT_COUNT[fam](n):
            raise AssertionError("root count mismatch")
        self.root_set = frozenset(self.roots)
        self.positive_roots = [r for r in self.roots if _ht(r) > 0]
        self.simple_roots = [tuple(int(i == j) for j in range(n))
                             for i in range(n)]

        self.theta = self.positive_roots[-1]
        top = [r for r in self.positive_roots if _ht(r) == _ht(self.theta)]
        if len(top) != 1:
            raise AssertionError("highest root is not unique")
        for a in self.simple_roots:
            if self._add(self.theta, a) in self.root_set:
                raise AssertionError("theta is not maximal")

    # -- vector helpers -------------------------------------------------------

    @staticmethod
    def _add(a, b):
        return tuple(x + y for x, y in zip(a, b))

    @staticmethod
    def _sub(a, b):
        return tuple(x - y for x, y in zip(a, b))

    @staticmethod
    def _neg(a):
        return tuple(-x for x in a)

    def is_root(self, v) -> bool:
        return v in self.root_set

    # -- the normalized form on t* -------------------------------------------

    def pairing(self, a, b) -> Fraction:
        """<a, b> for integer vectors over the simple basis."""
        total = Fraction(0)
        for i, ai in enumerate(a):
            if ai:
                ni = self.simple_norms[i] / 2
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * bj * ni * self.cartan[i][j]
        return total

    def norm(self, root) -> Fraction:
        return self.pairing(root, root)

    def is_long(self, root) -> bool:
        return self.norm(root) == 2

    def coroot_eval(self, a, root) -> int:
        """a(h_root) = 2<a, root>/<root, root>, always an integer."""
        v = 2 * self.pairing(a, root) / self.norm(root)
        assert v.denominator == 1
        return int(v)

    def coroot_coords(self, root):
        """h_root = sum_i k_i h_i with integer k_i."""
        nr = self.norm(root)
        out = []
        for i, c in enumerate(root):
            k = Fraction(c) * self.simple_norms[i] / nr
            assert k.denominator == 1
            out.append(int(k))
        return tuple(out)

    def __repr__(self):
        return f"RootSystem({self.label}, {len(self.roots)} roots)"


def root_system(label: str) -> RootSystem:
    return RootSystem(label)


class ChevalleyAlgebra:
    """Finite simple Lie algebra on the basis {h_i} + {x_root}.

    Elements are sparse dicts basis-index -> scalar.  Indices 0..rank-1 are
    the simple coroots h_i; index of x_root is rank + position of root in the
    fixed root order.  ``sign_flips`` rescales x_root -> t_root x_root
    (t = +-1, t_{-a} = t_a), which keeps the basis Chevalley.
    """

    def __init__(self, rs: RootSystem, sign_flips=None):
        self.rs = rs
        self.rank = rs.rank
        self.dim = rs.rank + len(rs.roots)
        self._xoff = rs.rank
        self._ridx = {r: i for i, r in enumerate(rs.roots)}
        self._n_pos_cache: dict = {}
        self._extraspecial_cache: dict = {}
        if sign_flips:
            for r, t in sign_flips.items():
                if t not in (1, -1) or sign_flips.get(rs._neg(r), t) != t:
                    raise ValueError("sign flips must be +-1 and even")
        self._flips = dict(sign_flips or {})
        self._brackets: dict = {}
        self._build_brackets()

    # -- indexing --------------------------------------------------------------

    def h_index(self, i: int) -> int:
        return i

    def x_index(self, root) -> int:
        return self._xoff + self._ridx[root]

    def basis_label(self, idx: int):
        if idx < self.rank:
            return ("h", idx)
        return ("x", self.rs.roots[idx - self.rank])

    def root_of(self, idx: int):
        """Root of a root-vector basis index, None for Cartan indices."""
        if idx < self.rank:
            return None
        return self.rs.roots[idx - self.rank]

    def x(self, root) -> dict:
        return {self.x_index(root): 1}

    def h(self, i: int) -> dict:
        return {i: 1}

    def h_of_root(self, root) -> dict:
        return {i: k for i, k in enumerate(self.rs.coroot_coords(root)) if k}

    # -- structure constants ---------------------------------------------------

    def _flip(self, root) -> int:
        return self._flips.get(root, 1)

    def _p_string(self, al, be) -> int:
        p = 0
        cur = self.rs._sub(be, al)
        while cur in self.rs.root_set:
            p += 1
            cur = self.rs._sub(cur, al)
        return p

    def _extraspecial(self, ga):
        if ga in self._extraspecial_cache:
            return self._extraspecial_cache[ga]
        for al in self.rs.positive_roots:
            if root_sort_key(al) > root_sort_key(ga):
                break
            de = self.rs._sub(ga, al)
            if de in self.rs.root_set and _ht(de) > 0:
                self._extraspecial_cache[ga] = (al, de)
                return al, de
        raise AssertionError("no extraspecial pair for a non-simple root")

    def _n_pos(self, al, be) -> Fraction:
        """N(alpha, beta) for positive roots with alpha <= beta in root
        order, before sign flips."""
        key = (al, be)
        if key in self._n_pos_cache:
            return self._n_pos_cache[key]
        ga = self.rs._add(al, be)
        eps, de = self._extraspecial(ga)
        if (al, be) == (eps, de):
            val = Fraction(self._p_string(eps, de) + 1)
        else:
            total = Fraction(0)
            am = self.rs._sub(al, eps)
            if am in self.rs.root_set:
                total += self._n_raw(self.rs._neg(eps), al) * self._n_raw(am, be)
            bm = self.rs._sub(be, eps)
            if bm in self.rs.root_set:
                total += self._n_raw(self.rs._neg(eps), be) * self._n_raw(al, bm)
            val = total / self._n_raw(self.rs._neg(eps), ga)
        assert val.denominator == 1 and val != 0
        self._n_pos_cache[key] = val
        return val

    def _n_raw(self, al, be) -> Fraction:
        """N(alpha, beta) for any roots with alpha + beta a root, before sign
        flips.  Mixed-sign values come from the invariant-form cycle
        N(xi,eta)/<zeta,zeta> = N(eta,zeta)/<xi,xi> for xi+eta+zeta = 0."""
        rs = self.rs
        ga = rs._add(al, be)
        assert ga in rs.root_set
        pa, pb = _ht(al) > 0, _ht(be) > 0
        if pa and pb:
            if root_sort_key(al) <= root_sort_key(be):
                return self._n_pos(al, be)
            return -self._n_pos(be, al)
        if not pa and not pb:
            return -self._n_raw(rs._neg(al), rs._neg(be))
        if not pa:
            return -self._n_raw(be, al) if pb else None
        # now al > 0 > be
        if _ht(ga) > 0:
            return -rs.norm(ga) / rs.norm(al) * self._n_raw(rs._neg(be), ga)
        return rs.norm(ga) / rs.norm(be) * self._n_raw(rs._neg(ga), al)

    def n_const(self, al, be) -> int:
        """Chevalley constant: [x_al, x_be] = n_const(al, be) x_{al+be}."""
        raw = self._n_raw(al, be)
        val = raw * self._flip(al) * self._flip(be) * \
            self._flip(self.rs._add(al, be))
        assert val.denominator == 1
        return int(val)

    def _build_brackets(self):
        rs = self.rs
        br = self._brackets
        for i in range(self.rank):
            for ridx, root in enumerate(rs.roots):
                c = sum(rs.cartan[i][j] * root[j] for j in range(self.rank))
                if c:
                    br[(i, self._xoff + ridx)] = {self._xoff + ridx: c}
        for ia, al in enumerate(rs.roots):
            for ib, be in enumerate(rs.roots):
                if ia >= ib:
                    continue
                ga = rs._add(al, be)
                if ga == tuple([0] * self.rank):
                    h = {i: k for i, k in enumerate(rs.coroot_coords(al)) if k}
                    br[(self._xoff + ia, self._xoff + ib)] = h
                elif ga in rs.root_set:
                    n = self.n_const(al, be)
                    br[(self._xoff + ia, self._xoff + ib)] = \
                        {self.x_index(ga): n}

    def bracket_basis(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            out = self._brackets.get((i, j), {})
            return out
        out = self._brackets.get((j, i), {})
        return {k: -v for k, v in out.items()}

    def bracket(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for i, ca in a.items():
            if not ca:
                continue
            for j, cb in b.items():
                if not cb:
                    continue
                for k, s in self.bracket_basis(i, j).items():
                    w = out.get(k, 0) + ca * cb * s
                    if w:
                        out[k] = w
                    else:
                        out.pop(k, None)
        return out

    # -- invariant form ---------------------------------------------------------

    def form_basis(self, i: int, j: int):
        rs = self.rs
        if i < self.rank and j < self.rank:
            ai, aj = rs.simple_roots[i], rs.simple_roots[j]
            return 4 * rs.pairing(ai, aj) / (rs.norm(ai) * rs.norm(aj))
        if i >= self.rank and j >= self.rank:
            al = rs.roots[i - self.rank]
            be = rs.roots[j - self.rank]
            if rs._add(al, be) == tuple([0] * self.rank):
                return 2 / rs.norm(al)
        return Fraction(0)

    def form(self, a: dict, b: dict):
        total = Fraction(0)
        for i, ca in a.items():
            for j, cb in b.items():
                f = self.form_basis(i, j)
                if f:
                    total = total + ca * cb * f
        return total

    # -- rescaled copy ------------------------------------------------------------

    def rescaled(self, sign_flips: dict) -> "ChevalleyAlgebra":
        merged = dict(self._flips)
        for r, t in sign_flips.items():
            merged[r] = merged.get(r, 1) * t
        return ChevalleyAlgebra(self.rs, merged)

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        from .scalars import scalar_to_json
        labels = []
        for idx in range(self.dim):
            kind, val = self.basis_label(idx)
            labels.append([kind, val if kind == "h" else list(val)])
        consts = []
        for (i, j), out in sorted(self._brackets.items()):
            for k, v in sorted(out.items()):
                consts.append([i, j, k, scalar_to_json(Fraction(v))])
        form = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                f = self.form_basis(i, j)
                if f:
                    form.append([i, j, scalar_to_json(f)])
        return {"type": self.rs.label, "dim": self.dim,
                "basis": labels, "brackets": consts, "form": form}

    def __repr__(self):
        return f"ChevalleyAlgebra({self.rs.label}, dim={self.dim})"


def chevalley_algebra(rs: RootSystem) -> ChevalleyAlgebra:
    return ChevalleyAlgebra(rs)


def element_add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + scale * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def element_scale(a: dict, scale) -> dict:
    if not scale:
        return {}
    return {k: scale * v for k, v in a.items()}
