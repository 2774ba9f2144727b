"""Integral representations: exterior squares, marginal quotients, coflasque
covers, and images of the two-torsion connecting map.

Conventions. Lattice elements are integer column vectors; the action matrix
of g satisfies A(gh) = A(g) A(h). Where a module mixes free and two-torsion
coordinates (the divided-square construction), a boolean mask marks the
torsion coordinates and arithmetic on masked rows is read mod 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (BudgetExceeded, CoflasquenessCheckFailed,
                     IncompatibleOperands, InternalInvariant,
                     NotRankOneKernel, ValidationError)
from .groups import FiniteGroup, Subgroup, subgroup_classes
from .linalg import (GF2Matrix, IntSolver, Subspace, int_left_kernel,
                     int_spans_equal, invariant_factors, kernel_basis_modk,
                     modk_quotient_invariant_factors,
                     quotient_invariant_factors, row_hnf, smith_normal_form)

MAX_DENSE_RANK = 1200
H1_MAX_RANK = 300
ALPHA_MAX_ORDER = 16
M_MATERIALIZE_MAX_ORDER = 16


def _hom_walk(group: FiniteGroup, images: Sequence[int], op) -> Optional[list]:
    """Values of the hom sending generator i to images[i], or None if none."""
    gens = group.generators()
    val = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for gi, b in zip(gens, images):
                c = int(group.table[a, gi])
                v = op(val[a], b)
                if c in val:
                    if val[c] != v:
                        return None
                else:
                    val[c] = v
                    nxt.append(c)
        frontier = nxt
    return [val[i] for i in range(group.order)]


class GLattice:
    """Integral representation given by matrices for the group generators."""

    def __init__(self, group: FiniteGroup, gen_actions, *,
                 rank: Optional[int] = None, permutation: bool = False,
                 labels=None, mod2_mask: Optional[np.ndarray] = None,
                 name: str = "", validate: bool = True):
        self.group = group
        gens = group.generators()
        if len(gen_actions) != len(gens):
            raise ValidationError("need one action per group generator")
        self.monomial = bool(gen_actions) and all(
            isinstance(a, tuple) for a in gen_actions)
        if not self.monomial and any(isinstance(a, tuple)
                                     for a in gen_actions):
            raise ValidationError("mixed action encodings")
        if self.monomial:
            self._gen_ps = [(np.asarray(p, dtype=np.int64),
                             np.asarray(s, dtype=np.int64))
                            for p, s in gen_actions]
            self.rank = len(self._gen_ps[0][0])
            self._ps_cache: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        else:
            self._gen_mats = [np.asarray(m, dtype=np.int64)
                              for m in gen_actions]
            self.rank = (self._gen_mats[0].shape[0] if self._gen_mats
                         else (rank if rank is not None else 0))
            self._mat_cache: Dict[int, np.ndarray] = {}
        if rank is not None and rank != self.rank:
            raise ValidationError("stated rank disagrees with the matrices")
        self.permutation = permutation
        self.labels = labels
        self.mod2_mask = (np.asarray(mod2_mask, dtype=bool)
                          if mod2_mask is not None else None)
        self.name = name
        self._parent: Dict[int, Tuple[int, int]] = {}
        self._build_words()
        if validate:
            self._validate()

    def _build_words(self):
        """BFS over the Cayley graph: element -> (earlier element, generator)."""
        gens = self.group.generators()
        t = self.group.table
        self._parent = {0: (-1, -1)}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for i, s in enumerate(gens):
                    b = int(t[a, s])
                    if b not in self._parent:
                        self._parent[b] = (a, i)
                        nxt.append(b)
            frontier = nxt
        if len(self._parent) != self.group.order:
            raise InternalInvariant("generators do not generate")

    def perm_sign(self, g: int) -> Tuple[np.ndarray, np.ndarray]:
        """(p, s) with A(g) e_j = s[j] e_p[j]."""
        if not self.monomial:
            raise IncompatibleOperands("dense lattice has no monomial form")
        got = self._ps_cache.get(g)
        if got is not None:
            return got
        if g == 0:
            out = (np.arange(self.rank, dtype=np.int64),
                   np.ones(self.rank, dtype=np.int64))
        else:
            a, i = self._parent[g]
            pa, sa = self.perm_sign(a)
            ps, ss = self._gen_ps[i]
            out = (pa[ps], sa[ps] * ss)
        self._ps_cache[g] = out
        return out

    def matrix(self, g: int) -> np.ndarray:
        if self.monomial:
            p, s = self.perm_sign(g)
            m = np.zeros((self.rank, self.rank), dtype=np.int64)
            m[p, np.arange(self.rank)] = s
            return m
        got = self._mat_cache.get(g)
        if got is not None:
            return got
        if g == 0:
            out = np.eye(self.rank, dtype=np.int64)
        else:
            a, i = self._parent[g]
            out = self.matrix(a) @ self._gen_mats[i]
        self._mat_cache[g] = out
        return out

    def apply(self, g: int, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.int64)
        if self.monomial:
            p, s = self.perm_sign(g)
            out = np.zeros_like(vec)
            out[p] = s * vec
            return out
        return self.matrix(g) @ vec

    def _eq_mats(self, a: np.ndarray, b: np.ndarray) -> bool:
        if self.mod2_mask is None:
            return bool(np.array_equal(a, b))
        d = a - b
        if d[~self.mod2_mask].any():
            return False
        return not (d[self.mod2_mask] % 2).any()

    def _validate(self):
        if self.rank > MAX_DENSE_RANK and not self.monomial:
            raise BudgetExceeded(
                f"dense lattice rank {self.rank} exceeds {MAX_DENSE_RANK}")
        gens = self.group.generators()
        t = self.group.table
        if self.permutation:
            for g in gens:
                if self.monomial:
                    _, s = self.perm_sign(g)
                    if not (s == 1).all():
                        raise ValidationError("permutation flag with signs")
                else:
                    m = self.matrix(g)
                    if not ((m >= 0).all() and (m.sum(0) == 1).all()
                            and (m.sum(1) == 1).all()):
                        raise ValidationError(
                            "permutation flag with non-permutation matrix")
        if self.mod2_mask is not None:
            free = ~self.mod2_mask
            for s in gens:
                m = self.matrix(s)
                if m[np.ix_(free, self.mod2_mask)].any():
                    raise ValidationError(
                        "torsion coordinates leak into free ones")
        # consistency on every Cayley edge forces a homomorphism
        for g in range(self.group.order):
            for i, s in enumerate(gens):
                gs = int(t[g, s])
                if self.monomial:
                    pg, sg = self.perm_sign(g)
                    ps, ss = self._gen_ps[i]
                    pe, se = self.perm_sign(gs)
                    if not (np.array_equal(pe, pg[ps])
                            and np.array_equal(se, sg[ps] * ss)):
                        raise ValidationError(
                            "generator actions violate the group relations")
                else:
                    lhs = self.matrix(gs)
                    rhs = self.matrix(g) @ self._gen_mats[i]
                    if not self._eq_mats(lhs, rhs):
                        raise ValidationError(
                            "generator actions violate the group relations")

    # -- constructions ------------------------------------------------------

    @classmethod
    def regular(cls, group: FiniteGroup) -> "GLattice":
        gens = group.generators()
        ones = np.ones(group.order, dtype=np.int64)
        acts = [(group.table[g, :].astype(np.int64), ones.copy())
                for g in gens]
        return cls(group, acts, rank=group.order, permutation=True,
                   labels=list(range(group.order)), name="regular")

    @classmethod
    def trivial(cls, group: FiniteGroup, rank: int = 1) -> "GLattice":
        gens = group.generators()
        eye = np.eye(rank, dtype=np.int64)
        return cls(group, [eye.copy() for _ in gens], rank=rank,
                   name="trivial")

    @classmethod
    def sign_lattice(cls, group: FiniteGroup) -> "GLattice":
        gens = group.generators()
        vals = _hom_walk(group, [1] * len(gens), lambda a, b: a ^ b)
        if vals is None or not gens:
            raise ValidationError("group admits no order-two character")
        mats = [np.array([[-1]], dtype=np.int64) for _ in gens]
        lat = cls(group, mats, name="sign")
        lat.character = np.array(vals, dtype=np.int64)
        return lat

    @classmethod
    def from_permutations(cls, group: FiniteGroup, perms, labels=None,
                          name: str = "") -> "GLattice":
        acts = [(np.asarray(p, dtype=np.int64),
                 np.ones(len(p), dtype=np.int64)) for p in perms]
        return cls(group, acts, permutation=True, labels=labels, name=name)

    @classmethod
    def from_generator_matrices(cls, group: FiniteGroup, mats,
                                name: str = "") -> "GLattice":
        return cls(group, [np.asarray(m) for m in mats], name=name)

    # -- derived data -------------------------------------------------------

    def generator_matrices(self) -> List[np.ndarray]:
        return [self.matrix(g) for g in self.group.generators()]

    def fixed_rows(self, elements: Optional[Sequence[int]] = None) -> np.ndarray:
        """Integer basis (rows) of the sublattice fixed by the given elements."""
        if self.mod2_mask is not None:
            raise IncompatibleOperands("fixed rows need a free lattice")
        if elements is None:
            elements = self.group.generators()
        blocks = [self.matrix(g).T - np.eye(self.rank, dtype=np.int64)
                  for g in elements]
        if not blocks:
            return np.eye(self.rank, dtype=np.int64)
        return int_left_kernel(np.hstack(blocks))

    def restricted_matrices(self, sub: Subgroup) -> List[np.ndarray]:
        """Action matrices for the subgroup's own minimal generators."""
        hgrp, to_global = sub.as_group()
        return [self.matrix(int(to_global[s])) for s in hgrp.generators()]


def direct_sum(*lats: GLattice) -> GLattice:
    group = lats[0].group
    if any(l.group is not group for l in lats):
        raise IncompatibleOperands("summands over different groups")
    if any(l.mod2_mask is not None for l in lats):
        raise IncompatibleOperands("direct sum needs free lattices")
    gens = group.generators()
    total = sum(l.rank for l in lats)
    name = "+".join(l.name or "?" for l in lats)
    if all(l.monomial for l in lats):
        offs = np.cumsum([0] + [l.rank for l in lats])
        acts = []
        for i, _ in enumerate(gens):
            p = np.concatenate([l._gen_ps[i][0] + off
                                for l, off in zip(lats, offs)])
            s = np.concatenate([l._gen_ps[i][1] for l in lats])
            acts.append((p, s))
        return GLattice(group, acts, rank=total,
                        permutation=all(l.permutation for l in lats),
                        name=name, validate=False)
    mats = []
    for g in gens:
        m = np.zeros((total, total), dtype=np.int64)
        at = 0
        for l in lats:
            m[at:at + l.rank, at:at + l.rank] = l.matrix(g)
            at += l.rank
        mats.append(m)
    return GLattice(group, mats, rank=total, name=name, validate=False)


# ---------------------------------------------------------------------------
# Exterior and divided squares
# ---------------------------------------------------------------------------


def _pair_index(n: int):
    idx = {}
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = len(pairs)
            pairs.append((i, j))
    return idx, pairs


def _pair_arrays(n: int) -> Tuple[np.ndarray, np.ndarray]:
    _, pairs = _pair_index(n)
    if not pairs:
        return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    arr = np.array(pairs, dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def _wedge_matrix(a: np.ndarray) -> np.ndarray:
    """Second exterior power of a square integer matrix (2x2 minors)."""
    i, j = _pair_arrays(a.shape[0])
    if i.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return (a[np.ix_(i, i)] * a[np.ix_(j, j)]
            - a[np.ix_(i, j)] * a[np.ix_(j, i)])


def _wedge_minors_of_map(a: np.ndarray) -> np.ndarray:
    """Induced map on second exterior powers of a rectangular matrix."""
    q, m = a.shape
    k, l = _pair_arrays(m)
    i, j = _pair_arrays(q)
    if i.size == 0 or k.size == 0:
        return np.zeros((len(i), len(k)), dtype=np.int64)
    return (a[np.ix_(i, k)] * a[np.ix_(j, l)]
            - a[np.ix_(i, l)] * a[np.ix_(j, k)])


def wedge_coords(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coordinates of x wedge y in the (i<j) lex pair basis."""
    i, j = _pair_arrays(len(x))
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    return x[i] * y[j] - x[j] * y[i]


def lambda2(lat: GLattice) -> GLattice:
    """Second exterior power with basis e_i ^ e_j, i < j, lex ordered."""
    if lat.mod2_mask is not None:
        raise IncompatibleOperands("exterior square needs a free lattice")
    n = lat.rank
    idx, pairs = _pair_index(n)
    gens = lat.group.generators()
    name = f"wedge2({lat.name or '?'})"
    if lat.monomial:
        acts = []
        for gi in range(len(gens)):
            p, s = lat._gen_ps[gi]
            pp = np.zeros(len(pairs), dtype=np.int64)
            ss = np.zeros(len(pairs), dtype=np.int64)
            for col, (k, l) in enumerate(pairs):
                a, b = int(p[k]), int(p[l])
                sign = int(s[k] * s[l])
                if a > b:
                    a, b = b, a
                    sign = -sign
                pp[col] = idx[(a, b)]
                ss[col] = sign
            acts.append((pp, ss))
        return GLattice(lat.group, acts, rank=len(pairs), labels=pairs,
                        name=name, validate=False)
    mats = [_wedge_matrix(lat.matrix(g)) for g in gens]
    # functorial: relations hold because minors are multiplicative
    return GLattice(lat.group, mats, rank=len(pairs), labels=pairs, name=name,
                    validate=False)


def _diag_block(a: np.ndarray) -> np.ndarray:
    """Mod-2 spill of pair coordinates onto diagonal ones.

    Column (k<l) holds the diagonal part of (A e_k)(A e_l): entry i is
    a_ik * a_il.
    """
    k, l = _pair_arrays(a.shape[0])
    if k.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    return (a[:, k] * a[:, l]) % 2


def gamma2(lat: GLattice) -> GLattice:
    """Tensor square modulo xy + yx: free pair coords, mod-2 diagonal coords."""
    if lat.mod2_mask is not None:
        raise IncompatibleOperands("divided square needs a free lattice")
    n = lat.rank
    _, pairs = _pair_index(n)
    m = len(pairs)
    gens = lat.group.generators()
    mats = []
    for g in gens:
        a = lat.matrix(g)
        top = np.hstack([_wedge_matrix(a), np.zeros((m, n), dtype=np.int64)])
        bot = np.hstack([_diag_block(a), a % 2])
        mats.append(np.vstack([top, bot]))
    mask = np.array([False] * m + [True] * n)
    labels = [("pair", i, j) for (i, j) in pairs] + \
        [("square", i) for i in range(n)]
    return GLattice(lat.group, mats, rank=m + n, mod2_mask=mask,
                    labels=labels, name=f"star2({lat.name or '?'})",
                    validate=False)


def mod2_reduction(lat: GLattice) -> GLattice:
    """The lattice with every coordinate read mod 2."""
    gens = lat.group.generators()
    mats = [lat.matrix(g) % 2 for g in gens]
    return GLattice(lat.group, mats, rank=lat.rank,
                    mod2_mask=np.ones(lat.rank, dtype=bool),
                    name=f"mod2({lat.name or '?'})", validate=False)


@dataclass
class LatticeSES:
    """Short exact sequence of lattice-like modules with explicit maps."""
    sub: GLattice
    mid: GLattice
    quo: GLattice
    inj: np.ndarray    # mid.rank x sub.rank
    proj: np.ndarray   # quo.rank x mid.rank

    def verify(self) -> "LatticeSES":
        if self.inj.shape != (self.mid.rank, self.sub.rank):
            raise ValidationError("injection shape mismatch")
        if self.proj.shape != (self.quo.rank, self.mid.rank):
            raise ValidationError("projection shape mismatch")
        if self.mid.rank != self.sub.rank + self.quo.rank:
            raise ValidationError("ranks do not add up")
        sub_masked = self.sub.mod2_mask is not None
        if sub_masked and not self.sub.mod2_mask.all():
            raise IncompatibleOperands("partially masked kernel unsupported")
        comp = (self.proj @ self.inj).copy()
        if self.quo.mod2_mask is not None:
            comp[self.quo.mod2_mask] %= 2
        if sub_masked:
            comp %= 2
        if comp.any():
            raise ValidationError("composite is nonzero")
        if sub_masked:
            if GF2Matrix.from_dense(self.inj.T % 2).rank() != self.sub.rank:
                raise ValidationError("injection is not injective mod 2")
        else:
            if len(invariant_factors(self.inj, drop_ones=False)) != \
                    self.sub.rank:
                raise ValidationError("injection drops rank")
        if self.quo.mod2_mask is None:
            facs = invariant_factors(self.proj, drop_ones=False)
            if len(facs) != self.quo.rank or any(f != 1 for f in facs):
                raise ValidationError("projection is not onto")
        else:
            if GF2Matrix.from_dense(self.proj % 2).rank() != self.quo.rank:
                raise ValidationError("projection is not onto mod 2")
        for g in self.mid.group.generators():
            d = self.mid.matrix(g) @ self.inj - self.inj @ self.sub.matrix(g)
            if self.mid.mod2_mask is not None:
                d[self.mid.mod2_mask] %= 2
            elif sub_masked:
                d %= 2
            if d.any():
                raise ValidationError("injection is not equivariant")
            d = self.quo.matrix(g) @ self.proj - self.proj @ self.mid.matrix(g)
            if self.quo.mod2_mask is not None:
                d[self.quo.mod2_mask] %= 2
            if d.any():
                raise ValidationError("projection is not equivariant")
        return self


def exterior_ses(lat: GLattice) -> LatticeSES:
    """0 -> L/2 -> star-square(L) -> wedge-square(L) -> 0."""
    n = lat.rank
    m = n * (n - 1) // 2
    gam = gamma2(lat)
    lam = lambda2(lat)
    sub = mod2_reduction(lat)
    inj = np.vstack([np.zeros((m, n), dtype=np.int64),
                     np.eye(n, dtype=np.int64)])
    proj = np.hstack([np.eye(m, dtype=np.int64),
                      np.zeros((m, n), dtype=np.int64)])
    return LatticeSES(sub, gam, lam, inj, proj).verify()


def permutation_splitting(lat: GLattice) -> np.ndarray:
    """Equivariant right inverse of the star-to-wedge projection for a
    permutation lattice: e_i ^ e_j goes to the product class of e_i e_j."""
    if not lat.permutation:
        raise IncompatibleOperands("splitting needs a permutation lattice")
    n = lat.rank
    m = n * (n - 1) // 2
    s = np.vstack([np.eye(m, dtype=np.int64),
                   np.zeros((n, m), dtype=np.int64)])
    ses = exterior_ses(lat)
    if (ses.proj @ s != np.eye(m, dtype=np.int64)).any():
        raise InternalInvariant("splitting does not split")
    for g in lat.group.generators():
        d = ses.mid.matrix(g) @ s - s @ ses.quo.matrix(g)
        d[ses.mid.mod2_mask] %= 2
        if d.any():
            raise InternalInvariant("splitting is not equivariant")
    return s


def exterior_of_rank_one_extension(ses: LatticeSES) -> LatticeSES:
    """From 0 -> Z -> X -> Y -> 0 build 0 -> Y -> wedge2(X) -> wedge2(Y) -> 0.

    The injection sends y to x ^ sigma for any preimage x of y, where sigma
    spans the rank-one kernel; the middle homology is checked to vanish.
    """
    if ses.sub.rank != 1 or ses.sub.mod2_mask is not None:
        raise NotRankOneKernel("kernel is not free of rank one")
    for g in ses.sub.group.generators():
        if not np.array_equal(ses.sub.matrix(g), np.eye(1, dtype=np.int64)):
            raise NotRankOneKernel("kernel action is not trivial")
    sigma = ses.inj[:, 0]
    lam_mid = lambda2(ses.mid)
    lam_quo = lambda2(ses.quo)
    solver = IntSolver(ses.proj.T)
    cols = []
    for e in np.eye(ses.quo.rank, dtype=np.int64):
        x = solver.solve(e)
        if x is None:
            raise ValidationError("projection is not onto")
        cols.append(wedge_coords(x, sigma))
    eta = np.array(cols, dtype=np.int64).T
    proj2 = _wedge_minors_of_map(ses.proj)
    out = LatticeSES(ses.quo, lam_mid, lam_quo, eta, proj2).verify()
    if invariant_factors(eta):
        raise InternalInvariant("the wedge-with-kernel map is not saturated")
    ker = int_left_kernel(proj2.T)
    if not int_spans_equal(ker, eta.T):
        raise InternalInvariant("middle homology is nonzero")
    return out


# ---------------------------------------------------------------------------
# Marginal lattices of the two-slot sum map
# ---------------------------------------------------------------------------


@dataclass
class MNQData:
    group: FiniteGroup
    rho: np.ndarray                 # 2n x n^2, rows map into the product
    kernel: np.ndarray              # 1 x 2n
    image_lattice: GLattice         # induced action on the image
    image_basis: np.ndarray         # rows, basis of the image in the product
    m_rank: int
    m_torsion_free: bool
    m_lattice: Optional[GLattice] = None
    m_basis_columns: Optional[np.ndarray] = None


def _product_perm(group: FiniteGroup, g: int) -> np.ndarray:
    """Permutation of pair coordinates (a, b) -> (ga, gb)."""
    n = group.order
    t = group.table
    return (t[g][:, None] * n + t[g][None, :]).ravel()


def build_mnq(group: FiniteGroup,
              materialize_m: Optional[bool] = None) -> MNQData:
    """Assemble the two-slot sum map into the product and its cokernel."""
    n = group.order
    rho = np.zeros((2 * n, n * n), dtype=np.int64)
    ar = np.arange(n)
    for g in range(n):
        rho[g, g * n + ar] = 1
        rho[n + g, ar * n + g] = 1
    ker = int_left_kernel(rho)
    gamma = np.concatenate([np.ones(n, dtype=np.int64),
                            -np.ones(n, dtype=np.int64)])
    if ker.shape[0] != 1 or not (np.array_equal(ker[0], gamma)
                                 or np.array_equal(ker[0], -gamma)):
        raise InternalInvariant("kernel is not the expected rank-one lattice")
    hnf, pivcols, _ = row_hnf(rho)
    torsion_free = all(int(hnf[i, c]) == 1 for i, c in enumerate(pivcols))
    if not torsion_free:
        torsion_free = not invariant_factors(rho)
    solver = IntSolver(hnf)
    gens = group.generators()
    img_mats = []
    for g in gens:
        perm = _product_perm(group, g)
        cols = []
        for r in hnf:
            moved = np.zeros(n * n, dtype=np.int64)
            moved[perm] = r
            x = solver.solve(moved)
            if x is None:
                raise InternalInvariant("image is not invariant")
            cols.append(x)
        img_mats.append(np.array(cols, dtype=np.int64).T)
    image = GLattice(group, img_mats, rank=hnf.shape[0],
                     name="two-slot-image")
    m_rank = n * n - hnf.shape[0]
    data = MNQData(group, rho, ker, image, hnf, m_rank, torsion_free)
    if materialize_m is None:
        materialize_m = group.order <= M_MATERIALIZE_MAX_ORDER
    if materialize_m:
        data.m_lattice, data.m_basis_columns = _coker_lattice(group, hnf,
                                                              pivcols)
    return data


def _coker_lattice(group: FiniteGroup, hnf: np.ndarray, pivcols) -> \
        Tuple[GLattice, np.ndarray]:
    """Cokernel of the image lattice inside the product permutation lattice."""
    n2 = hnf.shape[1]
    piv = {int(c): i for i, c in enumerate(pivcols)}
    if any(int(hnf[i, c]) != 1 for i, c in enumerate(pivcols)):
        raise InternalInvariant("cokernel needs unit pivots")
    free_cols = np.array([c for c in range(n2) if c not in piv],
                         dtype=np.int64)
    col_pos = {int(c): i for i, c in enumerate(free_cols)}

    def reduce_vec(v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for c, i in piv.items():
            if v[c]:
                v = v - v[c] * hnf[i]
        out = np.zeros(len(free_cols), dtype=np.int64)
        for c in np.nonzero(v)[0]:
            out[col_pos[int(c)]] = v[c]
        return out

    gens = group.generators()
    mats = []
    for g in gens:
        perm = _product_perm(group, g)
        cols = []
        for c in free_cols:
            e = np.zeros(n2, dtype=np.int64)
            e[perm[c]] = 1
            cols.append(reduce_vec(e))
        mats.append(np.array(cols, dtype=np.int64).T if cols
                    else np.zeros((0, 0), dtype=np.int64))
    lat = GLattice(group, mats, rank=len(free_cols), name="marginal-quotient")
    return lat, free_cols


def two_slot_extension(data: MNQData) -> LatticeSES:
    """0 -> Z -> Z[G] + Z[G] -> image -> 0 from the assembled sum map."""
    group = data.group
    reg2 = direct_sum(GLattice.regular(group), GLattice.regular(group))
    solver = IntSolver(data.image_basis)
    cols = []
    for r in data.rho:
        x = solver.solve(r)
        if x is None:
            raise InternalInvariant("generator escapes the image basis")
        cols.append(x)
    proj = np.array(cols, dtype=np.int64).T
    inj = (-data.kernel.T if data.kernel[0, 0] < 0 else data.kernel.T)
    triv = GLattice.trivial(group)
    return LatticeSES(triv, reg2, data.image_lattice, inj, proj).verify()


# ---------------------------------------------------------------------------
# Integral degree-one cohomology and cocycle spaces
# ---------------------------------------------------------------------------


def _local_action(group_like, lat: GLattice):
    """(local group, matrices for its generators) for a group or subgroup."""
    if isinstance(group_like, Subgroup):
        if group_like.parent is not lat.group:
            raise IncompatibleOperands("subgroup of a different group")
        hgrp, to_global = group_like.as_group()
        mats = [lat.matrix(int(to_global[s])) for s in hgrp.generators()]
        return hgrp, mats
    if group_like is lat.group:
        return lat.group, [lat.matrix(s) for s in lat.group.generators()]
    raise IncompatibleOperands("group does not act on this lattice")


def h1_integral(group_like, lat: GLattice) -> List[int]:
    """Invariant factors of degree-one cohomology with integral coefficients.

    Crossed homomorphisms modulo principal ones. For two-power order the
    computation runs at modulus |H|: degree-one cohomology is the cokernel
    of the fixed sublattice reducing into the fixed points mod |H|, exact
    because |H| annihilates it. Other orders go through the
    generator-parametrized cocycle space over the integers.
    """
    if lat.mod2_mask is not None:
        raise IncompatibleOperands("integral cohomology needs a free lattice")
    if lat.rank > H1_MAX_RANK:
        raise BudgetExceeded(
            f"lattice rank {lat.rank} exceeds the budget {H1_MAX_RANK}")
    hgrp, mats = _local_action(group_like, lat)
    m = lat.rank
    if hgrp.order == 1 or m == 0:
        return []
    order = hgrp.order
    if order & (order - 1) == 0:
        v = order.bit_length() - 1
        blocks = np.hstack([mt.T - np.eye(m, dtype=np.int64) for mt in mats])
        fixed_mod = kernel_basis_modk(blocks, v)
        fixed_int = int_left_kernel(blocks)
        return modk_quotient_invariant_factors(
            fixed_mod, fixed_int % (1 << v), v)
    zrows, _ = integral_cocycles(hgrp, mats)
    brows = np.array([np.concatenate([mt @ vrow - vrow for mt in mats])
                      for vrow in np.eye(m, dtype=np.int64)])
    facs = quotient_invariant_factors(zrows, brows)
    if any(f == 0 for f in facs):
        raise InternalInvariant("degree-one cohomology here must be finite")
    return facs


def integral_cocycles(group: FiniteGroup, mats: List[np.ndarray]):
    """Integer basis of crossed homomorphisms, generator-parametrized.

    Returns (rows, expand): each row holds a cocycle's values on the group
    generators (concatenated), and expand(row) tabulates the values on every
    element. Cocycle rule: z(gh) = z(g) + g z(h).
    """
    gens = group.generators()
    d = len(gens)
    m = mats[0].shape[0] if mats else 0
    if d == 0 or m == 0:
        def expand_empty(row):
            return np.zeros((group.order, m), dtype=np.int64)
        return np.zeros((0, d * m), dtype=np.int64), expand_empty
    t = group.table
    emat: Dict[int, np.ndarray] = {0: np.eye(m, dtype=np.int64)}
    coeff: Dict[int, np.ndarray] = {0: np.zeros((m, d * m), dtype=np.int64)}
    frontier = [0]
    closing = []
    while frontier:
        nxt = []
        for a in frontier:
            for i, s in enumerate(gens):
                b = int(t[a, s])
                expr = coeff[a].copy()
                expr[:, i * m:(i + 1) * m] += emat[a]
                if b in coeff:
                    closing.append(coeff[b] - expr)
                else:
                    coeff[b] = expr
                    emat[b] = emat[a] @ mats[i]
                    nxt.append(b)
        frontier = nxt
    if closing:
        system = np.hstack([c.T for c in closing])
        rows = int_left_kernel(system)
    else:
        rows = np.eye(d * m, dtype=np.int64)

    def expand(row):
        out = np.zeros((group.order, m), dtype=np.int64)
        for g, expr in coeff.items():
            out[g] = expr @ row
        return out
    return rows, expand


# ---------------------------------------------------------------------------
# Connecting image into mod-2 degree-two cohomology
# ---------------------------------------------------------------------------


def alpha_image(lat: GLattice) -> List[int]:
    """Invariant factors of the image of the connecting map taking degree-one
    classes of the wedge square into degree-two mod-2 classes of the lattice.

    At cocycle level: lift a wedge-valued cocycle into the divided square
    with zero diagonal part, apply the differential, and read the diagonal
    spill. The spill of an integral cocycle mod 2 is linear in the cocycle
    mod 2, so value tables propagate over two-element arithmetic.
    """
    if lat.mod2_mask is not None:
        raise IncompatibleOperands("connecting image needs a free lattice")
    group = lat.group
    n = group.order
    if n > ALPHA_MAX_ORDER:
        raise BudgetExceeded(
            f"group order {n} exceeds the connecting-map budget "
            f"{ALPHA_MAX_ORDER}")
    ml = lat.rank
    lam = lambda2(lat)
    m = lam.rank
    if m == 0 or ml == 0:
        return []
    gens = group.generators()
    if m * len(gens) > 4000:
        raise BudgetExceeded(
            f"cocycle system on the wedge square needs {m * len(gens)} "
            "unknowns, over the 4000 budget")
    lam_mats = [lam.matrix(s) for s in gens]
    zrows, _ = integral_cocycles(group, lam_mats)
    if zrows.shape[0] == 0:
        return []
    zmod = Subspace.span(zrows % 2, m * len(gens))
    if zmod.dim == 0:
        return []
    zbasis = np.array(zmod.basis_rows(), dtype=np.int64)
    nb = zbasis.shape[0]
    # mod-2 value tables for every element, propagated along a BFS tree;
    # float32 matmuls are exact here (0/1 entries, sums below 2**24)
    gvals = [zbasis[:, i * m:(i + 1) * m].astype(np.float32)
             for i in range(len(gens))]
    smat2 = [(mt % 2).astype(np.float32) for mt in lam_mats]
    amod2 = {0: np.eye(m, dtype=np.float32)}
    vals = {0: np.zeros((nb, m), dtype=np.float32)}
    t = group.table
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for i, s in enumerate(gens):
                b = int(t[a, s])
                if b in vals:
                    continue
                vals[b] = (vals[a] + gvals[i] @ amod2[a].T) % 2
                amod2[b] = (amod2[a] @ smat2[i]) % 2
                nxt.append(b)
        frontier = nxt
    # assemble the spills: the row block at pair (g, h) is D_g z(h)
    dall = np.concatenate([_diag_block(lat.matrix(g)).T.astype(np.float32)
                           for g in range(n)], axis=1)
    alpha = np.zeros((nb, n * n * ml), dtype=np.uint8)
    for h in range(n):
        block = ((vals[h] @ dall) % 2).astype(np.uint8)
        br = block.reshape(nb, n, ml)
        for g in range(n):
            alpha[:, (g * n + h) * ml:(g * n + h + 1) * ml] = br[:, g]
    cob = _coboundary_rows_mod2(group, lat)
    rank0 = GF2Matrix.from_dense(cob).rank()
    both = GF2Matrix.from_dense(np.vstack([cob, alpha]))
    return [2] * (both.rank() - rank0)


def _coboundary_rows_mod2(group: FiniteGroup, lat: GLattice) -> np.ndarray:
    """Rows spanning the coboundaries of one-cochains valued in the lattice
    mod 2; two-cochain coordinates are (g, h, i) flattened in that order."""
    n = group.order
    m = lat.rank
    t = group.table
    rows = np.zeros((n * m, n * n * m), dtype=np.uint8)
    mats = {g: (lat.matrix(g) % 2).astype(np.uint8) for g in range(n)}
    for h in range(n):
        for i in range(m):
            col = np.zeros((n, n, m), dtype=np.uint8)
            for g in range(n):
                col[g, h] ^= mats[g][:, i]        # g . w(h)
            for g, k in zip(*np.nonzero(t == h)):
                col[g, k, i] ^= 1                 # w(gh)
            col[h, :, i] ^= 1                     # w(g)
            rows[h * m + i] = col.reshape(-1)
    return rows


# ---------------------------------------------------------------------------
# Coflasque covers
# ---------------------------------------------------------------------------


@dataclass
class CoflasqueResolution:
    ses: LatticeSES                  # 0 -> R -> P -> L -> 0
    summands: List[Tuple[Tuple[int, ...], int]]  # (subgroup elements, fixed rank)

    @property
    def kernel_lattice(self) -> GLattice:
        return self.ses.sub

    @property
    def cover(self) -> GLattice:
        return self.ses.mid


def _fixed_mod_norm_generators(lat: GLattice, sub: Subgroup) -> np.ndarray:
    """Rows of the fixed sublattice generating it modulo norms from below.

    The free summand of a cover already reaches every norm, so a subgroup
    block only has to supply generators of fixed-points / norm-image. Smith
    over the fixed coordinates picks a minimal set.
    """
    fixed = lat.fixed_rows(list(sub.elements))
    if fixed.shape[0] == 0 or sub.order == 1:
        return fixed
    norm = np.zeros((lat.rank, lat.rank), dtype=np.int64)
    for h in sub.elements:
        norm += lat.matrix(int(h))
    solver = IntSolver(fixed)
    xrows = []
    for r in norm.T:
        x = solver.solve(r)
        if x is None:
            raise InternalInvariant("norms escaped the fixed sublattice")
        xrows.append(x)
    x = np.array(xrows, dtype=np.int64)
    dmat, _, v = smith_normal_form(x)
    vsolver = IntSolver(v)
    f = fixed.shape[0]
    keep = [i for i in range(f)
            if i >= min(dmat.shape) or dmat[i, i] not in (1, -1)]
    rows = []
    for i in keep:
        e = np.zeros(f, dtype=np.int64)
        e[i] = 1
        w = vsolver.solve(e)
        if w is None:
            raise InternalInvariant("smith transform was not unimodular")
        rows.append(w)
    if not rows:
        return np.zeros((0, lat.rank), dtype=np.int64)
    return np.array(rows, dtype=np.int64) @ fixed


def coflasque_resolution(lat: GLattice,
                         families: Optional[Sequence[Subgroup]] = None,
                         trim: bool = True, pad_free: int = 0,
                         check: bool = True) -> CoflasqueResolution:
    """Permutation cover with coflasque kernel, verified subgroup by subgroup.

    The cover sums, over the requested subgroup classes, the coset lattice
    tensored with (generators of) the fixed sublattice; evaluation at coset
    representatives maps it onto the input. A permutation lattice is its own
    cover. pad_free appends redundant free columns, giving an inequivalent
    resolution for cross-checks.
    """
    if lat.mod2_mask is not None:
        raise IncompatibleOperands("resolution needs a free lattice")
    group = lat.group
    if lat.permutation and families is None and pad_free == 0:
        zero = GLattice(group,
                        [np.zeros((0, 0), dtype=np.int64)
                         for _ in group.generators()],
                        rank=0, name="zero")
        ident = LatticeSES(zero, lat, lat,
                           np.zeros((lat.rank, 0), dtype=np.int64),
                           np.eye(lat.rank, dtype=np.int64)).verify()
        return CoflasqueResolution(ident, [])
    if families is None:
        families = subgroup_classes(group)
    blocks = []
    summands = []
    trivial_sub = Subgroup(group, [0])
    for sub in families:
        if trim:
            fixed = _fixed_mod_norm_generators(lat, sub)
        else:
            fixed = lat.fixed_rows(list(sub.elements))
        if fixed.shape[0] == 0:
            continue
        reps = sub.coset_reps()
        summands.append((tuple(int(x) for x in sub.elements),
                         fixed.shape[0]))
        blocks.append((sub, reps, fixed))
    if pad_free:
        pad = np.eye(lat.rank, dtype=np.int64)[:min(pad_free, lat.rank)]
        summands.append(((0,), pad.shape[0]))
        blocks.append((trivial_sub, trivial_sub.coset_reps(), pad))
    if not blocks:
        raise InternalInvariant("no summand survives to cover the lattice")
    total = sum(len(reps) * fixed.shape[0] for _, reps, fixed in blocks)
    gens = group.generators()
    pmats = []
    for g in gens:
        mat = np.zeros((total, total), dtype=np.int64)
        at = 0
        for sub, reps, fixed in blocks:
            k = fixed.shape[0]
            cos = {}
            for j, r in enumerate(reps):
                for h in sub.elements:
                    cos[int(group.table[r, h])] = j
            for j, r in enumerate(reps):
                j2 = cos[int(group.table[g, r])]
                for s in range(k):
                    mat[at + j2 * k + s, at + j * k + s] = 1
            at += len(reps) * k
        pmats.append(mat)
    cover = GLattice(group, pmats, rank=total, permutation=True,
                     name="coflasque-cover")
    ev = np.zeros((lat.rank, total), dtype=np.int64)
    at = 0
    for sub, reps, fixed in blocks:
        k = fixed.shape[0]
        for j, r in enumerate(reps):
            act = lat.matrix(int(r))
            for s in range(k):
                ev[:, at + j * k + s] = act @ fixed[s]
        at += len(reps) * k
    kernel_rows = int_left_kernel(ev.T)
    solver = IntSolver(kernel_rows) if kernel_rows.shape[0] else None
    rmats = []
    for gi in range(len(gens)):
        cols = []
        for r in kernel_rows:
            x = solver.solve(pmats[gi] @ r)
            if x is None:
                raise InternalInvariant("kernel is not invariant")
            cols.append(x)
        rmats.append(np.array(cols, dtype=np.int64).T if cols
                     else np.zeros((0, 0), dtype=np.int64))
    kernel = GLattice(group, rmats, rank=kernel_rows.shape[0],
                      name="coflasque-kernel")
    ses = LatticeSES(kernel, cover, lat, kernel_rows.T, ev).verify()
    out = CoflasqueResolution(ses, summands)
    if check:
        for sub in subgroup_classes(group):
            bad = h1_integral(sub, kernel)
            if bad:
                raise CoflasquenessCheckFailed(
                    f"kernel has degree-one cohomology {bad} at a subgroup "
                    f"of order {sub.order}")
    return out


def pullback_lattice(data: MNQData,
                     resolution: CoflasqueResolution) -> GLattice:
    """Kernel of (x, p) -> [x] - eval(p) over the marginal quotient.

    Replaces the product lattice with a cover whose kernel is coflasque; the
    result is itself verified coflasque.
    """
    if data.m_lattice is None or data.m_basis_columns is None:
        raise BudgetExceeded("marginal quotient was not materialized")
    group = data.group
    mlat = data.m_lattice
    n2 = data.rho.shape[1]
    col_pos = {int(c): i for i, c in enumerate(data.m_basis_columns)}
    hnf, pivcols, _ = row_hnf(data.rho)
    pivd = {int(c): i for i, c in enumerate(pivcols)}
    pmap = np.zeros((mlat.rank, n2), dtype=np.int64)
    for c in range(n2):
        v = np.zeros(n2, dtype=np.int64)
        v[c] = 1
        for pc, i in pivd.items():
            if v[pc]:
                v = v - v[pc] * hnf[i]
        for cc in np.nonzero(v)[0]:
            pmap[col_pos[int(cc)], c] = v[cc]
    ev = resolution.ses.proj
    rows = int_left_kernel(np.hstack([pmap, -ev]).T)
    solver = IntSolver(rows)
    gens = group.generators()
    mats = []
    for g in gens:
        perm = _product_perm(group, g)
        cols = []
        for r in rows:
            x = np.zeros(n2, dtype=np.int64)
            x[perm] = r[:n2]
            p = resolution.cover.matrix(g) @ r[n2:]
            sol = solver.solve(np.concatenate([x, p]))
            if sol is None:
                raise InternalInvariant("pullback is not invariant")
            cols.append(sol)
        mats.append(np.array(cols, dtype=np.int64).T)
    out = GLattice(group, mats, rank=rows.shape[0], name="pullback-kernel")
    for sub in subgroup_classes(group):
        if h1_integral(sub, out):
            raise CoflasquenessCheckFailed("pullback kernel is not coflasque")
    return out


def phi(group: FiniteGroup, lat: Optional[GLattice] = None,
        verify_independence: bool = False) -> List[int]:
    """Invariant factors of the obstruction module of a lattice.

    Defaults to the marginal quotient lattice of the group. The value is the
    connecting image of a coflasque kernel; with verify_independence a
    second, larger resolution must give the same answer.
    """
    if group.order > ALPHA_MAX_ORDER:
        raise BudgetExceeded(
            f"group order {group.order} exceeds the budget "
            f"{ALPHA_MAX_ORDER}")
    if group.order == 1:
        return []
    if lat is None:
        lat = build_mnq(group).m_lattice
    res = coflasque_resolution(lat)
    out = alpha_image(res.kernel_lattice)
    if verify_independence:
        alt = coflasque_resolution(lat, pad_free=1)
        if alpha_image(alt.kernel_lattice) != out:
            raise InternalInvariant(
                "connecting image depends on the resolution")
    return out


# ---------------------------------------------------------------------------
# The regular lattice's exterior square, by element census
# ---------------------------------------------------------------------------


@dataclass
class RegularExteriorDecomposition:
    involutions: List[int]
    pair_reps: List[int]
    rank: int

    @property
    def counts(self) -> Tuple[int, int]:
        return len(self.involutions), len(self.pair_reps)


def lambda2_regular_decomposition(group: FiniteGroup) \
        -> RegularExteriorDecomposition:
    """Involution and inverse-pair census for the exterior square of the
    regular lattice, with the rank identity verified."""
    n = group.order
    inv = group.inv
    involutions = [g for g in range(1, n) if int(inv[g]) == g]
    pair_reps = [g for g in range(1, n)
                 if int(inv[g]) != g and g < int(inv[g])]
    rank = n * (n - 1) // 2
    if len(involutions) * (n // 2) + len(pair_reps) * n != rank:
        raise InternalInvariant("rank census does not match")
    return RegularExteriorDecomposition(involutions, pair_reps, rank)


def induced_sign_lattice(group: FiniteGroup, involution: int) -> GLattice:
    """Induction to the group of the sign lattice of one involution."""
    if involution == 0 or int(group.inv[involution]) != involution:
        raise ValidationError("element is not an involution")
    sub = Subgroup(group, sorted({0, involution}))
    reps = sub.coset_reps()
    cos = {}
    side = {}
    for j, r in enumerate(reps):
        for li, h in enumerate(sub.elements):
            x = int(group.table[r, h])
            cos[x] = j
            side[x] = li
    acts = []
    for g in group.generators():
        p = np.zeros(len(reps), dtype=np.int64)
        s = np.zeros(len(reps), dtype=np.int64)
        for j, r in enumerate(reps):
            x = int(group.table[g, r])
            p[j] = cos[x]
            s[j] = 1 if side[x] == 0 else -1
        acts.append((p, s))
    return GLattice(group, acts, rank=len(reps), name="induced-sign")


# ---------------------------------------------------------------------------
# Named and serialized lattices
# ---------------------------------------------------------------------------


def builtin_lattice(name: str, group: FiniteGroup) -> GLattice:
    """Named lattices the command line resolves against a group."""
    if name == "regular":
        return GLattice.regular(group)
    if name == "sign":
        return GLattice.sign_lattice(group)
    if name == "M":
        data = build_mnq(group)
        if data.m_lattice is None:
            raise BudgetExceeded(
                "marginal quotient action is materialized only up to order "
                f"{M_MATERIALIZE_MAX_ORDER}")
        return data.m_lattice
    raise ValidationError(f"unknown builtin lattice {name!r}")


def lattice_from_json(group: FiniteGroup, data: dict) -> GLattice:
    """Lattice from {"rank": r, "generators": [{"element", "matrix"}]}.

    The listed elements must generate the group; matrices for the group's
    canonical generators are assembled by walking words in the listed ones.
    """
    try:
        rank = int(data["rank"])
        entries = [(int(e["element"]),
                    np.asarray(e["matrix"], dtype=np.int64))
                   for e in data["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed lattice description: {exc}") \
            from None
    for el, mat in entries:
        if not 0 <= el < group.order:
            raise ValidationError(f"element {el} out of range")
        if mat.shape != (rank, rank):
            raise ValidationError("matrix shape disagrees with the rank")
    known: Dict[int, np.ndarray] = {0: np.eye(rank, dtype=np.int64)}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for el, mat in entries:
                b = int(group.table[a, el])
                if b not in known:
                    known[b] = known[a] @ mat
                    nxt.append(b)
        frontier = nxt
    if len(known) != group.order:
        raise ValidationError("listed elements do not generate the group")
    lat = GLattice(group, [known[s] for s in group.generators()], rank=rank,
                   name="from-json")
    for el, mat in entries:
        if not np.array_equal(lat.matrix(el), mat):
            raise ValidationError("matrices are inconsistent with the group")
    return lat
