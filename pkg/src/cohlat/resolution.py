"""Minimal free resolutions of the trivial module over (Z/2^k)[G].

A complex stores, per degree, a free module over the acting group's modular
group algebra. Coordinates are plain Z/2^k entries indexed so that every
coordinate is (group element) . (module generator); boundaries are dense
matrices acting on row vectors, x -> x @ d. Composition therefore reads
d[i] @ d[i-1], and d[i] @ d[i-1] == 0.
"""
from __future__ import annotations

import threading
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (BudgetExceeded, IncompatibleOperands, InternalInvariant,
                     LiftFailed, ValidationError)
from .groups import FiniteGroup, Subgroup
from .linalg import MAX_MOD_EXP, ModKSolver, kernel_basis_modk, modk_spans_equal

MAX_RESOLUTION_DEGREE = 12


class GModuleComplex:
    """Chain complex of free modules over (Z/2^k)[H] for an acting group H.

    The acting group may sit inside an ambient group whose multiplication
    table indexes the coordinates (used for restricted complexes, which share
    their boundary matrices with the parent resolution).
    """

    def __init__(self, group: FiniteGroup, modulus_exp: int,
                 amb_group: Optional[FiniteGroup] = None,
                 act_map: Optional[np.ndarray] = None):
        if not 1 <= modulus_exp <= MAX_MOD_EXP:
            raise ValidationError(
                f"modulus exponent must be in 1..{MAX_MOD_EXP}")
        self.group = group
        self.k = modulus_exp
        self.mod = 1 << modulus_exp
        self.amb_group = amb_group if amb_group is not None else group
        self.act_map = (np.asarray(act_map, dtype=np.int64)
                        if act_map is not None
                        else np.arange(group.order, dtype=np.int64))
        self.ranks: List[int] = []
        self.dims: List[int] = []
        self.boundaries: List[Optional[np.ndarray]] = []
        self.coord_gen: List[np.ndarray] = []
        self.coord_elt: List[np.ndarray] = []
        self.coord_index: List[np.ndarray] = []  # (rank, |H|) -> coordinate
        self._perms: Dict[Tuple[int, int], np.ndarray] = {}
        self._solvers: Dict[int, ModKSolver] = {}
        self._reduced: Dict[int, "GModuleComplex"] = {}
        self._lock = threading.Lock()

    @property
    def top_degree(self) -> int:
        return len(self.ranks) - 1

    def gen_coords(self, degree: int) -> np.ndarray:
        return self.coord_index[degree][:, 0]

    def add_degree(self, coord_gen: np.ndarray, coord_elt: np.ndarray,
                   boundary: Optional[np.ndarray]):
        nloc = self.group.order
        rank = (int(coord_gen.max()) + 1) if coord_gen.size else 0
        dim = coord_gen.size
        if dim != rank * nloc:
            raise InternalInvariant("coordinate layout is not free")
        if dim and np.bincount(coord_gen * nloc + coord_elt,
                               minlength=dim).max() != 1:
            raise InternalInvariant("coordinate labels collide")
        index = np.zeros((rank, nloc), dtype=np.int64)
        index[coord_gen, coord_elt] = np.arange(dim)
        self.ranks.append(rank)
        self.dims.append(dim)
        self.coord_gen.append(coord_gen.astype(np.int64))
        self.coord_elt.append(coord_elt.astype(np.int64))
        self.coord_index.append(index)
        self.boundaries.append(boundary)

    def add_standard_degree(self, rank: int, boundary: Optional[np.ndarray]):
        """Degree with layout (generator, ambient element), identity acting."""
        if self.amb_group is not self.group:
            raise InternalInvariant("standard layout needs ambient == acting")
        n = self.group.order
        coord_gen = np.repeat(np.arange(rank, dtype=np.int64), n)
        coord_elt = np.tile(np.arange(n, dtype=np.int64), rank)
        self.add_degree(coord_gen, coord_elt, boundary)

    def perm(self, degree: int, g_local: int) -> np.ndarray:
        """Coordinate permutation of the action: P[c] = index of g . c."""
        key = (degree, g_local)
        p = self._perms.get(key)
        if p is None:
            t = self.group.table
            moved = t[g_local, self.coord_elt[degree]]
            p = self.coord_index[degree][self.coord_gen[degree], moved]
            self._perms[key] = p
        return p

    def act(self, degree: int, g_local: int, rows: np.ndarray) -> np.ndarray:
        """g . v for row vectors in degree `degree` coordinates."""
        gi = int(self.group.inv[g_local])
        return np.ascontiguousarray(rows[..., self.perm(degree, gi)])

    def extend_rows(self, degree: int, gen_rows: np.ndarray,
                    dst: "GModuleComplex", dst_degree: int) -> np.ndarray:
        """Equivariant extension of generator images to a full matrix.

        gen_rows[s] is the image of generator s of this complex in degree
        `degree`, written in dst's coordinates at dst_degree. Both complexes
        must share the acting group.
        """
        if dst.group is not self.group and dst.group != self.group:
            raise IncompatibleOperands("acting groups differ")
        out = np.zeros((self.dims[degree], dst.dims[dst_degree]),
                       dtype=np.int64)
        cg, ce = self.coord_gen[degree], self.coord_elt[degree]
        for g in range(self.group.order):
            rows = np.nonzero(ce == g)[0]
            if rows.size:
                gather = dst.perm(dst_degree, int(self.group.inv[g]))
                out[rows] = gen_rows[cg[rows]][:, gather]
        return out % self.mod

    def boundary_solver(self, degree: int) -> ModKSolver:
        with self._lock:
            s = self._solvers.get(degree)
            if s is None:
                s = ModKSolver(self.boundaries[degree], self.k)
                self._solvers[degree] = s
        return s

    def block_augment(self, degree: int, rows: np.ndarray,
                      two_exp: Optional[int] = None) -> np.ndarray:
        """Sum coordinates over each generator block (the augmentation)."""
        rows = np.atleast_2d(rows)
        rank = self.ranks[degree]
        out = np.zeros((rows.shape[0], rank), dtype=np.int64)
        cg = self.coord_gen[degree]
        for s in range(rank):
            out[:, s] = rows[:, cg == s].sum(axis=1)
        return out % (1 << (two_exp if two_exp is not None else self.k))


def _span_row_generators(cx: GModuleComplex, degree: int,
                         kernel_rows: np.ndarray) -> np.ndarray:
    """Rows spanning m*K for K the span of kernel_rows: 2w and (g-1)w."""
    parts = [(2 * kernel_rows) % cx.mod]
    for g in cx.group.generators():
        acted = cx.act(degree, g, kernel_rows)
        parts.append((acted - kernel_rows) % cx.mod)
    return np.vstack(parts)


def _minimal_generators(cx: GModuleComplex, degree: int,
                        kernel_rows: np.ndarray) -> np.ndarray:
    """Greedy minimal module generators of the kernel span (Nakayama)."""
    if kernel_rows.shape[0] == 0:
        return kernel_rows
    base = ModKSolver(_span_row_generators(cx, degree, kernel_rows), cx.k)
    selected: List[np.ndarray] = []
    solver = base
    for w in kernel_rows:
        if solver.contains(w):
            continue
        selected.append(w)
        stacked = np.vstack([base.hf.matrix] + selected)
        solver = ModKSolver(stacked, cx.k)
    return np.array(selected, dtype=np.int64)


_RES_CACHE: Dict[Tuple[FiniteGroup, int], GModuleComplex] = {}
_RES_LOCK = threading.Lock()


def minimal_resolution(group: FiniteGroup, modulus_exp: int,
                       max_degree: int) -> GModuleComplex:
    """Minimal free resolution of the trivial module out to max_degree.

    Results are cached per (group, modulus) and extended in place when a
    deeper resolution is requested later.
    """
    if max_degree > MAX_RESOLUTION_DEGREE:
        raise BudgetExceeded(
            f"resolution degree {max_degree} > {MAX_RESOLUTION_DEGREE}")
    with _RES_LOCK:
        cx = _RES_CACHE.get((group, modulus_exp))
        if cx is None:
            cx = GModuleComplex(group, modulus_exp)
            cx.add_standard_degree(1, None)
            _RES_CACHE[(group, modulus_exp)] = cx
        _extend_resolution(cx, max_degree)
    return cx


def _extend_resolution(cx: GModuleComplex, max_degree: int):
    n = cx.group.order
    while cx.top_degree < max_degree:
        deg = cx.top_degree
        if deg == 0:
            mat = np.ones((n, 1), dtype=np.int64)  # the augmentation
        else:
            mat = cx.boundaries[deg]
        kernel = kernel_basis_modk(mat, cx.k)
        gens = _minimal_generators(cx, deg, kernel)
        if gens.shape[0] == 0:
            # trivial group: the resolution stops, pad with zero modules
            cx.add_standard_degree(0, np.zeros((0, cx.dims[deg]),
                                               dtype=np.int64))
            continue
        if cx.block_augment(deg, gens, two_exp=1).any():
            raise InternalInvariant("selected generators are not minimal")
        rank = gens.shape[0]
        coord_gen = np.repeat(np.arange(rank, dtype=np.int64), n)
        coord_elt = np.tile(np.arange(n, dtype=np.int64), rank)
        tmp = GModuleComplex(cx.group, cx.k)
        tmp.add_degree(coord_gen.copy(), coord_elt.copy(), None)
        boundary = tmp.extend_rows(0, gens, cx, deg)
        if deg >= 1:
            comp = boundary @ cx.boundaries[deg] % cx.mod
            if comp.any():
                raise InternalInvariant("boundary composition is nonzero")
        cx.add_standard_degree(rank, boundary)


def restrict_complex(cx: GModuleComplex, sub: Subgroup) -> GModuleComplex:
    """View a resolution of G as a complex of free H-modules, H <= G.

    Boundary matrices are shared, not copied. Generators of the restricted
    module sit at the right-coset representatives: the H-orbit of a
    coordinate (s, x) is {(s, hx)} and is labeled by the coset Hx.
    """
    if cx.amb_group is not cx.group:
        raise IncompatibleOperands("can only restrict a plain resolution")
    parent = cx.group
    hgrp, to_global = sub.as_group()
    rreps = sub.right_coset_reps()
    n = parent.order
    ncos = len(rreps)
    cosidx = np.full(n, -1, dtype=np.int64)
    hloc = np.full(n, -1, dtype=np.int64)
    pos = {int(g): i for i, g in enumerate(to_global)}
    for j, r in enumerate(rreps):
        for hg in to_global:
            x = int(parent.table[hg, r])
            cosidx[x] = j
            hloc[x] = pos[int(hg)]
    out = GModuleComplex(hgrp, cx.k, amb_group=parent, act_map=to_global)
    for i in range(cx.top_degree + 1):
        amb_elt = np.tile(np.arange(n, dtype=np.int64), cx.ranks[i])
        amb_gen = np.repeat(np.arange(cx.ranks[i], dtype=np.int64), n)
        coord_gen = amb_gen * ncos + cosidx[amb_elt]
        coord_elt = hloc[amb_elt]
        out.add_degree(coord_gen, coord_elt, cx.boundaries[i])
    out._solvers = cx._solvers  # same matrices, share the factorizations
    out._lock = cx._lock
    return out


def lift_chain_map(src: GModuleComplex, dst: GModuleComplex,
                   gen_rows0: np.ndarray, through_degree: int
                   ) -> List[np.ndarray]:
    """Lift a degree-0 generator assignment to a chain map src -> dst.

    Returns full matrices f[i] with d_src[i] @ f[i-1] == f[i] @ d_dst[i].
    Requires dst to be exact in degrees 1..through_degree.
    """
    f = [src.extend_rows(0, np.atleast_2d(gen_rows0), dst, 0)]
    for i in range(1, through_degree + 1):
        rhs = src.boundaries[i][src.gen_coords(i)] @ f[i - 1] % src.mod
        sol, ok = dst.boundary_solver(i).solve_many(rhs)
        if not ok.all():
            raise LiftFailed(f"no chain lift in degree {i}")
        f.append(src.extend_rows(i, sol, dst, i))
    return f


def tensor_square_complex(cx: GModuleComplex, max_degree: int,
                          budget: int = 20000) -> GModuleComplex:
    """Total complex of P (x) P with the diagonal action.

    Degree i concatenates blocks (p, q), p+q = i, each of dimension
    dims[p]*dims[q], laid out as a*dims[q] + b so the two partial boundaries
    are Kronecker products. `budget` bounds the coordinate count of any
    degree; this construction is only meant for small groups.
    """
    if cx.amb_group is not cx.group:
        raise IncompatibleOperands("tensor square needs a plain resolution")
    group = cx.group
    n = group.order
    t = group.table
    out = GModuleComplex(group, cx.k)
    prev_blocks: List[Tuple[int, int, int]] = []
    for i in range(max_degree + 1):
        blocks = []
        off = 0
        for p in range(i + 1):
            q = i - p
            blocks.append((p, q, off))
            off += cx.dims[p] * cx.dims[q]
        total = off
        if total > budget:
            raise BudgetExceeded(
                f"tensor square degree {i} needs {total} coordinates "
                f"(> {budget}); group too large for the diagonal route")
        coord_gen = np.zeros(total, dtype=np.int64)
        coord_elt = np.zeros(total, dtype=np.int64)
        gen_off = 0
        for p, q, off in blocks:
            dp, dq = cx.dims[p], cx.dims[q]
            a = np.repeat(np.arange(dp), dq)
            b = np.tile(np.arange(dq), dp)
            ga, ea = cx.coord_gen[p][a], cx.coord_elt[p][a]
            gb, eb = cx.coord_gen[q][b], cx.coord_elt[q][b]
            # orbit representative: act by ea^-1 on both slots
            w = t[group.inv[ea], eb]
            gen_local = (ga * cx.ranks[q] + gb) * n + w
            coord_gen[off:off + dp * dq] = gen_off + gen_local
            coord_elt[off:off + dp * dq] = ea
            gen_off += cx.ranks[p] * cx.ranks[q] * n
        if i == 0:
            out.add_degree(coord_gen, coord_elt, None)
            prev_blocks = blocks
            continue
        boundary = np.zeros((total, out.dims[i - 1]), dtype=np.int64)
        prev_off = {(p, q): off for p, q, off in prev_blocks}
        for p, q, off in blocks:
            dp, dq = cx.dims[p], cx.dims[q]
            sl = slice(off, off + dp * dq)
            if p >= 1:
                doff = prev_off[(p - 1, q)]
                kb = np.kron(cx.boundaries[p], np.eye(dq, dtype=np.int64))
                boundary[sl, doff:doff + cx.dims[p - 1] * dq] = kb
            if q >= 1:
                sign = -1 if p % 2 else 1
                doff = prev_off[(p, q - 1)]
                kb = np.kron(np.eye(dp, dtype=np.int64), cx.boundaries[q])
                boundary[sl, doff:doff + dp * cx.dims[q - 1]] = sign * kb
        out.add_degree(coord_gen, coord_elt, boundary % cx.mod)
        if i >= 2:
            if (out.boundaries[i] @ out.boundaries[i - 1] % cx.mod).any():
                raise InternalInvariant("tensor square boundary fails d.d=0")
        prev_blocks = blocks
    return out


def diagonal_approximation(cx: GModuleComplex, max_degree: int
                           ) -> Tuple[GModuleComplex, List[np.ndarray]]:
    """Chain map P -> P (x) P lifting the identity augmentation."""
    tens = tensor_square_complex(cx, max_degree)
    start = np.zeros((1, tens.dims[0]), dtype=np.int64)
    start[0, 0] = 1  # e_0 -> e_0 (x) e_0
    maps = lift_chain_map(cx, tens, start, max_degree)
    return tens, maps


def verify_exactness(cx: GModuleComplex, degree: int) -> bool:
    """Check im d_(degree+1) == ker d_degree (degree 0: the augmentation)."""
    if degree == 0:
        mat = np.ones((cx.dims[0], 1), dtype=np.int64)
    else:
        mat = cx.boundaries[degree]
    kernel = kernel_basis_modk(mat, cx.k)
    return modk_spans_equal(kernel, cx.boundaries[degree + 1], cx.k)


def verify_boundary_squares(cx: GModuleComplex) -> bool:
    for i in range(2, cx.top_degree + 1):
        if (cx.boundaries[i] @ cx.boundaries[i - 1] % cx.mod).any():
            return False
    return True


def reduce_complex(cx: GModuleComplex, modulus_exp: int) -> GModuleComplex:
    """The same complex with coefficients reduced mod 2^modulus_exp.

    Reductions are cached on the source complex (and extended in place when
    the source has grown), so their boundary solvers are shared by every
    consumer of the same resolution.
    """
    if modulus_exp > cx.k:
        raise IncompatibleOperands("cannot raise the modulus by reduction")
    if modulus_exp == cx.k:
        return cx
    m = 1 << modulus_exp
    with cx._lock:
        out = cx._reduced.get(modulus_exp)
        if out is None:
            out = GModuleComplex(cx.group, modulus_exp, amb_group=cx.amb_group,
                                 act_map=cx.act_map)
            cx._reduced[modulus_exp] = out
        for i in range(out.top_degree + 1, cx.top_degree + 1):
            b = cx.boundaries[i]
            out.add_degree(cx.coord_gen[i], cx.coord_elt[i],
                           None if b is None else b % m)
    return out
