"""Group cohomology with 2-power coefficients from minimal resolutions.

For a minimal resolution of a 2-group, mod-2 cochain differentials vanish,
so degree-i classes with F2 coefficients are plain vectors of length
ranks[i]. Products use chain lifts (composition product), connecting maps
use lifts of cochains to larger moduli.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (BudgetExceeded, DegreeOutOfRange, IncompatibleOperands,
                     InternalInvariant, ModulusTooSmall, NotA2Group,
                     ValidationError)
from .groups import FiniteGroup, Subgroup
from .linalg import (Subspace, kernel_basis_modk,
                     modk_quotient_invariant_factors)
from .resolution import (GModuleComplex, diagonal_approximation,
                         lift_chain_map, minimal_resolution, reduce_complex,
                         restrict_complex)


def default_modulus_exp(group: FiniteGroup) -> int:
    """v2(|G|) + 1: enough headroom for every integral Bockstein we take."""
    n = group.order
    v = (n & -n).bit_length() - 1
    return v + 1


class GroupCohomology:
    """Cohomology of one finite 2-group, computed to a fixed degree."""

    def __init__(self, group: FiniteGroup, max_degree: int,
                 modulus_exp: Optional[int] = None):
        if not group.is_2group:
            raise NotA2Group(f"group of order {group.order} is not a 2-group")
        self.group = group
        self.max_degree = max_degree
        self.k = modulus_exp if modulus_exp is not None \
            else default_modulus_exp(group)
        if self.k < default_modulus_exp(group):
            raise ModulusTooSmall(
                f"need modulus exponent >= {default_modulus_exp(group)} "
                f"for order {group.order}")
        self.res = minimal_resolution(group, self.k, max_degree)
        self.res2 = reduce_complex(self.res, 1)
        self._deltas: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def dims(self) -> List[int]:
        """dim H^i(G, F2) for i = 0..max_degree."""
        return list(self.res.ranks[: self.max_degree + 1])

    def h_dim(self, degree: int) -> int:
        self._check_degree(degree)
        return self.res.ranks[degree]

    def _check_degree(self, degree: int, slack: int = 0):
        if not 0 <= degree <= self.max_degree - slack:
            raise DegreeOutOfRange(
                f"degree {degree} outside 0..{self.max_degree - slack}")

    def delta(self, degree: int, m_exp: int) -> np.ndarray:
        """Cochain differential matrix: delta(phi) = phi @ delta."""
        self._check_degree(degree, slack=1)
        if m_exp > self.k:
            raise ModulusTooSmall("coefficient modulus exceeds the resolution")
        return self._delta_matrix(degree, m_exp)

    def _delta_matrix(self, degree: int, m_exp: int) -> np.ndarray:
        key = (degree, m_exp)
        d = self._deltas.get(key)
        if d is None:
            res = self.res
            rows = res.boundaries[degree + 1][res.gen_coords(degree + 1)]
            d = res.block_augment(degree, rows, two_exp=m_exp).T.copy()
            self._deltas[key] = d
        return d

    def check_minimal(self) -> bool:
        """Mod-2 differentials of a minimal resolution all vanish."""
        return not any(self.delta(i, 1).any()
                       for i in range(self.max_degree))

    def cohomology_invariants(self, degree: int, m_exp: int) -> List[int]:
        """H^degree(G, Z/2^m) as a list of invariant factors."""
        self._check_degree(degree)
        if m_exp > self.k:
            raise ModulusTooSmall("coefficient modulus exceeds the resolution")
        if degree == self.max_degree and m_exp == 1:
            # minimality: the outgoing differential vanishes mod 2
            ker = np.eye(self.res.ranks[degree], dtype=np.int64)
        else:
            if degree == self.max_degree:
                # above modulus 2 the outgoing differential matters, so the
                # shared resolution is deepened one step to expose it
                minimal_resolution(self.group, self.k, degree + 1)
            ker = kernel_basis_modk(self._delta_matrix(degree, m_exp), m_exp)
        if degree == 0:
            im = np.zeros((0, self.res.ranks[0]), dtype=np.int64)
        else:
            im = self._delta_matrix(degree - 1, m_exp)
        return modk_quotient_invariant_factors(ker, im, m_exp)

    # -- products ---------------------------------------------------------

    def cochain_lift(self, degree: int, vec: np.ndarray, steps: int
                     ) -> List[np.ndarray]:
        """Chain maps c[j]: P_(degree+j) -> P_j over F2 lifting the cochain.

        c[0] sends each degree-`degree` generator to vec[s] times the
        augmentation generator; the block augmentation of c[0] is vec again.
        """
        self._check_degree(degree)
        res2 = self.res2
        start = np.zeros((res2.ranks[degree], res2.dims[0]), dtype=np.int64)
        start[:, res2.gen_coords(0)[0]] = np.asarray(vec) % 2
        out = [_shifted_view(res2, degree).extend_rows(0, start, res2, 0)]
        for j in range(1, steps + 1):
            src_deg = degree + j
            rhs = res2.boundaries[src_deg][res2.gen_coords(src_deg)] \
                @ out[j - 1] % 2
            sol, ok = res2.boundary_solver(j).solve_many(rhs)
            if not ok.all():
                raise InternalInvariant("cochain lift failed; not a cocycle?")
            out.append(_shifted_view(res2, src_deg).extend_rows(
                0, sol, res2, j))
        return out

    def cup(self, a_deg: int, a: np.ndarray, b_deg: int, b: np.ndarray
            ) -> np.ndarray:
        """Product of mod-2 classes, a vector in H^(a_deg+b_deg)(G, F2)."""
        self._check_degree(a_deg + b_deg)
        a = np.asarray(a, dtype=np.int64) % 2
        b = np.asarray(b, dtype=np.int64) % 2
        if a.shape != (self.h_dim(a_deg),) or b.shape != (self.h_dim(b_deg),):
            raise IncompatibleOperands("class vector has wrong length")
        lifts = self.cochain_lift(b_deg, b, a_deg)
        top = lifts[-1]
        res2 = self.res2
        gen_rows = top[res2.gen_coords(a_deg + b_deg)]
        return res2.block_augment(a_deg, gen_rows, two_exp=1) @ a % 2

    def cup_via_diagonal(self, a_deg: int, a: np.ndarray, b_deg: int,
                         b: np.ndarray) -> np.ndarray:
        """Same product through an explicit diagonal approximation.

        Exponentially larger; only for cross-checking small groups.
        """
        total = a_deg + b_deg
        self._check_degree(total)
        tens, maps = diagonal_approximation(self.res2, total)
        a = np.asarray(a, dtype=np.int64) % 2
        b = np.asarray(b, dtype=np.int64) % 2
        res2 = self.res2
        gen_rows = maps[total][res2.gen_coords(total)] % 2
        # evaluate (a tensor b) on the (a_deg, b_deg) block coordinates
        out = np.zeros(res2.ranks[total], dtype=np.int64)
        offset = 0
        for p in range(total + 1):
            q = total - p
            dp, dq = res2.dims[p], res2.dims[q]
            if p == a_deg:
                block = gen_rows[:, offset:offset + dp * dq]
                weights = (a[res2.coord_gen[p]][:, None]
                           * b[res2.coord_gen[q]][None, :]).ravel()
                out = (out + block @ weights) % 2
            offset += dp * dq
        return out % 2

    # -- connecting maps ---------------------------------------------------

    def bockstein(self, degree: int, vec: np.ndarray, m_exp: int
                  ) -> np.ndarray:
        """Connecting map of 0 -> Z/2^m -> Z/2^(m+1) -> Z/2 -> 0.

        Takes a mod-2 cocycle vector in degree `degree`, returns a cocycle
        vector mod 2^m in degree + 1.
        """
        self._check_degree(degree, slack=1)
        if m_exp + 1 > self.k:
            raise ModulusTooSmall(
                f"bockstein to modulus 2^{m_exp} needs resolution modulus "
                f"exponent >= {m_exp + 1}")
        vec = np.asarray(vec, dtype=np.int64) % 2
        up = vec @ self.delta(degree, m_exp + 1) % (1 << (m_exp + 1))
        if (up % 2).any():
            raise IncompatibleOperands("input is not a mod-2 cocycle")
        return (up >> 1) % (1 << m_exp)

    def sq1(self, degree: int, vec: np.ndarray) -> np.ndarray:
        """First Steenrod square = mod-2 Bockstein."""
        return self.bockstein(degree, vec, 1)

    def sq1_image(self, degree: int) -> Subspace:
        """Image of Sq1: H^(degree-1) -> H^degree with F2 coefficients."""
        self._check_degree(degree)
        if degree == 0:
            return Subspace.zero(self.h_dim(0))
        r = self.h_dim(degree - 1)
        rows = [self.sq1(degree - 1, e) for e in np.eye(r, dtype=np.int64)]
        if not rows:
            return Subspace.zero(self.h_dim(degree))
        return Subspace.span(np.array(rows), self.h_dim(degree))

    def integral_reduction_image(self, degree: int) -> Subspace:
        """Image of H^degree(G, Z) -> H^degree(G, F2).

        A mod-2 class comes from an integral class exactly when its
        Bockstein to Z/|G| coefficients vanishes; that kernel is computed
        through one augmented-kernel pass mod |G|.
        """
        self._check_degree(degree, slack=1)
        k0 = default_modulus_exp(self.group) - 1  # 2^k0 = |G|
        r = self.h_dim(degree)
        if r == 0:
            return Subspace.zero(0)
        basis = np.eye(r, dtype=np.int64)
        w = np.array([self.bockstein(degree, e, k0) for e in basis])
        b = self.delta(degree, k0) % (1 << k0)
        stacked = np.vstack([w, b])
        ker = kernel_basis_modk(stacked, k0)
        lam = ker[:, :r] % 2
        return Subspace.span(lam, r)


def _shifted_view(cx: GModuleComplex, degree: int) -> GModuleComplex:
    """A one-degree complex exposing cx's degree `degree` as degree 0."""
    out = GModuleComplex(cx.group, cx.k, amb_group=cx.amb_group,
                         act_map=cx.act_map)
    out.add_degree(cx.coord_gen[degree], cx.coord_elt[degree], None)
    return out


class SubgroupLink:
    """Restriction and transfer between a group and one subgroup.

    Comparison chain maps run between the restricted resolution P|_H and
    H's own minimal resolution Q, with F2 coefficients.
    """

    def __init__(self, parent: GroupCohomology, sub: Subgroup,
                 max_degree: Optional[int] = None):
        if sub.parent != parent.group:
            raise IncompatibleOperands("subgroup belongs to another group")
        self.parent = parent
        self.sub = sub
        self.max_degree = max_degree if max_degree is not None \
            else parent.max_degree
        if self.max_degree > parent.max_degree:
            raise DegreeOutOfRange("link degree exceeds the parent's")
        hgrp, self.to_global = sub.as_group()
        self.hco = GroupCohomology(hgrp, self.max_degree,
                                   modulus_exp=parent.k)
        self.ph2 = restrict_complex(parent.res2, sub)
        q2 = self.hco.res2
        u0 = np.zeros((self.ph2.ranks[0], q2.dims[0]), dtype=np.int64)
        u0[:, q2.gen_coords(0)[0]] = 1
        self.u = lift_chain_map(self.ph2, q2, u0, self.max_degree)
        v0 = np.zeros((q2.ranks[0], self.ph2.dims[0]), dtype=np.int64)
        v0[0, self.ph2.gen_coords(0)[0]] = 1
        self.v = lift_chain_map(q2, self.ph2, v0, self.max_degree)
        self._left_inv_reps = parent.group.inv[sub.coset_reps()]

    def restrict(self, degree: int, vec: np.ndarray) -> np.ndarray:
        """res: H^degree(G, F2) -> H^degree(H, F2)."""
        vec = np.asarray(vec, dtype=np.int64) % 2
        gen_rows = self.v[degree][self.hco.res2.gen_coords(degree)]
        mat = self.parent.res2.block_augment(degree, gen_rows, two_exp=1)
        return mat @ vec % 2

    def transfer(self, degree: int, vec: np.ndarray) -> np.ndarray:
        """cor: H^degree(H, F2) -> H^degree(G, F2).

        The H-linear cochain b o u is summed over inverse left-coset
        representatives: (cor f)(p) = sum_j f(g_j^-1 p).
        """
        vec = np.asarray(vec, dtype=np.int64) % 2
        q2 = self.hco.res2
        bexp = vec[q2.coord_gen[degree]]
        phi = self.u[degree] @ bexp % 2
        n = self.parent.group.order
        rank = self.parent.res2.ranks[degree]
        cols = (np.arange(rank, dtype=np.int64)[:, None] * n
                + self._left_inv_reps[None, :])
        return phi[cols].sum(axis=1) % 2

# ---------------------------------------------------------------------------
# Independent cross-check: unnormalized bar cochains
# ---------------------------------------------------------------------------


def _bar_delta(group: FiniteGroup, i: int) -> np.ndarray:
    """Differential from functions on G^i to functions on G^(i+1).

    Trivial coefficients, so the usual alternating face sum with the first
    and last faces dropping an argument.
    """
    n = group.order
    t = group.table
    dom = n ** i
    cod = n ** (i + 1)
    d = np.zeros((dom, cod), dtype=np.int64)
    for col in range(cod):
        tup = []
        x = col
        for _ in range(i + 1):
            tup.append(x % n)
            x //= n
        tup.reverse()  # tup[0] is the leftmost argument

        def pack(seq):
            out = 0
            for s in seq:
                out = out * n + s
            return out

        d[pack(tup[1:]), col] += 1
        sign = -1
        for j in range(i):
            merged = tup[:j] + [int(t[tup[j], tup[j + 1]])] + tup[j + 2:]
            d[pack(merged), col] += sign
            sign = -sign
        d[pack(tup[:-1]), col] += sign
    return d


def bar_cohomology_invariants(group: FiniteGroup, degree: int, m_exp: int,
                              budget: int = 70000) -> List[int]:
    """H^degree(G, Z/2^m) straight from the bar complex.

    No resolutions, no minimality: an independent (and much larger)
    computation for cross-checking small groups.
    """
    if group.order ** (degree + 1) > budget:
        raise BudgetExceeded("bar complex too large for this group/degree")
    ker = kernel_basis_modk(_bar_delta(group, degree), m_exp)
    if degree == 0:
        im = np.zeros((0, 1), dtype=np.int64)
    else:
        im = _bar_delta(group, degree - 1) % (1 << m_exp)
    return modk_quotient_invariant_factors(ker, im, m_exp)
