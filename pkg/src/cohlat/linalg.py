"""Exact linear algebra over F2 (bit-packed), Z/2^k, and Z.

Conventions: vectors are 1-D numpy arrays treated as rows, a matrix maps
x -> x @ M, and "kernel" always means the left kernel {x : x @ M = 0}.
Everything is deterministic: same input, same bytes out.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import IncompatibleOperands

MAX_MOD_EXP = 12

# trailing-zero lookup for residues mod 2^k, k <= MAX_MOD_EXP
_TZ = np.zeros(1 << MAX_MOD_EXP, dtype=np.int64)
_TZ[0] = MAX_MOD_EXP
for _i in range(1, 1 << MAX_MOD_EXP):
    _TZ[_i] = (_i & -_i).bit_length() - 1


def _inv_pow2(a: int, k: int) -> int:
    """Inverse of an odd residue mod 2^k."""
    return pow(int(a), -1, 1 << k)


# ---------------------------------------------------------------------------
# Howell forms over Z/2^k
# ---------------------------------------------------------------------------
#
# A Howell form is an echelon form whose row span is closed under the
# "shadow" rows 2^(k-v) * row for every row with pivot 2^v.  That closure is
# what makes prefix-zero slicing exact over Z/2^k: any span element whose
# first t coordinates vanish is a combination of the rows with pivots beyond
# column t.  Plain echelon forms do not have that property when zero
# divisors are around, and kernel extraction below relies on it.


@dataclass
class HowellForm:
    matrix: np.ndarray            # canonical rows, pivots strictly left-to-right
    pivots: List[Tuple[int, int]]  # (column, valuation exponent) per row
    transform: Optional[np.ndarray]  # T with (T @ original) % m == matrix
    modulus_exp: int

    @property
    def rank(self) -> int:
        return len(self.pivots)


def howell_form(a: np.ndarray, k: int, transform: bool = False) -> HowellForm:
    """Canonical Howell form of integer matrix `a` taken mod 2^k."""
    if not 1 <= k <= MAX_MOD_EXP:
        raise IncompatibleOperands(f"modulus exponent {k} outside 1..{MAX_MOD_EXP}")
    m = 1 << k
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2:
        raise IncompatibleOperands("expected a 2-D matrix")
    nrows, ncols = a.shape
    # room for shadow rows; grown on demand
    cap = nrows + 8
    work = np.zeros((cap, ncols), dtype=np.int64)
    work[:nrows] = a % m
    tmat = None
    if transform:
        tmat = np.zeros((cap, nrows), dtype=np.int64)
        tmat[:nrows, :nrows] = np.eye(nrows, dtype=np.int64)
    live = nrows
    done = 0
    pivots: List[Tuple[int, int]] = []
    for col in range(ncols):
        if done == live:
            break
        colvals = work[done:live, col]
        nz = np.nonzero(colvals)[0]
        if nz.size == 0:
            continue
        vals = _TZ[colvals[nz]]
        v = int(vals.min())
        pick = done + int(nz[np.argmax(vals == v)])
        if pick != done:
            work[[done, pick]] = work[[pick, done]]
            if tmat is not None:
                tmat[[done, pick]] = tmat[[pick, done]]
        odd = int(work[done, col]) >> v
        if odd != 1:
            u = _inv_pow2(odd, k)
            work[done] = (work[done] * u) % m
            if tmat is not None:
                tmat[done] = (tmat[done] * u) % m
        # eliminate the column everywhere else; above-rows end up reduced mod 2^v
        q = work[:live, col] >> v
        q[done] = 0
        rows = np.nonzero(q)[0]
        if rows.size:
            work[rows] = (work[rows] - np.outer(q[rows], work[done])) % m
            if tmat is not None:
                tmat[rows] = (tmat[rows] - np.outer(q[rows], tmat[done])) % m
        if v > 0:
            shadow = (work[done] << (k - v)) % m
            if shadow.any():
                if live == cap:
                    grow = max(8, cap // 2)
                    work = np.vstack([work, np.zeros((grow, ncols), dtype=np.int64)])
                    if tmat is not None:
                        tmat = np.vstack([tmat, np.zeros((grow, nrows), dtype=np.int64)])
                    cap += grow
                work[live] = shadow
                if tmat is not None:
                    tmat[live] = (tmat[done] << (k - v)) % m
                live += 1
        pivots.append((col, v))
        done += 1
    assert not work[done:live].any(), "rows past the pivot block must be zero"
    return HowellForm(work[:done].copy(),
                      pivots,
                      tmat[:done].copy() if tmat is not None else None,
                      k)


class ModKSolver:
    """Factored form of a matrix mod 2^k for repeated solves x @ M = b."""

    def __init__(self, mat: np.ndarray, k: int):
        self.k = k
        self.m = 1 << k
        self.ncols = mat.shape[1]
        self.nrows = mat.shape[0]
        self.hf = howell_form(mat, k, transform=True)

    def solve_many(self, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Solve x @ M = b for each row b of rhs.

        Returns (X, ok) where ok[i] is False when row i had no solution
        (X[i] is garbage in that case).
        """
        rhs = np.asarray(rhs, dtype=np.int64) % self.m
        if rhs.ndim == 1:
            rhs = rhs[None, :]
        if rhs.shape[1] != self.ncols:
            raise IncompatibleOperands("rhs has wrong width")
        res = rhs.copy()
        x = np.zeros((rhs.shape[0], self.nrows), dtype=np.int64)
        hmat, tmat = self.hf.matrix, self.hf.transform
        for i, (col, v) in enumerate(self.hf.pivots):
            q = res[:, col] >> v
            nz = np.nonzero(q)[0]
            if nz.size:
                res[nz] = (res[nz] - np.outer(q[nz], hmat[i])) % self.m
                x[nz] = (x[nz] + np.outer(q[nz], tmat[i])) % self.m
        ok = ~res.any(axis=1)
        return x, ok

    def solve(self, b: np.ndarray) -> Optional[np.ndarray]:
        x, ok = self.solve_many(b[None, :] if b.ndim == 1 else b)
        return x[0] if bool(ok[0]) else None

    def reduce(self, b: np.ndarray) -> np.ndarray:
        """Canonical residue of b modulo the row span."""
        b = np.asarray(b, dtype=np.int64) % self.m
        one = b.ndim == 1
        res = (b[None, :] if one else b).copy()
        for i, (col, v) in enumerate(self.hf.pivots):
            q = res[:, col] >> v
            nz = np.nonzero(q)[0]
            if nz.size:
                res[nz] = (res[nz] - np.outer(q[nz], self.hf.matrix[i])) % self.m
        return res[0] if one else res

    def contains(self, b: np.ndarray) -> bool:
        return not self.reduce(b).any()


def kernel_basis_modk(mat: np.ndarray, k: int) -> np.ndarray:
    """Howell basis of {x : x @ mat = 0 mod 2^k}."""
    mat = np.asarray(mat, dtype=np.int64)
    nrows, ncols = mat.shape
    m = 1 << k
    aug = np.zeros((nrows, ncols + nrows), dtype=np.int64)
    aug[:, :ncols] = mat % m
    aug[:, ncols:] = np.eye(nrows, dtype=np.int64)
    hf = howell_form(aug, k)
    lead = [i for i, (c, _) in enumerate(hf.pivots) if c >= ncols]
    if not lead:
        return np.zeros((0, nrows), dtype=np.int64)
    return hf.matrix[lead[0]:, ncols:].copy()


def image_howell(mat: np.ndarray, k: int) -> HowellForm:
    """Canonical form of the row span of mat over Z/2^k."""
    return howell_form(mat, k)


def modk_spans_equal(a: np.ndarray, b: np.ndarray, k: int) -> bool:
    ha = howell_form(a, k).matrix
    hb = howell_form(b, k).matrix
    return ha.shape == hb.shape and bool(np.array_equal(ha, hb))


# ---------------------------------------------------------------------------
# Bit-packed F2 matrices
# ---------------------------------------------------------------------------


class GF2Matrix:
    """Dense F2 matrix with rows packed into uint64 words."""

    __slots__ = ("nrows", "ncols", "words")

    def __init__(self, nrows: int, ncols: int, words: Optional[np.ndarray] = None):
        self.nrows = nrows
        self.ncols = ncols
        nw = (ncols + 63) >> 6
        if words is None:
            words = np.zeros((nrows, max(nw, 1)), dtype=np.uint64)
        self.words = words

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "GF2Matrix":
        arr = (np.asarray(arr) & 1).astype(np.uint8)
        if arr.ndim != 2:
            raise IncompatibleOperands("expected a 2-D matrix")
        nrows, ncols = arr.shape
        nw = max((ncols + 63) >> 6, 1)
        packed = np.packbits(arr, axis=1, bitorder="little")
        buf = np.zeros((nrows, nw * 8), dtype=np.uint8)
        buf[:, : packed.shape[1]] = packed
        return cls(nrows, ncols, buf.view(np.uint64).reshape(nrows, nw))

    def to_dense(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=np.uint8)
        raw = self.words.view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.ncols].copy()

    def get_bit(self, r: int, c: int) -> int:
        return int((self.words[r, c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def _column(self, c: int) -> np.ndarray:
        return ((self.words[:, c >> 6] >> np.uint64(c & 63)) & np.uint64(1)).astype(bool)

    def copy(self) -> "GF2Matrix":
        return GF2Matrix(self.nrows, self.ncols, self.words.copy())

    def rref(self, transform: bool = False):
        """Reduced row echelon form; returns (rref, pivot_cols, transform_or_None).

        The transform satisfies T @ self = rref over F2, with the rows of T
        past the rank spanning the left kernel.
        """
        work = self.words.copy()
        n = self.nrows
        tm = None
        if transform:
            tm = GF2Matrix(n, n)
            for i in range(n):
                tm.words[i, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
            tw = tm.words
        r = 0
        pivots: List[int] = []
        for c in range(self.ncols):
            w, sh = c >> 6, np.uint64(c & 63)
            col = ((work[r:, w] >> sh) & np.uint64(1)).astype(bool)
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                work[[r, p]] = work[[p, r]]
                if transform:
                    tw[[r, p]] = tw[[p, r]]
            mask = ((work[:, w] >> sh) & np.uint64(1)).astype(bool)
            mask[r] = False
            if mask.any():
                work[mask] ^= work[r]
                if transform:
                    tw[mask] ^= tw[r]
            pivots.append(c)
            r += 1
            if r == n:
                break
        out = GF2Matrix(n, self.ncols, work)
        return out, pivots, tm

    def rank(self) -> int:
        _, pivots, _ = self.rref()
        return len(pivots)

    def left_kernel(self) -> "GF2Matrix":
        red, pivots, tm = self.rref(transform=True)
        k = self.nrows - len(pivots)
        ker = GF2Matrix(k, self.nrows, tm.words[len(pivots):].copy())
        red2, _, _ = ker.rref()
        return GF2Matrix(k, self.nrows, red2.words[:k])

    def take_rows(self, n: int) -> "GF2Matrix":
        return GF2Matrix(n, self.ncols, self.words[:n].copy())


def gf2_rref_dense(arr: np.ndarray):
    g = GF2Matrix.from_dense(arr)
    red, pivots, _ = g.rref()
    return red.to_dense()[: len(pivots)], pivots


# ---------------------------------------------------------------------------
# F2 subspaces in reduced echelon form
# ---------------------------------------------------------------------------


class Subspace:
    """A subspace of F2^n held as a canonical reduced-echelon basis."""

    __slots__ = ("ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, basis: np.ndarray, pivots: List[int]):
        self.ambient_dim = ambient_dim
        self.basis = basis            # uint8, shape (dim, ambient_dim), canonical
        self._pivots = pivots

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), dtype=np.uint8), [])

    @classmethod
    def span(cls, rows, ambient_dim: int) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64) & 1
        if rows.size == 0:
            return cls.zero(ambient_dim)
        rows = rows.reshape(-1, ambient_dim)
        red, pivots = gf2_rref_dense(rows)
        return cls(ambient_dim, red.astype(np.uint8), pivots)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = (np.asarray(v, dtype=np.int64) & 1).astype(np.uint8).copy()
        for row, p in zip(self.basis, self._pivots):
            if v[p]:
                v ^= row
        return v

    def contains_vector(self, v) -> bool:
        return not self.reduce(v).any()

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise IncompatibleOperands("ambient dimensions differ")
        return all(self.contains_vector(r) for r in other.basis)

    def union(self, other: "Subspace") -> "Subspace":
        if other.ambient_dim != self.ambient_dim:
            raise IncompatibleOperands("ambient dimensions differ")
        return Subspace.span(np.vstack([self.basis, other.basis]) if self.dim or other.dim
                             else np.zeros((0, self.ambient_dim)), self.ambient_dim)

    def coordinates(self, v) -> Optional[np.ndarray]:
        """Coefficients of v in the canonical basis, or None if outside."""
        v = (np.asarray(v, dtype=np.int64) & 1).astype(np.uint8)
        coords = v[self._pivots] if self.dim else np.zeros(0, dtype=np.uint8)
        rem = v.copy()
        for c, row in zip(coords, self.basis):
            if c:
                rem ^= row
        return coords if not rem.any() else None

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.basis.shape == other.basis.shape
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.ambient_dim, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def basis_rows(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.basis]


# ---------------------------------------------------------------------------
# Integer matrices: HNF, kernels, solve, Smith normal form
# ---------------------------------------------------------------------------

_INT64_GUARD = 1 << 50


def _as_int_matrix(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == object:
        return arr.copy()
    return arr.astype(np.int64, copy=True)


def _needs_object(work: np.ndarray, q: np.ndarray, row: np.ndarray) -> bool:
    if work.dtype == object:
        return False
    qa = int(np.abs(q).max(initial=0))
    ra = int(np.abs(row).max(initial=0))
    wa = int(np.abs(work).max(initial=0))
    return qa * ra + wa >= _INT64_GUARD


def _to_object(*arrs):
    out = []
    for a in arrs:
        if a is None:
            out.append(None)
        elif a.dtype == object:
            out.append(a)
        else:
            out.append(a.astype(object))
    return out


def row_hnf(a, transform: bool = False):
    """Row Hermite normal form. Returns (H, pivot_cols, T) with T @ a = H.

    Pivots are positive, entries above each pivot are reduced into [0, pivot),
    rows below the rank are zero and dropped. Falls back to Python ints when
    int64 entries would overflow.
    """
    work = _as_int_matrix(a)
    nrows, ncols = work.shape
    tmat = None
    if transform:
        tmat = np.eye(nrows, dtype=np.int64)
    done = 0
    pivcols: List[int] = []
    for col in range(ncols):
        if done == nrows:
            break
        while True:
            colvals = work[done:, col]
            nz = np.nonzero(colvals)[0]
            if nz.size == 0:
                break
            pick = done + int(nz[np.argmin(np.abs(colvals[nz]))])
            if pick != done:
                work[[done, pick]] = work[[pick, done]]
                if tmat is not None:
                    tmat[[done, pick]] = tmat[[pick, done]]
            if work[done, col] < 0:
                work[done] = -work[done]
                if tmat is not None:
                    tmat[done] = -tmat[done]
            piv = work[done, col]
            q = work[done + 1:, col] // piv
            if not np.any(q):
                if not np.any(work[done + 1:, col]):
                    break
                # remainders smaller than pivot exist; loop picks a smaller pivot
                continue
            if _needs_object(work, q, work[done]):
                work, tmat = _to_object(work, tmat)
                q = q.astype(object)
            work[done + 1:] -= np.outer(q, work[done])
            if tmat is not None:
                tmat[done + 1:] -= np.outer(q, tmat[done])
        if work[done, col]:
            piv = work[done, col]
            if done > 0:
                q = work[:done, col] // piv
                if np.any(q):
                    if _needs_object(work, q, work[done]):
                        work, tmat = _to_object(work, tmat)
                        q = q.astype(object)
                    work[:done] -= np.outer(q, work[done])
                    if tmat is not None:
                        tmat[:done] -= np.outer(q, tmat[done])
            pivcols.append(col)
            done += 1
    hnf = work[:done]
    return hnf, pivcols, tmat


def int_left_kernel(a) -> np.ndarray:
    """Lattice basis of {x integer : x @ a = 0} (saturated by construction)."""
    work = _as_int_matrix(a)
    nrows, ncols = work.shape
    aug = np.zeros((nrows, ncols + nrows), dtype=work.dtype)
    aug[:, :ncols] = work
    aug[:, ncols:] = np.eye(nrows, dtype=work.dtype if work.dtype != object else np.int64)
    hnf, pivcols, _ = row_hnf(aug)
    lead = [i for i, c in enumerate(pivcols) if c >= ncols]
    if not lead:
        return np.zeros((0, nrows), dtype=np.int64)
    ker = hnf[lead[0]:, ncols:]
    if ker.dtype == object:
        mx = max(abs(int(x)) for x in ker.flat) if ker.size else 0
        if mx < _INT64_GUARD:
            ker = ker.astype(np.int64)
    return np.array(ker, copy=True)


class IntSolver:
    """Factored integer matrix for repeated exact solves x @ M = b."""

    def __init__(self, mat):
        self.mat = _as_int_matrix(mat)
        self.ncols = self.mat.shape[1]
        self.nrows = self.mat.shape[0]
        self.hnf, self.pivcols, self.tmat = row_hnf(self.mat, transform=True)

    def solve(self, b) -> Optional[np.ndarray]:
        res = _as_int_matrix(np.asarray(b).reshape(1, -1))[0]
        if self.hnf.dtype == object and res.dtype != object:
            res = res.astype(object)
        x = np.zeros(self.nrows, dtype=self.hnf.dtype)
        for i, c in enumerate(self.pivcols):
            piv = self.hnf[i, c]
            if res[c] % piv != 0:
                return None
            q = res[c] // piv
            if q:
                res = res - q * self.hnf[i]
                x = x + q * self.tmat[i]
        if np.any(res):
            return None
        return x

    def contains(self, b) -> bool:
        return self.solve(b) is not None


def int_solve(a, b) -> Optional[np.ndarray]:
    return IntSolver(a).solve(b)


def int_spans_equal(a, b) -> bool:
    """Do two integer row sets span the same lattice?"""
    ha, pa, _ = row_hnf(a)
    hb, pb, _ = row_hnf(b)
    return pa == pb and ha.shape == hb.shape and np.array_equal(ha, hb)


def smith_normal_form(a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form over Z: returns (D, U, V) with U @ a @ V = D,
    U and V unimodular, and the nonzero diagonal d1 | d2 | ... positive."""
    work = _as_int_matrix(a)
    nrows, ncols = work.shape
    umat = np.eye(nrows, dtype=np.int64)
    vmat = np.eye(ncols, dtype=np.int64)

    def ensure_object():
        nonlocal work, umat, vmat
        work, umat, vmat = _to_object(work, umat, vmat)

    def guard(q, vec):
        if work.dtype != object and _needs_object(work, np.atleast_1d(q), vec):
            ensure_object()

    t = 0
    limit = min(nrows, ncols)
    while t < limit:
        sub = work[t:, t:]
        nz = np.nonzero(sub)
        if nz[0].size == 0:
            break
        vals = np.abs(sub[nz])
        j = int(np.argmin(vals))
        pr, pc = int(nz[0][j]) + t, int(nz[1][j]) + t
        if pr != t:
            work[[t, pr]] = work[[pr, t]]
            umat[[t, pr]] = umat[[pr, t]]
        if pc != t:
            work[:, [t, pc]] = work[:, [pc, t]]
            vmat[:, [t, pc]] = vmat[:, [pc, t]]
        if work[t, t] < 0:
            work[t] = -work[t]
            umat[t] = -umat[t]
        piv = work[t, t]
        col = work[t + 1:, t]
        row = work[t, t + 1:]
        qc = col // piv
        qr = row // piv
        if np.any(qc) or np.any(qr):
            guard(np.concatenate([np.atleast_1d(qc), np.atleast_1d(qr)]), work[t])
            if np.any(qc):
                qc = work[t + 1:, t] // work[t, t]
                work[t + 1:] -= np.outer(qc, work[t])
                umat[t + 1:] -= np.outer(qc, umat[t])
            if np.any(qr):
                qr = work[t, t + 1:] // work[t, t]
                work[:, t + 1:] -= np.outer(work[:, t], qr)
                vmat[:, t + 1:] -= np.outer(vmat[:, t], qr)
            continue  # remainders may now be smaller than the pivot
        if np.any(work[t + 1:, t]) or np.any(work[t, t + 1:]):
            continue
        rest = work[t + 1:, t + 1:]
        if rest.size and piv > 1:
            bad = np.nonzero(rest % piv)
            if bad[0].size:
                r = int(bad[0][0]) + t + 1
                guard(np.ones(1, dtype=np.int64), work[r])
                work[t] += work[r]
                umat[t] += umat[r]
                continue
        t += 1
    # normalize signs and enforce the divisibility chain ordering
    for i in range(min(nrows, ncols)):
        if work[i, i] < 0:
            work[i] = -work[i]
            umat[i] = -umat[i]
    return work, umat, vmat


def invariant_factors(a, drop_ones: bool = True) -> List[int]:
    """Nonzero Smith invariant factors of an integer matrix."""
    d, _, _ = smith_normal_form(a)
    out = [int(d[i, i]) for i in range(min(d.shape)) if d[i, i] != 0]
    if drop_ones:
        out = [x for x in out if x != 1]
    return out


def quotient_invariant_factors(space_rows, sub_rows) -> List[int]:
    """Invariant factors (with multiplicity, 1s dropped) of span(space)/span(sub).

    Requires span(sub) <= span(space) over Z; rows of `sub` are expressed in
    the basis extracted from `space` and the coefficient matrix goes through
    Smith. Free quotient summands show up as trailing zeros.
    """
    space_rows = _as_int_matrix(space_rows)
    sub_rows = _as_int_matrix(sub_rows)
    basis, _, _ = row_hnf(space_rows)
    if basis.shape[0] == 0:
        if sub_rows.size and np.any(sub_rows):
            raise IncompatibleOperands("sub is not inside space")
        return []
    solver = IntSolver(basis)
    coeffs = []
    for r in sub_rows:
        x = solver.solve(r)
        if x is None:
            raise IncompatibleOperands("sub is not inside space")
        coeffs.append(x[: basis.shape[0]])
    if not coeffs:
        return [0] * basis.shape[0]
    cm = np.array(coeffs, dtype=object if basis.dtype == object else np.int64)
    d, _, _ = smith_normal_form(cm)
    diag = [int(d[i, i]) for i in range(min(d.shape))]
    facs = [x for x in diag if x not in (0, 1)]
    rank = sum(1 for x in diag if x != 0)
    facs += [0] * (basis.shape[0] - rank)
    return facs


def modk_quotient_invariant_factors(space_rows, sub_rows, k: int) -> List[int]:
    """Invariant factors of span(space)/span(sub) as Z/2^k-modules.

    Presents the quotient on the Howell generators of the space: relators are
    the sub rows in those coordinates, the mod-2^k relations among the
    generators themselves (a Howell row times its pivot order need not die),
    and 2^k times each generator.  Smith over Z finishes.
    """
    hf = howell_form(space_rows, k)
    if hf.rank == 0:
        if np.any(np.asarray(sub_rows, dtype=np.int64) % (1 << k)):
            raise IncompatibleOperands("sub is not inside space")
        return []
    solver = ModKSolver(hf.matrix, k)
    sub_rows = np.asarray(sub_rows, dtype=np.int64)
    if sub_rows.size:
        coeffs, ok = solver.solve_many(sub_rows)
        if not ok.all():
            raise IncompatibleOperands("sub is not inside space")
        rels = [coeffs]
    else:
        rels = []
    selfrels = kernel_basis_modk(hf.matrix, k)
    if selfrels.size:
        rels.append(selfrels)
    rels.append((1 << k) * np.eye(hf.rank, dtype=np.int64))
    return invariant_factors(np.vstack(rels))
