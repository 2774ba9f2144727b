"""Resolution layer: minimality, exactness, restriction, lifts, diagonal."""
import numpy as np
import pytest

from cohlat.errors import BudgetExceeded
from cohlat.groups import Subgroup, builtin_group, subgroup_classes
from cohlat.linalg import GF2Matrix
from cohlat.resolution import (diagonal_approximation, lift_chain_map,
                               minimal_resolution, restrict_complex,
                               tensor_square_complex, verify_boundary_squares,
                               verify_exactness)

# mod-2 cohomology dimensions from the standard ring presentations:
# C2, C4, C8 are 1 in every degree; V4 and D4 grow linearly; Q8 is periodic.
KNOWN_BETTI = {
    "C2": [1, 1, 1, 1, 1],
    "C4": [1, 1, 1, 1, 1],
    "C8": [1, 1, 1, 1, 1],
    "V4": [1, 2, 3, 4, 5],
    "C4xC2": [1, 2, 3, 4, 5],
    "D4": [1, 2, 3, 4, 5],
    "Q8": [1, 2, 2, 1, 1],
}


@pytest.mark.parametrize("name", sorted(KNOWN_BETTI))
@pytest.mark.parametrize("k", [1, 2])
def test_ranks_match_known_betti(name, k):
    g = builtin_group(name)
    cx = minimal_resolution(g, k, 4)
    # the shared cache may already be deeper than requested
    assert cx.ranks[:5] == KNOWN_BETTI[name]


@pytest.mark.parametrize("name,k", [("C4", 3), ("D4", 2), ("Q8", 4), ("V4", 1)])
def test_complex_is_exact_and_minimal(name, k):
    g = builtin_group(name)
    cx = minimal_resolution(g, k, 4)
    assert verify_boundary_squares(cx)
    for i in range(4):
        assert verify_exactness(cx, i)
    for i in range(1, 5):
        gen_rows = cx.boundaries[i][cx.gen_coords(i)]
        assert not cx.block_augment(i - 1, gen_rows, two_exp=1).any()


def test_boundary_rows_are_equivariant():
    g = builtin_group("D4")
    cx = minimal_resolution(g, 2, 3)
    for i in range(1, 4):
        d = cx.boundaries[i]
        gens = cx.gen_coords(i)
        for x in range(g.order):
            moved = cx.coord_index[i][np.arange(cx.ranks[i]), x]
            assert np.array_equal(d[moved], cx.act(i - 1, x, d[gens]))


def test_trivial_group_resolution_stops():
    g = builtin_group("D4")
    triv = Subgroup(g, [0])
    one, _ = triv.as_group()
    cx = minimal_resolution(one, 2, 3)
    assert cx.ranks[0] == 1
    assert not any(cx.ranks[1:])


def test_restrict_complex_shares_boundaries():
    g = builtin_group("D4")
    cx = minimal_resolution(g, 2, 3)
    h = next(s for s in subgroup_classes(g)
             if s.order == 4 and s.as_group()[0].element_orders.max() == 4)
    rcx = restrict_complex(cx, h)
    assert rcx.ranks == [2 * r for r in cx.ranks]
    for i in range(4):
        assert rcx.boundaries[i] is cx.boundaries[i]
    # the restricted action of h agrees with the ambient action
    _, to_global = h.as_group()
    for i in range(3):
        v = np.arange(cx.dims[i], dtype=np.int64) % 4
        for hl in range(h.order):
            assert np.array_equal(rcx.act(i, hl, v),
                                  cx.act(i, int(to_global[hl]), v))


def _check_chain_map(src, dst, f):
    for i in range(1, len(f)):
        lhs = src.boundaries[i] @ f[i - 1] % src.mod
        rhs = f[i] @ dst.boundaries[i] % src.mod
        assert np.array_equal(lhs, rhs)


def test_lift_identity_chain_map():
    cx = minimal_resolution(builtin_group("Q8"), 3, 3)
    start = np.zeros((1, cx.dims[0]), dtype=np.int64)
    start[0, 0] = 1
    f = lift_chain_map(cx, cx, start, 3)
    _check_chain_map(cx, cx, f)
    # lifting the identity keeps every degree invertible mod 2
    for m in f:
        assert GF2Matrix.from_dense(m % 2).rank() == m.shape[0]


def test_comparison_lifts_between_subgroup_resolutions():
    g = builtin_group("D4")
    cx = minimal_resolution(g, 2, 3)
    h = next(s for s in subgroup_classes(g) if s.order == 4)
    hgrp, _ = h.as_group()
    ph = restrict_complex(cx, h)
    q = minimal_resolution(hgrp, 2, 3)
    # u: P|_H -> Q sends every degree-0 generator to the generator of Q
    u0 = np.zeros((ph.ranks[0], q.dims[0]), dtype=np.int64)
    u0[:, q.gen_coords(0)[0]] = 1
    u = lift_chain_map(ph, q, u0, 3)
    _check_chain_map(ph, q, u)
    # v: Q -> P|_H sends the generator to the identity-coset generator
    v0 = np.zeros((q.ranks[0], ph.dims[0]), dtype=np.int64)
    v0[0, ph.gen_coords(0)[0]] = 1
    v = lift_chain_map(q, ph, v0, 3)
    _check_chain_map(q, ph, v)
    # composites are chain self-maps
    _check_chain_map(q, q, [v[i] @ u[i] % q.mod for i in range(4)])
    _check_chain_map(ph, ph, [u[i] @ v[i] % q.mod for i in range(4)])


@pytest.mark.parametrize("name", ["C2", "V4", "D4"])
def test_diagonal_approximation_commutes(name):
    cx = minimal_resolution(builtin_group(name), 1, 3)
    tens, maps = diagonal_approximation(cx, 3)
    assert verify_boundary_squares(tens)
    for i in range(1, 4):
        lhs = cx.boundaries[i] @ maps[i - 1] % 2
        rhs = maps[i] @ tens.boundaries[i] % 2
        assert np.array_equal(lhs, rhs)


def test_tensor_square_budget():
    g = builtin_group("sz8-sylow")
    cx = minimal_resolution(g, 1, 1)
    with pytest.raises(BudgetExceeded):
        tensor_square_complex(cx, 1)


def test_sz8_low_degrees():
    g = builtin_group("sz8-sylow")
    cx = minimal_resolution(g, 7, 3)
    assert cx.ranks[:4] == [1, 3, 5, 9]
    assert verify_boundary_squares(cx)
    assert verify_exactness(cx, 0)
    assert verify_exactness(cx, 1)
