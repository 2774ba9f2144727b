"""Tests for the degree-three obstruction criterion."""
from itertools import combinations_with_replacement, product

import numpy as np
import pytest

from cohlat.cohomology import GroupCohomology, SubgroupLink
from cohlat.criterion import (CriterionConfig, evaluate_criterion,
                              transfer_cup_image, transfer_cup_span,
                              triple_cup_span)
from cohlat.errors import ModulusTooSmall, ValidationError
from cohlat.groups import Subgroup, builtin_group, closure, subgroup_classes
from cohlat.linalg import GF2Matrix, Subspace


def _characters(group):
    """All nonzero homs to F2, as value arrays, from generator images."""
    gens = group.generators()
    t = group.table
    homs = []
    for bits in product((0, 1), repeat=len(gens)):
        val = {0: 0}
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for a in frontier:
                for gi, b in zip(gens, bits):
                    c = int(t[a, gi])
                    v = val[a] ^ b
                    if c in val:
                        if val[c] != v:
                            ok = False
                            break
                    else:
                        val[c] = v
                        nxt.append(c)
                if not ok:
                    break
            frontier = nxt
        if ok and len(val) == group.order and any(bits):
            homs.append(np.array([val[i] for i in range(group.order)]))
    return homs


def _char_table(gc):
    """Character value table of each degree-1 basis class.

    The value on g is read off by restricting to the cyclic subgroup it
    generates; the restriction is nonzero exactly on classes whose character
    is 1 outside the squares of that cyclic group.
    """
    g = gc.group
    rows = []
    for e in np.eye(gc.h_dim(1), dtype=np.int64):
        vals = np.zeros(g.order, dtype=np.int64)
        for x in range(1, g.order):
            cyc = [0]
            y = x
            while y != 0:
                cyc.append(int(y))
                y = int(g.table[y, x])
            lx = SubgroupLink(gc, Subgroup(g, sorted(set(cyc))), max_degree=1)
            rx = lx.restrict(1, e)
            if rx.any():
                hg = lx.hco.group
                loc = {int(v): i for i, v in enumerate(lx.to_global)}
                sqc = closure(hg, sorted({int(hg.table[a, a])
                                          for a in range(hg.order)}))
                vals[x] = 0 if loc[x] in sqc else int(rx[0])
        rows.append(vals)
    return np.array(rows) % 2


def _ver_images(group, sub):
    """Transfer of each character of the subgroup, by the coset-walk formula."""
    t, inv = group.table, group.inv
    reps = sub.coset_reps()
    hgrp, to_global = sub.as_group()
    loc = {int(x): i for i, x in enumerate(to_global)}
    cos = np.zeros(group.order, dtype=int)
    for j, r in enumerate(reps):
        for h in sub.elements:
            cos[t[r, h]] = j
    vtab = []
    for g in range(group.order):
        out = 0
        for r in reps:
            gr = int(t[g, r])
            hj = int(t[inv[reps[cos[gr]]], gr])
            out = int(hgrp.table[out, loc[hj]])
        vtab.append(out)
    return [np.array([phi[vtab[x]] for x in range(group.order)]) % 2
            for phi in _characters(hgrp)]


NEGATIVE_CONTROLS = ["C2", "C4", "C8", "C16", "V4", "C4xC2", "C2xC2xC2",
                     "C4xC4", "D4", "Q8", "D8", "Q16"]


@pytest.fixture(scope="module")
def sz8_report():
    return evaluate_criterion(builtin_group("sz8-sylow"),
                              CriterionConfig(which="b", max_degree=4))


@pytest.mark.parametrize("name", NEGATIVE_CONTROLS)
def test_negative_controls(name):
    rep = evaluate_criterion(builtin_group(name))
    assert rep.criterion_a is False
    assert rep.criterion_b is False
    assert rep.witness_a is None and rep.witness_b is None
    assert not rep.nonzero_obstruction


def test_sz8_criterion_holds(sz8_report):
    rep = sz8_report
    assert rep.criterion_b is True
    assert rep.nonzero_obstruction
    assert rep.h_dims == [1, 3, 5, 9]
    assert rep.transfer_span_dim == 0
    assert rep.triple_cup_span_dim == 0
    assert rep.sq1_image_dim == 2
    assert rep.criterion_a is None and rep.integral_image_dim is None


def test_sz8_witness_is_verified(sz8_report):
    w = np.array(sz8_report.witness_b)
    assert w.any()
    gc = GroupCohomology(builtin_group("sz8-sylow"), 4)
    assert gc.sq1_image(3).contains_vector(w)
    span = Subspace.span(np.array(sz8_report.transfer_span_basis), 9) \
        if sz8_report.transfer_span_basis else Subspace.zero(9)
    assert not span.contains_vector(w)


def test_sz8_subgroup_terms(sz8_report):
    terms = sz8_report.subgroups
    assert len(terms) == 59
    orders = {}
    for t in terms:
        orders[t.order] = orders.get(t.order, 0) + 1
    assert orders == {1: 1, 2: 7, 4: 14, 8: 22, 16: 7, 32: 7, 64: 1}
    assert all(t.span_dim == 0 for t in terms)
    full = [t for t in terms if t.order == 64][0]
    assert full.h1_dim == 3 and full.integral_h2_dim == 3


def test_sz8_products_match_integral_classes():
    # the integrally-liftable degree-2 classes are exactly the products of
    # degree-1 classes, and all triple products vanish
    gc = GroupCohomology(builtin_group("sz8-sylow"), 4)
    e = np.eye(3, dtype=np.int64)
    pairs = [gc.cup(1, e[i], 1, e[j]) for i in range(3) for j in range(i, 3)]
    assert all(p.any() for p in pairs)
    pspan = Subspace.span(np.array(pairs), gc.h_dim(2))
    assert pspan.dim == 3
    assert gc.integral_reduction_image(2) == pspan
    assert triple_cup_span(gc).dim == 0


def test_full_group_term_needs_no_transfer():
    # with the whole group as subgroup the transfer is the identity, so the
    # term must equal the span of direct products
    g = builtin_group("D4")
    gc = GroupCohomology(g, 3)
    span, term = transfer_cup_image(gc, Subgroup(g, range(g.order)))
    e = np.eye(gc.h_dim(1), dtype=np.int64)
    direct = [gc.cup(1, x, 2, u.astype(np.int64))
              for x in e for u in gc.integral_reduction_image(2).basis]
    assert span == Subspace.span(np.array(direct), gc.h_dim(3))
    assert term.index == 1


def test_transfer_matches_coset_walk_oracle():
    for name in ["C4", "C8", "D4", "C4xC2", "D8"]:
        g = builtin_group(name)
        gc = GroupCohomology(g, 2)
        tab = _char_table(gc)
        nonzero_seen = 0
        for sub in subgroup_classes(g):
            if not 1 < sub.order < g.order:
                continue
            link = SubgroupLink(gc, sub, max_degree=1)
            mine = [(link.transfer(1, e) @ tab) % 2
                    for e in np.eye(link.hco.h_dim(1), dtype=np.int64)]
            oracle = _ver_images(g, sub)
            my_span = Subspace.span(np.array(mine), g.order)
            or_span = Subspace.span(np.array(oracle), g.order)
            assert my_span == or_span
            nonzero_seen += sum(1 for r in oracle if r.any())
        if name in ("C4", "C8", "D4", "D8"):
            assert nonzero_seen > 0


def test_span_is_conjugation_invariant():
    g = builtin_group("D8")
    gc = GroupCohomology(g, 3)
    sub = next(s for s in subgroup_classes(g)
               if s.order == 2 and len({tuple(s.conjugated(x).elements)
                                        for x in range(g.order)}) > 1)
    base, _ = transfer_cup_image(gc, sub)
    for x in range(g.order):
        other, _ = transfer_cup_image(gc, sub.conjugated(x))
        assert other == base


def test_threads_agree_with_serial():
    g = builtin_group("D8")
    gc = GroupCohomology(g, 3)
    s1, t1 = transfer_cup_span(gc, threads=1)
    s2, t2 = transfer_cup_span(gc, threads=4)
    assert s1 == s2
    assert [t.to_dict() for t in t1] == [t.to_dict() for t in t2]


def test_report_dict_roundtrips(sz8_report):
    d = sz8_report.to_dict()
    assert d["criterion_b"] is True
    assert d["group"]["order"] == 64
    assert len(d["group"]["hash"]) == 64
    assert d["config"]["which"] == "b"
    assert d["transfer_span"]["dim"] == 0
    assert len(d["subgroups"]) == 59


def test_config_validation():
    g = builtin_group("C4")
    with pytest.raises(ValidationError):
        evaluate_criterion(g, CriterionConfig(which="c"))
    with pytest.raises(ValidationError):
        evaluate_criterion(g, CriterionConfig(max_degree=4))
    with pytest.raises(ValidationError):
        evaluate_criterion(g, CriterionConfig(which="b", max_degree=3))
    with pytest.raises(ValidationError):
        evaluate_criterion(g, CriterionConfig(threads=0))
    with pytest.raises(ModulusTooSmall):
        evaluate_criterion(g, CriterionConfig(modulus_exp=1))
    cfg = CriterionConfig(which="b").resolve(g)
    assert (cfg.modulus_exp, cfg.max_degree) == (3, 4)


def test_variant_b_implies_variant_a():
    # groups where both variants were computed never disagree
    for name in ["C4", "V4", "D4", "Q8"]:
        rep = evaluate_criterion(builtin_group(name))
        assert not (rep.criterion_b and not rep.criterion_a)
