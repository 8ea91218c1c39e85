import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowlat.counting import (
    _lattice_candidates,
    composition_weight,
    compositions,
    count,
    decompose_into_tripods,
    ehrhart_count,
    ehrhart_via_fibers,
    fiber_table,
    first_tripod_gap,
    hilbert_count,
    hilbert_points,
    hilbert_via_fibers,
    iter_lattice_points,
    tripod_fiber_f,
    tripod_fiber_g,
    tripod_points,
)
from flowlat.errors import GuardError
from flowlat.flows import vertex_matrix
from flowlat.groups import parse_group
from flowlat.linalg import lattice_basis
from flowlat.trees import caterpillar, claw, parse_tree, relabel, reroot, snowflake, tripod

Z2, Z3 = parse_group("Z2"), parse_group("Z3")
QUARTET = parse_tree("((1,2),(3,4));")


def test_compositions():
    assert compositions(2, 2) == ((0, 2), (1, 1), (2, 0))
    assert len(compositions(4, 3)) == math.comb(6, 2)
    assert compositions(0, 3) == ((0, 0, 0),)
    for n, m in [(3, 4), (5, 2), (2, 6)]:
        cs = compositions(n, m)
        assert list(cs) == sorted(cs) and len(cs) == math.comb(n + m - 1, m - 1)
        assert all(sum(c) == n for c in cs)


def test_composition_weight():
    g = parse_group("Z2xZ2")
    # weight is the group sum of the block's elements with multiplicity
    for c in compositions(3, 4):
        expect = g.index(g.sum([g.mul(k, a) for k, a in zip(c, g.elements)]))
        assert composition_weight(g, c) == expect


@pytest.mark.parametrize("spec,n", [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z4", 2), ("Z2xZ2", 2), ("Z3", 3)])
def test_tripod_lattice_filter_matches_hnf(spec, n):
    g = parse_group(spec)
    comps = compositions(n, g.order)
    C = len(comps)
    lat = lattice_basis(vertex_matrix(tripod(), g).rows)
    for i in range(C):
        got = set(_lattice_candidates(g, n, i).tolist())
        expect = {
            (i * C + j) * C + k
            for j in range(C)
            for k in range(C)
            if list(comps[i] + comps[j] + comps[k]) in lat
        }
        assert got == expect


@pytest.mark.parametrize("spec,n", [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z3", 3), ("Z4", 2), ("Z4", 3),
                                    ("Z2xZ2", 2), ("Z2xZ2", 3), ("Z5", 2), ("Z6", 2)])
def test_tripod_points_match_direct(spec, n):
    g = parse_group(spec)
    tp = tripod_points(g, n)
    direct = list(iter_lattice_points(tripod(), g, n))
    assert tp.points("ehrhart") == [x for x, _ in direct]
    assert tp.points("hilbert") == sorted(x for x, s in direct if s)
    assert set(tp.points("hilbert")) == hilbert_points(tripod(), g, n)


def test_tripod_z2_small_counts():
    assert count(tripod(), Z2, 0) == 1
    assert count(tripod(), Z2, 2) == 10
    assert count(tripod(), Z2, 2, kind="hilbert") == 10
    assert first_tripod_gap(Z2, 3) is None


def test_tripod_fiber_examples():
    assert tripod_fiber_f(Z2, (1, 0)) == 2
    assert tripod_fiber_f(Z2, (0, 0)) == 1
    assert tripod_fiber_f(Z2, (1, 1)) == 4
    assert tripod_fiber_g(Z2, (1, 0), (1, 0)) == 1
    assert tripod_fiber_g(Z2, (1, 0), (0, 1)) == 1
    with pytest.raises(ValueError):
        tripod_fiber_g(Z2, (1, 0), (1, 1))
    with pytest.raises(ValueError):
        tripod_fiber_f(Z2, (1, 0, 0))


@pytest.mark.parametrize("spec,n", [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z4", 2), ("Z2xZ2", 2), ("Z6", 2)])
def test_fiber_marginalization(spec, n):
    g = parse_group(spec)
    total = 0
    for a in compositions(n, g.order):
        f = tripod_fiber_f(g, a)
        assert sum(tripod_fiber_g(g, a, b) for b in compositions(n, g.order)) == f
        total += f
    assert total == count(tripod(), g, n)


def test_decompose_into_tripods():
    assert len(decompose_into_tripods(snowflake())) == 4
    assert len(decompose_into_tripods(caterpillar(3))) == 4
    steps = decompose_into_tripods(tripod())
    assert len(steps) == 1 and steps[0].edge is None
    s = decompose_into_tripods(snowflake())
    assert all(step.edge is not None for step in s[1:])
    with pytest.raises(ValueError):
        decompose_into_tripods(claw(4))


@pytest.mark.parametrize("spec,n", [("Z2", 1), ("Z2", 2), ("Z2", 3), ("Z3", 1), ("Z3", 2), ("Z3", 3)])
def test_fiber_equals_direct_on_quartet(spec, n):
    g = parse_group(spec)
    e = ehrhart_via_fibers(QUARTET, g, n)
    assert e == ehrhart_count(QUARTET, g, n)
    h = hilbert_via_fibers(QUARTET, g, n)
    assert h == hilbert_count(QUARTET, g, n, "direct")
    assert h <= e


def test_quartet_known_values():
    assert [count(QUARTET, Z2, n) for n in range(4)] == [1, 8, 34, 104]
    assert [count(QUARTET, Z3, n) for n in range(4)] == [1, 27, 351, 2869]


@pytest.mark.parametrize("tree", [snowflake(), caterpillar(3)], ids=["snowflake", "caterpillar"])
def test_fiber_equals_direct_z2_six_leaves(tree):
    for n in (1, 2):
        assert ehrhart_via_fibers(tree, Z2, n) == ehrhart_count(tree, Z2, n)
        assert hilbert_via_fibers(tree, Z2, n) == hilbert_count(tree, Z2, n, "direct")


@pytest.mark.parametrize("tree,spec,n", [(QUARTET, "Z3", 2), (snowflake(), "Z2", 3), (caterpillar(3), "Z3", 2),
                                         (tripod(), "Z4", 3)])
def test_fiber_table_sums_to_count(tree, spec, n):
    g = parse_group(spec)
    for kind in ("ehrhart", "hilbert"):
        total = count(tree, g, n, kind)
        for label in tree.leaf_labels:
            table = fiber_table(tree, g, n, label, kind)
            assert sum(table.values()) == total
            assert set(table) <= set(compositions(n, g.order))


def test_fiber_table_tripod_matches_f():
    for a in compositions(2, 3):
        assert fiber_table(tripod(), Z3, 2, 3)[a] == tripod_fiber_f(Z3, a)


@pytest.mark.parametrize("tree", [tripod(), QUARTET, snowflake(), caterpillar(3)])
@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z2xZ2"])
def test_degree_one_counts_vertices(tree, spec):
    g = parse_group(spec)
    n_vertices = g.order ** (tree.n_edges - len(tree.inner_vertices))
    assert count(tree, g, 1) == n_vertices == count(tree, g, 1, "hilbert")


GROUPS_UP_TO_4 = ["Z2", "Z3", "Z4", "Z2xZ2"]


@pytest.mark.parametrize("spec", GROUPS_UP_TO_4)
@pytest.mark.parametrize("tree", [tripod(), QUARTET, snowflake()], ids=["tripod", "quartet", "snowflake"])
def test_counts_invariant_under_rooting_and_relabeling(tree, spec):
    g = parse_group(spec)
    labels = sorted(tree.leaf_labels)
    perm = dict(zip(labels, labels[1:] + labels[:1]))
    for n in (1, 2):
        for kind in ("ehrhart", "hilbert"):
            base = count(tree, g, n, kind)
            assert count(relabel(tree, perm), g, n, kind) == base
            for v in range(tree.n_vertices):
                assert count(reroot(tree, v), g, n, kind) == base


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["Z2", "Z3", "Z4", "Z2xZ2", "Z5"]), st.integers(0, 3),
       st.sampled_from(["tripod", "quartet", "snowflake", "caterpillar"]))
def test_hilbert_at_most_ehrhart(spec, n, name):
    g = parse_group(spec)
    tree = {"tripod": tripod(), "quartet": QUARTET, "snowflake": snowflake(), "caterpillar": caterpillar(3)}[name]
    if g.order >= 4 and name in ("snowflake", "caterpillar") and n == 3:
        n = 2
    assert count(tree, g, n, "hilbert") <= count(tree, g, n, "ehrhart")


def test_first_non_normal_tripod_dilation():
    z6 = parse_group("Z6")
    for n in (2, 3):
        assert len(tripod_points(z6, n).extra) == 0
    assert len(tripod_points(z6, 4).extra) == 9
    assert first_tripod_gap(z6, 4) == (0, 1, 1, 0, 1, 1) * 3


@pytest.mark.parametrize("spec,extra", [("Z8", 48), ("Z2xZ2xZ2", 336), ("Z4xZ2", 144)])
def test_order_eight_gap_counts(spec, extra):
    g = parse_group(spec)
    assert len(tripod_points(g, 3).extra) == 0
    assert len(tripod_points(g, 4).extra) == extra


def test_non_normal_tree_counts_differ():
    z6 = parse_group("Z6")
    tp = tripod_points(z6, 4)
    assert count(tripod(), z6, 4) - count(tripod(), z6, 4, "hilbert") == len(tp.extra) == 9


def test_errors_and_guards(monkeypatch):
    with pytest.raises(ValueError):
        count(tripod(), Z2, -1)
    with pytest.raises(ValueError):
        count(tripod(), Z2, 1, kind="volume")
    with pytest.raises(ValueError):
        count(tripod(), Z2, 1, method="magic")
    with pytest.raises(ValueError):
        ehrhart_via_fibers(claw(4), Z2, 2)
    # direct enumeration is refused on large instances
    with pytest.raises(GuardError):
        ehrhart_count(snowflake(), parse_group("Z3"), 1)
    monkeypatch.setenv("FLOWLAT_GUARD_MB", "1")
    with pytest.raises(GuardError):
        hilbert_points(snowflake(), Z2, 6)


def test_direct_hilbert_points_exhaustive_small():
    vm = vertex_matrix(tripod(), Z3)
    for n in range(4):
        brute = {tuple(map(sum, zip(*combo))) if combo else (0,) * 9
                 for combo in itertools.combinations_with_replacement(vm.columns, n)}
        assert hilbert_points(tripod(), Z3, n) == brute


def test_lattice_points_in_lex_order():
    xs = [x for x, _ in iter_lattice_points(QUARTET, Z2, 2)]
    assert xs == sorted(xs) and len(xs) == len(set(xs)) == 34
    assert np.all(np.diff(tripod_points(Z3, 3).ehrhart) > 0)


def test_z6_gaps_agree_with_direct_enumeration():
    # slow: exhaustive lattice enumeration with HNF membership and LP
    z6 = parse_group("Z6")
    direct = [x for x, is_sum in iter_lattice_points(tripod(), z6, 4) if not is_sum]
    assert direct == tripod_points(z6, 4).points_extra()
    assert len(direct) == 9
