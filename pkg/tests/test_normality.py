import pytest

from flowlat.counting import count
from flowlat.flows import vertex_matrix
from flowlat.groups import build_embedding, parse_group
from flowlat.normality import (
    Witness,
    decompose,
    map_point,
    normality_check,
    transfer_witness,
    verify_witness,
    very_ample_check,
)
from flowlat.trees import parse_tree, tripod

Z6_WITNESS = (0, 1, 1, 0, 1, 1) * 3


@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z4", "Z5", "Z2xZ2"])
def test_normal_groups(spec):
    g = parse_group(spec)
    for bound in (3, 4):
        rep = normality_check(tripod(), g, bound)
        assert rep.normal and rep.verdict == f"normal-up-to-{bound}"


def test_z6_non_normal():
    z6 = parse_group("Z6")
    assert normality_check(tripod(), z6, 3).verdict == "normal-up-to-3"
    rep = normality_check(tripod(), z6, 4)
    assert rep.verdict == "non-normal"
    assert rep.witness == Witness(4, Z6_WITNESS)
    assert verify_witness(tripod(), z6, rep.witness) == (True, True, True)
    # a larger bound stops at the same first witness
    assert normality_check(tripod(), z6, 5).witness == rep.witness


def test_witness_checks_are_independent():
    z6 = parse_group("Z6")
    cols = vertex_matrix(tripod(), z6).columns
    assert decompose(Z6_WITNESS, cols, 4) is None
    # each block (0,1,1,0,1,1) is half of a sum of vertices: 2x lies in the Hilbert set
    doubled = tuple(2 * v for v in Z6_WITNESS)
    parts = decompose(doubled, cols, 8)
    assert parts is not None
    assert [sum(cols[j][i] for j in parts) for i in range(18)] == list(doubled)
    # a sum of vertices is not a witness
    s = tuple(a + b for a, b in zip(cols[1], cols[2]))
    assert verify_witness(tripod(), z6, Witness(2, s)) == (True, True, False)
    # off the lattice
    off = (1, 0, 0, 0, 0, 0) + (1, 0, 0, 0, 0, 0) + (0, 1, 0, 0, 0, 0)
    assert verify_witness(tripod(), z6, Witness(1, off))[0] is False
    with pytest.raises(ValueError):
        verify_witness(tripod(), z6, Witness(1, (0,) * 5))


def test_decompose_small():
    cols = vertex_matrix(tripod(), parse_group("Z2")).columns
    x = tuple(a + b for a, b in zip(cols[0], cols[3]))
    parts = decompose(x, cols, 2)
    assert sorted(parts) == [0, 3]
    assert decompose((0,) * 6, cols, 0) == []
    assert decompose((1,) * 6, cols, 2) is None


def test_normal_means_counts_agree():
    for spec in ("Z3", "Z4", "Z2xZ2"):
        g = parse_group(spec)
        assert normality_check(tripod(), g, 3).normal
        for n in (2, 3):
            assert count(tripod(), g, n, "hilbert") == count(tripod(), g, n, "ehrhart")


def test_normality_bound_validation():
    with pytest.raises(ValueError):
        normality_check(tripod(), parse_group("Z2"), 1)
    with pytest.raises(ValueError):
        very_ample_check(tripod(), parse_group("Z2"), 0)


def test_non_tripod_tree_uses_direct_path():
    rep = normality_check(parse_tree("((1,2),(3,4));"), parse_group("Z2"), 3)
    assert rep.verdict == "normal-up-to-3"


def test_z6_not_very_ample():
    z6 = parse_group("Z6")
    rep = very_ample_check(tripod(), z6, 4)
    assert rep.verdict == "not-very-ample"
    assert rep.n == 4 and rep.x == Z6_WITNESS
    vm = vertex_matrix(tripod(), z6)
    col = vm.columns[vm.flows.index(rep.vertex)]
    assert rep.y == tuple(a - 4 * b for a, b in zip(rep.x, col))
    assert rep.vertex == (4, 1, 1)


def test_very_ample_certificate_is_sound():
    # y + k v is not a sum of k vertices for every k tried up to the bound
    z6 = parse_group("Z6")
    rep = very_ample_check(tripod(), z6, 4)
    vm = vertex_matrix(tripod(), z6)
    col = vm.columns[vm.flows.index(rep.vertex)]
    for k in range(rep.n, 8):
        lifted = [a + k * b for a, b in zip(rep.y, col)]
        assert decompose(lifted, vm.columns, k) is None


def test_very_ample_inconclusive_for_normal_group():
    rep = very_ample_check(tripod(), parse_group("Z2"), 3)
    assert rep.verdict == "inconclusive-up-to-3" and rep.y is None


def test_map_point():
    z2, z4 = parse_group("Z2"), parse_group("Z4")
    emb = build_embedding(z2, z4, [2])
    assert map_point((1, 2, 0, 3, 3, 0), emb, 3) == (1, 0, 2, 0, 0, 0, 3, 0, 3, 0, 0, 0)
    with pytest.raises(ValueError):
        map_point((1, 2), emb, 3)


def test_transfer_identity():
    z6 = parse_group("Z6")
    w = normality_check(tripod(), z6, 4).witness
    rep = transfer_witness(w, build_embedding(z6, z6, [1]), tripod())
    assert rep.witness == w and rep.verdict == "non-normal"


def test_transfer_to_larger_group():
    z6, big = parse_group("Z6"), parse_group("Z6xZ2")
    w = normality_check(tripod(), z6, 4).witness
    rep = transfer_witness(w, build_embedding(z6, big, [(1, 0)]), tripod())
    assert rep.verdict == "non-normal" and rep.group == big
    assert verify_witness(tripod(), big, rep.witness) == (True, True, True)


def test_transfer_rejects_bad_witness():
    z6 = parse_group("Z6")
    cols = vertex_matrix(tripod(), z6).columns
    s = tuple(a + b for a, b in zip(cols[1], cols[2]))
    with pytest.raises(RuntimeError):
        transfer_witness(Witness(2, s), build_embedding(z6, z6, [1]), tripod())
