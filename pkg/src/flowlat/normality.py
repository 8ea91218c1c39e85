"""Bounded normality and very-ampleness checks, and witness transfer.

Everything is measured in the lattice generated by the vertices.  A
non-normality witness is a lattice point ``x`` of ``nP`` that is not a sum of
``n`` vertices; each of the three properties is re-checked independently
before a witness is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counting import first_tripod_gap, iter_lattice_points, tripod_points
from .flows import vertex_matrix
from .groups import Embedding, Group
from .linalg import dilation_member, lattice_basis
from .trees import Tree

DEFAULT_MAX_N = 4
DEFAULT_MAX_DEG = 4


@dataclass(frozen=True)
class Witness:
    n: int
    x: tuple[int, ...]


@dataclass(frozen=True)
class NormalityReport:
    tree: Tree
    group: Group
    bound: int
    witness: Witness | None

    @property
    def normal(self) -> bool:
        return self.witness is None

    @property
    def verdict(self) -> str:
        return f"normal-up-to-{self.bound}" if self.witness is None else "non-normal"


@dataclass(frozen=True)
class VeryAmpleReport:
    tree: Tree
    group: Group
    bound: int
    n: int | None = None
    x: tuple[int, ...] | None = None
    vertex: tuple[int, ...] | None = None  # the flow v
    y: tuple[int, ...] | None = None  # x - n * v

    @property
    def verdict(self) -> str:
        return f"inconclusive-up-to-{self.bound}" if self.y is None else "not-very-ample"


def decompose(x, columns, n: int):
    """Indices of ``n`` columns (0/1, one entry per block) summing to ``x``, or ``None``.

    Depth first: the first nonzero coordinate must be covered by some chosen
    column, so only columns hitting it are tried.  Dead ends are memoised.
    """
    x = list(x)
    if n == 0:
        return [] if not any(x) else None
    by_coord = {}
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            if v:
                by_coord.setdefault(i, []).append(j)
    supports = [tuple(i for i, v in enumerate(col) if v) for col in columns]
    dead = set()

    def rec(rest: int):
        if rest == 0:
            return [] if not any(x) else None
        key = tuple(x)
        if key in dead:
            return None
        first = next((i for i, v in enumerate(x) if v), None)
        if first is None:
            return None
        for j in by_coord.get(first, ()):
            sup = supports[j]
            if all(x[i] > 0 for i in sup):
                for i in sup:
                    x[i] -= 1
                found = rec(rest - 1)
                for i in sup:
                    x[i] += 1
                if found is not None:
                    return [j] + found
        dead.add(key)
        return None

    return rec(n)


def verify_witness(tree: Tree, group: Group, witness: Witness) -> tuple[bool, bool, bool]:
    """(in the vertex lattice, in ``nP``, not a sum of ``n`` vertices)."""
    vm = vertex_matrix(tree, group)
    x = list(witness.x)
    if len(x) != vm.n_rows:
        raise ValueError(f"witness has {len(x)} coordinates, polytope has {vm.n_rows}")
    in_lattice = x in lattice_basis(vm.rows)
    in_polytope = dilation_member(x, vm.columns, witness.n)
    not_sum = decompose(x, vm.columns, witness.n) is None
    return in_lattice, in_polytope, not_sum


def _is_standard_tripod(tree: Tree) -> bool:
    return tree.n_edges == 3 and tree.degrees[tree.root] == 3


def _gaps(tree: Tree, group: Group, n: int, threads: int = 1):
    """Lattice points of ``nP`` that are not sums of ``n`` vertices, lexicographically."""
    if _is_standard_tripod(tree):
        # tripod edges leave the root, so tripod coordinates are tree coordinates
        yield from tripod_points(group, n, threads).points_extra()
    else:
        for x, is_sum in iter_lattice_points(tree, group, n):
            if not is_sum:
                yield x


def _first_gap(tree: Tree, group: Group, n: int, threads: int = 1):
    if _is_standard_tripod(tree):
        return first_tripod_gap(group, n, threads)
    return next(_gaps(tree, group, n), None)


def normality_check(tree: Tree, group: Group, max_n: int = DEFAULT_MAX_N, threads: int = 1) -> NormalityReport:
    """Search dilations ``2..max_n`` for the first point of ``nP`` that is not a sum of vertices."""
    if max_n < 2:
        raise ValueError("normality bound must be at least 2")
    for n in range(2, max_n + 1):
        x = _first_gap(tree, group, n, threads)
        if x is not None:
            w = Witness(n, tuple(x))
            if verify_witness(tree, group, w) != (True, True, True):
                raise RuntimeError(f"witness failed re-verification: {w}")
            return NormalityReport(tree, group, max_n, w)
    return NormalityReport(tree, group, max_n, None)


def _min_distance(flows) -> int:
    base = flows[0]
    return min(sum(a != b for a, b in zip(base, f)) for f in flows[1:])


def very_ample_check(tree: Tree, group: Group, max_deg: int = DEFAULT_MAX_DEG, threads: int = 1) -> VeryAmpleReport:
    """Look for a lattice point of the cone at a vertex ``v`` outside the semigroup of ``P - v``.

    For ``y = x - n v`` with ``x`` in ``nP``: a decomposition
    ``y + j v = u_1 + ... + u_j`` into vertices other than ``v`` uses exactly
    ``s = sum_e (n - x[e, v(e)])`` disagreements with ``v``, so
    ``j <= K = s // d`` where ``d`` is the least number of edges on which two
    vertices differ.  Adding copies of ``v`` is monotone, hence ``y`` is in the
    semigroup iff ``y + max(K, n) v`` is a sum of ``max(K, n)`` vertices.
    Only points of ``nP`` that are not sums of ``n`` vertices can fail.
    """
    if max_deg < 1:
        raise ValueError("degree bound must be at least 1")
    vm = vertex_matrix(tree, group)
    m = group.order
    cols = vm.columns
    if len(vm.flows) < 2:
        return VeryAmpleReport(tree, group, max_deg)
    d = _min_distance(vm.flows)
    for n in range(2, max_deg + 1):
        for x in _gaps(tree, group, n, threads):
            for v, col in zip(vm.flows, cols):
                y = tuple(a - n * b for a, b in zip(x, col))
                s = sum(n - x[e * m + g] for e, g in enumerate(v))
                k = max(s // d, n)
                if k == n:
                    return VeryAmpleReport(tree, group, max_deg, n, tuple(x), v, y)
                lifted = [a + k * b for a, b in zip(y, col)]
                if decompose(lifted, cols, k) is None:
                    return VeryAmpleReport(tree, group, max_deg, n, tuple(x), v, y)
    return VeryAmpleReport(tree, group, max_deg)


def map_point(x, embedding: Embedding, n_edges: int) -> tuple[int, ...]:
    """Push ``x`` along the embedding block by block; unused target elements get 0."""
    m1, m2 = embedding.source.order, embedding.target.order
    if len(x) != n_edges * m1:
        raise ValueError("point does not match the source group and tree")
    imap = embedding.index_map()
    out = [0] * (n_edges * m2)
    for e in range(n_edges):
        for g in range(m1):
            out[e * m2 + imap[g]] = x[e * m1 + g]
    return tuple(out)


def transfer_witness(witness: Witness, embedding: Embedding, tree: Tree) -> NormalityReport:
    """Carry a witness for the source group to the target group and re-verify it there."""
    y = map_point(witness.x, embedding, tree.n_edges)
    w = Witness(witness.n, y)
    checks = verify_witness(tree, embedding.target, w)
    if checks != (True, True, True):
        raise RuntimeError(
            "transferred witness failed re-verification "
            f"(lattice, polytope, not a sum) = {checks}"
        )
    return NormalityReport(tree, embedding.target, witness.n, w)
