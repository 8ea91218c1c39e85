"""Ehrhart and Hilbert counts of group-based model polytopes.

Two routes are provided.  The direct route enumerates candidate points of
``nP`` edge by edge and decides each one exactly; it is an oracle for small
trees.  The fiber route treats a trivalent tree as tripods glued along edges:
a lattice point of ``nP`` is the same thing as a compatible choice of tripod
points, one per inner vertex, agreeing on every shared edge block.  The same
gluing works for sums of ``n`` vertices, so Hilbert counts go through the
identical dynamic program with the tripod's Hilbert set in place of its
Ehrhart set.

Tripod points are handled in index space: a block is a composition of ``n``
into ``|G|`` parts, and a tripod point is a triple of composition indices,
packed into one integer code ``(i * C + j) * C + k``.  Such a triple lies in
the vertex lattice exactly when the three blocks have weighted sums adding to
the identity.  Points that are sums of ``n`` vertices are found by iterated
addition; every other lattice candidate is first screened with the valid
inequalities ``A(X) + B(Y) + C(Z) <= 2n``, where ``Z`` is the complement of
``-(X + Y)``, and the few survivors are decided by exact rational
feasibility.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import check_direct, check_items
from .flows import vertex_matrix
from .groups import Group
from .linalg import dilation_member, lattice_basis
from .trees import Tree, tripod


# -- compositions -------------------------------------------------------------------


@lru_cache(maxsize=None)
def compositions(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All vectors of ``m`` nonnegative integers summing to ``n``, lexicographically."""
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    if m == 1:
        return ((n,),)
    out = []
    for first in range(n + 1):
        for rest in compositions(n - first, m - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _comp_index(n: int, m: int) -> dict:
    return {c: i for i, c in enumerate(compositions(n, m))}


def composition_weight(group: Group, a) -> int:
    """Index of ``sum_g a[g] * g`` in ``group``."""
    add = group.add_table
    acc = 0
    for g, k in enumerate(a):
        for _ in range(k % group.order):
            acc = add[acc][g]
    return acc


@lru_cache(maxsize=None)
def _weights(group: Group, n: int) -> np.ndarray:
    return np.array([composition_weight(group, c) for c in compositions(n, group.order)], dtype=np.int64)


@lru_cache(maxsize=None)
def _neg_perm(group: Group, n: int) -> tuple[int, ...]:
    """Composition index map ``a -> a'`` with ``a'[g] = a[-g]``."""
    neg = group.neg_table
    idx = _comp_index(n, group.order)
    return tuple(idx[tuple(c[neg[g]] for g in range(group.order))] for c in compositions(n, group.order))


@lru_cache(maxsize=None)
def _step(m: int, d: int) -> np.ndarray:
    """``_step(m, d)[i, g]`` is the index of ``comp_i + e_g`` among degree ``d + 1`` compositions."""
    idx = _comp_index(d + 1, m)
    out = np.empty((len(compositions(d, m)), m), dtype=np.int64)
    for i, c in enumerate(compositions(d, m)):
        for g in range(m):
            bumped = list(c)
            bumped[g] += 1
            out[i, g] = idx[tuple(bumped)]
    return out


def _decode(codes: np.ndarray, C: int):
    k = codes % C
    ij = codes // C
    return ij // C, ij % C, k


# -- tripod points ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def _tripod_hilbert_codes(group: Group, n: int) -> np.ndarray:
    m = group.order
    add, neg = group.add_table, group.neg_table
    flows = [(g, h, neg[add[g][h]]) for g in range(m) for h in range(m)]
    I = J = K = np.zeros(1, dtype=np.int64)
    codes = np.zeros(1, dtype=np.int64)
    for d in range(n):
        check_items(len(I) * len(flows), 8 * 5, "tripod Hilbert set")
        step = _step(m, d)
        Cn = len(compositions(d + 1, m))
        parts = [(step[I, g] * Cn + step[J, h]) * Cn + step[K, l] for g, h, l in flows]
        codes = np.unique(np.concatenate(parts))
        I, J, K = _decode(codes, Cn)
    return codes


def _sumset_table(group: Group) -> np.ndarray:
    """``Z[x, y]`` is the mask of ``G - (-(X + Y))`` for subset masks ``x, y``."""
    m = group.order
    add, neg = group.add_table, group.neg_table
    full = (1 << m) - 1
    # mask of -(X + {h}) for single elements first
    shifted = np.zeros((1 << m, m), dtype=np.int64)
    for x in range(1 << m):
        for h in range(m):
            out = 0
            for g in range(m):
                if x >> g & 1:
                    out |= 1 << neg[add[g][h]]
            shifted[x, h] = out
    Z = np.zeros((1 << m, 1 << m), dtype=np.int64)
    for y in range(1, 1 << m):
        low = (y & -y).bit_length() - 1
        Z[:, y] = Z[:, y & (y - 1)] | shifted[:, low]
    return full ^ Z


class _Screen:
    """Vectorised check of the inequalities ``A(X) + B(Y) + C(Z) <= 2n``.

    ``T[x][j, k]`` is the largest ``B(Y) + C(Z)`` over ``Y`` for fixed ``X``
    and blocks ``j, k``, so one candidate costs one pass over ``X``.
    """

    def __init__(self, group: Group, n: int, threads: int = 1):
        m = group.order
        comps = np.array(compositions(n, m), dtype=np.int16)
        C = len(comps)
        M = 1 << m
        check_items(M * C * C, 2, "inequality table")
        ss = np.zeros((C, M), dtype=np.int16)
        for mask in range(1, M):
            low = (mask & -mask).bit_length() - 1
            ss[:, mask] = ss[:, mask & (mask - 1)] + comps[:, low]
        self.ss = ss
        self.bound = 2 * n
        Z = _sumset_table(group)
        T = np.empty((M, C, C), dtype=np.int16)

        def fill(xs):
            for x in xs:
                acc = np.zeros((C, C), dtype=np.int16)
                zx = Z[x]
                for y in range(M):
                    np.maximum(acc, ss[:, y][:, None] + ss[:, zx[y]][None, :], out=acc)
                T[x] = acc

        xs = list(range(M))
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                list(pool.map(fill, [xs[t::threads] for t in range(threads)]))
        else:
            fill(xs)
        self.T = T

    def passes(self, I, J, K) -> np.ndarray:
        ok = np.ones(len(I), dtype=bool)
        for x in range(self.T.shape[0]):
            ok &= self.ss[I, x] + self.T[x][J, K] <= self.bound
        return ok


@lru_cache(maxsize=None)
def _tripod_columns(group: Group):
    return vertex_matrix(tripod(), group).columns


def _lattice_candidates(group: Group, n: int, i: int) -> np.ndarray:
    """Sorted codes of lattice triples whose first block has index ``i``."""
    add, neg = group.add_table, group.neg_table
    W = _weights(group, n)
    C = len(W)
    by_w = [np.nonzero(W == w)[0] for w in range(group.order)]
    target = np.array([neg[add[W[i]][w]] for w in range(group.order)])[W]
    parts = []
    for t in range(group.order):
        js = np.nonzero(target == t)[0]
        ks = by_w[t]
        if len(js) and len(ks):
            parts.append(((i * C + js[:, None]) * C + ks[None, :]).ravel())
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.sort(np.concatenate(parts))


def _iter_extra_codes(group: Group, n: int, threads: int = 1):
    """Yield, in increasing code order, lattice points of ``nP`` that are not sums of ``n`` vertices."""
    if n < 2:
        return
    m = group.order
    C = len(compositions(n, m))
    hil = _tripod_hilbert_codes(group, n)
    comps = compositions(n, m)
    columns = _tripod_columns(group)
    screen = None
    for i in range(C):
        cand = _lattice_candidates(group, n, i)
        cand = cand[~np.isin(cand, hil, assume_unique=True)]
        if not len(cand):
            continue
        if screen is None:
            screen = _Screen(group, n, threads)
        I, J, K = _decode(cand, C)
        keep = cand[screen.passes(I, J, K)]
        for code in keep.tolist():
            ci, cj, ck = _decode(code, C)
            x = comps[ci] + comps[cj] + comps[ck]
            if dilation_member(x, columns, n):
                yield code


@dataclass(frozen=True)
class TripodPoints:
    """Lattice points of ``nP`` for the tripod, as sorted composition-index codes."""

    group: Group
    n: int
    hilbert: np.ndarray
    extra: np.ndarray  # lattice points of nP that are not sums of n vertices

    @property
    def comps(self):
        return compositions(self.n, self.group.order)

    @property
    def ehrhart(self) -> np.ndarray:
        return np.union1d(self.hilbert, self.extra)

    def codes(self, kind: str) -> np.ndarray:
        if kind == "ehrhart":
            return self.ehrhart
        if kind == "hilbert":
            return self.hilbert
        raise ValueError(f"unknown count kind {kind!r}")

    def triples(self, kind: str):
        """Composition index triples ``(I, J, K)`` as numpy arrays."""
        return _decode(self.codes(kind), len(self.comps))

    def points(self, kind: str):
        """Points as tuples of ``3 |G|`` integers, in lexicographic order."""
        return self._expand(self.codes(kind))

    def points_extra(self):
        """Points of ``nP`` that are not sums of ``n`` vertices, lexicographically."""
        return self._expand(self.extra)

    def _expand(self, codes):
        comps = self.comps
        I, J, K = _decode(codes, len(comps))
        return [comps[i] + comps[j] + comps[k] for i, j, k in zip(I.tolist(), J.tolist(), K.tolist())]


_TRIPOD_CACHE: dict = {}


def tripod_points(group: Group, n: int, threads: int = 1) -> TripodPoints:
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    key = (group, n)
    if key not in _TRIPOD_CACHE:
        hil = _tripod_hilbert_codes(group, n)
        extra = np.fromiter(_iter_extra_codes(group, n, threads), dtype=np.int64)
        _TRIPOD_CACHE[key] = TripodPoints(group, n, hil, extra)
    return _TRIPOD_CACHE[key]


def first_tripod_gap(group: Group, n: int, threads: int = 1):
    """Lexicographically first lattice point of ``nP`` (tripod) that is not a sum of ``n`` vertices."""
    key = (group, n)
    if key in _TRIPOD_CACHE:
        extra = _TRIPOD_CACHE[key].extra
        codes = iter(extra.tolist())
    else:
        codes = _iter_extra_codes(group, n, threads)
    for code in codes:
        comps = compositions(n, group.order)
        i, j, k = _decode(code, len(comps))
        return comps[i] + comps[j] + comps[k]
    return None


def _block_index(group: Group, a) -> tuple[int, int]:
    a = tuple(int(v) for v in a)
    if len(a) != group.order:
        raise ValueError(f"fiber vector needs {group.order} entries, got {len(a)}")
    if any(v < 0 for v in a):
        raise ValueError("fiber vector entries must be nonnegative")
    n = sum(a)
    return n, _comp_index(n, group.order)[a]


def tripod_fiber_f(group: Group, a) -> int:
    """Lattice points of ``|a| P`` (tripod) whose third block is ``a``."""
    n, ka = _block_index(group, a)
    _, _, K = tripod_points(group, n).triples("ehrhart")
    return int(np.count_nonzero(K == ka))


def tripod_fiber_g(group: Group, a, b) -> int:
    """Lattice points of ``|a| P`` (tripod) with third block ``a`` and second block ``b``."""
    n, ka = _block_index(group, a)
    nb, kb = _block_index(group, b)
    if n != nb:
        raise ValueError(f"fiber vectors have different degrees {n} and {nb}")
    _, J, K = tripod_points(group, n).triples("ehrhart")
    return int(np.count_nonzero((K == ka) & (J == kb)))


# -- fiber products over trivalent trees ---------------------------------------------------


@dataclass(frozen=True)
class JoinStep:
    """Glue the tripod at ``vertex`` onto the tree built so far along ``edge``.

    The first step of a sequence has ``edge`` ``None``.
    """

    vertex: int
    legs: tuple[int, int, int]
    edge: int | None


def _require_trivalent(tree: Tree) -> None:
    bad = [v for v in tree.inner_vertices if tree.degrees[v] != 3]
    if bad:
        raise ValueError(
            f"fiber method needs a trivalent tree; vertices {bad} have degrees "
            f"{[tree.degrees[v] for v in bad]}"
        )


def _incident(tree: Tree):
    inc = [[] for _ in range(tree.n_vertices)]
    for e, (p, c) in enumerate(tree.edges):
        inc[p].append((e, c))
        inc[c].append((e, p))
    return inc


def decompose_into_tripods(tree: Tree) -> list[JoinStep]:
    """Join sequence starting at the lowest-index inner vertex, breadth first."""
    _require_trivalent(tree)
    inc = _incident(tree)
    inner = set(tree.inner_vertices)
    start = min(inner)
    steps = [JoinStep(start, tuple(e for e, _ in inc[start]), None)]
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for e, w in sorted(inc[v]):
                if w in inner and w not in seen:
                    seen.add(w)
                    steps.append(JoinStep(w, tuple(f for f, _ in inc[w]), e))
                    nxt.append(w)
        frontier = sorted(nxt)
    return steps


class _FiberDP:
    """Message passing over the inner vertices of a trivalent tree.

    A message for edge ``e`` seen from vertex ``v`` is a list indexed by the
    composition of ``e``'s block read as an edge leaving ``v``; ``None``
    stands for an all-ones message (a bare leaf).
    """

    def __init__(self, tree: Tree, group: Group, n: int, kind: str, threads: int = 1):
        _require_trivalent(tree)
        self.tree = tree
        self.group = group
        self.n = n
        tp = tripod_points(group, n, threads)
        I, J, K = tp.triples(kind)
        self.C = len(tp.comps)
        self.I, self.J, self.K = I.tolist(), J.tolist(), K.tolist()
        self.first_counts = np.bincount(I, minlength=self.C).tolist()
        self.negc = _neg_perm(group, n)
        self.inc = _incident(tree)
        self.inner = set(tree.inner_vertices)

    def message(self, v: int, e: int, w: int):
        """Message for edge ``e`` from ``v`` towards ``w``, indexed from ``v``'s side."""
        if w not in self.inner:
            return None
        table = self._table(w, e)
        negc = self.negc
        return [table[negc[s]] for s in range(self.C)]

    def _table(self, w: int, e: int):
        # sum over tripod points at w whose leg e has a given block
        others = [(f, u) for f, u in self.inc[w] if f != e]
        m1 = self.message(w, *others[0])
        m2 = self.message(w, *others[1])
        if m1 is None and m2 is None:
            return list(self.first_counts)
        table = [0] * self.C
        I, J, K = self.I, self.J, self.K
        if m2 is None:
            for i, j in zip(I, J):
                table[i] += m1[j]
        elif m1 is None:
            for i, k in zip(I, K):
                table[i] += m2[k]
        else:
            for i, j, k in zip(I, J, K):
                table[i] += m1[j] * m2[k]
        return table

    def count(self) -> int:
        root = min(self.inner)
        e, w = self.inc[root][0]
        table = self._table(root, e)
        m0 = self.message(root, e, w)
        if m0 is None:
            return sum(table)
        return sum(a * b for a, b in zip(table, m0))

    def leaf_table(self, leaf_edge: int) -> dict:
        """Counts keyed by the block of ``leaf_edge`` in tree coordinates."""
        p, c = self.tree.edges[leaf_edge]
        v = p if p in self.inner else c
        table = self._table(v, leaf_edge)
        comps = compositions(self.n, self.group.order)
        out = {}
        for s, val in enumerate(table):
            block = comps[s] if v == p else comps[self.negc[s]]
            out[block] = val
        return out


def _fiber_count(tree, group, n, kind, threads=1) -> int:
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    _require_trivalent(tree)
    if n == 0:
        return 1
    return _FiberDP(tree, group, n, kind, threads).count()


def ehrhart_via_fibers(tree: Tree, group: Group, n: int, threads: int = 1) -> int:
    """Lattice points of ``nP`` for a trivalent tree, by gluing tripod fibers."""
    return _fiber_count(tree, group, n, "ehrhart", threads)


def hilbert_via_fibers(tree: Tree, group: Group, n: int, threads: int = 1) -> int:
    """Sums of ``n`` vertices for a trivalent tree, by gluing tripod Hilbert sets."""
    return _fiber_count(tree, group, n, "hilbert", threads)


def fiber_table(tree: Tree, group: Group, n: int, leaf_label: int, kind: str = "ehrhart") -> dict:
    """Map from the block at leaf ``leaf_label`` to the number of points with that block."""
    _require_trivalent(tree)
    e = tree.edge_of_label(leaf_label)
    if n == 0:
        return {(0,) * group.order: 1}
    return _FiberDP(tree, group, n, kind).leaf_table(e)


# -- direct methods -----------------------------------------------------------------------


def hilbert_points(tree: Tree, group: Group, n: int) -> set:
    """Distinct sums of exactly ``n`` vertex columns."""
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    vm = vertex_matrix(tree, group)
    cols = vm.columns
    rows = vm.n_rows
    current = {tuple([0] * rows)}
    for _ in range(n):
        check_items(len(current) * len(cols), 8 * rows + 64, "Hilbert sum-and-dedupe")
        current = {tuple(a + b for a, b in zip(h, c)) for h in current for c in cols}
    return current


def _edge_weight_plan(tree: Tree):
    """For each edge position, the inner vertices whose incident edges are then all assigned."""
    last = {}
    for v in tree.inner_vertices:
        inc = [e for e, (p, c) in enumerate(tree.edges) if v in (p, c)]
        last[v] = (max(inc), [(e, tree.edges[e][0] == v) for e in inc])
    plan = [[] for _ in range(tree.n_edges)]
    for v, (pos, legs) in last.items():
        plan[pos].append(legs)
    return plan


def iter_lattice_points(tree: Tree, group: Group, n: int):
    """Yield ``(x, is_sum)`` for every lattice point ``x`` of ``nP``, lexicographically.

    ``is_sum`` tells whether ``x`` is a sum of ``n`` vertices.  Candidates
    are built edge by edge from degree-``n`` blocks and pruned by the
    weighted balance at each inner vertex; survivors are decided by lattice
    membership and exact rational feasibility.
    """
    check_direct(tree, group)
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    m = group.order
    add, neg = group.add_table, group.neg_table
    comps = compositions(n, m)
    W = [composition_weight(group, c) for c in comps]
    plan = _edge_weight_plan(tree)
    vm = vertex_matrix(tree, group)
    hil = hilbert_points(tree, group, n)
    lat = None
    E = tree.n_edges
    choice = [0] * E

    def balanced(legs) -> bool:
        acc = 0
        for e, outgoing in legs:
            w = W[choice[e]]
            acc = add[acc][w if outgoing else neg[w]]
        return acc == 0

    def rec(pos):
        nonlocal lat
        if pos == E:
            x = tuple(itertools.chain.from_iterable(comps[i] for i in choice))
            if x in hil:
                yield x, True
                return
            if lat is None:
                lat = lattice_basis(vm.rows)
            if x in lat and dilation_member(x, vm.columns, n):
                yield x, False
            return
        for i in range(len(comps)):
            choice[pos] = i
            if all(balanced(legs) for legs in plan[pos]):
                yield from rec(pos + 1)

    yield from rec(0)


def ehrhart_count(tree: Tree, group: Group, n: int) -> int:
    """Lattice points of ``nP`` by direct enumeration (small trees only)."""
    check_direct(tree, group)
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    return sum(1 for _ in iter_lattice_points(tree, group, n))


def hilbert_count(tree: Tree, group: Group, n: int, method: str = "direct", threads: int = 1) -> int:
    """Number of distinct sums of exactly ``n`` vertices."""
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    if method == "direct":
        return len(hilbert_points(tree, group, n))
    if method == "fiber":
        return hilbert_via_fibers(tree, group, n, threads)
    raise ValueError(f"unknown method {method!r}")


def count(tree: Tree, group: Group, n: int, kind: str = "ehrhart", method: str = "fiber", threads: int = 1) -> int:
    """Dispatch on ``kind`` (ehrhart or hilbert) and ``method`` (direct or fiber)."""
    if kind not in ("ehrhart", "hilbert"):
        raise ValueError(f"unknown count kind {kind!r}")
    if method not in ("direct", "fiber"):
        raise ValueError(f"unknown method {method!r}")
    if kind == "hilbert":
        return hilbert_count(tree, group, n, method, threads)
    if method == "direct":
        return ehrhart_count(tree, group, n)
    return ehrhart_via_fibers(tree, group, n, threads)
