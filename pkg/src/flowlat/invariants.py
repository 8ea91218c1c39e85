"""Binomial invariants, subdivisions of claw binomials, and torus intersections.

A degree-``d`` binomial on a tree is a pair of ``|E| x d`` matrices of group
elements whose columns are flows; it lies in the toric ideal exactly when,
edge by edge, the two rows carry the same multiset of elements (the two
monomials then have the same exponent vector in the polytope lattice).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .flows import flow_of_socket, is_flow, vertex_matrix
from .groups import Group, parse_group
from .linalg import kernel_dim, rank, rowspace_intersection, stack
from .trees import ProlongationSpec, Tree, claw, parse_tree, prolongation_tree, prolongations, to_newick

MAX_JC_LEAVES = 10


@dataclass(frozen=True)
class BinomialPair:
    """``A1`` and ``A2`` hold element indices, one row per edge, one column per flow."""

    tree: Tree
    group: Group
    A1: tuple[tuple[int, ...], ...]
    A2: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.tree.n_edges
        for name, A in (("A1", self.A1), ("A2", self.A2)):
            if len(A) != rows:
                raise ValueError(f"{name} has {len(A)} rows but the tree has {rows} edges")
            widths = {len(r) for r in A}
            if len(widths) > 1:
                raise ValueError(f"{name} is ragged")
            for r in A:
                for g in r:
                    if not isinstance(g, int) or not 0 <= g < self.group.order:
                        raise ValueError(f"{name} entry {g!r} is not an element index of {self.group}")
        if self.degree != (len(self.A2[0]) if self.A2 and self.A2[0] else 0):
            raise ValueError("A1 and A2 have different numbers of columns")

    @property
    def degree(self) -> int:
        return len(self.A1[0]) if self.A1 and self.A1[0] else 0

    def columns(self, which: int):
        A = self.A1 if which == 1 else self.A2
        return [tuple(r[j] for r in A) for j in range(self.degree)]

    @classmethod
    def from_columns(cls, tree: Tree, group: Group, cols1, cols2) -> "BinomialPair":
        cols1, cols2 = [tuple(c) for c in cols1], [tuple(c) for c in cols2]
        rows = tree.n_edges
        A1 = tuple(tuple(c[i] for c in cols1) for i in range(rows))
        A2 = tuple(tuple(c[i] for c in cols2) for i in range(rows))
        return cls(tree, group, A1, A2)


def verify_binomial(p: BinomialPair) -> bool:
    """All columns are flows and every row has the same multiset in ``A1`` and ``A2``."""
    for which in (1, 2):
        if not all(is_flow(p.tree, p.group, c) for c in p.columns(which)):
            return False
    return all(Counter(r1) == Counter(r2) for r1, r2 in zip(p.A1, p.A2))


@dataclass(frozen=True)
class SubdivisionWitness:
    S: tuple[int, ...]  # leaf labels, sorted
    spec: ProlongationSpec
    tree: Tree
    permutation: tuple[int, ...]  # column order applied to A2


def _split_spec(n: int, S) -> ProlongationSpec:
    side = tuple(sorted(S))
    if 1 not in side:
        side = tuple(x for x in range(1, n + 1) if x not in side)
    return ProlongationSpec(n, side)


def _check_claw(p: BinomialPair) -> int:
    t = p.tree
    n = t.n_edges
    if len(t.inner_vertices) != 1 or n < 4:
        raise ValueError("subdivisions are defined for claw trees with at least 4 leaves")
    if list(t.leaf_labels) != list(range(1, n + 1)):
        raise ValueError("claw leaves must be labelled 1..n in edge order")
    return n


def find_subdivision(p: BinomialPair, permute: bool = True, candidates=None) -> SubdivisionWitness | None:
    """Smallest leaf set ``S`` on which every column of ``A1 - A2`` sums to the identity.

    ``S`` runs by size, then lexicographically, with ``2 <= |S| <= n - 2``.
    The columns of ``A2`` are first taken as given; when ``permute`` is set,
    the other column orders of ``A2`` are tried next (a binomial does not
    fix how its monomials' factors are paired).
    """
    if not verify_binomial(p):
        raise ValueError("binomial does not verify; no subdivision is defined")
    n = _check_claw(p)
    add, neg = p.group.add_table, p.group.neg_table
    d = p.degree
    perms = itertools.permutations(range(d)) if permute else [tuple(range(d))]
    if candidates is None:
        candidates = [S for size in range(2, n - 1) for S in itertools.combinations(range(1, n + 1), size)]
    for perm in perms:
        diff = [[add[r1[j]][neg[r2[perm[j]]]] for j in range(d)] for r1, r2 in zip(p.A1, p.A2)]
        for S in candidates:
            ok = True
            for j in range(d):
                acc = 0
                for lab in S:
                    acc = add[acc][diff[lab - 1][j]]
                if acc:
                    ok = False
                    break
            if ok:
                spec = _split_spec(n, S)
                return SubdivisionWitness(tuple(S), spec, prolongation_tree(spec), tuple(perm))
    return None


def lift_binomial(p: BinomialPair, w: SubdivisionWitness) -> BinomialPair:
    """The binomial on the prolongation: append the ``S``-sum row to both matrices."""
    add = p.group.add_table
    d = p.degree
    A2 = tuple(tuple(r[w.permutation[j]] for j in range(d)) for r in p.A2)

    def extra(A):
        row = []
        for j in range(d):
            acc = 0
            for lab in w.S:
                acc = add[acc][A[lab - 1][j]]
            row.append(acc)
        return tuple(row)

    # prolongation trees put the leaf edges first, then the inner edge
    return BinomialPair(w.tree, p.group, tuple(p.A1) + (extra(p.A1),), A2 + (extra(A2),))


@dataclass(frozen=True)
class QuadricCover:
    n: int
    binomials: int
    covered: int
    three_splits: bool

    @property
    def all_covered(self) -> bool:
        return self.covered == self.binomials


def claw_quadrics(n: int):
    """Nontrivial degree-2 binomials on claw(n) over Z2, one per pair of distinct monomials."""
    flows = [f for f in itertools.product((0, 1), repeat=n) if sum(f) % 2 == 0]
    by_sum: dict = {}
    for a, b in itertools.combinations_with_replacement(range(len(flows)), 2):
        fa, fb = flows[a], flows[b]
        key = tuple((x, y) if x <= y else (y, x) for x, y in zip(fa, fb))
        by_sum.setdefault(key, []).append((fa, fb))
    for monomials in by_sum.values():
        for m1, m2 in itertools.combinations(monomials, 2):
            yield m1, m2


def jc_quadric_cover(n: int) -> QuadricCover:
    """Check that every Z2 quadric on claw(n) lies in the ideal of some prolongation."""
    if n < 4:
        raise ValueError("claw trees need at least 4 leaves to have prolongations")
    if n > MAX_JC_LEAVES:
        from .errors import GuardError

        raise GuardError(f"quadric enumeration limited to n <= {MAX_JC_LEAVES}")
    tree = claw(n)
    group = parse_group("Z2")
    three = [(1, 2), (1, 3), (2, 3)]
    total = covered = 0
    three_ok = True
    for m1, m2 in claw_quadrics(n):
        p = BinomialPair.from_columns(tree, group, m1, m2)
        total += 1
        if find_subdivision(p) is not None:
            covered += 1
        if find_subdivision(p, candidates=three) is None:
            three_ok = False
    return QuadricCover(n, total, covered, three_ok)


# -- torus intersections ------------------------------------------------------------------


def socket_aligned_matrix(tree: Tree, group: Group, sockets) -> list[list[int]]:
    """Vertex matrix of ``tree`` with one column per socket, in the given order."""
    m = group.order
    rows = tree.n_edges * m
    cols = []
    for s in sockets:
        f = flow_of_socket(tree, group, s)
        col = [0] * rows
        for e, g in enumerate(f):
            col[e * m + g] = 1
        cols.append(col)
    return [list(r) for r in zip(*cols)]


@dataclass(frozen=True)
class IntersectionReport:
    n: int
    group: Group
    prolongations: tuple[str, ...]
    sockets: int
    kernel_sum_dim: int
    intersection_dim: int
    claw_rank: int
    pairwise_dims: tuple[int, ...]  # dim of the kernel sum after each step

    @property
    def matches_claw(self) -> bool:
        return self.intersection_dim == self.claw_rank


def _claw_sockets(n: int, group: Group):
    return vertex_matrix(claw(n), group).flows


def intersection_dimension(n: int, group: Group, specs=None) -> IntersectionReport:
    """Dimension of the intersection of the prolongation tori inside the socket torus.

    Each prolongation contributes its full vertex matrix (leaf and inner edge
    rows) with columns indexed by the claw's sockets.  The kernel sum is
    accumulated one prolongation at a time with
    ``dim(U + V) = dim U + dim V - dim(U & V)``, where ``U`` is carried as the
    kernel of a basis of the running row-space intersection.
    """
    if n < 4:
        raise ValueError("claw trees need at least 4 leaves to have prolongations")
    if specs is None:
        specs = [spec for spec, _ in prolongations(n)]
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one prolongation")
    sockets = _claw_sockets(n, group)
    s = len(sockets)
    running = None  # basis of the intersection of the row spaces so far
    dims = []
    for spec in specs:
        A = socket_aligned_matrix(prolongation_tree(spec), group, sockets)
        if running is None:
            running = A
            dims.append(kernel_dim(A, s))
            continue
        ku, kv = kernel_dim(running, s), kernel_dim(A, s)
        both = kernel_dim(stack(running, A), s)
        summed = ku + kv - both
        running = rowspace_intersection(running, A)
        if s - rank(running) != summed:
            raise ArithmeticError("kernel-sum identity disagrees with the row-space intersection")
        dims.append(summed)
    claw_rank = rank(vertex_matrix(claw(n), group).rows)
    return IntersectionReport(
        n, group, tuple(str(sp) for sp in specs), s, dims[-1], s - dims[-1], claw_rank, tuple(dims)
    )


def compare_claw_dimension(n: int, group: Group, specs=None) -> bool:
    return intersection_dimension(n, group, specs).matches_claw


def two_prolongation_cover(n: int, group: Group) -> IntersectionReport | None:
    """First pair of prolongations (in enumeration order) whose tori already cut out the claw torus."""
    specs = [spec for spec, _ in prolongations(n)]
    for a, b in itertools.combinations(specs, 2):
        rep = intersection_dimension(n, group, [a, b])
        if rep.matches_claw:
            return rep
    return None


# -- binomial files -------------------------------------------------------------------------


def format_binomial(p: BinomialPair) -> str:
    t = p.tree
    header = f"degree {p.degree} leaves {len(t.leaf_edges)} group {p.group}"
    if not (len(t.inner_vertices) == 1 and list(t.leaf_labels) == list(range(1, t.n_edges + 1))):
        header += f" tree {to_newick(t)}"
    lines = [header]
    for A in (p.A1, p.A2):
        for row in A:
            lines.append(" ".join(p.group.format_element(p.group.elements[g]) for g in row))
    return "\n".join(lines) + "\n"


def parse_binomial(text: str) -> BinomialPair:
    """Read ``degree d leaves n group G [tree NEWICK]`` followed by ``A1`` then ``A2`` rows.

    Without a tree the claw on leaves ``1..n`` is meant; rows follow the
    tree's edge order.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty binomial file")
    head = lines[0].split()
    if len(head) < 6 or head[0] != "degree" or head[2] != "leaves" or head[4] != "group":
        raise ValueError("binomial header must read 'degree d leaves n group G [tree NEWICK]'")
    try:
        d, n = int(head[1]), int(head[3])
    except ValueError:
        raise ValueError("degree and leaves must be integers") from None
    if d < 1 or n < 3:
        raise ValueError("need degree >= 1 and at least 3 leaves")
    group = parse_group(head[5])
    if len(head) > 6:
        if head[6] != "tree" or len(head) != 8:
            raise ValueError("optional header suffix must be 'tree NEWICK'")
        tree = parse_tree(head[7])
        if len(tree.leaf_edges) != n:
            raise ValueError(f"tree has {len(tree.leaf_edges)} leaves, header says {n}")
    else:
        tree = claw(n)
    rows = tree.n_edges
    body = lines[1:]
    if len(body) != 2 * rows:
        raise ValueError(f"expected {2 * rows} matrix rows, found {len(body)}")
    mats = []
    for block in (body[:rows], body[rows:]):
        A = []
        for ln in block:
            toks = ln.split()
            if len(toks) != d:
                raise ValueError(f"row {ln!r} has {len(toks)} entries, expected {d}")
            A.append(tuple(group.index(group.parse_element(t)) for t in toks))
        mats.append(tuple(A))
    return BinomialPair(tree, group, mats[0], mats[1])
