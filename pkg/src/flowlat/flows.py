"""Group-based flows, sockets and the vertex matrix of the model polytope.

Flows are tuples of element *indices* (positions in the group's canonical
order), one per edge.  At every inner vertex the incoming value equals the
sum of the outgoing values; a root has no incoming edge, so its outgoing
values sum to the identity.

Enumeration fixes one dependent edge per inner vertex (its lowest-index
outgoing edge), runs over all assignments to the remaining free edges in
lexicographic order, and solves the dependent edges top-down.

Sockets are read on leaf edges in leaf-edge order, with each value taken
along the edge *towards* its leaf.  With that convention a socket always sums
to the identity, also for trees rooted at a leaf, and sockets do not change
under rerooting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .groups import Group
from .trees import Tree


def dependent_edges(tree: Tree) -> dict[int, int]:
    """Map inner vertex -> its dependent (lowest-index outgoing) edge."""
    out = {}
    for v in tree.inner_vertices:
        kids = tree.children[v]
        if not kids:
            raise ValueError(f"inner vertex {v} has no outgoing edge")
        out[v] = kids[0]
    return out


def free_edges(tree: Tree) -> tuple[int, ...]:
    dep = set(dependent_edges(tree).values())
    return tuple(e for e in range(tree.n_edges) if e not in dep)


def flow_count(tree: Tree, group: Group) -> int:
    return group.order ** (tree.n_edges - len(tree.inner_vertices))


def iter_flows(tree: Tree, group: Group):
    """Yield every flow as a tuple of element indices, lexicographically in the free edges."""
    add = group.add_table
    neg = group.neg_table
    dep = dependent_edges(tree)
    free = free_edges(tree)
    # solve order: inner vertices top-down, each with (dependent, incoming, others)
    plan = []
    for v in tree.preorder:
        if v not in dep:
            continue
        d = dep[v]
        incoming = tree.parent_edge[v]
        others = tuple(e for e in tree.children[v] if e != d)
        plan.append((d, incoming, others))
    values = [0] * tree.n_edges
    for assignment in itertools.product(range(group.order), repeat=len(free)):
        for e, g in zip(free, assignment):
            values[e] = g
        for d, incoming, others in plan:
            acc = 0 if incoming is None else values[incoming]
            for o in others:
                acc = add[acc][neg[values[o]]]
            values[d] = acc
        yield tuple(values)


def enumerate_flows(tree: Tree, group: Group) -> list[tuple[int, ...]]:
    return list(iter_flows(tree, group))


def is_flow(tree: Tree, group: Group, values) -> bool:
    add = group.add_table
    if len(values) != tree.n_edges:
        return False
    for v in tree.inner_vertices:
        acc = 0
        for e in tree.children[v]:
            acc = add[acc][values[e]]
        incoming = tree.parent_edge[v]
        target = 0 if incoming is None else values[incoming]
        if acc != target:
            return False
    return True


def brute_force_flows(tree: Tree, group: Group) -> list[tuple[int, ...]]:
    """All assignments filtered by balance; exponential, for cross-checks only."""
    return [
        vals
        for vals in itertools.product(range(group.order), repeat=tree.n_edges)
        if is_flow(tree, group, vals)
    ]


def _toward_leaf_sign(tree: Tree, e: int) -> int:
    # +1 when the edge points at its leaf, -1 when it leaves a leaf root
    return 1 if tree.degrees[tree.edges[e][1]] == 1 else -1


def socket_of_flow(tree: Tree, group: Group, flow) -> tuple[int, ...]:
    neg = group.neg_table
    out = []
    for e in tree.leaf_edges:
        g = flow[e]
        out.append(g if _toward_leaf_sign(tree, e) == 1 else neg[g])
    return tuple(out)


def flow_of_socket(tree: Tree, group: Group, socket) -> tuple[int, ...]:
    """Rebuild the unique flow with the given socket.

    ``socket`` is either a sequence of element indices in leaf-edge order or
    a dict from leaf label to group element (index or residues).
    """
    if isinstance(socket, dict):
        if set(socket) != set(tree.leaf_labels):
            raise ValueError(
                f"socket leaves {sorted(socket)} do not match tree leaves {sorted(tree.leaf_labels)}"
            )
        values = tuple(group.index(socket[lab]) for lab in tree.leaf_labels)
    else:
        values = tuple(socket)
        if len(values) != len(tree.leaf_edges):
            raise ValueError(
                f"socket has {len(values)} entries but the tree has {len(tree.leaf_edges)} leaves"
            )
        if any(not (0 <= g < group.order) for g in values):
            raise ValueError("socket entry outside the group")
    add = group.add_table
    total = 0
    for g in values:
        total = add[total][g]
    if total != 0:
        raise ValueError("socket does not sum to the identity")

    leaf_value = dict(zip(tree.leaf_edges, values))
    flow = [None] * tree.n_edges
    for v in reversed(tree.preorder):
        pe = tree.parent_edge[v]
        if pe is None:
            continue
        if tree.degrees[v] == 1:
            flow[pe] = leaf_value[pe]
        else:
            acc = 0
            for e in tree.children[v]:
                acc = add[acc][flow[e]]
            flow[pe] = acc
    # a leaf root's edge was solved from below; the zero socket sum makes it
    # agree with the socket value read towards the root
    return tuple(flow)


def all_sockets(tree: Tree, group: Group) -> list[tuple[int, ...]]:
    """Sockets in lexicographic order of the first ``L - 1`` leaf values."""
    add = group.add_table
    neg = group.neg_table
    n_leaves = len(tree.leaf_edges)
    out = []
    for head in itertools.product(range(group.order), repeat=n_leaves - 1):
        acc = 0
        for g in head:
            acc = add[acc][g]
        out.append(head + (neg[acc],))
    return out


@dataclass(frozen=True)
class VertexMatrix:
    """0/1 matrix with one column per flow.

    Rows are indexed by ``(edge, element)`` pairs, edge-major with elements in
    canonical order: row ``e * |G| + g``.
    """

    tree: Tree
    group: Group
    flows: tuple[tuple[int, ...], ...]

    @property
    def n_rows(self) -> int:
        return self.tree.n_edges * self.group.order

    @property
    def n_cols(self) -> int:
        return len(self.flows)

    @cached_property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        m = self.group.order
        cols = []
        for f in self.flows:
            col = [0] * self.n_rows
            for e, g in enumerate(f):
                col[e * m + g] = 1
            cols.append(tuple(col))
        return tuple(cols)

    @cached_property
    def rows(self) -> list[list[int]]:
        return [list(r) for r in zip(*self.columns)]

    def support(self, j: int) -> tuple[int, ...]:
        m = self.group.order
        return tuple(e * m + g for e, g in enumerate(self.flows[j]))


def vertex_matrix(tree: Tree, group: Group) -> VertexMatrix:
    return VertexMatrix(tree, group, tuple(iter_flows(tree, group)))


def point_from_flows(tree: Tree, group: Group, flows) -> tuple[int, ...]:
    """Sum of the vertex vectors of ``flows``."""
    m = group.order
    x = [0] * (tree.n_edges * m)
    for f in flows:
        for e, g in enumerate(f):
            x[e * m + g] += 1
    return tuple(x)


def format_vertices(vm: VertexMatrix) -> str:
    """Text format: header line, then one column per line."""
    lines = [f"# rows={vm.n_rows} cols={vm.n_cols} order=edge-major"]
    for col in vm.columns:
        lines.append(" ".join(map(str, col)))
    return "\n".join(lines) + "\n"


def parse_vertices(text: str) -> list[tuple[int, ...]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# rows="):
        raise ValueError("missing vertices header")
    fields = dict(tok.split("=") for tok in lines[0][1:].split())
    rows, cols = int(fields["rows"]), int(fields["cols"])
    out = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    if len(out) != cols or any(len(c) != rows for c in out):
        raise ValueError("vertices body does not match its header")
    return out
