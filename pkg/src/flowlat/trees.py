"""Rooted leaf-labelled trees.

A tree is stored as a vertex count, a root, and a tuple of directed edges
``(parent, child)`` whose order is the edge indexing used for polytope
coordinates.  Leaves are the degree-one vertices; a leaf edge is an edge
incident to one.  Inner vertices are all vertices of degree at least two.

Newick subset accepted by :func:`parse_tree`::

    tree  := node ";"
    node  := label | "(" node ("," node)+ ")"
    label := positive integer

Edges are numbered in the order their child is first reached while reading
the string left to right.  A root with exactly two children (the usual way
of writing an unrooted tree, e.g. ``((1,2),(3,4));``) is suppressed: its two
edges are merged into one, the root moves to the first child that is not a
leaf, and edges are renumbered in reading order from the new root, so
``((1,2),(3,4));`` reads as ``(1,2,(3,4));``.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class Tree:
    n_vertices: int
    root: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple  # per vertex: positive int label for leaves, None otherwise

    def __post_init__(self):
        nv = self.n_vertices
        if nv < 2:
            raise ValueError("a tree needs at least one edge")
        if len(self.edges) != nv - 1:
            raise ValueError("a tree on V vertices has exactly V - 1 edges")
        if len(self.labels) != nv:
            raise ValueError("one label slot per vertex is required")
        if not 0 <= self.root < nv:
            raise ValueError(f"root {self.root} is not a vertex")
        parent_edge = [None] * nv
        for i, (p, c) in enumerate(self.edges):
            if not (0 <= p < nv and 0 <= c < nv) or p == c:
                raise ValueError(f"bad edge {(p, c)}")
            if parent_edge[c] is not None:
                raise ValueError(f"vertex {c} has two incoming edges")
            parent_edge[c] = i
        if parent_edge[self.root] is not None:
            raise ValueError("edges must be directed away from the root")
        if sum(1 for x in parent_edge if x is None) != 1:
            raise ValueError("every non-root vertex needs exactly one incoming edge")
        # connectivity: walk from the root
        seen = {self.root}
        stack = [self.root]
        children = self.children
        while stack:
            v = stack.pop()
            for e in children[v]:
                c = self.edges[e][1]
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        if len(seen) != nv:
            raise ValueError("tree is not connected")
        deg = self.degrees
        used = set()
        for v in range(nv):
            lab = self.labels[v]
            if deg[v] == 1:
                if not isinstance(lab, int) or isinstance(lab, bool) or lab < 1:
                    raise ValueError(f"leaf vertex {v} needs a positive integer label")
                if lab in used:
                    raise ValueError(f"duplicate leaf label {lab}")
                used.add(lab)
            elif lab is not None:
                raise ValueError(f"inner vertex {v} cannot carry a label")
        if not self.inner_vertices:
            raise ValueError("tree has no inner vertex")

    # -- structure -----------------------------------------------------------

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n_vertices
        for p, c in self.edges:
            deg[p] += 1
            deg[c] += 1
        return tuple(deg)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """Outgoing edge indices of each vertex, ascending."""
        out = [[] for _ in range(self.n_vertices)]
        for i, (p, _) in enumerate(self.edges):
            out[p].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def parent_edge(self) -> tuple:
        pe = [None] * self.n_vertices
        for i, (_, c) in enumerate(self.edges):
            pe[c] = i
        return tuple(pe)

    @cached_property
    def inner_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, d in enumerate(self.degrees) if d >= 2)

    @cached_property
    def leaf_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, d in enumerate(self.degrees) if d == 1)

    @cached_property
    def leaf_edges(self) -> tuple[int, ...]:
        deg = self.degrees
        return tuple(
            i for i, (p, c) in enumerate(self.edges) if deg[p] == 1 or deg[c] == 1
        )

    @cached_property
    def inner_edges(self) -> tuple[int, ...]:
        leaf = set(self.leaf_edges)
        return tuple(i for i in range(len(self.edges)) if i not in leaf)

    def leaf_of_edge(self, e: int) -> int:
        """The leaf vertex at one end of leaf edge ``e``."""
        p, c = self.edges[e]
        if self.degrees[c] == 1:
            return c
        if self.degrees[p] == 1:
            return p
        raise ValueError(f"edge {e} is not a leaf edge")

    @cached_property
    def leaf_labels(self) -> tuple[int, ...]:
        """Leaf labels in leaf-edge order."""
        return tuple(self.labels[self.leaf_of_edge(e)] for e in self.leaf_edges)

    def edge_of_label(self, label: int) -> int:
        for e, lab in zip(self.leaf_edges, self.leaf_labels):
            if lab == label:
                return e
        raise KeyError(f"no leaf labelled {label}")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            for e in reversed(self.children[v]):
                stack.append(self.edges[e][1])
        return tuple(order)

    def is_trivalent(self) -> bool:
        return all(self.degrees[v] == 3 for v in self.inner_vertices)

    def undirected(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(e) for e in self.edges)

    def splits(self) -> frozenset:
        """Leaf bipartitions induced by the edges, as frozensets of two frozensets."""
        below = [None] * self.n_vertices
        for v in reversed(self.preorder):
            labs = set()
            if self.labels[v] is not None and v != self.root:
                labs.add(self.labels[v])
            for e in self.children[v]:
                labs |= below[self.edges[e][1]]
            below[v] = frozenset(labs)
        everything = frozenset(self.leaf_labels)
        out = set()
        for p, c in self.edges:
            side = below[c]
            out.add(frozenset((side, everything - side)))
        return frozenset(out)

    def __str__(self):
        try:
            return to_newick(self)
        except ValueError:
            return f"Tree(root={self.root}, edges={self.edges})"


def same_topology(t1: Tree, t2: Tree) -> bool:
    """Leaf-label-preserving isomorphism test for trees without degree-2 vertices."""
    return (
        sorted(t1.leaf_labels) == sorted(t2.leaf_labels)
        and t1.n_edges == t2.n_edges
        and t1.splits() == t2.splits()
    )


def _orient(n_vertices: int, undirected: list, root: int, labels) -> Tree:
    """Direct an ordered undirected edge list away from ``root``."""
    adj = [[] for _ in range(n_vertices)]
    for i, (a, b) in enumerate(undirected):
        adj[a].append((i, b))
        adj[b].append((i, a))
    directed = [None] * len(undirected)
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for i, w in adj[v]:
            if w not in seen:
                seen.add(w)
                directed[i] = (v, w)
                queue.append(w)
    if any(d is None for d in directed) or len(seen) != n_vertices:
        raise ValueError("edge list does not form a tree")
    return Tree(n_vertices, root, tuple(directed), tuple(labels))


def from_edges(edges, labels: dict, root: int) -> Tree:
    """Build a tree from an ordered undirected edge list over vertices 0..V-1.

    ``labels`` maps each leaf vertex to its label.  No vertex is suppressed,
    so this is the way to build trees with a degree-2 root.
    """
    edges = [tuple(e) for e in edges]
    nv = len(edges) + 1
    lab = [labels.get(v) for v in range(nv)]
    return _orient(nv, edges, root, lab)


_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(int(m.group(1)))
        else:
            ch = m.group(2)
            if ch not in "(),;":
                raise ValueError(f"unexpected character {ch!r} in tree")
            out.append(ch)
        pos = m.end()
    return out


def parse_tree(text: str) -> Tree:
    """Parse the Newick subset described in the module docstring."""
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty tree")
    if tokens[-1] != ";":
        raise ValueError("tree must be terminated by ';'")
    tokens = tokens[:-1]
    if ";" in tokens:
        raise ValueError("';' may only appear at the end")

    labels: list = []
    undirected: list = []
    pos = 0

    def node() -> int:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree")
        tok = tokens[pos]
        v = len(labels)
        if isinstance(tok, int):
            if tok < 1:
                raise ValueError("leaf labels must be positive integers")
            labels.append(tok)
            pos += 1
            return v
        if tok != "(":
            raise ValueError(f"unexpected {tok!r}")
        labels.append(None)
        pos += 1
        n_children = 0
        while True:
            slot = len(undirected)
            undirected.append(None)
            child = node()
            undirected[slot] = (v, child)
            n_children += 1
            if pos >= len(tokens):
                raise ValueError("unbalanced parentheses")
            if tokens[pos] == ",":
                pos += 1
                continue
            if tokens[pos] == ")":
                pos += 1
                break
            raise ValueError(f"unexpected {tokens[pos]!r}")
        if n_children < 2:
            raise ValueError(
                "a node with a single child leaves no inner vertex of degree >= 3"
            )
        return v

    root = node()
    if pos != len(tokens):
        raise ValueError("unbalanced parentheses or trailing input")
    if labels[root] is not None:
        raise ValueError("a tree with a single leaf has no inner vertex")
    leaf_labels = [x for x in labels if x is not None]
    if len(set(leaf_labels)) != len(leaf_labels):
        raise ValueError("duplicate leaf labels")

    root_edges = [i for i, (a, _) in enumerate(undirected) if a == root]
    if len(root_edges) == 2:
        i1, i2 = root_edges
        c1, c2 = undirected[i1][1], undirected[i2][1]
        if labels[c1] is not None and labels[c2] is not None:
            raise ValueError("a tree with two leaves has no inner vertex")
        undirected[i2] = (c1, c2)
        del undirected[i1]
        new_root = c1 if labels[c1] is None else c2
        # drop the old root and renumber
        remap = {v: (v if v < root else v - 1) for v in range(len(labels)) if v != root}
        undirected = [(remap[a], remap[b]) for a, b in undirected]
        labels = [lab for v, lab in enumerate(labels) if v != root]
        root = remap[new_root]
    return _preorder_edges(_orient(len(labels), undirected, root, labels))


def _preorder_edges(tree: Tree) -> Tree:
    """Renumber vertices and edges in the order a left-to-right reading of the tree meets them."""
    pre = tree.preorder
    new_id = {v: i for i, v in enumerate(pre)}
    edges = tuple(
        (new_id[tree.edges[tree.parent_edge[v]][0]], new_id[v]) for v in pre[1:]
    )
    labels = tuple(tree.labels[v] for v in pre)
    return Tree(tree.n_vertices, 0, edges, labels)


def to_newick(tree: Tree) -> str:
    """Serialize with children in edge-index order."""
    if tree.degrees[tree.root] == 1:
        raise ValueError("a tree rooted at a leaf has no form in this Newick subset")

    def rec(v: int) -> str:
        if tree.labels[v] is not None:
            return str(tree.labels[v])
        return "(" + ",".join(rec(tree.edges[e][1]) for e in tree.children[v]) + ")"

    return rec(tree.root) + ";"


# -- builtin families ------------------------------------------------------------


def claw(n: int) -> Tree:
    """K_{n,1}: a root joined to ``n`` leaves labelled 1..n."""
    if n < 3:
        raise ValueError("a claw tree needs n >= 3 leaves")
    return Tree(
        n + 1,
        0,
        tuple((0, i) for i in range(1, n + 1)),
        (None,) + tuple(range(1, n + 1)),
    )


def tripod() -> Tree:
    return claw(3)


def snowflake() -> Tree:
    """Centre joined to three cherries (1,2), (3,4), (5,6)."""
    return parse_tree("((1,2),(3,4),(5,6));")


def caterpillar(k: int) -> Tree:
    """Trivalent caterpillar with ``k`` inner edges and ``k + 3`` leaves.

    ``caterpillar(3)`` is the six-leaf 3-caterpillar; ``caterpillar(1)`` is the
    quartet tree.
    """
    if k < 1:
        raise ValueError("caterpillar needs k >= 1 inner edges")
    n = k + 3
    text = f"({n - 1},{n})"
    for lab in range(n - 2, 2, -1):
        text = f"({lab},{text})"
    return parse_tree(f"(1,2,{text});")


BUILTINS = ("tripod", "claw", "snowflake", "caterpillar", "quartet")


def builtin_tree(name: str, *params: int) -> Tree:
    if name == "tripod" and not params:
        return tripod()
    if name == "claw" and len(params) == 1:
        return claw(params[0])
    if name == "snowflake" and not params:
        return snowflake()
    if name == "caterpillar" and len(params) <= 1:
        return caterpillar(params[0] if params else 3)
    if name == "quartet" and not params:
        return parse_tree("((1,2),(3,4));")
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin tree {name!r}")
    raise ValueError(f"bad parameters {params} for builtin tree {name!r}")


def parse_builtin(spec: str) -> Tree:
    """``builtin:snowflake``, ``builtin:claw:5``, ``builtin:caterpillar:3``."""
    if not spec.startswith("builtin:"):
        raise ValueError(f"not a builtin spec: {spec!r}")
    parts = spec[len("builtin:"):].split(":")
    try:
        params = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ValueError(f"bad builtin parameters in {spec!r}") from None
    return builtin_tree(parts[0], *params)


# -- edits -------------------------------------------------------------------------


def contract_edge(tree: Tree, e: int) -> Tree:
    """Identify the endpoints of inner edge ``e``; other edges keep their order."""
    if not 0 <= e < tree.n_edges:
        raise ValueError(f"no edge {e}")
    p, c = tree.edges[e]
    if tree.degrees[p] < 2 or tree.degrees[c] < 2:
        raise ValueError(f"edge {e} is a leaf edge and cannot be contracted")
    remap = {}
    for v in range(tree.n_vertices):
        if v == c:
            continue
        remap[v] = v if v < c else v - 1
    remap[c] = remap[p]
    new_edges = tuple(
        (remap[a], remap[b]) for i, (a, b) in enumerate(tree.edges) if i != e
    )
    labels = tuple(lab for v, lab in enumerate(tree.labels) if v != c)
    return Tree(tree.n_vertices - 1, remap[tree.root], new_edges, labels)


def reroot(tree: Tree, vertex: int) -> Tree:
    """Same undirected tree and edge order, directed away from ``vertex``."""
    if not 0 <= vertex < tree.n_vertices:
        raise ValueError(f"unknown vertex {vertex}")
    return _orient(tree.n_vertices, list(tree.edges), vertex, tree.labels)


def relabel(tree: Tree, mapping: dict) -> Tree:
    """Rename leaf labels by ``mapping`` (must be injective on the leaves)."""
    labels = tuple(None if lab is None else mapping.get(lab, lab) for lab in tree.labels)
    return Tree(tree.n_vertices, tree.root, tree.edges, labels)


# -- prolongations of claw trees -----------------------------------------------


@dataclass(frozen=True)
class ProlongationSpec:
    n: int
    side: tuple[int, ...]  # sorted labels on the root side; always contains leaf 1

    def __post_init__(self):
        s = set(self.side)
        if not (2 <= len(s) <= self.n - 2) or not s <= set(range(1, self.n + 1)):
            raise ValueError(f"invalid split {self.side} of a claw with {self.n} leaves")

    @property
    def complement(self) -> tuple[int, ...]:
        s = set(self.side)
        return tuple(i for i in range(1, self.n + 1) if i not in s)

    def __str__(self):
        return "".join(map(str, self.side)) + "|" + "".join(map(str, self.complement))


def prolongation_tree(spec: ProlongationSpec) -> Tree:
    """Two inner vertices: 0 holds ``spec.side``, 1 holds the complement.

    Leaf edges come first in label order (matching :func:`claw`), the inner
    edge ``0 -> 1`` is last.
    """
    n = spec.n
    side = set(spec.side)
    edges = tuple((0 if lab in side else 1, lab + 1) for lab in range(1, n + 1))
    edges = edges + ((0, 1),)
    labels = (None, None) + tuple(range(1, n + 1))
    return Tree(n + 2, 0, edges, labels)


def prolongations(n: int) -> list[tuple[ProlongationSpec, Tree]]:
    """All two-inner-vertex prolongations of claw(n) with both sides >= 2.

    Ordered by the size of the side containing leaf 1, then lexicographically.
    """
    if n < 4:
        raise ValueError("claw trees with fewer than 4 leaves have no valid prolongation")
    # the side holding leaf 1 names each split exactly once
    out = []
    for size in range(2, n - 1):
        for rest in itertools.combinations(range(2, n + 1), size - 1):
            spec = ProlongationSpec(n, (1,) + rest)
            out.append((spec, prolongation_tree(spec)))
    return out


def prolongation_count(n: int) -> int:
    return (2**n - 2 - 2 * n) // 2
