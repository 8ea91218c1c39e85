"""Exact integer and rational linear algebra.

Matrices are lists of rows of Python ints.  Nothing here touches floating
point: ranks come from fraction-free (Bareiss) elimination, kernels from
rational reduced row echelon form, lattice membership from an incrementally
maintained Hermite-style triangular basis, and polytope membership from a
phase-one simplex over ``Fraction`` with Bland's smallest-index rule.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _check_rect(M) -> int:
    if not M:
        return 0
    w = len(M[0])
    if any(len(r) != w for r in M):
        raise ValueError("ragged matrix")
    return w


def transpose(M):
    return [list(c) for c in zip(*M)]


def stack(A1, A2):
    """Put ``A1`` on top of ``A2``; the kernel of the result is ``ker A1 & ker A2``."""
    w1, w2 = _check_rect(A1), _check_rect(A2)
    if A1 and A2 and w1 != w2:
        raise ValueError(f"column mismatch: {w1} vs {w2}")
    return [list(r) for r in A1] + [list(r) for r in A2]


def echelon_rows(M) -> list[list[int]]:
    """Fraction-free row echelon form; returns the nonzero rows.

    The returned rows span the same rational row space as ``M``.
    """
    _check_rect(M)
    rows = [list(r) for r in M if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    r = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv_row = rows[r]
        pv = piv_row[c]
        for i in range(r + 1, len(rows)):
            row = rows[i]
            a = row[c]
            if a:
                rows[i] = [(pv * x - a * y) // prev for x, y in zip(row, piv_row)]
            elif pv != prev:
                rows[i] = [(pv * x) // prev for x in row]
        prev = pv
        r += 1
        if r == len(rows):
            break
    out = []
    for row in rows[:r]:
        g = 0
        for x in row:
            g = gcd(g, x)
        out.append([x // g for x in row] if g > 1 else row)
    return out


def rank(M) -> int:
    """Rank over the rationals."""
    if not M:
        return 0
    # eliminate along the short side
    if len(M) > len(M[0]):
        M = transpose(M)
    return len(echelon_rows(M))


def rref(M):
    """Reduced row echelon form over ``Fraction``; returns (rows, pivot columns)."""
    rows = [[Fraction(x) for x in r] for r in M]
    ncols = _check_rect(M)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _primitive(vec) -> list[int]:
    den = 1
    for x in vec:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def kernel_basis(M, ncols: int | None = None) -> list[list[int]]:
    """Integer vectors spanning the rational kernel of ``M``."""
    if ncols is None:
        ncols = _check_rect(M)
    rows, pivots = rref(M) if M else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, pc in zip(rows, pivots):
            vec[pc] = -row[f]
        basis.append(_primitive(vec))
    return basis


def kernel_dim(M, ncols: int | None = None) -> int:
    if ncols is None:
        ncols = _check_rect(M)
    return ncols - rank(M)


def rowspace_intersection(A, B) -> list[list[int]]:
    """Integer basis of ``rowspace(A) & rowspace(B)``."""
    BA = echelon_rows(A)
    BB = echelon_rows(B)
    if not BA or not BB:
        return []
    k1, k2 = len(BA), len(BB)
    k = k1 + k2
    # left kernel of [BA; -BB] by eliminating the augmented block [C | I]
    aug = []
    for i, row in enumerate(BA):
        aug.append(list(row) + [1 if j == i else 0 for j in range(k)])
    for i, row in enumerate(BB):
        aug.append([-x for x in row] + [1 if j == k1 + i else 0 for j in range(k)])
    width = len(BA[0])
    red = echelon_rows(aug)
    out = []
    for row in red:
        if any(row[:width]):
            continue
        alpha = row[width:width + k1]
        vec = [0] * width
        for a, r in zip(alpha, BA):
            if a:
                for j, x in enumerate(r):
                    if x:
                        vec[j] += a * x
        out.append(_primitive(vec))
    return echelon_rows(out)


# -- lattices ---------------------------------------------------------------------


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class LatticeBasis:
    """Triangular integer basis of the lattice spanned by some vectors.

    ``rows[j]`` holds the basis vector whose first nonzero entry (positive)
    sits at coordinate ``j``.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: dict[int, list[int]] = {}

    @classmethod
    def from_columns(cls, M) -> "LatticeBasis":
        """Lattice generated by the columns of ``M``."""
        lat = cls(len(M))
        for col in zip(*M):
            lat.add(col)
        return lat

    @classmethod
    def from_vectors(cls, vectors, dim: int) -> "LatticeBasis":
        lat = cls(dim)
        for v in vectors:
            lat.add(v)
        return lat

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[list[int]]:
        return [self.rows[j] for j in sorted(self.rows)]

    def add(self, vec) -> None:
        vec = list(vec)
        if len(vec) != self.dim:
            raise ValueError("dimension mismatch")
        j = 0
        while True:
            while j < self.dim and vec[j] == 0:
                j += 1
            if j == self.dim:
                return
            row = self.rows.get(j)
            if row is None:
                if vec[j] < 0:
                    vec = [-x for x in vec]
                self.rows[j] = vec
                return
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, row)]
            else:
                g, s, t = _xgcd(a, b)
                new_row = [s * x + t * y for x, y in zip(row, vec)]
                vec = [(b // g) * x - (a // g) * y for x, y in zip(row, vec)]
                if new_row[j] < 0:
                    new_row = [-x for x in new_row]
                self.rows[j] = new_row
            j += 1

    def __contains__(self, vec) -> bool:
        vec = list(vec)
        if len(vec) != self.dim:
            raise ValueError("dimension mismatch")
        for j in range(self.dim):
            b = vec[j]
            if b == 0:
                continue
            row = self.rows.get(j)
            if row is None or b % row[j]:
                return False
            q = b // row[j]
            vec = [x - q * y for x, y in zip(vec, row)]
        return True


def lattice_basis(M) -> LatticeBasis:
    return LatticeBasis.from_columns(M)


def lattice_member(B: LatticeBasis, x) -> bool:
    return x in B


# -- rational feasibility -------------------------------------------------------------


def rational_feasible(columns, b):
    """Find rational ``lam >= 0`` with ``sum_j lam[j] * columns[j] == b``.

    Returns the list of ``Fraction`` weights, or ``None`` if infeasible.
    Phase-one simplex with artificial variables and Bland's rule, so it
    terminates on degenerate problems too.
    """
    r = len(b)
    k = len(columns)
    if any(len(c) != r for c in columns):
        raise ValueError("dimension mismatch")
    # drop all-zero rows after checking them
    keep = []
    for i in range(r):
        if b[i] == 0 and all(c[i] == 0 for c in columns):
            continue
        if all(c[i] == 0 for c in columns):
            return None
        keep.append(i)
    if not keep:
        return [Fraction(0)] * k
    tab = []
    for t, i in enumerate(keep):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * c[i]) for c in columns]
        row += [Fraction(1 if s == t else 0) for s in range(len(keep))]
        row.append(Fraction(sign * b[i]))
        tab.append(row)
    m = len(tab)
    ncol = k + m
    basis = [k + t for t in range(m)]
    # reduced costs of the phase-one objective (maximize -sum artificials)
    cost = [sum(tab[t][j] for t in range(m)) for j in range(ncol + 1)]
    for t in range(m):
        cost[k + t] = Fraction(0)
    while True:
        enter = next((j for j in range(k) if cost[j] > 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for t in range(m):
            a = tab[t][enter]
            if a > 0:
                ratio = tab[t][ncol] / a
                if best is None or ratio < best or (ratio == best and basis[t] < basis[leave]):
                    best, leave = ratio, t
        if leave is None:
            # unbounded direction cannot occur: the objective is bounded by 0
            raise ArithmeticError("phase-one simplex reported an unbounded ray")
        prow = tab[leave]
        inv = 1 / prow[enter]
        prow = [x * inv for x in prow]
        tab[leave] = prow
        for t in range(m):
            if t != leave:
                f = tab[t][enter]
                if f:
                    tab[t] = [x - f * y for x, y in zip(tab[t], prow)]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, prow)]
        basis[leave] = enter
    if cost[ncol] != 0:
        return None
    lam = [Fraction(0)] * k
    for t, j in enumerate(basis):
        if j < k:
            lam[j] = tab[t][ncol]
    return lam


def dilation_member(x, columns, n: int) -> bool:
    """Is ``x`` in ``n`` times the convex hull of ``columns``?

    Decided exactly: rational ``lam >= 0`` with ``sum(lam) == n`` and
    ``sum_j lam[j] * columns[j] == x``.  When all columns are nonnegative,
    columns touching a coordinate where ``x`` vanishes are dropped first.
    """
    if n < 0:
        raise ValueError("dilation must be nonnegative")
    x = list(x)
    if any(len(c) != len(x) for c in columns):
        raise ValueError("dimension mismatch")
    if n == 0:
        return not any(x)
    if all(v >= 0 for c in columns for v in c):
        if any(v < 0 for v in x):
            return False
        zero = [i for i, v in enumerate(x) if v == 0]
        columns = [c for c in columns if not any(c[i] for i in zero)]
        if not columns:
            return False
        rows = [i for i, v in enumerate(x) if v != 0]
        cols = [[c[i] for i in rows] + [1] for c in columns]
        b = [x[i] for i in rows] + [n]
    else:
        cols = [list(c) + [1] for c in columns]
        b = x + [n]
    return rational_feasible(cols, b) is not None
