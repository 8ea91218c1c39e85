"""Finite abelian groups presented as products of cyclic factors.

Elements are tuples of residues.  The canonical element order is the
identity first, then lexicographic on residue tuples, which is exactly
``itertools.product`` order over the factor ranges.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

Element = tuple[int, ...]

_SPEC_RE = re.compile(r"^Z(\d+)(?:x Z(\d+))*$".replace(" ", ""))


@dataclass(frozen=True)
class Group:
    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a group needs at least one cyclic factor")
        for k in self.factors:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"cyclic factor must be a positive integer, got {k!r}")

    @property
    def order(self) -> int:
        out = 1
        for k in self.factors:
            out *= k
        return out

    @property
    def rank(self) -> int:
        return len(self.factors)

    def __str__(self):
        return "x".join(f"Z{k}" for k in self.factors)

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(k) for k in self.factors)))

    @cached_property
    def _index(self) -> dict[Element, int]:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        """``add_table[i][j]`` is the index of ``elements[i] + elements[j]``."""
        els = self.elements
        idx = self._index
        return tuple(
            tuple(idx[self._raw_add(a, b)] for b in els) for a in els
        )

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        idx = self._index
        return tuple(idx[self._raw_neg(a)] for a in self.elements)

    def enumerate(self) -> tuple[Element, ...]:
        return self.elements

    def zero(self) -> Element:
        return (0,) * len(self.factors)

    def index(self, g) -> int:
        """Position of ``g`` in the canonical order."""
        return self._index[self.element(g)]

    def element(self, g) -> Element:
        """Coerce an int (single factor) or residue sequence to a reduced element."""
        if isinstance(g, int):
            g = (g,)
        g = tuple(g)
        if len(g) != len(self.factors):
            raise ValueError(
                f"element {g} has {len(g)} residues but {self} has {len(self.factors)} factors"
            )
        return tuple(int(r) % k for r, k in zip(g, self.factors))

    def _raw_add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % k for x, y, k in zip(a, b, self.factors))

    def _raw_neg(self, a: Element) -> Element:
        return tuple((-x) % k for x, k in zip(a, self.factors))

    def add(self, a, b) -> Element:
        return self._raw_add(self.element(a), self.element(b))

    def neg(self, a) -> Element:
        return self._raw_neg(self.element(a))

    def sub(self, a, b) -> Element:
        return self.add(a, self.neg(b))

    def sum(self, items) -> Element:
        acc = self.zero()
        for g in items:
            acc = self._raw_add(acc, self.element(g))
        return acc

    def mul(self, k: int, a) -> Element:
        """``k``-fold sum of ``a`` (``k`` may be negative)."""
        a = self.element(a)
        return tuple((k * x) % m for x, m in zip(a, self.factors))

    def generators(self) -> tuple[Element, ...]:
        """The standard generators, one per cyclic factor."""
        r = len(self.factors)
        return tuple(tuple(1 if j == i else 0 for j in range(r)) for i in range(r))

    def format_element(self, g) -> str:
        return ",".join(str(r) for r in self.element(g))

    def parse_element(self, text: str) -> Element:
        try:
            residues = tuple(int(t) for t in text.split(","))
        except ValueError:
            raise ValueError(f"bad group element {text!r}") from None
        if len(residues) != len(self.factors):
            raise ValueError(f"element {text!r} does not match group {self}")
        for r, k in zip(residues, self.factors):
            if not 0 <= r < k:
                raise ValueError(f"element {text!r} is not reduced for group {self}")
        return residues


def parse_group(spec: str) -> Group:
    """Parse ``Zk(xZk)*``, e.g. ``"Z4xZ2"``."""
    text = spec.strip()
    if not _SPEC_RE.match(text):
        raise ValueError(f"malformed group spec {spec!r}; expected e.g. Z6 or Z2xZ2")
    factors = tuple(int(part[1:]) for part in text.split("x"))
    if any(k == 0 for k in factors):
        raise ValueError(f"group spec {spec!r} has a factor of order 0")
    return Group(factors)


@dataclass(frozen=True)
class Embedding:
    """An injective homomorphism ``source -> target`` fixed by generator images."""

    source: Group
    target: Group
    images: tuple[Element, ...]
    _map: dict = field(default=None, repr=False, compare=False)

    def __call__(self, g) -> Element:
        return self._map[self.source.element(g)]

    def index_map(self) -> tuple[int, ...]:
        """``index_map()[i]`` is the target index of source element ``i``."""
        return tuple(self.target.index(self._map[g]) for g in self.source.elements)


def build_embedding(source: Group, target: Group, images) -> Embedding:
    """Validate generator images and return the induced embedding.

    The standard generator of factor ``i`` is sent to ``images[i]``.  Raises
    ``ValueError`` unless the induced map is a well-defined injective
    homomorphism.
    """
    images = tuple(target.element(g) for g in images)
    if len(images) != source.rank:
        raise ValueError(
            f"need {source.rank} generator images for {source}, got {len(images)}"
        )
    # well defined: each image must be killed by the order of its generator
    for k, img in zip(source.factors, images):
        if target.mul(k, img) != target.zero():
            raise ValueError(
                f"not a homomorphism: image {img} has order not dividing {k}"
            )
    mapping = {}
    for g in source.elements:
        acc = target.zero()
        for r, img in zip(g, images):
            acc = target.add(acc, target.mul(r, img))
        mapping[g] = acc
    # exhaustive homomorphism check, cheap for the group sizes in use
    for a in source.elements:
        for b in source.elements:
            if mapping[source.add(a, b)] != target.add(mapping[a], mapping[b]):
                raise ValueError("not a homomorphism")
    if len(set(mapping.values())) != source.order:
        raise ValueError("map is not injective")
    return Embedding(source, target, images, mapping)
