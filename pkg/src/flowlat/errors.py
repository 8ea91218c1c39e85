"""Resource guards shared by the counting and checking code."""

from __future__ import annotations

import os

DEFAULT_GUARD_MB = 4096
DIRECT_GUARD = 24  # largest |G| * |E| accepted by the direct counting method


class GuardError(RuntimeError):
    """A computation was refused because it would exceed a resource guard."""


def guard_mb() -> int:
    raw = os.environ.get("FLOWLAT_GUARD_MB")
    if raw is None:
        return DEFAULT_GUARD_MB
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"FLOWLAT_GUARD_MB must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError("FLOWLAT_GUARD_MB must be positive")
    return value


def check_items(n_items: int, bytes_per_item: int, what: str) -> None:
    """Refuse to hold ``n_items`` objects of roughly ``bytes_per_item`` bytes."""
    need = n_items * bytes_per_item
    if need > guard_mb() * 2**20:
        raise GuardError(
            f"{what} would need about {need // 2**20} MB "
            f"(limit {guard_mb()} MB; raise FLOWLAT_GUARD_MB to allow it)"
        )


def check_direct(tree, group) -> None:
    size = group.order * tree.n_edges
    if size > DIRECT_GUARD:
        raise GuardError(
            f"direct method limited to |G|*|E| <= {DIRECT_GUARD}, got {size}; "
            "use the fiber method for trivalent trees"
        )
