"""Deterministic seed derivation so one root seed drives every component."""

from __future__ import annotations

import zlib

__all__ = ["derive_seed"]

_MODULUS = 2**31 - 1


def derive_seed(root_seed: int, label: str) -> int:
    """Stable child seed for a named component under a root seed."""
    mix = zlib.crc32(label.encode("utf-8"))
    return (root_seed * 1_000_003 + mix) % _MODULUS
