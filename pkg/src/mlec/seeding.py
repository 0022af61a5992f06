"""Labeled seed derivation so subsystems draw from independent streams."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(root: int, *labels: object) -> int:
    """A 63-bit seed from ``root`` and a path of labels, e.g. ``("run", 3, "ga")``."""
    text = "/".join([str(int(root)), *(str(l) for l in labels)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def rng_for(root: int, *labels: object) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, *labels))
