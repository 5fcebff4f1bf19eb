"""su(2) linear algebra in a fixed orthonormal basis.

Elements are represented by their three real coordinates in an orthonormal
basis ``e1, e2, e3`` of su(2).  The basis is orthonormal for the invariant
inner product fixed once for the whole package, and the Lie bracket in this
basis is the Euclidean cross product scaled by ``STRUCTURE_CONSTANT``:

    [e_i, e_j] = STRUCTURE_CONSTANT * eps_{ijk} e_k.

With the conventional normalisation (basis ``-i sigma_a / 2`` of su(2),
inner product ``(X, Y) -> -2 tr(XY)``) the structure constant is 1.  All
cross-module checks are arranged so their verdicts do not depend on this
choice; it is recorded here once and never silently re-derived.
"""

from __future__ import annotations

import numpy as np

#: Structure constant sigma in [e_i, e_j] = sigma eps_{ijk} e_k.
STRUCTURE_CONSTANT: float = 1.0

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Lie bracket [a, b] of two su(2) elements in basis coordinates."""
    return STRUCTURE_CONSTANT * np.cross(a, b)


def norm(a: np.ndarray) -> float:
    """Invariant norm |a|; the basis is orthonormal, so this is Euclidean."""
    return float(np.linalg.norm(a))


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Invariant inner product of two su(2) elements."""
    return float(np.dot(a, b))
