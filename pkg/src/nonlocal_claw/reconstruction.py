"""Piecewise-linear reconstruction with limited slopes."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np


class ReconstructedFaces(NamedTuple):
    plus: np.ndarray    # right edge value in each cell
    minus: np.ndarray   # left edge value in each cell
    slopes: np.ndarray


def minmod(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    same_sign = a * b > 0
    pick = np.where(np.abs(a) <= np.abs(b), a, b)
    return np.where(same_sign, pick, 0.0)


LIMITERS: dict[str, Callable] = {"minmod": minmod}


def get_limiter(name: str) -> Callable:
    try:
        return LIMITERS[name]
    except KeyError:
        raise ValueError(f"unknown limiter {name!r}; known: {sorted(LIMITERS)}") from None


def reconstruct(padded: np.ndarray, ghost: int = 1, limiter: Callable = minmod) -> ReconstructedFaces:
    """Reconstruct the cells ``padded[ghost:-ghost]``.

    Slopes use one neighbour on each side, so ``ghost >= 1`` is required.
    """
    if ghost < 1:
        raise ValueError(f"reconstruction needs at least one ghost cell, got {ghost}")
    padded = np.asarray(padded, dtype=float)
    n = padded.size - 2 * ghost
    if n <= 0:
        raise ValueError("no interior cells to reconstruct")
    u = padded[ghost:ghost + n]
    right = padded[ghost + 1:ghost + n + 1] - u
    left = u - padded[ghost - 1:ghost + n - 1]
    sigma = limiter(right, left)
    return ReconstructedFaces(plus=u + 0.5 * sigma, minus=u - 0.5 * sigma, slopes=sigma)
