"""Gauss-Legendre quadrature over panels with order-doubling refinement."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np


@lru_cache(maxsize=64)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def panel_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, order: int) -> float:
    """Gauss-Legendre quadrature of ``f`` over ``[a, b]`` at fixed order."""
    nodes, weights = _gl_nodes(order)
    half = 0.5 * (b - a)
    values = np.asarray(f(0.5 * (a + b) + half * nodes), dtype=float)
    return half * float(weights @ values)


def piecewise_quad(
    f: Callable[[np.ndarray], np.ndarray],
    knots: Sequence[float],
    order: int = 32,
    rel_tol: float = 1e-9,
    max_doublings: int = 4,
) -> float:
    """Integrate ``f`` over ``[knots[0], knots[-1]]`` splitting at interior knots.

    The integrand must be smooth inside each panel (kinks belong on knots).
    Each panel doubles its Gauss-Legendre order until the panel value is
    stable to ``rel_tol`` relative to ``max(1, |panel value|)``.
    """
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b <= a:
            continue
        previous = panel_quad(f, a, b, order)
        current_order = order
        for _ in range(max_doublings):
            current_order *= 2
            current = panel_quad(f, a, b, current_order)
            converged = abs(current - previous) <= rel_tol * max(1.0, abs(current))
            previous = current
            if converged:
                break
        total += previous
    return total


def year_knots(start: float, end: float) -> list[float]:
    """Panel boundaries: ``start``, every integer strictly inside, ``end``."""
    knots = [start]
    first = math.floor(start) + 1
    k = first
    while k < end:
        if k > start:
            knots.append(float(k))
        k += 1
    knots.append(end)
    return knots
