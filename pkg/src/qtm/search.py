"""Derivative-free scalar maximization helpers (bracketed golden-section)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section shrink factor


@dataclass(frozen=True)
class SearchResult:
    x: float
    fx: float
    iterations: int
    tol: float
    bracket: tuple[float, float]
    probes: tuple[tuple[float, float], ...] = ()


def golden_max(f, lo, hi, rel_tol=1e-10, max_iter=300, keep_probes=False):
    """Maximize a unimodal scalar function on [lo, hi] by golden-section search.

    Returns a SearchResult; the achieved tolerance is the final bracket width
    relative to the midpoint. Raises ConvergenceError if max_iter is hit
    before the bracket shrinks below tolerance.
    """
    if not hi > lo:
        raise DomainError(f"invalid bracket [{lo}, {hi}]")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    probes = [(c, fc), (d, fd)] if keep_probes else None
    for it in range(1, max_iter + 1):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if probes is not None:
                probes.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if probes is not None:
                probes.append((d, fd))
        scale = max(abs(a), abs(b), 1e-300)
        if (b - a) <= rel_tol * scale:
            x, fx = (c, fc) if fc >= fd else (d, fd)
            return SearchResult(
                x=x,
                fx=fx,
                iterations=it,
                tol=(b - a) / scale,
                bracket=(a, b),
                probes=tuple(probes) if probes is not None else (),
            )
    raise ConvergenceError(
        f"golden-section search did not converge in {max_iter} iterations",
        diagnostics={"bracket": (a, b), "rel_tol": rel_tol},
    )


def grid_then_golden(f, grid, rel_tol=1e-10, keep_probes=False):
    """Coarse grid scan followed by golden-section refinement around the best point.

    Returns (SearchResult, on_boundary, grid_probes). on_boundary is True when
    the grid maximum sits on the first or last grid point, in which case the
    refinement bracket is clamped to the grid edge.
    """
    xs = list(grid)
    if len(xs) < 2:
        raise DomainError("grid must contain at least two points")
    fs = [f(x) for x in xs]
    i = max(range(len(xs)), key=fs.__getitem__)
    on_boundary = i == 0 or i == len(xs) - 1
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    res = golden_max(f, lo, hi, rel_tol=rel_tol, keep_probes=keep_probes)
    if fs[i] > res.fx:
        res = SearchResult(
            x=xs[i], fx=fs[i], iterations=res.iterations, tol=res.tol,
            bracket=res.bracket, probes=res.probes,
        )
    return res, on_boundary, tuple(zip(xs, fs))
