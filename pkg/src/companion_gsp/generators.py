"""Built-in test graphs: directed cycle, directed ladder, random digraphs."""

from __future__ import annotations

import numpy as np

from .errors import AssumptionError, InputError
from .graph_model import ShiftGraph, decompose


def cycle_graph(n: int) -> ShiftGraph:
    """Directed cycle ``0 -> 1 -> ... -> n-1 -> 0``; its shift is the DSP delay."""
    if n < 2:
        raise InputError("cycle needs n >= 2")
    return ShiftGraph(np.roll(np.eye(n), 1, axis=0), tuple(f"t{i}" for i in range(n)))


def ladder_graph(rungs: int) -> ShiftGraph:
    """Directed ladder with ``2 * rungs`` vertices.

    Top rail ``0 -> 1 -> ... -> K-1`` runs forward, bottom rail
    ``2K-1 -> ... -> K`` runs backward, the last rung points down
    (``K-1 -> 2K-1``) and every other rung points up (``K+i -> i``).  Each
    up-rung closes one cycle through the down-rung, giving cycles of lengths
    4, 6, ..., 2K that all share an edge, hence

        Delta(x) = x^{2K} - x^{2K-4} - ... - x^2 - 1.
    """
    k = int(rungs)
    if k < 2:
        raise InputError("ladder needs at least 2 rungs")
    n = 2 * k
    a = np.zeros((n, n))
    top = list(range(k))
    bottom = list(range(k, n))
    for i in range(k - 1):
        a[top[i + 1], top[i]] = 1.0
        a[bottom[i], bottom[i + 1]] = 1.0
        a[top[i], bottom[i]] = 1.0
    a[bottom[-1], top[-1]] = 1.0
    labels = tuple(f"u{i}" for i in range(k)) + tuple(f"l{i}" for i in range(k))
    return ShiftGraph(a, labels)


def random_digraph(
    n: int,
    rng: np.random.Generator,
    p: float = 0.2,
    min_gap: float = 1e-3,
    nonzero: bool = False,
    max_tries: int = 10_000,
) -> ShiftGraph:
    """Erdos-Renyi digraph, redrawn until strongly connected with distinct eigenvalues.

    ``p = 0.2`` keeps the spectral radius small enough that the
    Vandermonde matrices of graphs up to N = 12 stay comfortably invertible.
    With ``nonzero=True`` graphs with a zero eigenvalue are also rejected.
    """
    if n < 2:
        raise InputError("random digraph needs n >= 2")
    for _ in range(max_tries):
        a = (rng.random((n, n)) < p).astype(float)
        np.fill_diagonal(a, 0.0)
        g = ShiftGraph(a)
        if not g.strongly_connected:
            continue
        try:
            d = decompose(g, distinct_tol=min_gap)
        except AssumptionError:
            continue
        if nonzero and np.min(np.abs(d.lam)) <= min_gap:
            continue
        return g
    raise AssumptionError(f"no admissible random digraph with n={n} after {max_tries} draws")


def random_corpus(count: int, seed: int = 0, n_min: int = 3, n_max: int = 12, **kwargs) -> list[ShiftGraph]:
    """Seeded list of random admissible digraphs with sizes in ``[n_min, n_max]``."""
    rng = np.random.default_rng(seed)
    sizes = rng.integers(n_min, n_max + 1, size=count)
    return [random_digraph(int(n), rng, **kwargs) for n in sizes]
