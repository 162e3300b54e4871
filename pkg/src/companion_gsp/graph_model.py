"""Shift graphs, their eigendecomposition and the classic GFT pipeline.

Conventions: ``A[i, j]`` holds the weight of the edge ``j -> i`` so that
``A @ s`` moves signal mass along the edges.  Eigenvalues are kept in a
canonical order (see :func:`decompose`) and eigenvectors in a fixed gauge,
which makes the derived quantities (impulses, char poly, companion matrix)
reproducible.
"""

from __future__ import annotations

import csv
import enum
import functools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import AssumptionError, InputError

EIG_TOL = 1e-8
CHARPOLY_TOL = 1e-6
CONV_TOL = 1e-7
RANK_TOL = 1e-8
DISTINCT_TOL_REL = 1e-6

# relative tolerance for "same key" when ordering eigenvalues
_ORDER_TIE_TOL = 1e-9


class Rep(str, enum.Enum):
    """The four coordinate systems a graph signal can be expressed in."""

    VERTEX = "s"
    SPECTRUM = "hat"
    IMPULSE = "p"
    SPECTRAL_IMPULSE = "q"

    @classmethod
    def parse(cls, value: "Rep | str") -> "Rep":
        if isinstance(value, Rep):
            return value
        aliases = {
            "vertex_s": cls.VERTEX,
            "spectrum_hat": cls.SPECTRUM,
            "impulse_p": cls.IMPULSE,
            "spectral_impulse_q": cls.SPECTRAL_IMPULSE,
        }
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise InputError(f"unknown representation {value!r}") from None


@dataclass(frozen=True, eq=False)
class ShiftGraph:
    """Weighted directed graph given by its dense shift matrix."""

    matrix: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"shift matrix must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise InputError("a graph needs at least 2 vertices")
        if not np.all(np.isfinite(a)):
            raise InputError("shift matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != a.shape[0]:
                raise InputError("labels length does not match vertex count")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def scc_count(self) -> int:
        count, _ = connected_components(self.matrix != 0, directed=True, connection="strong")
        return int(count)

    @property
    def strongly_connected(self) -> bool:
        return self.scc_count == 1

    @cached_property
    def has_zero_eigenvalue(self) -> bool:
        # rank test; cheaper than a full decomposition and valid for defective A
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        return bool(sv[-1] <= RANK_TOL * max(sv[0], 1.0))

    def edges(self) -> list[tuple[int, int, float]]:
        """Edge list ``(from, to, weight)`` in row-major order of ``A``."""
        rows, cols = np.nonzero(self.matrix)
        return [(int(j), int(i), float(self.matrix[i, j])) for i, j in zip(rows, cols)]


def _graph_from_json(desc: dict) -> ShiftGraph:
    labels = desc.get("labels")
    if "matrix" in desc:
        return ShiftGraph(np.asarray(desc["matrix"], dtype=float), labels)
    try:
        n = int(desc["n"])
        edges = desc["edges"]
    except (KeyError, TypeError, ValueError):
        raise InputError('graph JSON needs "n" and "edges" (or "matrix")') from None
    if n < 2:
        raise InputError("a graph needs at least 2 vertices")
    a = np.zeros((n, n))
    seen = set()
    for edge in edges:
        if not isinstance(edge, (list, tuple)) or len(edge) not in (2, 3):
            raise InputError(f"bad edge entry {edge!r}; expected [from, to, weight?]")
        src, dst = int(edge[0]), int(edge[1])
        if not (0 <= src < n and 0 <= dst < n):
            raise InputError(f"edge {edge!r} references a vertex outside 0..{n - 1}")
        if (src, dst) in seen:
            raise InputError(f"duplicate edge {src}->{dst}")
        seen.add((src, dst))
        a[dst, src] = float(edge[2]) if len(edge) == 3 else 1.0
    return ShiftGraph(a, labels)


def _graph_from_csv(path: Path) -> ShiftGraph:
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    try:
        a = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric CSV entry ({exc})") from None
    if a.ndim != 2:
        raise InputError(f"{path}: ragged CSV matrix")
    return ShiftGraph(a)


def load_graph(source: Any) -> ShiftGraph:
    """Build a :class:`ShiftGraph` from a file path, a JSON-style dict or a matrix.

    JSON descriptions use ``{"n": N, "edges": [[from, to, weight?], ...]}``
    with weight defaulting to 1; an edge ``j -> i`` sets ``A[i, j]``.  CSV
    files hold the dense N x N matrix directly.
    """
    if isinstance(source, ShiftGraph):
        return source
    if isinstance(source, dict):
        return _graph_from_json(source)
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise InputError(f"graph file not found: {path}")
        if path.suffix.lower() == ".csv":
            return _graph_from_csv(path)
        try:
            desc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        if isinstance(desc, list):
            return ShiftGraph(np.asarray(desc, dtype=float))
        if not isinstance(desc, dict):
            raise InputError(f"{path}: expected a JSON object")
        return _graph_from_json(desc)
    try:
        return ShiftGraph(np.asarray(source, dtype=float))
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot interpret graph source: {exc}") from None


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigendecomposition ``A = gft_inv @ diag(lam) @ gft`` in canonical form.

    ``pairing[k]`` is the index of the eigenvalue conjugate to ``lam[k]``
    (``k`` itself for real eigenvalues).
    """

    graph: ShiftGraph
    lam: np.ndarray
    gft: np.ndarray
    gft_inv: np.ndarray
    m_shift: np.ndarray
    min_gap: float
    pairing: tuple[int, ...]
    order: str = "phase"
    eig_tol: float = EIG_TOL
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    @property
    def shift(self) -> np.ndarray:
        return self.graph.matrix

    @cached_property
    def char_poly(self) -> "CharPoly":
        return char_poly(self)

    @cached_property
    def companion(self):
        from .companion import build_companion

        return build_companion(self)

    @property
    def has_zero_eigenvalue(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.lam))))
        return bool(np.min(np.abs(self.lam)) <= DISTINCT_TOL_REL * scale)

    def signal(self, values, rep: "Rep | str" = Rep.VERTEX) -> "GraphSignal":
        return GraphSignal(values, Rep.parse(rep), self)


def _tolerant_cmp(a: Sequence[float], b: Sequence[float]) -> int:
    for x, y in zip(a, b):
        if abs(x - y) > _ORDER_TIE_TOL * max(1.0, abs(x), abs(y)):
            return -1 if x < y else 1
    return 0


def _order_key(lam: complex, idx: int, order: str) -> tuple:
    if order == "phase":
        phase = math.atan2(-lam.imag, lam.real) % (2 * math.pi)
        if phase > 2 * math.pi - _ORDER_TIE_TOL:
            phase = 0.0
        return (phase, -abs(lam), idx)
    if order == "imag":
        return (abs(lam.imag), lam.real, -lam.imag, idx)
    raise InputError(f"unknown eigenvalue order {order!r}; use 'phase' or 'imag'")


def canonical_order(lam: np.ndarray, order: str = "phase") -> np.ndarray:
    """Permutation sorting ``lam`` into the requested canonical order.

    ``"phase"`` sorts by ascending phase of ``conj(lam)`` in ``[0, 2*pi)``
    (ties: larger modulus first), which reproduces DFT index order on the
    directed cycle.  ``"imag"`` sorts by ascending ``|Im|``, then ``Re``,
    positive imaginary part first; it keeps conjugate pairs adjacent.
    Remaining ties keep the solver's order.
    """
    keys = [_order_key(complex(z), i, order) for i, z in enumerate(lam)]
    perm = sorted(range(len(lam)), key=functools.cmp_to_key(lambda i, j: _tolerant_cmp(keys[i], keys[j])))
    return np.array(perm, dtype=int)


def _gauge(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    mag = np.abs(v)
    anchor = int(np.argmax(mag >= mag.max() * (1 - 1e-8)))
    return v * (np.conj(v[anchor]) / mag[anchor])


def _min_gap(lam: np.ndarray) -> float:
    if lam.shape[0] < 2:
        return math.inf
    diff = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def decompose(
    g: ShiftGraph,
    eig_tol: float = EIG_TOL,
    distinct_tol: float | None = None,
    order: str = "phase",
) -> SpectralDecomposition:
    """Diagonalize the shift of ``g`` and put the result in canonical form.

    Eigenvectors are unit norm, with the largest-magnitude entry (lowest
    index on ties) real positive; eigenvectors of conjugate eigenvalues are
    made exact conjugates of each other, and eigenvectors of real eigenvalues
    are real.

    Raises:
        AssumptionError: eigenvalues closer than ``distinct_tol`` (default
            ``1e-6 * max|lam|``) or the eigen residual exceeds
            ``eig_tol * ||A||_F``.
    """
    g = load_graph(g)
    a = g.matrix
    n = g.n
    try:
        lam, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise AssumptionError(f"eigensolver did not converge: {exc}") from None
    lam = lam.astype(complex)
    vecs = vecs.astype(complex)

    scale = float(np.max(np.abs(lam))) if n else 0.0
    if distinct_tol is None:
        distinct_tol = DISTINCT_TOL_REL * max(scale, np.finfo(float).tiny)
    gap = _min_gap(lam)
    if not gap > distinct_tol:
        raise AssumptionError(
            f"eigenvalues are not distinct: min gap {gap:.3e} <= {distinct_tol:.3e}"
        )

    # snap real eigenvalues, pair up the complex ones
    real_tol = eig_tol * max(1.0, scale)
    is_real = np.abs(lam.imag) <= real_tol
    pairing = list(range(n))
    for k in np.nonzero(is_real)[0]:
        lam[k] = lam[k].real
        v = _gauge(vecs[:, k])
        v = v.real / np.linalg.norm(v.real)
        vecs[:, k] = v
    upper = [k for k in range(n) if not is_real[k] and lam[k].imag > 0]
    lower = {k for k in range(n) if not is_real[k] and lam[k].imag < 0}
    for k in upper:
        if not lower:
            raise AssumptionError("complex eigenvalue without a conjugate partner; is A real?")
        partner = min(lower, key=lambda j: abs(lam[j] - np.conj(lam[k])))
        lower.discard(partner)
        vecs[:, k] = _gauge(vecs[:, k])
        lam[partner] = np.conj(lam[k])
        vecs[:, partner] = np.conj(vecs[:, k])
        pairing[k], pairing[partner] = partner, k
    if lower:
        raise AssumptionError("complex eigenvalue without a conjugate partner; is A real?")

    perm = canonical_order(lam, order)
    inv_perm = np.empty(n, dtype=int)
    inv_perm[perm] = np.arange(n)
    lam = lam[perm]
    vecs = vecs[:, perm]
    pairing = tuple(int(inv_perm[pairing[k]]) for k in perm)

    norm_a = float(np.linalg.norm(a))
    residual = float(np.max(np.linalg.norm(a @ vecs - vecs * lam, axis=0))) / max(norm_a, 1e-300)
    if residual > eig_tol:
        raise AssumptionError(f"eigen residual {residual:.3e} exceeds eig_tol {eig_tol:.1e}")
    gft = np.linalg.inv(vecs)
    m_shift = gft @ (np.conj(lam)[:, None] * vecs)
    inverse_residual = float(np.max(np.abs(gft @ vecs - np.eye(n))))

    for arr in (lam, gft, vecs, m_shift):
        arr.setflags(write=False)
    return SpectralDecomposition(
        graph=g,
        lam=lam,
        gft=gft,
        gft_inv=vecs,
        m_shift=m_shift,
        min_gap=gap,
        pairing=pairing,
        order=order,
        eig_tol=eig_tol,
        diagnostics={
            "eig_residual": residual,
            "inverse_residual": inverse_residual,
            "distinct_tol": distinct_tol,
            "strongly_connected": g.strongly_connected,
        },
    )


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial, ``coeffs = [c0, ..., c_{N-1}, 1]``."""

    coeffs: np.ndarray
    imag_residual: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.ndim != 1 or c.size < 2 or c[-1] != 1.0:
            raise InputError("CharPoly needs a monic real coefficient vector")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def lower(self) -> np.ndarray:
        """``[c0, ..., c_{N-1}]``, the boundary-condition coefficients."""
        return self.coeffs[:-1]

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            out = out * x + c
        return out

    def of_matrix(self, a: np.ndarray) -> np.ndarray:
        """``Delta(a)`` by Horner's rule on matrices."""
        out = np.zeros_like(a, dtype=float)
        eye = np.eye(a.shape[0])
        for c in self.coeffs[::-1]:
            out = out @ a + c * eye
        return out


def monic_from_roots(roots: np.ndarray) -> tuple[np.ndarray, float]:
    """Expand ``prod_k (x - roots[k])`` by sequential monomial products.

    Returns the real part of the ascending coefficients and the largest
    imaginary magnitude discarded.
    """
    coeffs = np.zeros(len(roots) + 1, dtype=complex)
    coeffs[0] = 1.0
    for deg, r in enumerate(roots, start=1):
        coeffs[1 : deg + 1] = coeffs[0:deg] - r * coeffs[1 : deg + 1]
        coeffs[0] = -r * coeffs[0]
    return coeffs.real.copy(), float(np.max(np.abs(coeffs.imag)))


def char_poly(d: SpectralDecomposition, charpoly_tol: float = CHARPOLY_TOL) -> CharPoly:
    """Characteristic polynomial from the product of ``(x - lam_k)``.

    Raises:
        AssumptionError: if the discarded imaginary part exceeds ``charpoly_tol``.
    """
    coeffs, imag = monic_from_roots(d.lam)
    if imag > charpoly_tol:
        raise AssumptionError(f"char poly imaginary residual {imag:.3e} > {charpoly_tol:.1e}")
    coeffs[-1] = 1.0
    return CharPoly(coeffs, imag)


@dataclass(frozen=True, eq=False)
class GraphSignal:
    """Length-N complex vector tagged with its representation and model."""

    values: np.ndarray
    rep: Rep
    model: SpectralDecomposition
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True).reshape(-1)
        if v.shape[0] != self.model.n:
            raise InputError(f"signal length {v.shape[0]} does not match graph size {self.model.n}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rep", Rep.parse(self.rep))

    def to(self, target: "Rep | str", **kwargs) -> "GraphSignal":
        from .companion import to_representation

        return to_representation(self, target, **kwargs)

    def __len__(self):
        return self.values.shape[0]


def _require_rep(sig: GraphSignal, rep: Rep, what: str):
    if sig.rep is not rep:
        raise InputError(f"{what} expects a {rep.name.lower()} signal, got {sig.rep.name.lower()}")


def vertex_impulse(d: SpectralDecomposition) -> GraphSignal:
    """``delta_0 = GFT^{-1} (1/sqrt(N)) 1``: flat spectrum, real for real ``A``."""
    n = d.n
    delta = d.gft_inv @ np.full(n, 1 / math.sqrt(n))
    imag = float(np.max(np.abs(delta.imag)))
    if imag <= d.eig_tol:
        delta = delta.real.astype(complex)
    return GraphSignal(delta, Rep.VERTEX, d, {"imag_residual": imag})


def _repeated(op: np.ndarray, start: np.ndarray, count: int) -> np.ndarray:
    cols = [start]
    for _ in range(count):
        cols.append(op @ cols[-1])
    return np.stack(cols, axis=1)


def _check_rank(mat: np.ndarray, rank_tol: float, name: str):
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        raise AssumptionError(
            f"{name} is rank deficient (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}); "
            "eigenvalues are nearly repeated"
        )


def delayed_impulses(d: SpectralDecomposition, k_max: int | None = None, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Vertex impulsive matrix with columns ``A^n delta_0``, ``n = 0..k_max``.

    Columns come from repeated application of ``A``.  With the default
    ``k_max = N - 1`` the matrix is square and its rank is checked.
    """
    k_max = d.n - 1 if k_max is None else int(k_max)
    if not 0 <= k_max <= d.n - 1:
        raise InputError(f"k_max must be in 0..{d.n - 1}")
    delta = vertex_impulse(d).values
    if not np.any(delta.imag):
        mat = _repeated(d.shift, delta.real, k_max).astype(complex)
    else:
        mat = _repeated(d.shift, delta, k_max)
    if k_max == d.n - 1:
        _check_rank(mat, rank_tol, "vertex impulsive matrix")
    return mat


def spectral_impulse(d: SpectralDecomposition) -> GraphSignal:
    """``GFT (1/sqrt(N)) 1``, the spectral-domain impulse."""
    return GraphSignal(d.gft @ np.full(d.n, 1 / math.sqrt(d.n)), Rep.SPECTRUM, d)


def delayed_spectral_impulses(d: SpectralDecomposition, k_max: int | None = None, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Spectral impulsive matrix, columns ``M^n GFT (1/sqrt(N)) 1``."""
    k_max = d.n - 1 if k_max is None else int(k_max)
    if not 0 <= k_max <= d.n - 1:
        raise InputError(f"k_max must be in 0..{d.n - 1}")
    mat = _repeated(d.m_shift, spectral_impulse(d).values, k_max)
    if k_max == d.n - 1:
        _check_rank(mat, rank_tol, "spectral impulsive matrix")
    return mat


def apply_polynomial(op: np.ndarray, coeffs, x: np.ndarray) -> np.ndarray:
    """``sum_k coeffs[k] op^k x`` by Horner's rule (``len(coeffs) - 1`` matvecs)."""
    coeffs = np.asarray(coeffs)
    if coeffs.size == 0:
        return np.zeros_like(x)
    y = coeffs[-1] * x
    for c in coeffs[-2::-1]:
        y = op @ y + c * x
    return y


def lsi_filter_apply(d: SpectralDecomposition, coeffs, sig: GraphSignal) -> GraphSignal:
    """Filter a vertex signal with the LSI filter ``P(A) = sum_k coeffs[k] A^k``."""
    _require_rep(sig, Rep.VERTEX, "lsi_filter_apply")
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if coeffs.ndim != 1 or coeffs.size > d.n:
        raise InputError(f"filter has {coeffs.size} taps; at most N = {d.n} allowed")
    return GraphSignal(apply_polynomial(d.shift, coeffs, sig.values), Rep.VERTEX, d)


def gft(sig: GraphSignal) -> GraphSignal:
    _require_rep(sig, Rep.VERTEX, "gft")
    return GraphSignal(sig.model.gft @ sig.values, Rep.SPECTRUM, sig.model)


def igft(sig: GraphSignal) -> GraphSignal:
    _require_rep(sig, Rep.SPECTRUM, "igft")
    return GraphSignal(sig.model.gft_inv @ sig.values, Rep.VERTEX, sig.model)
