"""Vertex and spectral companion models and the four-representation conversions.

Every diagonalizable shift with distinct eigenvalues has the same
characteristic polynomial as its companion matrix ``C_comp``, which is
diagonalized by the Vandermonde matrix of the eigenvalues.  Signals can be
written in four coordinate systems:

    s    vertex samples            s_hat = GFT s
    p    impulse coordinates       s_hat = (1/sqrt(N)) V p
    q    spectral impulse coords   s     = (1/sqrt(N)) conj(V) q
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from . import interp
from .errors import InputError
from .graph_model import CharPoly, GraphSignal, Rep, SpectralDecomposition

COMP_TOL = 1e-6
DOT_ZERO_TOL = 1e-12


def companion_matrix(coeffs) -> np.ndarray:
    """Companion matrix of the monic polynomial ``[c0, ..., c_{N-1}, 1]``.

    Ones on the subdiagonal, ``-c`` in the last column, zeros elsewhere.
    """
    c = np.asarray(coeffs.coeffs if isinstance(coeffs, CharPoly) else coeffs)
    if c.ndim != 1 or c.size < 2 or c[-1] != 1:
        raise InputError("companion_matrix needs a monic coefficient vector")
    n = c.size - 1
    out = np.zeros((n, n), dtype=c.dtype if np.iscomplexobj(c) else float)
    out[np.arange(1, n), np.arange(n - 1)] = 1
    out[:, -1] = -c[:-1]
    return out


def vandermonde(nodes) -> np.ndarray:
    """Rows ``[1, x_i, x_i**2, ..., x_i**(N-1)]``."""
    x = np.asarray(nodes, dtype=complex)
    return np.vander(x, increasing=True)


def estimate_cond(mat: np.ndarray, iters: int = 100, rtol: float = 1e-10) -> float:
    """2-norm condition number by power iteration on ``M^H M`` and its inverse.

    Deterministic (fixed start vector).  Returns ``inf`` for singular input.
    """
    n = mat.shape[0]
    start = np.cos(np.arange(1, n + 1)) + 1j * np.sin(0.5 * np.arange(1, n + 1))
    start = start / np.linalg.norm(start)

    def power(apply):
        v, est = start, 0.0
        for _ in range(iters):
            w = apply(v)
            nw = float(np.linalg.norm(w))
            if nw == 0 or not np.isfinite(nw):
                return nw
            v = w / nw
            if abs(nw - est) <= rtol * nw:
                return nw
            est = nw
        return est

    smax2 = power(lambda v: mat.conj().T @ (mat @ v))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu = lu_factor(mat, check_finite=True)
    except (ValueError, np.linalg.LinAlgError):
        return math.inf
    if np.any(np.diag(lu[0]) == 0):
        return math.inf
    inv_max2 = power(lambda v: lu_solve(lu, lu_solve(lu, v, trans=2)))
    if inv_max2 == 0 or not np.isfinite(inv_max2):
        return math.inf
    return math.sqrt(smax2 * inv_max2)


@dataclass(frozen=True, eq=False)
class CompanionModel:
    """Companion (canonical) model of a decomposition.

    ``c_comp`` is shared by the vertex and spectral companion models.
    """

    decomp: SpectralDecomposition
    char_poly: CharPoly
    c_comp: np.ndarray
    vand: np.ndarray
    gft_comp: np.ndarray
    gft_comp_sp: np.ndarray
    a_comp_sp: np.ndarray
    m_comp: np.ndarray
    cond_vand: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.decomp.n

    @property
    def lam(self) -> np.ndarray:
        return self.decomp.lam

    @property
    def c_comp_sp(self) -> np.ndarray:
        return self.c_comp

    @property
    def comp_tol(self) -> float:
        return COMP_TOL * self.cond_vand

    @cached_property
    def table(self) -> interp.BarycentricTable:
        return interp.build_table(self.lam)

    @cached_property
    def table_conj(self) -> interp.BarycentricTable:
        return interp.build_table(np.conj(self.lam))

    def diagonalization_residual(self) -> float:
        """``||V^{-1} Lambda V - C_comp||_F``."""
        return float(np.linalg.norm(np.linalg.solve(self.vand, self.lam[:, None] * self.vand) - self.c_comp))

    def left_eigen_residual(self) -> float:
        """Largest ``||v_i C_comp - lambda_i v_i||`` over the Vandermonde rows."""
        rows = self.vand / math.sqrt(self.n)
        return float(np.max(np.linalg.norm(rows @ self.c_comp - self.lam[:, None] * rows, axis=1)))


def build_companion(d: SpectralDecomposition, cp: CharPoly | None = None) -> CompanionModel:
    """Assemble the companion model from the char poly and the canonical eigenvalues."""
    cp = d.char_poly if cp is None else cp
    if cp.degree != d.n:
        raise InputError("characteristic polynomial degree does not match the model")
    n = d.n
    lam = d.lam
    c_comp = companion_matrix(cp)
    vand = vandermonde(lam)
    vand_c = np.conj(vand)
    rt = math.sqrt(n)
    gft_comp = vand / rt
    vand_c_inv = np.linalg.inv(vand_c)
    gft_comp_sp = rt * vand_c_inv
    a_comp_sp = vand_c @ (lam[:, None] * vand_c_inv)
    m_comp = vand @ (np.conj(lam)[:, None] * np.linalg.inv(vand))
    cond = estimate_cond(vand)
    for arr in (c_comp, vand, gft_comp, gft_comp_sp, a_comp_sp, m_comp):
        arr.setflags(write=False)
    return CompanionModel(
        decomp=d,
        char_poly=cp,
        c_comp=c_comp,
        vand=vand,
        gft_comp=gft_comp,
        gft_comp_sp=gft_comp_sp,
        a_comp_sp=a_comp_sp,
        m_comp=m_comp,
        cond_vand=cond,
        diagnostics={
            "cond_vand": cond,
            "boundary_weights": (-cp.lower).tolist(),
            "charpoly_imag_residual": cp.imag_residual,
        },
    )


def _fmt_weight(w: float) -> str:
    return f"{w:.6g}"


def companion_graph_dot(m: CompanionModel | CharPoly, name: str = "companion") -> str:
    """DOT text for the companion graph.

    Red forward path ``0 -> 1 -> ... -> N-1``; green backward edges
    ``N-1 -> k`` with weight ``-c_k``.  Weight-one edges are left unlabelled
    and zero-weight edges are omitted.
    """
    cp = m.char_poly if isinstance(m, CompanionModel) else m
    c = cp.lower
    n = c.size
    scale = max(1.0, float(np.max(np.abs(c))))
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for k in range(n):
        lines.append(f"  {k};")
    for k in range(n - 1):
        lines.append(f"  {k} -> {k + 1} [color=red];")
    for k in range(n):
        w = -float(c[k])
        if abs(w) <= DOT_ZERO_TOL * scale:
            continue
        attrs = ["color=green"]
        if abs(w - 1.0) > DOT_ZERO_TOL * scale:
            attrs.append(f'label="{_fmt_weight(w)}"')
        lines.append(f"  {n - 1} -> {k} [{', '.join(attrs)}];")
    if abs(c[0]) <= DOT_ZERO_TOL * scale:
        lines.append('  label="c0 = 0: companion graph is not strongly connected";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# edges of the conversion graph; the stable interpolation legs are hat->p, s->q
_ROUTES = {
    Rep.VERTEX: (Rep.SPECTRUM, Rep.SPECTRAL_IMPULSE),
    Rep.SPECTRUM: (Rep.VERTEX, Rep.IMPULSE),
    Rep.IMPULSE: (Rep.SPECTRUM,),
    Rep.SPECTRAL_IMPULSE: (Rep.VERTEX,),
}


def conversion_path(src: Rep, dst: Rep) -> list[Rep]:
    """Shortest chain of representations from ``src`` to ``dst``."""
    prev = {src: None}
    todo = deque([src])
    while todo:
        cur = todo.popleft()
        if cur is dst:
            break
        for nxt in _ROUTES[cur]:
            if nxt not in prev:
                prev[nxt] = cur
                todo.append(nxt)
    path = [dst]
    while path[-1] is not src:
        path.append(prev[path[-1]])
    return path[::-1]


def _step(sig: GraphSignal, dst: Rep, m: CompanionModel, method: str) -> GraphSignal:
    d = sig.model
    rt = math.sqrt(d.n)
    src = sig.rep
    if src is Rep.VERTEX and dst is Rep.SPECTRUM:
        return GraphSignal(d.gft @ sig.values, dst, d)
    if src is Rep.SPECTRUM and dst is Rep.VERTEX:
        return GraphSignal(d.gft_inv @ sig.values, dst, d)
    if src is Rep.IMPULSE and dst is Rep.SPECTRUM:
        return GraphSignal(m.vand @ sig.values / rt, dst, d)
    if src is Rep.SPECTRAL_IMPULSE and dst is Rep.VERTEX:
        return GraphSignal(np.conj(m.vand) @ sig.values / rt, dst, d)
    if src is Rep.SPECTRUM and dst is Rep.IMPULSE:
        return interp.recover_coeffs(m.table, sig, method=method)
    if src is Rep.VERTEX and dst is Rep.SPECTRAL_IMPULSE:
        return interp.recover_q(m.table_conj, sig, method=method)
    raise InputError(f"no direct conversion {src.value} -> {dst.value}")  # pragma: no cover


def to_representation(sig: GraphSignal, target: Rep | str, method: str = "barycentric") -> GraphSignal:
    """Express ``sig`` in ``target`` coordinates.

    ``method`` selects how ``hat -> p`` and ``s -> q`` are computed:
    ``"barycentric"`` (default) or ``"solve"`` (dense Vandermonde solve).
    Diagnostics of the recovery legs are merged into the result.
    """
    target = Rep.parse(target)
    if method not in ("barycentric", "solve"):
        raise InputError(f"unknown conversion method {method!r}")
    if sig.rep is target:
        return sig
    m = sig.model.companion
    path = conversion_path(sig.rep, target)
    diags: dict = {}
    cur = sig
    for nxt in path[1:]:
        cur = _step(cur, nxt, m, method)
        diags.update(cur.diagnostics)
    return GraphSignal(cur.values, target, sig.model, diags)


def companion_delta(m: CompanionModel, n: int) -> GraphSignal:
    """``delta_comp,n = e_n`` in the impulse representation."""
    if not 0 <= n < m.n:
        raise InputError(f"impulse index must be in 0..{m.n - 1}")
    e = np.zeros(m.n)
    e[n] = 1.0
    return GraphSignal(e, Rep.IMPULSE, m.decomp)


def native_shift(model: SpectralDecomposition, rep: Rep | str) -> np.ndarray:
    """The shift acting natively on a representation: A, M, C_comp or C_comp,sp."""
    rep = Rep.parse(rep)
    if rep is Rep.VERTEX:
        return model.shift
    if rep is Rep.SPECTRUM:
        return model.m_shift
    return model.companion.c_comp


def shift_in_rep(sig: GraphSignal, times: int = 1) -> GraphSignal:
    """Apply the representation's native shift ``times`` times.

    The shifts correspond in pairs: A on s is C_comp on p, and M on s_hat
    is C_comp,sp (the same matrix) on q.
    """
    times = int(times)
    if times < 0:
        raise InputError("shift count must be non-negative")
    op = native_shift(sig.model, sig.rep)
    v = sig.values
    for _ in range(times):
        v = op @ v
    return GraphSignal(v, sig.rep, sig.model)
