"""Decimation in the companion model and bandlimited reconstruction.

A 0/1 indicator ``delta`` keeps K vertices.  For a signal bandlimited to the
first K basis vectors, the kept rows of the first K columns of the basis
(``GFT^{-1}`` or ``conj(V)``) form an invertible K x K block; combined with
the K kept eigenvalues it gives the decimated shifts

    A_d = GFT_d^{-1} Lambda_d GFT_d
    M_d = GFT_d conj(Lambda_d) GFT_d^{-1}
    C_d = conj(V_d)^{-1} conj(Lambda_d) conj(V_d)

``conj(V_d)`` is the Vandermonde matrix of the kept conjugate eigenvalues,
so ``C_d`` is the companion matrix of their monic polynomial.  It is real
exactly when the kept set is closed under conjugation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .companion import COMP_TOL, companion_matrix
from .errors import AssumptionError, InputError, InvariantError
from .graph_model import RANK_TOL, GraphSignal, Rep, SpectralDecomposition, monic_from_roots

BASES = ("spectral", "q")


@dataclass(frozen=True, eq=False)
class DecimationPlan:
    """Sampling indicator plus the derived kept set.

    ``columns`` overrides the default "first K columns" choice.
    """

    delta: np.ndarray
    model: SpectralDecomposition
    columns: tuple[int, ...] | None = None

    def __post_init__(self):
        delta = np.asarray(self.delta).reshape(-1)
        n = self.model.n
        if delta.size != n:
            raise InputError(f"sampling indicator has length {delta.size}, expected N = {n}")
        if not np.all((delta == 0) | (delta == 1)):
            raise InputError("sampling indicator must contain only 0 and 1")
        delta = delta.astype(int)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        k = int(delta.sum())
        if k < 1:
            raise InputError("sampling indicator keeps no vertex")
        cols = tuple(range(k)) if self.columns is None else tuple(int(c) for c in self.columns)
        if len(cols) != k or len(set(cols)) != k or not all(0 <= c < n for c in cols):
            raise InputError(f"column mask must name {k} distinct columns in 0..{n - 1}")
        object.__setattr__(self, "columns", cols)

    @property
    def kept(self) -> np.ndarray:
        return np.flatnonzero(self.delta)

    @property
    def k(self) -> int:
        return int(self.delta.sum())

    @property
    def conj_closed(self) -> bool:
        kept = set(self.kept.tolist())
        return all(self.model.pairing[i] in kept for i in kept)


@dataclass(frozen=True, eq=False)
class Decimation:
    plan: DecimationPlan
    lam_d: np.ndarray
    a_d: np.ndarray
    m_d: np.ndarray
    c_d: np.ndarray
    gft_d_inv: np.ndarray
    v_d_conj: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _block(basis: np.ndarray, plan: DecimationPlan) -> np.ndarray:
    return basis[np.ix_(plan.kept, plan.columns)]


def _check_block(block: np.ndarray, name: str, rank_tol: float) -> float:
    sv = np.linalg.svd(block, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        raise AssumptionError(
            f"{name} block is singular (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}); "
            "this vertex selection cannot carry the bandlimit"
        )
    return float(sv[0] / sv[-1])


def basis_matrix(model: SpectralDecomposition, basis: str) -> np.ndarray:
    """``GFT^{-1}`` for the spectral flavour, ``conj(V)/sqrt(N)`` for the q flavour."""
    if basis == "spectral":
        return model.gft_inv
    if basis == "q":
        return np.conj(model.companion.vand) / math.sqrt(model.n)
    raise InputError(f"unknown bandlimit basis {basis!r}; use one of {BASES}")


def decimate(model: SpectralDecomposition, plan: DecimationPlan, rank_tol: float = RANK_TOL) -> Decimation:
    """Decimated shifts ``A_d``, ``M_d`` and ``C_d`` for a sampling plan.

    Raises:
        AssumptionError: either K x K block is singular within ``rank_tol``.
        InvariantError: the kept set is conjugate closed but ``C_d`` is not
            the companion matrix of the kept eigenvalues.
    """
    if plan.model is not model:
        raise InputError("plan was built for a different model")
    lam_d = model.lam[plan.kept]
    gft_d_inv = _block(model.gft_inv, plan)
    v_d_conj = _block(np.conj(model.companion.vand), plan)
    cond_gft = _check_block(gft_d_inv, "GFT^-1", rank_tol)
    cond_v = _check_block(v_d_conj, "conj(V)", rank_tol)

    gft_d = np.linalg.inv(gft_d_inv)
    a_d = gft_d_inv @ (lam_d[:, None] * gft_d)
    m_d = gft_d @ (np.conj(lam_d)[:, None] * gft_d_inv)
    c_d = np.linalg.solve(v_d_conj, np.conj(lam_d)[:, None] * v_d_conj)

    comp_tol = COMP_TOL * cond_v
    c_imag = float(np.max(np.abs(c_d.imag)))
    diags = {
        "k": plan.k,
        "kept": plan.kept.tolist(),
        "conj_closed": plan.conj_closed,
        "cond_gft_block": cond_gft,
        "cond_vand_block": cond_v,
        "c_imag_residual": c_imag,
    }
    if plan.conj_closed:
        coeffs, _ = monic_from_roots(np.conj(lam_d))
        coeffs[-1] = 1.0
        exact = companion_matrix(coeffs)
        c_d = c_d.real.copy()
        err = float(np.max(np.abs(c_d - exact)))
        diags["companion_residual"] = err
        if err > comp_tol:
            raise InvariantError(f"decimated companion mismatch {err:.3e} > {comp_tol:.3e}")
        # A_d is real too when the kept set is conjugate closed
        if float(np.max(np.abs(a_d.imag))) <= comp_tol:
            a_d = a_d.real.copy()
    for arr in (lam_d, a_d, m_d, c_d, gft_d_inv, v_d_conj):
        arr.setflags(write=False)
    return Decimation(plan, lam_d, a_d, m_d, c_d, gft_d_inv, v_d_conj, diags)


def cospectral_residual(dec: Decimation) -> float:
    """Largest distance between the kept eigenvalues and those of A_d, conj(M_d), C_d.

    Eigenvalues are matched by sorting after conjugating M_d and C_d.
    """
    target = np.sort_complex(dec.lam_d)
    worst = 0.0
    for mat, conj in ((dec.a_d, False), (dec.m_d, True), (dec.c_d, True)):
        ev = np.linalg.eigvals(mat)
        ev = np.conj(ev) if conj else ev
        # greedy nearest matching; K is small
        remaining = list(ev)
        for t in target:
            j = int(np.argmin([abs(t - e) for e in remaining]))
            worst = max(worst, abs(t - remaining.pop(j)))
    return worst


def sample(sig: GraphSignal, plan: DecimationPlan) -> np.ndarray:
    """Values of a vertex signal at the kept vertices."""
    if sig.rep is not Rep.VERTEX:
        raise InputError("sample expects a vertex signal")
    return sig.values[plan.kept].copy()


def reconstruct(
    model: SpectralDecomposition,
    plan: DecimationPlan,
    sampled,
    basis: str = "spectral",
    rank_tol: float = RANK_TOL,
) -> GraphSignal:
    """Rebuild a bandlimited vertex signal from its K kept samples.

    ``sampled`` is either the K kept values or a full length-N vertex signal;
    with a full signal the relative reconstruction error is reported in
    ``diagnostics["error"]`` (large values mean the input was not
    bandlimited to the plan's columns).
    """
    if plan.model is not model:
        raise InputError("plan was built for a different model")
    full = None
    if isinstance(sampled, GraphSignal):
        if sampled.rep is not Rep.VERTEX:
            raise InputError("reconstruct expects vertex samples")
        full = sampled.values
        values = full[plan.kept]
    else:
        values = np.asarray(sampled, dtype=complex).reshape(-1)
        if values.size == model.n and plan.k != model.n:
            full = values
            values = values[plan.kept]
        elif values.size != plan.k:
            raise InputError(f"expected {plan.k} samples (or a full length-{model.n} signal), got {values.size}")
    b = basis_matrix(model, basis)
    block = _block(b, plan)
    cond = _check_block(block, basis, rank_tol)
    coeffs = np.linalg.solve(block, values)
    out = b[:, list(plan.columns)] @ coeffs
    diags = {"basis": basis, "block_cond": cond}
    if full is not None:
        scale = float(np.linalg.norm(full))
        diags["error"] = float(np.linalg.norm(out - full)) / (scale if scale else 1.0)
    return GraphSignal(out, Rep.VERTEX, model, diags)
