"""Coefficient recovery by barycentric Lagrange interpolation plus an inverse FFT.

Given samples ``v_i = f(x_i)`` of a degree < N polynomial at distinct nodes,
the polynomial is evaluated at the N-th roots of unity
``omega_k = exp(-2j pi k / N)`` with the barycentric formula and the
coefficients are read off with an inverse DFT.  This avoids solving the
(often badly conditioned) Vandermonde system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fftpoly
from .errors import AssumptionError, InputError
from .graph_model import GraphSignal, Rep

# |partial product| is kept inside [2**-512, 2**512]
_RESCALE_BITS = 512
SNAP_TOL = 1e-12
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class BarycentricTable:
    """Nodes and barycentric weights ``w_i = 1 / prod_{k != i} (x_i - x_k)``.

    ``weights`` holds ``w_i * 2**rescale_exp``; the common power of two
    cancels in the barycentric quotient.
    """

    nodes: np.ndarray
    weights: np.ndarray
    rescale_exp: int

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    def true_weights(self) -> np.ndarray:
        return np.ldexp(self.weights.real, -self.rescale_exp) + 1j * np.ldexp(self.weights.imag, -self.rescale_exp)


def _ldexp_c(z: complex, e: int) -> complex:
    return complex(math.ldexp(z.real, e), math.ldexp(z.imag, e))


def build_table(nodes, distinct_tol: float = 0.0) -> BarycentricTable:
    """Weights for the given nodes in O(N^2), with power-of-two rescaling.

    Raises:
        InputError: two nodes closer than ``distinct_tol`` (or equal).
    """
    x = np.asarray(nodes, dtype=complex).reshape(-1)
    n = x.size
    if n == 0:
        raise InputError("need at least one node")
    if n > 1:
        diff = np.abs(x[:, None] - x[None, :])
        np.fill_diagonal(diff, np.inf)
        if not diff.min() > distinct_tol:
            raise InputError(f"interpolation nodes are not distinct (gap {diff.min():.3e})")

    lo, hi = 2.0**-_RESCALE_BITS, 2.0**_RESCALE_BITS
    mantissas = np.empty(n, dtype=complex)
    exps = np.empty(n, dtype=np.int64)
    for i in range(n):
        prod = 1.0 + 0j
        e = 0
        for k in range(n):
            if k == i:
                continue
            prod *= x[i] - x[k]
            mag = abs(prod)
            if mag < lo or mag > hi:
                _, shift = math.frexp(mag)
                prod = _ldexp_c(prod, -shift)
                e += shift
        mantissas[i] = 1.0 / prod
        exps[i] = -e
    # w_i = mantissas[i] * 2**exps[i]; bring the largest to order one
    log2mag = np.log2(np.abs(mantissas)) + exps
    rescale = -int(math.floor(np.max(log2mag)))
    weights = np.array([_ldexp_c(m, int(e) + rescale) for m, e in zip(mantissas, exps)])
    if not np.all(np.isfinite(weights)) or np.any(weights == 0):
        raise AssumptionError("barycentric weights under/overflowed after rescaling")
    x.setflags(write=False)
    weights.setflags(write=False)
    return BarycentricTable(x, weights, rescale)


def evaluate(table: BarycentricTable, values, x):
    """Evaluate the interpolant through ``(nodes[i], values[i])`` at ``x``.

    ``x`` may be a scalar or an array.  Points within
    ``1e-12 * (1 + |x|)`` of a node return that node's value exactly.
    """
    v = np.asarray(values, dtype=complex).reshape(-1)
    if v.shape[0] != table.n:
        raise InputError(f"expected {table.n} values, got {v.shape[0]}")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    if not np.all(np.isfinite(xs)):
        raise InputError("evaluation points must be finite")
    diff = xs[:, None] - table.nodes[None, :]
    close = np.abs(diff) <= SNAP_TOL * (1 + np.abs(xs))[:, None]
    snapped = close.any(axis=1)
    diff[snapped] = 1.0
    terms = table.weights[None, :] / diff
    num = terms @ v
    den = terms.sum(axis=1)
    bad = ~snapped & ((den == 0) | ~np.isfinite(den) | ~np.isfinite(num))
    if bad.any():
        raise AssumptionError("barycentric denominator underflow; evaluation point is degenerate")
    out = np.where(snapped, 0, num / np.where(snapped, 1, den))
    if snapped.any():
        out[snapped] = v[np.argmax(close[snapped], axis=1)]
    return complex(out[0]) if scalar else out


def roots_of_unity(n: int) -> np.ndarray:
    return np.exp(-2j * np.pi * np.arange(n) / n)


def interpolate_coeffs(table: BarycentricTable, values) -> np.ndarray:
    """Monomial coefficients of the interpolant (barycentric evals + inverse FFT)."""
    samples = evaluate(table, values, roots_of_unity(table.n))
    return fftpoly.fft(samples, inverse=True)


def solve_coeffs(nodes, values) -> np.ndarray:
    """Coefficients by a dense Vandermonde solve; diagnostic fallback only."""
    x = np.asarray(nodes, dtype=complex)
    vand = np.vander(x, increasing=True)
    try:
        return np.linalg.solve(vand, np.asarray(values, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise AssumptionError(f"Vandermonde solve failed: {exc}") from None


def _pair_symmetric(values: np.ndarray, pairing) -> bool:
    partner = values[list(pairing)]
    scale = max(1.0, float(np.max(np.abs(values))))
    return bool(np.max(np.abs(partner - np.conj(values))) <= SYMMETRY_TOL * scale)


def _finish(coeffs: np.ndarray, realify: bool, rep: Rep, model, residual: float) -> GraphSignal:
    imag = float(np.max(np.abs(coeffs.imag)))
    if realify:
        coeffs = coeffs.real.astype(complex)
    return GraphSignal(coeffs, rep, model, {"mse": residual, "imag_residual": imag, "realified": realify})


def recover_coeffs(table: BarycentricTable, shat: GraphSignal, method: str = "barycentric") -> GraphSignal:
    """Impulse representation ``p`` from the spectrum: ``(1/sqrt(N)) V p = s_hat``.

    ``p`` is made real when the spectrum is conjugate-symmetric under the
    model's eigenvalue pairing (that is, when ``s`` is real).  The residual
    ``||(1/sqrt(N)) V p - s_hat||^2`` is attached as ``diagnostics["mse"]``.
    """
    if shat.rep is not Rep.SPECTRUM:
        raise InputError("recover_coeffs expects a spectrum signal")
    d = shat.model
    if table.n != d.n:
        raise InputError("table size does not match the signal's model")
    n = d.n
    values = math.sqrt(n) * shat.values
    if method == "barycentric":
        p = interpolate_coeffs(table, values)
    elif method == "solve":
        p = solve_coeffs(table.nodes, values)
    else:
        raise InputError(f"unknown recovery method {method!r}")
    realify = _pair_symmetric(shat.values, d.pairing)
    if realify:
        p = p.real.astype(complex)
    fitted = fftpoly.Poly(p)(d.lam) / math.sqrt(n) if np.any(p) else np.zeros(n)
    mse = float(np.sum(np.abs(fitted - shat.values) ** 2))
    return _finish(p, realify, Rep.IMPULSE, d, mse)


def recover_q(table_conj: BarycentricTable, s: GraphSignal, method: str = "barycentric") -> GraphSignal:
    """Spectral impulse representation ``q`` from the vertex signal: ``(1/sqrt(N)) V* q = s``.

    Same pipeline as :func:`recover_coeffs` on the conjugate eigenvalues.
    """
    if s.rep is not Rep.VERTEX:
        raise InputError("recover_q expects a vertex signal")
    d = s.model
    if table_conj.n != d.n:
        raise InputError("table size does not match the signal's model")
    n = d.n
    values = math.sqrt(n) * s.values
    if method == "barycentric":
        q = interpolate_coeffs(table_conj, values)
    elif method == "solve":
        q = solve_coeffs(table_conj.nodes, values)
    else:
        raise InputError(f"unknown recovery method {method!r}")
    realify = _pair_symmetric(s.values, d.pairing)
    if realify:
        q = q.real.astype(complex)
    fitted = fftpoly.Poly(q)(np.conj(d.lam)) / math.sqrt(n) if np.any(q) else np.zeros(n)
    mse = float(np.sum(np.abs(fitted - s.values) ** 2))
    return _finish(q, realify, Rep.SPECTRAL_IMPULSE, d, mse)
