"""Carrier modulation and frequency-division multiplexing in the q domain.

Modulating a vertex signal by the i-th Hadamard power of the conjugate
spectral frequency vector, ``conj(lam)**i * s``, multiplies its spectral
impulse coordinates by ``C_comp**i``.  For q-bandlimited signals this is a
pure translation of the band, so K signals of bandwidth B fit side by side
as long as ``K * B <= N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .companion import to_representation
from .errors import AssumptionError, InputError
from .graph_model import GraphSignal, Rep, SpectralDecomposition

BAND_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MultiplexPlan:
    band: int
    count: int
    model: SpectralDecomposition

    def __post_init__(self):
        b, k = int(self.band), int(self.count)
        if b < 1 or k < 1:
            raise InputError("multiplex plan needs B >= 1 and K >= 1")
        if k * b > self.model.n:
            raise InputError(f"K*B = {k * b} exceeds N = {self.model.n}; the bands would overlap")
        if self.model.has_zero_eigenvalue:
            raise AssumptionError("multiplexing needs all eigenvalues nonzero")
        object.__setattr__(self, "band", b)
        object.__setattr__(self, "count", k)

    @classmethod
    def from_dict(cls, desc: dict, model: SpectralDecomposition) -> "MultiplexPlan":
        try:
            return cls(int(desc["B"]), int(desc["K"]), model)
        except (KeyError, TypeError, ValueError):
            raise InputError('multiplex plan must look like {"B": int, "K": int}') from None

    @property
    def carrier_powers(self) -> list[int]:
        return [self.band * i for i in range(self.count)]

    def block(self, i: int) -> slice:
        if not 0 <= i < self.count:
            raise InputError(f"slot index must be in 0..{self.count - 1}")
        return slice(self.band * i, self.band * (i + 1))


def _vertex(sig: GraphSignal, what: str):
    if sig.rep is not Rep.VERTEX:
        raise InputError(f"{what} expects a vertex signal")


def q_leakage(sig: GraphSignal, band: int) -> float:
    """``||q[B:]|| / ||q||`` (0 for the zero signal)."""
    q = to_representation(sig, Rep.SPECTRAL_IMPULSE).values
    total = float(np.linalg.norm(q))
    return 0.0 if total == 0 else float(np.linalg.norm(q[band:])) / total


def is_q_bandlimited(sig: GraphSignal, band: int, band_tol: float = BAND_TOL) -> tuple[bool, float]:
    """Whether the q tail beyond ``band`` is below ``band_tol`` relative, and the leakage."""
    if not 1 <= band <= sig.model.n:
        raise InputError(f"band must be in 1..{sig.model.n}")
    leak = q_leakage(sig, band)
    return leak <= band_tol, leak


def bandlimit_project(sig: GraphSignal, band: int) -> tuple[GraphSignal, float]:
    """Zero the q coordinates from ``band`` on; return the projection and the relative loss."""
    _vertex(sig, "bandlimit_project")
    q = to_representation(sig, Rep.SPECTRAL_IMPULSE).values.copy()
    total = float(np.linalg.norm(q))
    loss = 0.0 if total == 0 else float(np.linalg.norm(q[band:])) / total
    q[band:] = 0
    out = to_representation(GraphSignal(q, Rep.SPECTRAL_IMPULSE, sig.model), Rep.VERTEX)
    return GraphSignal(out.values, Rep.VERTEX, sig.model, {"projection_loss": loss}), loss


def carrier(model: SpectralDecomposition, power: int) -> np.ndarray:
    """``conj(lam) ** power`` (negative powers need nonzero eigenvalues)."""
    lam_c = np.conj(model.lam)
    if power < 0 and model.has_zero_eigenvalue:
        raise AssumptionError("negative carrier power needs nonzero eigenvalues")
    return lam_c ** int(power)


def modulate(sig: GraphSignal, power: int) -> GraphSignal:
    """``conj(lam)**power * s``; acts as ``C_comp**power`` on q."""
    _vertex(sig, "modulate")
    if int(power) < 0:
        raise InputError("modulation power must be non-negative")
    return GraphSignal(carrier(sig.model, power) * sig.values, Rep.VERTEX, sig.model)


def multiplex(plan: MultiplexPlan, signals, band_tol: float = BAND_TOL) -> GraphSignal:
    """``d = sum_i conj(lam)**(B*i) * s_i``.

    Raises:
        AssumptionError: a signal is not q-bandlimited to ``B`` (its band would
            alias into the neighbouring slot).
    """
    signals = list(signals)
    if len(signals) != plan.count:
        raise InputError(f"plan expects {plan.count} signals, got {len(signals)}")
    d = np.zeros(plan.model.n, dtype=complex)
    leaks = []
    for i, sig in enumerate(signals):
        _vertex(sig, "multiplex")
        if sig.model is not plan.model:
            raise InputError("signal is not expressed against the plan's model")
        ok, leak = is_q_bandlimited(sig, plan.band, band_tol)
        if not ok:
            raise AssumptionError(
                f"signal {i} leaks {leak:.3e} of its q energy beyond B = {plan.band}; "
                "bands would overlap (use bandlimit_project first)"
            )
        leaks.append(leak)
        d += carrier(plan.model, plan.band * i) * sig.values
    return GraphSignal(d, Rep.VERTEX, plan.model, {"leakage": leaks})


def demultiplex(plan: MultiplexPlan, d: GraphSignal, index: int, method: str = "relocate") -> GraphSignal:
    """Recover slot ``index`` from a multiplexed vertex signal.

    ``relocate`` moves the q block ``[B*i, B*i + B)`` to ``[0, B)``.
    ``carrier`` band-passes the block in q and then multiplies by
    ``conj(lam)**(-B*i)`` in the vertex domain.
    """
    _vertex(d, "demultiplex")
    if d.model is not plan.model:
        raise InputError("signal is not expressed against the plan's model")
    block = plan.block(index)
    q_d = to_representation(d, Rep.SPECTRAL_IMPULSE).values
    n = plan.model.n
    if method == "relocate":
        q = np.zeros(n, dtype=complex)
        q[: plan.band] = q_d[block]
        out = to_representation(GraphSignal(q, Rep.SPECTRAL_IMPULSE, plan.model), Rep.VERTEX)
        return GraphSignal(out.values, Rep.VERTEX, plan.model)
    if method == "carrier":
        q = np.zeros(n, dtype=complex)
        q[block] = q_d[block]
        band = to_representation(GraphSignal(q, Rep.SPECTRAL_IMPULSE, plan.model), Rep.VERTEX)
        return GraphSignal(carrier(plan.model, -plan.band * index) * band.values, Rep.VERTEX, plan.model)
    raise InputError(f"unknown demultiplex method {method!r}; use 'relocate' or 'carrier'")


def spectral_view(d: GraphSignal) -> GraphSignal:
    """GFT of a vertex signal."""
    _vertex(d, "spectral_view")
    return to_representation(d, Rep.SPECTRUM)


def spectral_copies(plan: MultiplexPlan, signals) -> np.ndarray:
    """``sum_i M**(B*i) s_hat_i``: the spectrum of the multiplexed signal built from M-shifts."""
    m = plan.model.m_shift
    total = np.zeros(plan.model.n, dtype=complex)
    for i, sig in enumerate(signals):
        v = to_representation(sig, Rep.SPECTRUM).values
        for _ in range(plan.band * i):
            v = m @ v
        total += v
    return total


def signal_from_q_block(model: SpectralDecomposition, block) -> GraphSignal:
    """Vertex signal whose q coordinates are ``block`` followed by zeros."""
    block = np.asarray(block, dtype=complex).reshape(-1)
    if block.size > model.n:
        raise InputError("q block longer than N")
    q = np.zeros(model.n, dtype=complex)
    q[: block.size] = block
    out = to_representation(GraphSignal(q, Rep.SPECTRAL_IMPULSE, model), Rep.VERTEX)
    return GraphSignal(out.values, Rep.VERTEX, model)


def assemble_q_blocks(plan: MultiplexPlan, blocks) -> np.ndarray:
    """Expected q coordinates of the multiplex of q-blocks: the blocks side by side."""
    out = np.zeros(plan.model.n, dtype=complex)
    for i, b in enumerate(blocks):
        b = np.asarray(b, dtype=complex)
        out[plan.band * i : plan.band * i + b.size] = b
    return out


def demo_blocks(band: int = 5) -> list[np.ndarray]:
    """Rectangular, triangular and ramp blocks of width ``band``."""
    k = np.arange(band)
    rect = np.ones(band)
    tri = 1.0 - np.abs(k - (band - 1) / 2) / (math.ceil(band / 2))
    ramp = (k + 1) / band
    return [rect, tri, ramp]
