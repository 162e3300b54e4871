"""Built-in invariant suites over cycle, ladder and seeded random graphs.

:func:`run_selfcheck` returns a JSON-ready report; every entry records the
measured value, the bound it was held to and whether it passed.  Values are
rounded to 6 significant digits so that reports are byte-identical across
runs with the same seed.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import fftpoly, modulation, sampling
from .companion import shift_in_rep, to_representation
from .errors import GSPError
from .generators import cycle_graph, ladder_graph, random_digraph
from .graph_model import (
    CHARPOLY_TOL,
    CONV_TOL,
    EIG_TOL,
    Rep,
    decompose,
    delayed_impulses,
    delayed_spectral_impulses,
    lsi_filter_apply,
    vertex_impulse,
)


def _num(x: float) -> float:
    x = float(x)
    return x if not math.isfinite(x) else float(f"{x:.6e}")


class _Report:
    def __init__(self):
        self.entries: list[dict] = []

    def add(self, suite: str, case: str, check: str, value: float, bound: float):
        ok = bool(value <= bound)
        self.entries.append(
            {"suite": suite, "case": case, "check": check, "value": _num(value), "bound": _num(bound), "pass": ok}
        )

    def error(self, suite: str, case: str, check: str, exc: Exception):
        self.entries.append(
            {"suite": suite, "case": case, "check": check, "error": f"{type(exc).__name__}: {exc}", "pass": False}
        )


def _dft(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)


def _cycle_suite(rep: _Report, n_max: int, rng: np.random.Generator):
    for n in range(2, n_max + 1):
        case = f"cycle_{n}"
        d = decompose(cycle_graph(n))
        rep.add("dsp", case, "gft_equals_dft", np.max(np.abs(d.gft - _dft(n))), 1e-9)
        target = np.zeros(n + 1)
        target[0], target[-1] = -1, 1
        rep.add("dsp", case, "char_poly_x^N-1", np.max(np.abs(d.char_poly.coeffs - target)), 1e-9)
        rep.add("dsp", case, "c_comp_equals_shift", np.max(np.abs(d.companion.c_comp - d.shift)), 1e-9)
        worst_p = worst_q = 0.0
        for _ in range(5):
            s = d.signal(rng.normal(size=n))
            worst_p = max(worst_p, np.linalg.norm(to_representation(s, Rep.IMPULSE).values - s.values))
            worst_q = max(
                worst_q,
                np.linalg.norm(to_representation(s, Rep.SPECTRAL_IMPULSE).values - to_representation(s, Rep.SPECTRUM).values),
            )
        rep.add("dsp", case, "p_equals_s", worst_p, 1e-8)
        rep.add("dsp", case, "q_equals_shat", worst_q, 1e-8)


def _ladder_suite(rep: _Report, n_max: int):
    for k in range(2, max(2, n_max // 2) + 1):
        case = f"ladder_{2 * k}"
        try:
            d = decompose(ladder_graph(k), order="imag")
            expected = np.zeros(2 * k + 1)
            expected[-1] = 1
            expected[0 : 2 * k - 3 : 2] = -1
            rep.add("ladder", case, "char_poly_pattern", np.max(np.abs(d.char_poly.coeffs - expected)), 1e-8)
            rep.add("ladder", case, "delta0_real", np.max(np.abs(vertex_impulse(d).values.imag)), 1e-9)
            delayed_impulses(d)
            rep.add("ladder", case, "d_imp_full_rank", 0.0, 0.0)
            worst = 0.0
            for j in range(d.n):
                s = d.signal(np.eye(d.n)[j])
                p = to_representation(to_representation(s, Rep.SPECTRUM), Rep.IMPULSE)
                worst = max(worst, p.diagnostics["mse"])
            rep.add("ladder", case, "recover_mse", worst, 1e-2)
        except GSPError as exc:
            rep.error("ladder", case, "construction", exc)


def _random_graph_checks(rep: _Report, case: str, g, rng: np.random.Generator):
    d = decompose(g)
    n = d.n
    a = d.shift
    m = d.companion
    cond = m.cond_vand
    rep.add("graph_model", case, "eig_residual", d.diagnostics["eig_residual"], EIG_TOL)

    ch = d.char_poly.of_matrix(a)
    norm_a = max(1.0, float(np.linalg.norm(a)))
    rep.add("graph_model", case, "cayley_hamilton", np.linalg.norm(ch), CHARPOLY_TOL * norm_a**n * n)

    s = d.signal(rng.normal(size=n))
    coeffs = rng.normal(size=n)
    y = lsi_filter_apply(d, coeffs, s)
    lhs = d.gft @ y.values
    rhs = fftpoly.Poly(coeffs)(d.lam) * (d.gft @ s.values)
    rep.add("graph_model", case, "filtering_theorem", np.linalg.norm(lhs - rhs), CONV_TOL * max(1.0, np.linalg.norm(rhs)))
    shat = d.gft @ s.values
    dual = d.gft @ (np.conj(d.lam) * s.values) - d.m_shift @ shat
    rep.add("graph_model", case, "spectral_shift_duality", np.linalg.norm(dual), CONV_TOL * max(1.0, np.linalg.norm(shat)))

    rep.add("companion", case, "diagonalization", m.diagonalization_residual(), 1e-6 * cond)
    rep.add("companion", case, "left_eigenvectors", m.left_eigen_residual(), 1e-6 * cond)
    c = m.c_comp
    structure = np.max(np.abs(c[1:, :-1] - np.eye(n - 1))) + np.max(np.abs(c[:, -1] + d.char_poly.lower))
    rep.add("companion", case, "companion_structure", structure, 0.0)

    rt = math.sqrt(n)
    rep.add("graph_model", case, "impulse_vandermonde", np.linalg.norm(d.gft @ delayed_impulses(d) - m.vand / rt), 1e-7)
    rep.add(
        "graph_model",
        case,
        "spectral_impulse_vandermonde",
        np.linalg.norm(d.gft_inv @ delayed_spectral_impulses(d) - np.conj(m.vand) / rt),
        1e-7,
    )

    worst = 0.0
    for src, dst in itertools.permutations(list(Rep), 2):
        x = d.signal(rng.normal(size=n) + 1j * rng.normal(size=n), src)
        back = to_representation(to_representation(x, dst), src)
        worst = max(worst, np.linalg.norm(back.values - x.values) / np.linalg.norm(x.values))
    rep.add("companion", case, "round_trips", worst, CONV_TOL * max(1.0, cond))

    p = to_representation(s, Rep.IMPULSE)
    shifted = to_representation(shift_in_rep(s), Rep.IMPULSE)
    err = np.linalg.norm(shifted.values - shift_in_rep(p).values)
    rep.add("companion", case, "shift_commutes_p", err, CONV_TOL * max(1.0, cond) * max(1.0, np.linalg.norm(p.values)))

    t = d.signal(rng.normal(size=n))
    outs = [fftpoly.convolve(None, s, t, meth).values for meth in fftpoly.CONV_METHODS]
    disc = max(np.linalg.norm(u - v) for u, v in itertools.combinations(outs, 2))
    scale = max(np.linalg.norm(s.values), np.linalg.norm(t.values))
    rep.add("fftpoly", case, "three_path_convolution", disc, 1e-6 * cond * scale)

    split = max(1, n // 2)
    pa = fftpoly.Poly(rng.normal(size=split))
    pb = fftpoly.Poly(rng.normal(size=n - split))
    prod = fftpoly.poly_mul(pa, pb)
    reduced = fftpoly.poly_mod(prod, d.char_poly)
    rep.add("fftpoly", case, "linear_equals_mod", np.max(np.abs(reduced.padded(n) - prod.padded(n))), 1e-12)

    if not d.has_zero_eigenvalue:
        band = max(1, n // 3)
        plan = modulation.MultiplexPlan(band, n // band, d)
        sigs = [modulation.signal_from_q_block(d, rng.normal(size=band)) for _ in range(plan.count)]
        mux = modulation.multiplex(plan, sigs)
        worst = max(
            np.linalg.norm(modulation.demultiplex(plan, mux, i).values - sig.values) / np.linalg.norm(sig.values)
            for i, sig in enumerate(sigs)
        )
        rep.add("modulation", case, "multiplex_round_trip", worst, 1e-6 * cond)

    _random_sampling(rep, case, d)


def _random_sampling(rep: _Report, case: str, d):
    # first conjugate-closed kept set (in a fixed order) whose blocks are invertible
    n = d.n
    groups = sorted({tuple(sorted((i, d.pairing[i]))) for i in range(n)})
    for size in range(len(groups) // 2, 0, -1):
        for combo in itertools.combinations(groups, size):
            kept = sorted(set(itertools.chain.from_iterable(combo)))
            if len(kept) >= n:
                continue
            delta = np.zeros(n, dtype=int)
            delta[kept] = 1
            plan = sampling.DecimationPlan(delta, d)
            try:
                dec = sampling.decimate(d, plan)
            except GSPError:
                continue
            bound = 1e-6 * dec.diagnostics["cond_vand_block"]
            rep.add("sampling", case, "cospectral", sampling.cospectral_residual(dec), bound)
            rep.add("sampling", case, "companion_match", dec.diagnostics["companion_residual"], bound)
            return


def _fft_suite(rep: _Report, rng: np.random.Generator):
    worst = worst_rt = 0.0
    for length in range(1, 65):
        x = rng.normal(size=length) + 1j * rng.normal(size=length)
        k = np.arange(length)
        naive = np.exp(-2j * np.pi * np.outer(k, k) / length) @ x
        got = fftpoly.fft(x)
        worst = max(worst, np.linalg.norm(got - naive) / np.linalg.norm(naive))
        worst_rt = max(worst_rt, np.linalg.norm(fftpoly.fft(got, inverse=True) - x) / np.linalg.norm(x))
    rep.add("fftpoly", "lengths_1_64", "naive_dft_oracle", worst, 1e-10)
    rep.add("fftpoly", "lengths_1_64", "round_trip", worst_rt, 1e-10)


def run_selfcheck(n_max: int = 12, seed: int = 0, graphs: int | None = None) -> dict:
    """Run every suite; ``graphs`` random digraphs (default ``2 * n_max``)."""
    n_max = int(n_max)
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rng = np.random.default_rng(seed)
    rep = _Report()
    _fft_suite(rep, rng)
    _cycle_suite(rep, n_max, rng)
    _ladder_suite(rep, n_max)
    count = 2 * n_max if graphs is None else int(graphs)
    for i in range(count):
        n = int(rng.integers(3, max(3, n_max) + 1))
        case = f"random_{i}_n{n}"
        try:
            g = random_digraph(n, rng)
            _random_graph_checks(rep, case, g, rng)
        except GSPError as exc:
            rep.error("random", case, "pipeline", exc)
    failed = sum(not e["pass"] for e in rep.entries)
    return {
        "n_max": n_max,
        "seed": seed,
        "total": len(rep.entries),
        "failed": failed,
        "passed": failed == 0,
        "checks": rep.entries,
    }
