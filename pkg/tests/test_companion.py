import json
import math

import numpy as np
import pytest

from companion_gsp import (
    InputError,
    Rep,
    companion_delta,
    companion_graph_dot,
    companion_matrix,
    cycle_graph,
    decompose,
    ladder_graph,
    load_graph,
    shift_in_rep,
    to_representation,
)
from companion_gsp.companion import conversion_path, estimate_cond
from companion_gsp.io import companion_to_dict, dumps
from oracles import exact_char_poly


def test_companion_matrix_structure():
    c = companion_matrix([2.0, -3.0, 5.0, 1.0])
    np.testing.assert_array_equal(c, [[0, 0, -2], [1, 0, 3], [0, 1, -5]])
    with pytest.raises(InputError):
        companion_matrix([1.0, 2.0])


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_cycle_companion_is_cycle(n):
    d = decompose(cycle_graph(n))
    c = d.companion.c_comp
    assert abs(c[0, -1] - 1) <= 1e-9
    np.testing.assert_allclose(c, cycle_graph(n).matrix, atol=1e-9)


def test_swap_graph_companion():
    d = decompose(load_graph({"n": 2, "edges": [[0, 1], [1, 0]]}))
    np.testing.assert_allclose(d.companion.c_comp, [[0, 1], [1, 0]], atol=1e-14)


def test_ladder_backward_weights_are_one():
    m = decompose(ladder_graph(6)).companion
    back = -m.char_poly.lower
    nz = back[np.abs(back) > 1e-9]
    np.testing.assert_allclose(nz, 1, atol=1e-9)
    assert m.diagnostics["boundary_weights"] == pytest.approx(back.tolist())


def test_companion_is_exactly_structured(corpus):
    for d in corpus[:30]:
        c = d.companion.c_comp
        n = d.n
        assert c.dtype == float
        mask = np.zeros((n, n), dtype=bool)
        mask[np.arange(1, n), np.arange(n - 1)] = True
        mask[:, -1] = True
        assert not np.any(c[~mask])
        assert np.all(c[np.arange(1, n), np.arange(n - 1)] == 1)
        np.testing.assert_array_equal(c[:, -1], -d.char_poly.lower)


def test_diagonalization_and_left_eigenvectors(corpus):
    for d in corpus:
        m = d.companion
        assert m.diagonalization_residual() <= 1e-6 * m.cond_vand
        assert m.left_eigen_residual() <= 1e-6 * m.cond_vand


def test_spectral_companion_matrices(corpus):
    for d in corpus[:30]:
        m = d.companion
        n = d.n
        vc = np.conj(m.vand)
        # C_comp,sp = conj(V)^-1 conj(Lambda) conj(V) equals C_comp
        c_sp = np.linalg.solve(vc, np.conj(d.lam)[:, None] * vc)
        assert np.max(np.abs(c_sp - m.c_comp)) <= 1e-6 * m.cond_vand
        # columns of conj(V)/sqrt(N), the vectors conj(lam)**n, diagonalize A_comp,sp
        resid = m.a_comp_sp @ vc - vc * d.lam[None, :]
        assert np.linalg.norm(resid) <= 1e-6 * m.cond_vand * np.linalg.norm(vc)
        np.testing.assert_allclose(m.gft_comp, m.vand / math.sqrt(n))
        np.testing.assert_allclose(m.gft_comp_sp @ vc, math.sqrt(n) * np.eye(n), atol=1e-6 * m.cond_vand)
        resid_m = m.m_comp @ m.vand - m.vand @ np.diag(np.conj(d.lam))
        assert np.linalg.norm(resid_m) <= 1e-6 * m.cond_vand * np.linalg.norm(m.vand)


def test_cond_estimate_matches_svd(corpus):
    for d in corpus[:30]:
        exact = np.linalg.cond(d.companion.vand)
        assert d.companion.cond_vand == pytest.approx(exact, rel=1e-6)
    assert estimate_cond(np.zeros((3, 3))) == math.inf


# --- DOT ----------------------------------------------------------------------


def test_dot_cycle4():
    dot = companion_graph_dot(decompose(cycle_graph(4)).companion)
    assert "0 -> 1 [color=red];" in dot and "2 -> 3 [color=red];" in dot
    assert "3 -> 0 [color=green];" in dot
    assert dot.count("->") == 4
    assert "label" not in dot


def test_dot_two_node_cycle():
    dot = companion_graph_dot(decompose(load_graph({"n": 2, "edges": [[0, 1], [1, 0]]})).companion)
    assert dot.count("->") == 2
    assert "1 -> 0 [color=green];" in dot


def test_dot_ladder_backward_edges_follow_char_poly():
    m = decompose(ladder_graph(6)).companion
    dot = companion_graph_dot(m)
    exact = exact_char_poly(ladder_graph(6).matrix)[:-1]
    targets = {k for k in range(12) if exact[k] != 0}
    got = {int(line.split("->")[1].split("[")[0]) for line in dot.splitlines() if "green" in line}
    assert got == targets == {0, 2, 4, 6, 8}


def test_dot_labels_self_loop_and_disconnection_note():
    from companion_gsp.graph_model import CharPoly

    dot = companion_graph_dot(CharPoly(np.array([0.0, 2.0, -0.5, 1.0])))
    assert '2 -> 2 [color=green, label="0.5"];' in dot
    assert '2 -> 1 [color=green, label="-2"];' in dot
    assert "2 -> 0" not in dot
    assert "not strongly connected" in dot
    assert "not strongly connected" not in companion_graph_dot(CharPoly(np.array([-1.0, 0, 1.0])))


def test_companion_json_export():
    m = decompose(cycle_graph(3)).companion
    data = json.loads(dumps(companion_to_dict(m)))
    assert data["n"] == 3
    assert len(data["vand"][0][0]) == 2  # [re, im]
    np.testing.assert_allclose(data["c_comp"], m.c_comp)


# --- representations ----------------------------------------------------------


def test_conversion_paths():
    assert conversion_path(Rep.IMPULSE, Rep.SPECTRAL_IMPULSE) == [Rep.IMPULSE, Rep.SPECTRUM, Rep.VERTEX, Rep.SPECTRAL_IMPULSE]
    assert conversion_path(Rep.VERTEX, Rep.IMPULSE) == [Rep.VERTEX, Rep.SPECTRUM, Rep.IMPULSE]


@pytest.mark.parametrize("n", [3, 8, 11])
def test_cycle_p_is_s_and_q_is_shat(n, rng):
    d = decompose(cycle_graph(n))
    for _ in range(5):
        s = d.signal(rng.normal(size=n) + 1j * rng.normal(size=n))
        np.testing.assert_allclose(s.to("p").values, s.values, atol=1e-10)
        np.testing.assert_allclose(s.to("q").values, s.to("hat").values, atol=1e-10)


def test_round_trips_all_pairs(corpus, rng):
    for d in corpus[:25]:
        tol = 1e-7 * max(1.0, d.companion.cond_vand)
        for src in Rep:
            x = d.signal(rng.normal(size=d.n) + 1j * rng.normal(size=d.n), src)
            for dst in Rep:
                back = to_representation(to_representation(x, dst), src)
                assert np.linalg.norm(back.values - x.values) <= tol * np.linalg.norm(x.values)


def test_fourier_pair_and_spectral_pair(corpus, rng):
    for d in corpus[:25]:
        m = d.companion
        rt = math.sqrt(d.n)
        p = d.signal(rng.normal(size=d.n), Rep.IMPULSE)
        np.testing.assert_allclose(p.to("hat").values, m.vand @ p.values / rt, atol=1e-12 * m.cond_vand)
        s = d.signal(rng.normal(size=d.n))
        q = s.to("q").values
        np.testing.assert_allclose(q, rt * np.linalg.solve(np.conj(m.vand), s.values), atol=1e-7 * m.cond_vand)
        # p -> q composition
        q_from_p = np.linalg.solve(np.conj(m.vand), d.gft_inv @ (m.vand @ p.values))
        np.testing.assert_allclose(p.to("q").values, q_from_p, atol=1e-7 * m.cond_vand)


def test_ladder_one_hot_recovery_residual():
    d = decompose(ladder_graph(6))
    p = d.signal(np.eye(12)[5]).to("p")
    assert p.diagnostics["mse"] <= 1e-6
    resid = d.companion.vand @ p.values / math.sqrt(12) - d.gft @ np.eye(12)[5]
    assert np.sum(np.abs(resid) ** 2) <= 1e-6


def test_solve_method_agrees(corpus, rng):
    for d in corpus[:10]:
        s = d.signal(rng.normal(size=d.n))
        a = to_representation(s, "p")
        b = to_representation(s, "p", method="solve")
        assert np.linalg.norm(a.values - b.values) <= 1e-8 * d.companion.cond_vand * max(1, np.linalg.norm(a.values))
    with pytest.raises(InputError):
        to_representation(s, "p", method="magic")


def test_realness_follows_pair_symmetry(corpus, rng):
    for d in corpus[:20]:
        s = d.signal(rng.normal(size=d.n))
        assert not np.any(s.to("p").values.imag)
        # q is real when s is conjugate-symmetric under the eigenvalue pairing
        half = rng.normal(size=d.n) + 1j * rng.normal(size=d.n)
        sym = 0.5 * (half + np.conj(half[list(d.pairing)]))
        assert not np.any(d.signal(sym).to("q").values.imag)


# --- impulses and shifts ------------------------------------------------------


def test_companion_delta():
    d = decompose(ladder_graph(4))
    m = d.companion
    e0 = companion_delta(m, 0)
    np.testing.assert_allclose(e0.to("hat").values, np.full(8, 1 / math.sqrt(8)))
    e1 = companion_delta(m, 1).to("s").values
    np.testing.assert_allclose(e1, d.shift @ e0.to("s").values, atol=1e-12)
    last = m.c_comp @ companion_delta(m, 7).values
    np.testing.assert_array_equal(last, -d.char_poly.lower)
    for n in range(8):
        np.testing.assert_allclose(companion_delta(m, n).to("hat").values, d.lam**n / math.sqrt(8), atol=1e-12)
    with pytest.raises(InputError):
        companion_delta(m, 8)


def test_vertex_shift_on_cycle():
    d = decompose(cycle_graph(4))
    np.testing.assert_allclose(shift_in_rep(d.signal(np.eye(4)[0])).values, np.eye(4)[1])
    with pytest.raises(InputError):
        shift_in_rep(d.signal(np.eye(4)[0]), -1)


def test_shift_commutes_with_conversion(corpus, rng):
    for d in corpus[:40]:
        if d.n > 10:
            continue
        tol = 1e-7 * max(1.0, d.companion.cond_vand)
        s = d.signal(rng.normal(size=d.n))
        # A on s is C_comp on p
        p = s.to("p")
        lhs = to_representation(shift_in_rep(s), Rep.IMPULSE).values
        assert np.linalg.norm(lhs - shift_in_rep(p).values) <= tol * max(1.0, np.linalg.norm(p.values))
        # M on s_hat is C_comp,sp on q
        shat = s.to("hat")
        lhs = to_representation(shift_in_rep(shat, 2), Rep.SPECTRAL_IMPULSE).values
        rhs = shift_in_rep(s.to("q"), 2).values
        assert np.linalg.norm(lhs - rhs) <= tol * max(1.0, np.linalg.norm(rhs))
