from fractions import Fraction

import numpy as np
import pytest

import combclt as c
from combclt import spectral
from combclt.digraph import build_digraph


def test_transition_matrix_examples(f2):
    m = spectral.transition_matrix(f2.combing.digraph)
    assert m.rows[0] == (0, 1, 1, 1, 1)
    assert all(sum(row) == 3 for row in m.rows[1:])

    two_cycle = build_digraph(3, [(1, 2, "a"), (2, 3, "a"), (3, 2, "a")],
                              ["a"])
    assert spectral.transition_matrix(two_cycle).rows[1:] == ((0, 0, 1), (0, 1, 0))

    multi = build_digraph(2, [(1, 2, "a"), (1, 2, "b"), (2, 2, "a")], ["a", "b"])
    assert spectral.transition_matrix(multi).rows[0][1] == 2


def test_perron_examples(f2):
    assert spectral.perron(spectral.transition_matrix(f2.combing.digraph)) \
        == pytest.approx(3.0, abs=1e-12)
    cyc = build_digraph(4, [(1, 2, "a"), (2, 3, "a"), (3, 4, "a"), (4, 2, "a")],
                        ["a"])
    assert spectral.perron(spectral.transition_matrix(cyc)) == pytest.approx(1.0, abs=1e-12)


def test_perron_psl2z_matches_ball_growth():
    fx = c.fixture("PSL2Z")
    lam = spectral.perron(spectral.transition_matrix(fx.combing.digraph))
    assert lam == pytest.approx(2 ** 0.5, abs=1e-9)
    sizes = fx.oracle.ball("standard", 14).shell_sizes()
    ratio = (sizes[14] / sizes[10]) ** 0.25
    assert ratio == pytest.approx(lam, rel=0.02)


def test_projections_f2(f2):
    m = spectral.transition_matrix(f2.combing.digraph)
    rho = spectral.project_rho(m, 3.0, np.ones(5))
    assert np.allclose(rho, [4 / 3, 1, 1, 1, 1], atol=1e-10)
    ell = spectral.project_ell(m, 3.0, np.eye(5)[0])
    assert np.allclose(ell, [0, 1 / 3, 1 / 3, 1 / 3, 1 / 3], atol=1e-10)
    # projection fixes eigenvectors
    again = spectral.project_rho(m, 3.0, rho)
    assert np.allclose(again, rho, atol=1e-10)
    # Cesaro partial sums approach the projection at O(1/n)
    approx = spectral.cesaro_projection(m, 3.0, np.ones(5), horizon=400)
    assert np.max(np.abs(approx - rho)) < 0.02


def test_chain_f2(f2):
    data = c.analyze(f2.combing.digraph)
    assert data.mode == "exact"
    assert data.exact.lam == 3
    assert data.exact.mu == (0, Fraction(1, 4), Fraction(1, 4), Fraction(1, 4),
                             Fraction(1, 4))
    assert np.allclose(data.N[0], [0, 0.25, 0.25, 0.25, 0.25], atol=1e-15)
    assert np.allclose(data.N.sum(axis=1), 1.0, atol=1e-15)
    assert data.support == frozenset({2, 3, 4, 5})


def test_chain_periodic_core_stationary():
    dg, _ = c.digraph_fixture("periodic_core")
    data = c.analyze(dg)
    assert data.lam == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(data.mu @ data.N, data.mu, atol=1e-14)
    assert data.exact is not None
    mu = data.exact.mu
    assert [float(x) for x in mu] == pytest.approx([0, 0.5, 0.5])


def test_cesaro_cross_check_periodic_core():
    dg, _ = c.digraph_fixture("periodic_core")
    data = c.analyze(dg)
    m = spectral.transition_matrix(dg)
    approx = spectral.cesaro_projection(m, data.lam, np.ones(3), horizon=600)
    assert np.max(np.abs(approx - data.rho_one)) < 0.02


def test_mixed_rates_support():
    dg, _ = c.digraph_fixture("mixed_rates")
    data = c.analyze(dg)
    assert data.lam == pytest.approx(3.0, abs=1e-12)
    assert data.support == frozenset({4})
    verdict = data.support_verdict
    assert verdict.lambda_components == (1,)
    assert verdict.pairwise_ok


def test_support_equals_lambda_components(f2):
    data = c.analyze(f2.combing.digraph)
    comp_vertices = set().union(*(data.decomposition.components[i]
                                  for i in data.support_verdict.lambda_components))
    assert data.support == frozenset(comp_vertices)


def test_degenerate_f2xf2():
    dg = c.fixture("F2xF2_concat").combing.digraph
    with pytest.raises(c.DegenerateEigenstructure):
        c.analyze(dg)
    decomp = c.components(dg)
    verdict = spectral.support_analysis(dg, decomp, 3.0)
    assert not verdict.pairwise_ok
    assert verdict.violating_pair is not None


def test_cone_weights_f2(f2):
    data = c.analyze(f2.combing.digraph)
    w = c.cone_weight(data, "abab")
    assert w.weight == pytest.approx(3.0 ** -4)
    assert w.weight_exact == Fraction(1, 81)
    assert c.cone_weight(data, "").weight_exact == Fraction(4, 3)
    with pytest.raises(c.NotAccepted):
        c.cone_weight(data, "aA")


def test_cone_weight_additivity_and_total(f2):
    data = c.analyze(f2.combing.digraph)
    dg = f2.combing.digraph
    # children weights sum to the parent weight on support vertices
    for word, v, _ in f2.combing.iter_words(4):
        parent = c.cone_weight(data, word).weight_exact
        kids = [c.cone_weight(data, word + (letter,)).weight_exact
                for letter, _ in dg.out_edges[v]]
        assert sum(kids) == parent
    # the total over all words of length n is rho(1)_{v1} for every n
    for n in (0, 3, 6):
        total = sum(c.cone_weight(data, w).weight_exact
                    for w, _, _ in f2.combing.iter_words(n) if len(w) == n)
        assert total == Fraction(4, 3)


def test_cone_weights_do_not_depend_on_the_digraph(f2, phi_ab_fn):
    # two acceptors for the same language (the 5-vertex acceptor and the
    # 27-state refinement) must give identical cone weights per word
    fn, refined_data = phi_ab_fn
    base_data = c.analyze(f2.combing.digraph)
    for word, _, _ in f2.combing.iter_words(5):
        a = c.cone_weight(base_data, word).weight_exact
        b = c.cone_weight(refined_data, word).weight_exact
        assert a == b


def test_poincare_f2(f2):
    data = c.analyze(f2.combing.digraph)
    report = c.poincare_diagnostics(f2.oracle, "standard", 8, data.lam)
    terms = [t for n, _, t in report.terms if n >= 1]
    assert terms == pytest.approx([4 / 3] * 8)
    assert report.term_ratio == pytest.approx(1.0)
    assert report.critical_exponent == pytest.approx(np.log(3))


def test_poincare_radius_zero_is_one(f2):
    report = c.poincare_diagnostics(f2.oracle, "standard", 0, 3.0)
    assert report.partial_zeta == 1.0


def test_poincare_f2xf2_terms_grow():
    fx = c.fixture("F2xF2_concat")
    report = c.poincare_diagnostics(fx.oracle, "standard", 7, 3.0)
    terms = [t for n, _, t in report.terms if n >= 1]
    assert terms[-1] > 2.0 * terms[0]
    assert all(b >= a * 0.999 for a, b in zip(terms, terms[1:]))


def test_random_digraph_identities():
    rng_targets = 40
    checked = 0
    seed = 0
    tol = 1e-10
    while checked < rng_targets:
        seed += 1
        dg = c.random_digraph(seed)
        try:
            data = c.analyze(dg, mode="float")
        except c.DegenerateEigenstructure:
            continue
        m = spectral.transition_matrix(dg)
        n = dg.vertex_count
        rng = np.random.default_rng(seed)
        v = rng.random(n)
        w = rng.random(n)
        rho_w = spectral.project_rho(m, data.lam, w)
        ell_v = spectral.project_ell(m, data.lam, v)
        assert abs(ell_v @ w - v @ rho_w) < tol
        assert np.max(np.abs(spectral.project_rho(m, data.lam, rho_w) - rho_w)) < tol
        assert np.allclose(data.N.sum(axis=1), 1.0, atol=1e-12)
        assert np.max(np.abs(data.mu @ data.N - data.mu)) < tol
        checked += 1
