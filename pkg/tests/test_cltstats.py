import math
from fractions import Fraction

import numpy as np
import pytest

import combclt as c
from combclt.fixtures import asym_inverse_length, asym_length


def test_drift_word_length_degenerate(f2):
    fn = c.word_length_function(f2.combing)
    data = c.analyze(f2.combing.digraph)
    report = c.drift_variance(data, fn)
    assert report.E_exact == 1
    assert report.sigma_sq_exact == 0
    assert report.sigma == 0.0


def test_drift_phi_ab(phi_ab_fn):
    fn, data = phi_ab_fn
    report = c.drift_variance(data, fn)
    assert report.mode == "exact"
    assert report.E_exact == 0  # quasimorphism over a symmetric set
    assert report.sigma_sq_exact == Fraction(5, 24)
    assert report.agreement_ok


def test_drift_coin_chain():
    dg, dphi = c.digraph_fixture("coin")
    data = c.analyze(dg)
    report = c.drift_variance(data, dphi)
    assert report.E_exact == Fraction(1, 2)
    assert report.sigma_sq_exact == Fraction(1, 4)


def test_drift_periodic_core_is_deterministic():
    dg, dphi = c.digraph_fixture("periodic_core")
    data = c.analyze(dg)
    report = c.drift_variance(data, dphi)
    assert report.E_exact == Fraction(1, 2)
    assert report.sigma_sq_exact == 0


def test_drift_scale_equivariance(phi_ab_fn):
    fn, data = phi_ab_fn
    base = c.drift_variance(data, fn)
    scaled = c.drift_variance(data, [3 * x for x in fn.dphi_vector()])
    assert scaled.E_exact == 3 * base.E_exact
    assert scaled.sigma_sq_exact == 9 * base.sigma_sq_exact


def test_mismatched_digraph(f2, phi_ab_fn):
    fn, data = phi_ab_fn
    base = c.analyze(f2.combing.digraph)
    with pytest.raises(c.MismatchedDigraph):
        c.drift_variance(base, fn)


def test_moment_oracle_word_length(f2):
    fn = c.word_length_function(f2.combing)
    data = c.analyze(f2.combing.digraph)
    for n in (1, 5, 20):
        mom = c.moment_oracle(data, fn, n)
        assert mom.mean_exact == n
        assert mom.variance_exact == 0


def test_moment_oracle_coin_binomial():
    dg, dphi = c.digraph_fixture("coin")
    data = c.analyze(dg)
    mom = c.moment_oracle(data, dphi, 10)
    assert mom.mean_exact == 5
    assert mom.variance_exact == Fraction(10, 4)


def test_moment_oracle_float_agrees_with_exact(phi_ab_fn):
    fn, data = phi_ab_fn
    exact = c.moment_oracle(data, fn, 60)
    # force the float path through a float-only spectral copy
    import dataclasses
    float_data = dataclasses.replace(data, exact=None)
    approx = c.moment_oracle(float_data, fn, 60)
    assert approx.mean == pytest.approx(float(exact.mean_exact), abs=1e-10)
    assert approx.variance == pytest.approx(float(exact.variance_exact), rel=1e-10)


def test_sampling_letter_frequencies(f2):
    data = c.analyze(f2.combing.digraph)
    batch = c.sample(data, 1, 100_000, seed=20)
    counts = {}
    for w in batch.words:
        counts[w[0]] = counts.get(w[0], 0) + 1
    se = math.sqrt(0.25 * 0.75 / 100_000)
    for letter in "aAbB":
        assert counts[letter] / 100_000 == pytest.approx(0.25, abs=3 * se)


def test_sampling_cone_frequencies_match_weights(f2):
    # frequencies of length-3 prefixes under the chain law are uniform 1/36
    data = c.analyze(f2.combing.digraph)
    batch = c.sample(data, 10, 30_000, seed=7)
    counts = {}
    for w in batch.words:
        counts[w[:3]] = counts.get(w[:3], 0) + 1
    assert len(counts) == 36
    se = math.sqrt((1 / 36) * (35 / 36) / 30_000)
    for prefix, cnt in counts.items():
        assert cnt / 30_000 == pytest.approx(1 / 36, abs=3.5 * se)


def test_sample_empty_batch(f2):
    data = c.analyze(f2.combing.digraph)
    batch = c.sample(data, 5, 0, seed=1)
    assert batch.words == ()
    assert batch.phi_values is None


def test_sample_determinism(f2):
    data = c.analyze(f2.combing.digraph)
    b1 = c.sample(data, 6, 500, seed=99)
    b2 = c.sample(data, 6, 500, seed=99)
    assert b1.words == b2.words
    fn = c.word_length_function(f2.combing)
    sums = c.sample_phi_sums(data, fn, 6, 500, seed=99)
    assert np.all(sums == 6)


def test_empirical_word_length_is_identically_zero(f2):
    fn = c.word_length_function(f2.combing)
    data = c.analyze(f2.combing.digraph)
    report = c.empirical_clt(data, fn, 50, 2000, seed=3)
    assert report.degenerate
    assert report.max_abs_centered == 0.0


def test_empirical_phi_ab_smoke(phi_ab_fn):
    fn, data = phi_ab_fn
    report = c.empirical_clt(data, fn, 100, 20_000, seed=11)
    assert not report.degenerate
    assert report.ks_distance < 0.05
    assert abs(report.mean_standardized) < 0.05
    assert report.ks_distance < report.ks_distance_uncorrected


def test_empirical_genset_qm_centered(f2):
    psi = lambda el: asym_length(el) - asym_inverse_length(el)
    fn = c.synthesize_dphi(f2.combing, psi, refine_depth=3, verify_radius=7)
    assert isinstance(fn, c.CombableFunction)
    data = c.analyze(fn.combing.digraph)
    clt = c.drift_variance(data, fn)
    assert clt.E_exact == 0
    report = c.empirical_clt(data, fn, 400, 100_000, seed=4, clt=clt)
    assert abs(report.mean_standardized) < 0.02
    assert report.ks_distance < 0.02


def test_sampling_transition_law_matches_chain(f2):
    # empirical transition frequencies from each support vertex approach the
    # rows of N
    data = c.analyze(f2.combing.digraph)
    batch = c.sample(data, 25, 4000, seed=13)
    from combclt.digraph import accept
    counts = {}
    visits = {}
    for word in batch.words:
        path = accept(f2.combing.digraph, word)
        for u, v in zip(path.vertex_sequence, path.vertex_sequence[1:]):
            counts[(u, v)] = counts.get((u, v), 0) + 1
            visits[u] = visits.get(u, 0) + 1
    for (u, v), cnt in counts.items():
        if u not in data.support:
            continue
        p = data.N[u - 1, v - 1]
        se = math.sqrt(p * (1 - p) / visits[u])
        assert cnt / visits[u] == pytest.approx(p, abs=4 * se)


def test_function_bundle_roundtrip(phi_ab_fn, f2):
    fn, _ = phi_ab_fn
    doc = c.function_to_dict(fn)
    back = c.function_from_dict(doc, f2.oracle)
    assert back.combing.digraph == fn.combing.digraph
    assert back.dphi == fn.dphi
    assert back.evaluate_word("abab") == fn.evaluate_word("abab")


def test_typicality_word_length_dirac(f2):
    fn = c.word_length_function(f2.combing)
    data = c.analyze(f2.combing.digraph)
    gamma = c.sample_ray(data, 500, seed=2)
    profile = c.typicality_profile(data, fn, gamma, 20, 400, E=1.0)
    assert profile.mean == 0.0
    assert profile.variance == 0.0


def test_typicality_phi_ab_long_ray(phi_ab_fn):
    fn, data = phi_ab_fn
    clt = c.drift_variance(data, fn)
    gamma = c.sample_ray(data, 100_000, seed=8)
    profile = c.typicality_profile(data, fn, gamma, 100, 90_000, E=clt.E)
    assert abs(profile.mean) < 0.05
    assert profile.variance == pytest.approx(clt.sigma_sq, rel=0.10)


def test_typicality_too_short(f2):
    fn = c.word_length_function(f2.combing)
    data = c.analyze(f2.combing.digraph)
    gamma = c.sample_ray(data, 10, seed=1)
    with pytest.raises(c.TooShort):
        c.typicality_profile(data, fn, gamma, 8, 8, E=1.0)


def test_compare_identical_gensets(f2):
    report = c.compare_gensets(f2.combing, "standard", length_oracle=len,
                               synth_depth=1, synth_radius=5, ball_radius2=5)
    assert report.E_exact == 1
    assert report.lambda12_exact == 1
    assert report.inequality_margin == pytest.approx(0.0, abs=1e-12)


def test_compare_enlarged_genset(f2):
    report = c.compare_gensets(f2.combing, "S2",
                               length_oracle=c.s2_length,
                               synth_depth=3, synth_radius=7,
                               check_lengths=(8,), ball_radius2=6)
    assert report.E_exact == Fraction(5, 6)
    assert report.lambda12_exact == Fraction(6, 5)
    assert report.lambda2 == pytest.approx(4.0, abs=1e-12)
    assert report.inequality_margin > 0.3
    n, count, mean_dev, dev95, k_n = report.deviation_rows[0]
    assert n == 8 and count == 4 * 3 ** 7
    assert dev95 <= k_n * math.sqrt(8) + 1e-12
