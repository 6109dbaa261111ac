import pytest

import combclt as c
from combclt.digraph import (DirectedPath, Rejection, growth_counts,
                             perron_root, strongly_connected_components)


def f2_graph():
    return c.fixture("F2_standard").combing.digraph


def test_f2_graph_shape():
    dg = f2_graph()
    assert dg.vertex_count == 5
    assert len(dg.edges) == 16
    assert len(dg.out_edges[1]) == 4
    for v in (2, 3, 4, 5):
        assert len(dg.out_edges[v]) == 3


def test_trivial_graph_accepts_only_empty_word():
    dg = c.build_digraph(1, [], ["a"])
    assert isinstance(c.accept(dg, ""), DirectedPath)
    assert isinstance(c.accept(dg, "a"), Rejection)


def test_build_rejects_duplicate_label():
    with pytest.raises(c.NondeterministicLabel):
        c.build_digraph(3, [(1, 2, "a"), (1, 3, "a")], ["a"])


def test_build_rejects_incoming_edge_to_initial():
    with pytest.raises(c.IncomingEdgeToInitial):
        c.build_digraph(2, [(1, 2, "a"), (2, 1, "b")], ["a", "b"])


def test_build_rejects_unreachable_vertex():
    with pytest.raises(c.UnreachableVertex):
        c.build_digraph(3, [(1, 2, "a")], ["a"])


def test_accept_traces_abA():
    path = c.accept(f2_graph(), "abA")
    assert isinstance(path, DirectedPath)
    # letter states in order a, A, b, B are vertices 2, 3, 4, 5
    assert path.vertex_sequence == (1, 2, 4, 3)


def test_accept_rejects_aA_at_index_1():
    rej = c.accept(f2_graph(), "aA")
    assert isinstance(rej, Rejection)
    assert rej.halt_index == 1


def test_empty_word_path():
    path = c.accept(f2_graph(), "")
    assert len(path) == 0 and path.end == 1


def test_count_paths_examples():
    dg = f2_graph()
    assert c.count_paths(dg, 1, "any", 3) == 36
    assert c.count_paths(dg, 1, 1, 0) == 1
    assert c.count_paths(dg, 2, 3, 1) == 0  # no edge v_a -> v_A


def test_count_paths_matches_growth_counts():
    dg = f2_graph()
    counts = growth_counts(dg, 8)
    assert counts == [1] + [4 * 3 ** (n - 1) for n in range(1, 9)]


def test_components_f2():
    decomp = c.components(f2_graph())
    assert len(decomp.components) == 1
    assert decomp.components[0] == frozenset({2, 3, 4, 5})
    assert abs(decomp.per_component_eigenvalue[0] - 3.0) < 1e-12
    assert decomp.component_of(1) is None


def test_components_cycle_and_joined_cycles():
    k = 5
    edges = [(1, 2, "a")] + [(i, i + 1, "a") for i in range(2, k + 1)] + [(k + 1, 2, "a")]
    dg = c.build_digraph(k + 1, edges, ["a"])
    decomp = c.components(dg)
    assert len(decomp.components) == 1
    assert abs(decomp.per_component_eigenvalue[0] - 1.0) < 1e-12

    # two 3-cycles joined by one edge
    edges = [(1, 2, "a"),
             (2, 3, "a"), (3, 4, "a"), (4, 2, "a"),
             (3, 5, "b"),
             (5, 6, "a"), (6, 7, "a"), (7, 5, "a")]
    dg = c.build_digraph(7, edges, ["a", "b"])
    decomp = c.components(dg)
    assert len(decomp.components) == 2
    assert all(abs(x - 1.0) < 1e-12 for x in decomp.per_component_eigenvalue)
    assert len(decomp.component_dag) == 1


def test_perron_root_small_cases():
    assert perron_root([[0, 1], [1, 0]]) == pytest.approx(1.0, abs=1e-12)
    assert perron_root([[3]]) == pytest.approx(3.0, abs=1e-12)
    assert perron_root([[0, 2], [2, 0]]) == pytest.approx(2.0, abs=1e-12)
    assert perron_root([[0]]) == 0.0


def test_almost_semisimple_f2_passes():
    report = c.check_almost_semisimple(f2_graph(), n_max=30)
    assert report.verdict
    assert report.lambda_estimate == pytest.approx(3.0, rel=1e-9)
    assert abs(report.log_n_coefficient) < 0.05
    lo, hi = 1 / report.K_estimate, report.K_estimate
    for n, count in report.growth_samples:
        assert lo * 3.0 ** n <= count <= hi * 3.0 ** n * (1 + 1e-9)


def test_almost_semisimple_f2xf2_fails_both_ways():
    dg = c.fixture("F2xF2_concat").combing.digraph
    report = c.check_almost_semisimple(dg, n_max=30)
    assert not report.verdict
    assert report.connected_lambda_components is not None
    assert report.log_n_coefficient > 0.5


def test_almost_semisimple_cycle_fails_with_lambda_one():
    dg = c.build_digraph(4, [(1, 2, "a"), (2, 3, "a"), (3, 4, "a"), (4, 2, "a")],
                         ["a"])
    report = c.check_almost_semisimple(dg, n_max=20)
    assert not report.verdict
    assert report.lambda_spectral == pytest.approx(1.0, abs=1e-9)
    assert "lambda <= 1" in report.reason


def test_finite_language_raises_insufficient_growth():
    dg = c.build_digraph(3, [(1, 2, "a"), (2, 3, "a")], ["a"])
    with pytest.raises(c.InsufficientGrowth):
        c.check_almost_semisimple(dg, n_max=20)


def test_outgoing_count_consistency_random():
    # sum of counts at n+1 equals sum over vertices of count_n(v) * outdeg(v)
    for seed in range(12):
        dg = c.random_digraph(seed)
        rows = dg.adjacency_rows
        outdeg = [sum(r) for r in rows]
        vec = [0] * dg.vertex_count
        vec[0] = 1
        for _ in range(6):
            nxt = [0] * dg.vertex_count
            for i, cnt in enumerate(vec):
                for j in range(dg.vertex_count):
                    nxt[j] += cnt * rows[i][j]
            assert sum(nxt) == sum(cnt * outdeg[i] for i, cnt in enumerate(vec))
            vec = nxt


def test_determinism_accept_iff_unique_path():
    dg = f2_graph()
    for word in ("a", "ab", "abA", "aA", "bbb", "BaB"):
        accepted = c.is_accepted(dg, word)
        # count paths from v1 reading exactly this word
        count = 0
        path = c.accept(dg, word)
        count = 1 if isinstance(path, DirectedPath) else 0
        assert accepted == (count == 1)


def test_component_dag_acyclic_random():
    for seed in range(40):
        dg = c.random_digraph(seed)
        decomp = c.components(dg)
        succ = {i: set() for i in range(len(decomp.components))}
        for i, j in decomp.component_dag:
            succ[i].add(j)
        sccs = strongly_connected_components(range(len(decomp.components)), succ)
        assert all(len(s) == 1 for s in sccs)


def test_digraph_file_roundtrip(tmp_path):
    dg = f2_graph()
    path = tmp_path / "f2.json"
    c.save_digraph(dg, path)
    loaded = c.load_digraph(path)
    assert loaded == dg
