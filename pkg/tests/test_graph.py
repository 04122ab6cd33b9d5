import numpy as np
import pytest

from germinet import (
    DataError,
    LaplacianSystem,
    SingularSystemError,
    build_graph,
    cut_size,
    induced_subgraph,
    volume,
)

from conftest import (
    BARBELL_EDGES,
    dense_laplacian,
    pairwise_resistance_oracle,
    random_connected_graph,
)


class TestBuildGraph:
    def test_path(self, path3):
        assert path3.n == 3
        assert path3.m == 2
        assert path3.degrees.tolist() == [1, 2, 1]

    def test_cleaning_dedup_and_self_loops(self):
        g = build_graph([(0, 1), (1, 0), (0, 0)])
        assert g.n == 2
        assert g.m == 1

    def test_barbell_adjacency(self, barbell):
        assert barbell.n == 6
        assert barbell.m == 7
        assert barbell.degrees.tolist() == [2, 2, 3, 3, 2, 2]
        assert sorted(barbell.neighbors(2).tolist()) == [0, 1, 3]
        assert barbell.has_edge(2, 3) and barbell.has_edge(3, 2)
        assert not barbell.has_edge(0, 4)

    def test_empty_edge_list_rejected(self):
        with pytest.raises(DataError, match="empty graph"):
            build_graph([])

    def test_all_self_loops_rejected(self):
        with pytest.raises(DataError, match="empty graph"):
            build_graph([(3, 3), (5, 5)])

    def test_negative_ids_rejected(self):
        with pytest.raises(DataError):
            build_graph([(0, -1)])

    def test_id_compaction_keeps_mapping(self):
        g = build_graph([(5, 900), (900, 7)])
        assert g.n == 3
        assert sorted(g.id_map) == [5, 7, 900]
        assert g.to_original_ids(range(g.n)) == [5, 7, 900]
        # round-trip through the mapping
        for old, new in g.id_map.items():
            assert int(g.original_ids[new]) == old

    def test_adjacency_symmetry_exhaustive(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            g = random_connected_graph(rng, 30, 40)
            for u in range(g.n):
                for v in g.neighbors(u):
                    assert u in g.neighbors(v)

    def test_handshake_identity(self):
        rng = np.random.default_rng(1)
        g = random_connected_graph(rng, 40, 60)
        assert g.degrees.sum() == 2 * g.m


class TestVolumeAndCut:
    def test_volume_examples(self, triangle, barbell):
        assert volume(triangle, [0]) == 2
        assert volume(triangle, [0, 1, 2]) == 6 == 2 * triangle.m
        assert volume(barbell, [0, 1, 2]) == 7

    def test_cut_examples(self, barbell, k4):
        assert cut_size(barbell, [0, 1, 2]) == 1
        assert cut_size(barbell, list(range(6))) == 0
        for u in range(4):
            for v in range(u + 1, 4):
                assert cut_size(k4, [u, v]) == 4

    def test_complement_identities(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = random_connected_graph(rng, 25, 30)
            k = int(rng.integers(1, g.n))
            s = rng.choice(g.n, size=k, replace=False).tolist()
            comp = [v for v in range(g.n) if v not in set(s)]
            assert volume(g, s) + volume(g, comp) == 2 * g.m
            if comp:
                assert cut_size(g, s) == cut_size(g, comp)

    def test_bad_node_sets_rejected(self, triangle):
        with pytest.raises(DataError):
            volume(triangle, [0, 5])
        with pytest.raises(DataError):
            cut_size(triangle, [0, 0])


class TestLaplacianSystem:
    def test_action_matches_incidence_gram(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            g = random_connected_graph(rng, 50, 80)
            sys = LaplacianSystem(g)
            b_mat = sys.incidence_matrix()
            for _ in range(3):
                x = rng.normal(size=g.n)
                assert np.abs(sys.apply(x) - b_mat.T @ (b_mat @ x)).max() < 1e-12

    def test_single_resistor(self):
        g = build_graph([(0, 1)])
        sys = LaplacianSystem(g)
        p = sys.solve(np.array([1.0, -1.0]))
        assert p[0] - p[1] == pytest.approx(1.0, abs=1e-10)

    def test_two_resistors_in_series(self, path3):
        sys = LaplacianSystem(path3)
        p = sys.solve(np.array([1.0, 0.0, -1.0]))
        assert p[0] - p[2] == pytest.approx(2.0, abs=1e-10)

    def test_triangle_against_pseudoinverse_oracle(self, triangle):
        sys = LaplacianSystem(triangle)
        b = np.array([1.0, -1.0, 0.0])
        p = sys.solve(b)
        assert p[0] - p[1] == pytest.approx(2.0 / 3.0, abs=1e-10)
        oracle = np.linalg.pinv(dense_laplacian(triangle)) @ b
        assert np.abs(p - oracle).max() < 1e-8

    def test_random_solves_meet_residual_tolerance(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            g = random_connected_graph(rng, 60, 90)
            sys = LaplacianSystem(g, tol=1e-9)
            b = rng.normal(size=g.n)
            b -= b.mean()
            p = sys.solve(b)
            assert np.abs(sys.apply(p) - b).max() <= 1e-9
            assert abs(p.mean()) < 1e-12  # minimum-norm normalization

    def test_nonzero_sum_rejected(self, triangle):
        sys = LaplacianSystem(triangle)
        with pytest.raises(ValueError, match="contract"):
            sys.solve(np.array([1.0, 0.0, 0.0]))

    def test_disconnected_spanning_rhs_rejected(self):
        g = build_graph([(0, 1), (2, 3)])
        sys = LaplacianSystem(g)
        with pytest.raises(SingularSystemError, match="singular"):
            sys.solve(np.array([1.0, 0.0, -1.0, 0.0]))

    def test_disconnected_within_component_ok(self):
        g = build_graph([(0, 1), (2, 3)])
        sys = LaplacianSystem(g)
        p = sys.solve(np.array([1.0, -1.0, 0.0, 0.0]))
        assert p[0] - p[1] == pytest.approx(1.0, abs=1e-8)


def test_induced_subgraph_keeps_original_ids(barbell):
    sub = induced_subgraph(barbell, [0, 1, 2])
    assert sub.n == 3
    assert sub.m == 3
    assert sorted(sub.id_map) == [0, 1, 2]


def test_component_queries():
    g = build_graph([(0, 1), (1, 2), (3, 4)])
    assert not g.is_connected()
    assert sorted(g.component_of(0).tolist()) == [0, 1, 2]
    assert sorted(g.component_of(4).tolist()) == [3, 4]
