import numpy as np
import pytest

from germinet import (
    DataError,
    build_graph,
    commute_time,
    exact_edge_resistances,
    read_resistance_tsv,
    sample_spanning_tree,
    sampled_edge_resistances,
    write_resistance_tsv,
)

from conftest import pairwise_resistance_oracle, random_connected_graph


class TestExactResistances:
    def test_single_edge_is_unit(self):
        g = build_graph([(0, 1)])
        assert exact_edge_resistances(g).values[0] == pytest.approx(1.0, abs=1e-8)

    def test_triangle_edges(self, triangle):
        rmap = exact_edge_resistances(triangle)
        assert np.abs(rmap.values - 2.0 / 3.0).max() < 1e-8

    def test_c4_edges(self, c4):
        rmap = exact_edge_resistances(c4)
        assert np.abs(rmap.values - 3.0 / 4.0).max() < 1e-8

    def test_barbell_bridge_is_unit(self, barbell):
        rmap = exact_edge_resistances(barbell)
        assert rmap.resistance(2, 3) == pytest.approx(1.0, abs=1e-8)
        assert rmap.resistance(3, 2) == rmap.resistance(2, 3)

    def test_cg_route_matches_dense_route(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            g = random_connected_graph(rng, 25, 30)
            dense = exact_edge_resistances(g)
            iterative = exact_edge_resistances(g, dense_limit=0)
            assert np.abs(dense.values - iterative.values).max() < 1e-6

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(8)
        g = random_connected_graph(rng, 30, 45)
        rmap = exact_edge_resistances(g)
        oracle = pairwise_resistance_oracle(g)
        for i in range(g.m):
            u, v = int(g.edges_u[i]), int(g.edges_v[i])
            assert rmap.values[i] == pytest.approx(oracle[u, v], abs=1e-8)

    def test_values_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            g = random_connected_graph(rng, 20, 40)
            values = exact_edge_resistances(g).values
            assert (values > 0).all() and (values <= 1.0).all()

    def test_foster_identity(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            g = random_connected_graph(rng, 50, 70)
            assert exact_edge_resistances(g).total() == pytest.approx(g.n - 1, abs=1e-8)

    def test_disconnected_rejected_by_default(self):
        g = build_graph([(0, 1), (2, 3)])
        with pytest.raises(DataError, match="disconnected"):
            exact_edge_resistances(g)

    def test_per_component_mode(self):
        g = build_graph([(0, 1), (1, 2), (2, 0), (3, 4)])
        rmap = exact_edge_resistances(g, on_disconnected="components")
        assert rmap.resistance(0, 1) == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert rmap.resistance(3, 4) == pytest.approx(1.0, abs=1e-8)

    def test_rayleigh_monotonicity(self):
        # adding an edge never increases any existing edge's resistance
        rng = np.random.default_rng(11)
        for _ in range(8):
            g = random_connected_graph(rng, 15, 15)
            base = exact_edge_resistances(g)
            while True:
                u, v = int(rng.integers(g.n)), int(rng.integers(g.n))
                if u != v and not g.has_edge(u, v):
                    break
            edges = list(zip(g.edges_u.tolist(), g.edges_v.tolist())) + [(u, v)]
            g2 = build_graph(edges)
            denser = exact_edge_resistances(g2)
            for i in range(g.m):
                a, b = int(g.edges_u[i]), int(g.edges_v[i])
                assert denser.resistance(a, b) <= base.values[i] + 1e-9

    def test_metric_property_of_pairwise_oracle(self):
        # symmetry and triangle inequality of the resistance distance
        rng = np.random.default_rng(12)
        g = random_connected_graph(rng, 15, 20)
        dist = pairwise_resistance_oracle(g)
        assert np.abs(dist - dist.T).max() < 1e-10
        for a in range(g.n):
            for b in range(g.n):
                for c in range(g.n):
                    assert dist[a, b] <= dist[a, c] + dist[c, b] + 1e-9


class TestSpanningTrees:
    def test_path_graph_has_unique_tree(self, path3):
        for seed in range(5):
            sample = sample_spanning_tree(path3, seed)
            assert sorted(sample.edges()) == [(0, 1), (1, 2)]

    def test_sample_is_a_spanning_tree(self):
        rng = np.random.default_rng(13)
        g = random_connected_graph(rng, 40, 60)
        sample = sample_spanning_tree(g, 99)
        edges = sample.edges()
        assert len(edges) == g.n - 1
        assert all(g.has_edge(u, v) for u, v in edges)
        # n-1 edges and connected implies acyclic
        adj = {v: [] for v in range(g.n)}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert len(seen) == g.n

    def test_triangle_tree_frequencies_uniform(self, triangle):
        from scipy.stats import chisquare

        counts = {}
        for i in range(3000):
            key = tuple(sorted(sample_spanning_tree(triangle, 10_000 + i).edges()))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 3
        assert chisquare(list(counts.values())).pvalue > 0.001

    def test_disconnected_rejected(self):
        g = build_graph([(0, 1), (2, 3)])
        with pytest.raises(DataError):
            sample_spanning_tree(g, 0)


class TestSampledResistances:
    def test_forced_edges_estimate_exactly_one(self, path3):
        rmap = sampled_edge_resistances(path3, 50, rng_seed=0)
        assert (rmap.values == 1.0).all()

    def test_barbell_bridge_estimates_one(self, barbell):
        rmap = sampled_edge_resistances(barbell, 200, rng_seed=1)
        assert rmap.resistance(2, 3) == 1.0

    def test_c4_estimate_close_to_exact(self, c4):
        rmap = sampled_edge_resistances(c4, 10_000, rng_seed=2)
        assert np.abs(rmap.values - 0.75).max() < 0.02

    def test_agreement_with_exact_on_random_graphs(self):
        rng = np.random.default_rng(14)
        for trial in range(3):
            g = random_connected_graph(rng, 25, 35)
            exact = exact_edge_resistances(g)
            sampled = sampled_edge_resistances(g, 20_000, rng_seed=trial)
            assert np.abs(exact.values - sampled.values).max() < 0.03

    def test_estimator_mean_converges(self, c4):
        estimates = [
            sampled_edge_resistances(c4, 2000, rng_seed=s).values.mean()
            for s in range(10)
        ]
        assert np.mean(estimates) == pytest.approx(0.75, abs=0.01)

    def test_deterministic_given_seed(self, barbell):
        a = sampled_edge_resistances(barbell, 500, rng_seed=42)
        b = sampled_edge_resistances(barbell, 500, rng_seed=42)
        assert (a.values == b.values).all()

    def test_zero_count_clamped_to_floor(self, k4):
        # a single tree covers 3 of K4's 6 edges; the rest hit the floor
        rmap = sampled_edge_resistances(k4, 1, rng_seed=5)
        assert sorted(set(rmap.values.tolist())) == [0.5, 1.0]

    def test_zero_trees_rejected(self, triangle):
        with pytest.raises(DataError):
            sampled_edge_resistances(triangle, 0)


class TestCommuteTime:
    def test_single_edge(self):
        g = build_graph([(0, 1)])
        rmap = exact_edge_resistances(g)
        assert commute_time(rmap, 0, 1) == pytest.approx(2.0, abs=1e-8)

    def test_triangle_edge(self, triangle):
        rmap = exact_edge_resistances(triangle)
        assert commute_time(rmap, 0, 1) == pytest.approx(4.0, abs=1e-8)

    def test_barbell_bridge(self, barbell):
        rmap = exact_edge_resistances(barbell)
        assert commute_time(rmap, 2, 3) == pytest.approx(14.0, abs=1e-8)

    def test_non_edge_rejected(self, barbell):
        rmap = exact_edge_resistances(barbell)
        with pytest.raises(KeyError, match="not stored"):
            commute_time(rmap, 0, 4)


class TestSerialization:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(15)
        g = random_connected_graph(rng, 30, 40)
        for rmap in (
            exact_edge_resistances(g),
            sampled_edge_resistances(g, 777, rng_seed=3),
        ):
            path = tmp_path / f"{rmap.method}.tsv"
            write_resistance_tsv(rmap, path)
            loaded = read_resistance_tsv(path, g)
            assert (loaded.values == rmap.values).all()
            assert loaded.method == rmap.method
            assert loaded.num_trees == rmap.num_trees
            assert loaded.seed == rmap.seed

    def test_header_and_order(self, barbell, tmp_path):
        rmap = exact_edge_resistances(barbell)
        path = tmp_path / "map.tsv"
        write_resistance_tsv(rmap, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# method=exact"
        for line in lines[1:]:
            u, v, _ = line.split("\t")
            assert int(u) < int(v)
