import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gcnas.arch_graph import (
    ArchGraph,
    MeasuredSimilarity,
    assignment_of,
    build_graph,
    dump_graph,
    measured_similarity,
    node_architecture,
    node_index,
    normalize_adjacency,
)
from gcnas.search_space import (
    SearchSpaceSpec,
    Subspace,
    SuperCell,
    cell_hamming,
    gray_encode,
    materialize,
    sample_uniform,
)
from conftest import power_iteration_largest_eigenvalue

ASSIGNED = math.exp(-0.5)


def two_free_cells() -> Subspace:
    return Subspace(SearchSpaceSpec(3, 6), (0, 1), {2: 4})


class TestNodeIndex:
    def test_corners(self):
        sub = two_free_cells()
        assert node_index(sub, {0: 0, 1: 0}) == 0
        assert node_index(sub, {0: 5, 1: 5}) == 35

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            assignment_of(two_free_cells(), 36)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9))
    def test_roundtrip(self, raw):
        sc = SuperCell((2, 3), ((0, 0), (1, 5), (2, 2)))
        sub = Subspace(SearchSpaceSpec(5, 6), (0, 4), {1: 3}, (sc,))
        index = raw % sub.node_count
        assert node_index(sub, assignment_of(sub, index)) == index


class TestBuildGraph:
    def test_two_free_cells_counts(self):
        graph = build_graph(two_free_cells())
        assert graph.num_nodes == 36
        degrees = graph.adjacency.getnnz(axis=1)
        assert (degrees == 10).all()
        assert graph.adjacency.nnz == 2 * 180

    def test_assigned_weight_on_every_edge(self):
        graph = build_graph(two_free_cells())
        assert np.allclose(graph.adjacency.data, ASSIGNED)

    def test_degree_formula_with_supercells(self):
        sc = SuperCell((0, 1), ((0, 0), (1, 5), (2, 2)))
        sub = Subspace(SearchSpaceSpec(4, 6), (2, 3), {}, (sc,))
        graph = build_graph(sub)
        expected = 2 * (6 - 1) + (3 - 1)
        assert (graph.adjacency.getnnz(axis=1) == expected).all()

    def test_edges_match_bruteforce_hamming(self):
        # free-only subspace: slot distance equals cell-level Hamming distance
        sub = Subspace(SearchSpaceSpec(3, 6), (0, 1, 2), {})
        graph = build_graph(sub)
        dense = graph.adjacency.toarray()
        archs = [materialize(sub, assignment_of(sub, i)) for i in range(216)]
        for u in range(216):
            for v in range(u + 1, 216):
                expected = ASSIGNED if cell_hamming(archs[u], archs[v]) == 1 else 0.0
                assert dense[u, v] == pytest.approx(expected)
                assert dense[v, u] == dense[u, v]

    def test_supercell_counts_as_one_cell(self):
        sc = SuperCell((0, 1), ((0, 0), (5, 5)))
        sub = Subspace(SearchSpaceSpec(3, 6), (2,), {}, (sc,))
        graph = build_graph(sub)
        dense = graph.adjacency.toarray()
        digits = [sub.digits_of(i) for i in range(graph.num_nodes)]
        for u in range(graph.num_nodes):
            for v in range(u + 1, graph.num_nodes):
                slot_distance = sum(a != b for a, b in zip(digits[u], digits[v]))
                assert (dense[u, v] > 0) == (slot_distance == 1)

    def test_node_cap(self):
        sub = Subspace(SearchSpaceSpec(3, 6), (0, 1, 2), {})
        with pytest.raises(ValueError, match="216.*100"):
            build_graph(sub, max_nodes=100)

    def test_features_are_gray_codes_of_materialized_archs(self):
        sc = SuperCell((0, 1), ((2, 5), (3, 3)))
        sub = Subspace(SearchSpaceSpec(4, 6), (3,), {2: 1}, (sc,))
        graph = build_graph(sub)
        spec = sub.spec
        for index in range(graph.num_nodes):
            arch = materialize(sub, assignment_of(sub, index))
            assert graph.features[index].tolist() == gray_encode(arch, spec).tolist()
            assert node_architecture(graph, index) == arch

    def test_measured_mode_requires_samples(self):
        with pytest.raises(ValueError, match="records"):
            build_graph(two_free_cells(), MeasuredSimilarity())


class TestMeasuredSimilarity:
    def make_samples(self, sub, accuracy_of):
        samples = []
        for assignment in sample_uniform(sub, sub.node_count, seed=0):
            samples.append((assignment, accuracy_of(assignment)))
        return samples

    def test_perfectly_correlated_pair(self):
        sub = Subspace(SearchSpaceSpec(2, 6), (0, 1), {})
        # accuracy depends only on the *other* cell: swapping cell 0's choice
        # between any two values gives perfectly correlated accuracies
        samples = self.make_samples(sub, lambda a: 0.5 + 0.01 * a[1])
        table = measured_similarity(samples, sub, MeasuredSimilarity(min_pairs=4))
        assert table[(0, 0, 1)] == pytest.approx(1.0)

    def test_anticorrelated_pair_clamps_to_floor(self):
        sub = Subspace(SearchSpaceSpec(2, 6), (0, 1), {})

        def accuracy(a):
            sign = 1.0 if a[0] == 0 else -1.0
            return 0.5 + sign * 0.01 * a[1]

        samples = self.make_samples(sub, accuracy)
        table = measured_similarity(samples, sub, MeasuredSimilarity(min_pairs=4, floor=0.01))
        assert table[(0, 0, 1)] == pytest.approx(0.01)

    def test_sparse_statistics_fall_back(self):
        sub = Subspace(SearchSpaceSpec(2, 6), (0, 1), {})
        samples = self.make_samples(sub, lambda a: 0.5 + 0.01 * a[1])
        table = measured_similarity(samples, sub, MeasuredSimilarity(min_pairs=30))
        assert table[(0, 0, 1)] == pytest.approx(ASSIGNED)

    def test_empty_samples_error(self):
        with pytest.raises(ValueError):
            measured_similarity([], two_free_cells())

    def test_weights_applied_to_edges(self):
        sub = Subspace(SearchSpaceSpec(2, 6), (0, 1), {})
        samples = self.make_samples(sub, lambda a: 0.5 + 0.01 * a[1])
        mode = MeasuredSimilarity(min_pairs=4)
        graph = build_graph(sub, mode, samples=samples)
        u = node_index(sub, {0: 0, 1: 2})
        v = node_index(sub, {0: 1, 1: 2})
        assert graph.adjacency[u, v] == pytest.approx(1.0)


class TestNormalizeAdjacency:
    def test_isolated_node(self):
        graph = ArchGraph(
            subspace=two_free_cells(),
            num_nodes=1,
            adjacency=sp.csr_matrix((1, 1)),
            features=np.zeros((1, 3), dtype=np.float32),
            choice_matrix=np.zeros((1, 3), dtype=np.int64),
        )
        assert normalize_adjacency(graph).toarray() == pytest.approx(np.array([[1.0]]))

    def test_two_nodes_single_unit_edge(self):
        adjacency = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
        graph = ArchGraph(two_free_cells(), 2, adjacency,
                          np.zeros((2, 3), np.float32), np.zeros((2, 3), np.int64))
        expected = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert normalize_adjacency(graph).toarray() == pytest.approx(expected)

    def test_structure_and_spectrum(self):
        sub = Subspace(SearchSpaceSpec(3, 6), (0, 1, 2), {})
        graph = build_graph(sub)
        a_hat = normalize_adjacency(graph)
        assert abs(a_hat - a_hat.T).max() == 0.0
        assert (a_hat.data >= 0).all()
        assert (a_hat.diagonal() > 0).all()
        top = power_iteration_largest_eigenvalue(a_hat)
        assert top <= 1.0 + 1e-6

    def test_cached(self):
        graph = build_graph(two_free_cells())
        assert normalize_adjacency(graph) is normalize_adjacency(graph)


class TestDumpGraph:
    def test_files_and_canonical_order(self, tmp_path):
        graph = build_graph(two_free_cells())
        edges_path, features_path = dump_graph(graph, tmp_path / "g")
        lines = edges_path.read_text().splitlines()
        assert len(lines) == 180
        rows = [tuple(line.split()) for line in lines]
        parsed = [(int(u), int(v)) for u, v, _ in rows]
        assert parsed == sorted(parsed)
        assert all(u < v for u, v in parsed)
        assert all(float(w) == pytest.approx(ASSIGNED) for _, _, w in rows)
        features = np.load(features_path)
        assert features.shape == graph.features.shape
