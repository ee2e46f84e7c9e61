import pytest
from hypothesis import given, strategies as st

from spinfold import ChimeraGraph, ValidationError, build_chimera


class TestIds:
    def test_id_layout(self):
        g = build_chimera(4, 4, 4)
        # (row*N + col)*2K + u*K + k
        assert g.qubit_id(0, 0, 0, 0) == 0
        assert g.qubit_id(0, 0, 1, 0) == 4
        assert g.qubit_id(0, 1, 0, 0) == 8
        assert g.qubit_id(1, 0, 0, 0) == 32
        assert g.qubit_id(3, 3, 1, 3) == 127

    def test_total_sites(self):
        assert build_chimera(4, 4, 4).num_sites == 128
        assert build_chimera(2, 3, 4).num_sites == 48

    def test_coords_roundtrip(self):
        g = build_chimera(3, 2, 4)
        for q in range(g.num_sites):
            assert g.qubit_id(*g.coords(q)) == q


class TestEdges:
    def test_cell_is_complete_bipartite(self):
        g = build_chimera(1, 1, 4)
        for a in range(4):
            for b in range(4, 8):
                assert g.has_edge(a, b)
        for a in range(4):
            for b in range(a + 1, 4):
                assert not g.has_edge(a, b)

    def test_intercell_links(self):
        g = build_chimera(2, 2, 4)
        # horizontal partition couples along rows, vertical along columns
        assert g.has_edge(g.qubit_id(0, 0, 1, 2), g.qubit_id(0, 1, 1, 2))
        assert g.has_edge(g.qubit_id(0, 0, 0, 1), g.qubit_id(1, 0, 0, 1))
        assert not g.has_edge(g.qubit_id(0, 0, 0, 1), g.qubit_id(0, 1, 0, 1))
        assert not g.has_edge(g.qubit_id(0, 0, 1, 2), g.qubit_id(1, 0, 1, 2))

    def test_edge_count(self):
        # per cell K^2; between cells K per adjacent pair
        g = build_chimera(4, 4, 4)
        expected = 16 * 16 + 4 * (4 * 3 + 4 * 3)
        assert g.num_edges() == expected

    def test_neighbors_symmetric(self):
        g = build_chimera(2, 2, 2)
        for q in range(g.num_sites):
            for p in g.neighbors(q):
                assert q in g.neighbors(p)


class TestMask:
    def test_masked_qubits_drop_out(self):
        g = build_chimera(2, 2, 4, frozenset({0, 9}))
        assert not g.is_usable(0)
        assert g.num_usable == 30
        assert 0 not in g.usable_qubits()
        assert not g.has_edge(0, 4)
        assert all(0 not in g.neighbors(q) for q in g.usable_qubits())

    def test_mask_outside_range_rejected(self):
        with pytest.raises(ValidationError):
            build_chimera(1, 1, 4, frozenset({99}))

    def test_dict_roundtrip(self):
        g = build_chimera(2, 2, 4, frozenset({3}))
        back = ChimeraGraph.from_dict(g.to_dict())
        assert back == g


class TestValidation:
    def test_bad_sizes_rejected(self):
        with pytest.raises(ValidationError):
            build_chimera(0, 1, 4)
        with pytest.raises(ValidationError):
            build_chimera(1, 1, 0)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
def test_edges_iterator_matches_has_edge(m, n, k):
    g = build_chimera(m, n, k)
    listed = set(g.edges())
    assert len(listed) == g.num_edges()
    for a, b in listed:
        assert a < b and g.has_edge(a, b)
