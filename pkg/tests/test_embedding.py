"""Chain embedding onto the hardware graph."""

from fractions import Fraction

import pytest

from spinfold import (Embedding, EmbeddingFailure, IsingModel, ValidationError,
                      apply_embedding, build_chimera, embed,
                      exhaustive_ground_states, quadratize, select_gamma,
                      to_ising, unembed, validate_embedding,
                      verify_embedding)
from spinfold.fixtures import get_fixture


def exp6_logical():
    fx = get_fixture("exp6")
    red = quadratize(fx.polynomials["sanitized"], fx.plan)
    return to_ising(red.polynomial), fx


def tiny_model():
    return IsingModel(2, (Fraction(1, 2), Fraction(-1)),
                      {(1, 2): Fraction(1)})


class TestValidate:
    def test_connected_chains_pass(self):
        g = build_chimera(1, 1, 4)
        m = tiny_model()
        emb = Embedding(chains={1: (0, 4), 2: (1,)},
                        edge_assign={(1, 2): (1, 4)},
                        gamma={1: Fraction(1), 2: Fraction(1)})
        assert validate_embedding(emb, g, m) == []

    def test_overlapping_chains_flagged(self):
        g = build_chimera(1, 1, 4)
        m = tiny_model()
        emb = Embedding(chains={1: (0, 4), 2: (0,)},
                        edge_assign={(1, 2): (0, 4)},
                        gamma={1: Fraction(1), 2: Fraction(1)})
        assert any("shared" in v for v in validate_embedding(emb, g, m))

    def test_disconnected_chain_flagged(self):
        g = build_chimera(2, 1, 4)
        m = tiny_model()
        emb = Embedding(chains={1: (0, 36), 2: (4,)},
                        edge_assign={(1, 2): (0, 4)},
                        gamma={1: Fraction(1), 2: Fraction(1)})
        assert any("connect" in v for v in validate_embedding(emb, g, m))

    def test_missing_coupler_flagged(self):
        g = build_chimera(1, 1, 4)
        m = tiny_model()
        emb = Embedding(chains={1: (0,), 2: (1,)},
                        edge_assign={},
                        gamma={1: Fraction(1), 2: Fraction(1)})
        assert validate_embedding(emb, g, m)


class TestEmbedSearch:
    def test_finds_valid_embedding_for_dense_small_model(self):
        m = to_ising(
            quadratize(get_fixture("exp3").polynomials["sanitized"],
                       get_fixture("exp3").plan).polynomial)
        g = build_chimera(4, 4, 4)
        emb = embed(m, g)
        assert validate_embedding(emb, g, m) == []

    def test_respects_mask(self):
        m = tiny_model()
        g = build_chimera(1, 1, 4, frozenset({0, 1, 2}))
        emb = embed(m, g)
        used = {q for c in emb.chains.values() for q in c}
        assert used.isdisjoint({0, 1, 2})

    def test_deterministic_for_fixed_seed(self):
        m, _ = exp6_logical()
        g = build_chimera(4, 4, 4)
        assert embed(m, g, seed=3).chains == embed(m, g, seed=3).chains

    def test_too_many_variables_fails_cleanly(self):
        h = tuple(Fraction(1) for _ in range(9))
        J = {(i, j): Fraction(1, 9) for i in range(1, 10)
             for j in range(i + 1, 10)}
        m = IsingModel(9, h, J)
        g = build_chimera(1, 1, 4)
        with pytest.raises(EmbeddingFailure):
            embed(m, g, max_attempts=4)


class TestApplyReference:
    def test_reproduces_published_eight_qubit_model(self):
        m, fx = exp6_logical()
        g = build_chimera(4, 4, 4)
        em = apply_embedding(m, fx.embedding, g)
        assert dict(em.h) == dict(fx.reference["embedded_h"])
        assert dict(em.J) == dict(fx.reference["embedded_J"])
        # both duplicated variables get a ferromagnetic chain bond of -1
        assert em.J[(1, 4)] == -1 and em.J[(2, 6)] == -1

    def test_chain_penalty_constant_absorbed_into_offset(self):
        m, fx = exp6_logical()
        g = build_chimera(4, 4, 4)
        em = apply_embedding(m, fx.embedding, g)
        # offset grows by scale*gamma per spanning-tree edge (two chains)
        assert em.offset == m.offset + m.scale * 2

    def test_split_distribution_shares_fields(self):
        m, fx = exp6_logical()
        g = build_chimera(4, 4, 4)
        em = apply_embedding(m, fx.embedding, g, distribution="split")
        chain2 = fx.embedding.chains[2]
        per = {q: em.h.get(q, Fraction(0)) for q in chain2}
        vals = list(per.values())
        assert vals[0] == vals[1]


class TestSpectrumPreservation:
    def test_consistent_minimizers_map_onto_logical_minimizers(self):
        # every fixture whose embedded model stays within 12 qubits
        g = build_chimera(4, 4, 4)
        for name in ("exp3", "exp5", "exp6"):
            fx = get_fixture(name)
            m = to_ising(quadratize(fx.polynomials["sanitized"],
                                    fx.plan).polynomial)
            emb = fx.embedding or embed(m, g)
            em = apply_embedding(m, emb, g)
            if len(em.qubits) > 12:
                continue
            phys_model, order = em.to_ising_model()
            phys = exhaustive_ground_states(phys_model)
            logical = exhaustive_ground_states(m)
            logical_grounds = {s.spins for s in logical.ground_states()}
            seen = set()
            for s in phys.ground_states():
                decoded, breaks = unembed(dict(zip(order, s.spins)), emb)
                assert breaks == 0
                spins = tuple(decoded[v] for v in sorted(decoded))
                assert s.energy == logical.best().energy
                seen.add(spins)
            assert seen == logical_grounds, name

    def test_verifier_agrees(self):
        m, fx = exp6_logical()
        g = build_chimera(4, 4, 4)
        report = verify_embedding(m, fx.embedding, g)
        assert report.ok
        assert report.spectrum_checked and report.spectrum_matches


class TestGamma:
    def test_reference_chains_need_unit_gamma(self):
        m, fx = exp6_logical()
        g = build_chimera(4, 4, 4)
        gam = select_gamma(m, fx.embedding.chains, fx.embedding.edge_assign, g)
        assert gam == Fraction(1)

    def test_single_qubit_chains_get_no_penalty(self):
        # embed() only records gamma for chains that actually duplicate a
        # variable, so an all-singleton embedding carries none
        m = tiny_model()
        g = build_chimera(1, 1, 4)
        emb = embed(m, g)
        assert all(len(c) == 1 for c in emb.chains.values())
        assert emb.gamma == {}


class TestUnembed:
    def test_majority_vote(self):
        emb = Embedding(chains={1: (0, 1, 2), 2: (3,)},
                        edge_assign={(1, 2): (0, 3)},
                        gamma={1: Fraction(1), 2: Fraction(0)})
        sample = {0: 1, 1: 1, 2: -1, 3: -1}
        logical, breaks = unembed(sample, emb)
        assert logical == {1: 1, 2: -1}
        assert breaks == 1

    def test_discard_policy_drops_broken(self):
        emb = Embedding(chains={1: (0, 1)},
                        edge_assign={},
                        gamma={1: Fraction(1)})
        logical, breaks = unembed({0: 1, 1: -1}, emb, policy="discard")
        assert logical is None and breaks == 1

    def test_ties_resolve_up(self):
        emb = Embedding(chains={1: (0, 1)},
                        edge_assign={},
                        gamma={1: Fraction(1)})
        logical, _ = unembed({0: 1, 1: -1}, emb)
        assert logical[1] == 1

    def test_bad_policy_rejected(self):
        emb = Embedding(chains={1: (0,)}, edge_assign={},
                        gamma={1: Fraction(0)})
        with pytest.raises(ValidationError):
            unembed({0: 1}, emb, policy="best")


class TestEmbeddingSerialization:
    def test_dict_roundtrip(self):
        _, fx = exp6_logical()
        back = Embedding.from_dict(fx.embedding.to_dict())
        assert back.chains == fx.embedding.chains
        assert back.edge_assign == fx.embedding.edge_assign
        assert back.gamma == fx.embedding.gamma
