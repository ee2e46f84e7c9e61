from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spinfold import (AminoSequence, CapacityError, ExternalPotential, Fold,
                      Instance, InteractionModel, ValidationError,
                      contact_pairs, decode_turns, encode_fold,
                      enumerate_landscape, fold_energy, is_self_avoiding,
                      sufficient_overlap_penalty, turn_template)
from spinfold.fixtures import get_fixture, psvkma_model


class TestTurnCodec:
    def test_directions(self):
        # 00 down, 01 right, 10 left, 11 up
        fold = decode_turns("01" + "11" + "10" + "00")
        assert fold.points == ((0, 0), (1, 0), (1, 1), (0, 1), (0, 0))

    def test_roundtrip(self):
        bits = "0100100001"
        assert encode_fold(decode_turns(bits)) == bits

    def test_odd_length_rejected(self):
        with pytest.raises(ValidationError):
            decode_turns("010")

    def test_non_binary_rejected(self):
        with pytest.raises(ValidationError):
            decode_turns("012x")

    def test_first_bond_must_point_right(self):
        with pytest.raises(ValidationError):
            decode_turns("0001")

    @given(st.integers(0, 4 ** 4 - 1))
    def test_roundtrip_random_four_bond_strings(self, v):
        bits = "01" + format(v, "08b")
        assert encode_fold(decode_turns(bits)) == bits


class TestSelfAvoidance:
    def test_straight_line_is_valid(self):
        assert is_self_avoiding(decode_turns("010101"))

    def test_immediate_backtrack_is_not(self):
        assert not is_self_avoiding(decode_turns("0110"))

    def test_closed_square_revisits_origin(self):
        assert not is_self_avoiding(decode_turns("01111000"))


class TestContactPairs:
    def test_small_cases(self):
        assert contact_pairs(4) == [(0, 3)]
        assert contact_pairs(6) == [(0, 3), (0, 5), (1, 4), (2, 5)]

    def test_parity_rule(self):
        # only odd separations >= 3 can ever touch on the square lattice
        for i, j in contact_pairs(12):
            assert (j - i) >= 3 and (j - i) % 2 == 1


class TestFoldEnergy:
    def test_hp_square_has_one_contact(self):
        seq = AminoSequence.parse("HPPH")
        fold = decode_turns("010010")  # right, down, left: ends adjacent
        e = fold_energy(fold, InteractionModel.hp(), seq)
        assert e == -1

    def test_overlap_penalty_applies_per_coincidence(self):
        seq = AminoSequence.parse("HPPH")
        fold = decode_turns("010110")  # right, right, left: 4th lands on 2nd
        e = fold_energy(fold, InteractionModel.hp(), seq,
                        overlap_penalty=Fraction(2))
        assert e == 1  # one overlap (+2) and the H contact is broken
        e5 = fold_energy(fold, InteractionModel.hp(), seq,
                         overlap_penalty=Fraction(5))
        assert e5 == 4

    def test_unknown_residue_rejected(self):
        seq = AminoSequence.parse("HX")
        with pytest.raises(ValidationError):
            fold_energy(decode_turns("01"), InteractionModel.hp(), seq)

    def test_mj_contact_values(self):
        m = psvkma_model()
        assert m.pair_energy("P", "K") == -1
        assert m.pair_energy("S", "M") == -3
        assert m.pair_energy("V", "A") == -4
        assert m.pair_energy("P", "A") == -2
        assert m.pair_energy("K", "M") == 0


class TestOverlapPenaltyRule:
    def test_one_plus_total_attraction(self):
        seq = AminoSequence.parse("PSVKMA")
        assert sufficient_overlap_penalty(psvkma_model(), seq) == 11

    def test_hpph(self):
        seq = AminoSequence.parse("HPPH")
        assert sufficient_overlap_penalty(InteractionModel.hp(), seq) == 2


class TestTemplates:
    def test_in_vacuo_pins_first_bond_and_third_bit(self):
        assert turn_template(6) == "010xxxxxxx"
        assert turn_template(4) == "010xxx"

    def test_external_field_keeps_third_bit_free(self):
        assert turn_template(4, in_vacuo=False) == "01xxxx"

    def test_two_residues(self):
        assert turn_template(2) == "01"


class TestInstance:
    def test_arity_counts_free_positions(self):
        inst = get_fixture("psvkma").instance
        assert inst.arity == 7

    def test_energy_of_matches_fold_energy(self):
        inst = get_fixture("exp5").instance
        for v in range(8):
            a = ((v >> 2) & 1, (v >> 1) & 1, v & 1)
            fold = inst.fold_for(a)
            assert inst.energy_of(a) == fold_energy(
                fold, inst.model, inst.sequence, inst.external,
                inst.overlap_penalty)

    def test_dict_roundtrip(self):
        inst = get_fixture("exp6").instance
        back = Instance.from_dict(inst.to_dict())
        assert back.sequence == inst.sequence
        assert back.fixed_bits == inst.fixed_bits
        assert back.overlap_penalty == inst.overlap_penalty
        assert back.compile() == inst.compile()

    def test_roundtrip_keeps_silent_alphabet(self):
        # P appears in no HP pair but must stay a legal residue
        inst = Instance(AminoSequence.parse("HP"), InteractionModel.hp())
        back = Instance.from_dict(inst.to_dict())
        assert back.compile().arity == 0

    def test_malformed_dict_rejected(self):
        with pytest.raises(ValidationError):
            Instance.from_dict({"sequence": "HP"})


class TestCompile:
    def test_hpph_polynomial_matches_printed_form(self):
        inst = get_fixture("exp5").instance
        got = inst.compile()
        want = get_fixture("exp5").polynomials["sanitized"]
        assert got.same_terms(want)

    def test_every_self_avoiding_assignment_agrees(self):
        fx = get_fixture("exp5")
        inst, poly = fx.instance, fx.polynomials["sanitized"]
        for v in range(8):
            a = ((v >> 2) & 1, (v >> 1) & 1, v & 1)
            assert poly.evaluate(a) == inst.energy_of(a)

    def test_overlapping_folds_priced_positive(self):
        inst = get_fixture("exp5").instance
        for row in enumerate_landscape(inst):
            if not row.valid:
                assert row.energy > 0


class TestLandscape:
    def test_sorted_by_energy(self):
        rows = enumerate_landscape(get_fixture("exp5").instance)
        energies = [r.energy for r in rows]
        assert energies == sorted(energies)

    def test_unique_hpph_ground_fold(self):
        rows = enumerate_landscape(get_fixture("exp5").instance)
        grounds = [r for r in rows if r.energy == -1]
        assert len(grounds) == 1
        assert grounds[0].valid

    def test_reduced_psvkma_counts(self):
        rows = enumerate_landscape(get_fixture("psvkma").instance)
        assert len(rows) == 128
        assert sum(1 for r in rows if r.valid) == 48
        assert rows[0].energy == -6

    def test_capacity_guard(self):
        seq = AminoSequence.parse("H" * 16)
        inst = Instance(seq, InteractionModel.hp())
        with pytest.raises(CapacityError):
            enumerate_landscape(inst)


class TestExternalPotential:
    def test_negative_weight_rejected(self):
        with pytest.raises(ValidationError):
            ExternalPotential.from_terms([(-1, [(1, 0)])])

    def test_evaluates_on_matching_bits(self):
        pot = ExternalPotential.from_terms([(5, [(1, 0), (2, 1)])])
        assert pot.evaluate("01") == 5
        assert pot.evaluate("11") == 0
