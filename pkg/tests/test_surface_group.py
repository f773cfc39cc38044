"""Tests for words, Dehn reduction, and enumeration in surface groups."""

import math

import numpy as np
import pytest

from qfcert.moebius import MoebiusMap
from qfcert.surface_group import (
    GroupPresentation,
    Word,
    WordError,
    cyclic_reduce,
    enumerate_words,
    free_reduce,
    rotations,
    shortlex_key,
    shortlex_min_rotation,
)


@pytest.fixture(scope="module")
def pres() -> GroupPresentation:
    return GroupPresentation(genus=2)


class TestWord:
    def test_free_reduction(self):
        w = free_reduce(Word((1, -1, 2)))
        assert w.letters == (2,)
        assert free_reduce(Word((1, 2, -2, -1))).letters == ()
        assert Word((1, 2)).is_reduced
        assert not Word((1, -1)).is_reduced

    def test_zero_letter_rejected(self):
        with pytest.raises(WordError):
            Word((1, 0, 2))

    def test_product_reduces(self):
        u = Word((1, 2))
        v = Word((-2, 3))
        assert (u * v).letters == (1, 3)
        assert (u * u.inverse()).letters == ()

    def test_inverse(self):
        w = Word((1, -2, 3))
        assert w.inverse().letters == (-3, 2, -1)
        assert (w * w.inverse()).letters == ()

    def test_pow(self):
        w = Word((1, 2))
        assert (w ** 3).letters == (1, 2, 1, 2, 1, 2)
        assert (w ** 0).letters == ()
        assert (w ** -2).letters == (-2, -1, -2, -1)

    def test_cyclic_reduce(self):
        assert cyclic_reduce(Word((-3, 1, 2, 3))).letters == (1, 2)
        assert cyclic_reduce(Word((1, 2, -1))).letters == (2,)
        assert cyclic_reduce(Word((1, 2))).letters == (1, 2)

    def test_rotations_and_min(self):
        w = Word((2, 1, 3))
        rots = [r.letters for r in rotations(w)]
        assert rots == [(2, 1, 3), (1, 3, 2), (3, 2, 1)]
        assert shortlex_min_rotation(w).letters == (1, 3, 2)

    def test_shortlex_order(self):
        # length dominates; then positives a1 < b1 < a2 < b2 before inverses
        ordered = [Word(t) for t in [(1,), (2,), (-1,), (1, 1), (1, -2)]]
        keys = [shortlex_key(w) for w in ordered]
        assert keys == sorted(keys)


class TestTextForm:
    def test_roundtrip(self, pres):
        w = pres.from_text("a1 B1 a2")
        assert w.letters == (1, -2, 3)
        assert pres.to_text(w) == "a1 B1 a2"

    def test_empty(self, pres):
        assert pres.to_text(Word(())) == ""
        assert pres.from_text("").letters == ()

    def test_bad_tokens(self, pres):
        for text in ["x1", "a3", "a0", "a1b1", "a"]:
            with pytest.raises(WordError):
                pres.from_text(text)

    def test_out_of_range_letters(self, pres):
        with pytest.raises(WordError):
            pres.to_text(Word((5,)))


class TestPresentation:
    def test_relator(self, pres):
        r = pres.relator()
        assert pres.to_text(r) == "a1 b1 A1 B1 a2 b2 A2 B2"
        assert len(r) == 8

    def test_genus_validation(self):
        with pytest.raises(WordError):
            GroupPresentation(genus=1)

    def test_small_cancellation_pieces(self, pres):
        # all 16 length-2 subwords of relator rotations are distinct, the
        # condition that makes greedy Dehn reduction a decision procedure
        pieces = set()
        for cyc in pres._relator_cycles:
            pieces.add(cyc[:2])
        assert len(pieces) == 16

    def test_relator_reduces_to_identity(self, pres):
        assert pres.is_identity(pres.relator())
        assert pres.is_identity(pres.relator().inverse())
        assert pres.is_identity(Word(()))

    def test_rotated_relator_is_identity(self, pres):
        r = pres.relator()
        for rot in rotations(r):
            assert pres.is_identity(rot)

    def test_conjugated_relator_products(self, pres):
        rng = np.random.default_rng(97)
        r = pres.relator()
        alphabet = pres.letters()
        for _ in range(20):
            picks = rng.integers(0, len(alphabet), size=6)
            u = Word(tuple(alphabet[i] for i in picks[:3]))
            v = Word(tuple(alphabet[i] for i in picks[3:]))
            w = (u * r * u.inverse()) * (v * r.inverse() * v.inverse())
            assert pres.is_identity(w)

    def test_generators_not_identity(self, pres):
        for x in pres.letters():
            assert not pres.is_identity(Word((x,)))

    def test_long_prefix_rewrites_to_short_complement(self, pres):
        # first 7 letters of the relator equal the inverse of the last letter
        r = pres.relator().letters
        prefix = Word(r[:7])
        assert pres.are_equal(prefix, Word((-r[7],)))
        reduced = pres.dehn_reduce(prefix)
        assert len(reduced) == 1

    def test_dehn_reduce_never_grows(self, pres):
        rng = np.random.default_rng(101)
        alphabet = pres.letters()
        for _ in range(50):
            n = int(rng.integers(1, 12))
            w = Word(tuple(alphabet[i] for i in rng.integers(0, 8, size=n)))
            red = pres.dehn_reduce(w)
            assert len(red) <= len(free_reduce(w))

    def test_are_equal_modulo_relator_insertion(self, pres):
        rng = np.random.default_rng(103)
        alphabet = pres.letters()
        r = pres.relator()
        for _ in range(20):
            n = int(rng.integers(2, 8))
            letters = tuple(alphabet[i] for i in rng.integers(0, 8, size=n))
            w = Word(letters)
            cut = int(rng.integers(0, n))
            stuffed = Word(letters[:cut]) * r * Word(letters[cut:])
            assert pres.are_equal(w, stuffed)
            assert not pres.are_equal(w, w * Word((1,)))


class TestEnumeration:
    def test_reduced_counts(self, pres):
        words = list(enumerate_words(pres, 3, mode="reduced"))
        by_len = {}
        for w in words:
            by_len.setdefault(len(w), []).append(w)
        assert len(by_len[1]) == 8
        assert len(by_len[2]) == 8 * 7
        assert len(by_len[3]) == 8 * 7 * 7
        assert all(w.is_reduced for w in words)

    def test_reduced_order(self, pres):
        words = list(enumerate_words(pres, 2, mode="reduced"))
        texts = [pres.to_text(w) for w in words[:10]]
        assert texts == ["a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2", "a1 a1", "a1 b1"]
        keys = [shortlex_key(w) for w in words]
        assert keys == sorted(keys)

    def test_conjugacy_rotation_classes(self, pres):
        # length 1: all 8 letters; length 2: 8 squares + 24 mixed classes
        reps = list(enumerate_words(pres, 2, mode="conjugacy"))
        assert len([w for w in reps if len(w) == 1]) == 8
        assert len([w for w in reps if len(w) == 2]) == 32
        for w in reps:
            assert cyclic_reduce(w).letters == w.letters
            assert shortlex_min_rotation(w).letters == w.letters

    def test_conjugacy_with_matrix_filter(self, pres):
        # a faithful-looking random representation: matrix dedup must keep
        # rotation classes apart (no false merges)
        rng = np.random.default_rng(107)
        gens = {}
        for x in (1, 2, 3, 4):
            vals = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            m = MoebiusMap(vals[0, 0] + 3, vals[0, 1], vals[1, 0], vals[1, 1] + 3)
            gens[x] = m
            gens[-x] = m.inverse()

        def evaluate(w: Word) -> MoebiusMap:
            out = MoebiusMap.identity()
            for x in w.letters:
                out = out @ gens[x]
            return out

        plain = [w.letters for w in enumerate_words(pres, 2, mode="conjugacy")]
        filtered = [
            w.letters for w in enumerate_words(pres, 2, mode="conjugacy", evaluate=evaluate)
        ]
        assert plain == filtered

    def test_unknown_mode(self, pres):
        with pytest.raises(WordError):
            list(enumerate_words(pres, 2, mode="woof"))
