import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treegroups.gfp import ParameterError, circulant_from_alpha
from treegroups.groups import (
    AccompanyingVector,
    GroupWord,
    PlacedWord,
    PreconditionError,
    WordSyntaxError,
    abelianization,
    commutator,
    conjugator_C,
    egs,
    f_subgroup,
    generator,
    ggs,
    level_sections,
    parse_word,
    random_word,
    recurrence_witness,
    section_word,
    syllable_length,
    word_action,
    word_section,
    word_to_aut,
)
from treegroups.tree import (
    compose,
    conjugate,
    cyclic,
    invert,
    is_level_trivial,
    portrait,
    portrait_equal,
    section_at,
)

GS = egs(3, (1, 2))
P5 = egs(5, (1, 2, 3, 4))
FAMILIES = [GS, ggs(3, (1, 2)), f_subgroup(3, (1, 2)), P5, ggs(5, (1, 2, 3, 4)), egs(5, (1, 4, 0, 0))]


def stab1_word(fam, rng, n=6):
    w = random_word(fam, n, rng)
    return w * GroupWord.gen(fam, "a", -abelianization(w).a)


class TestVectors:
    def test_predicates(self):
        assert AccompanyingVector(3, (1, 2)).is_periodic
        assert not AccompanyingVector(3, (1, 2)).is_symmetric
        assert not AccompanyingVector(3, (1, 1)).is_periodic
        assert AccompanyingVector(5, (1, 2, 2, 1)).is_symmetric

    def test_indexing(self):
        v = AccompanyingVector(5, (1, 2, 3, 4))
        assert [v[i] for i in range(6)] == [0, 1, 2, 3, 4, 0]

    def test_errors(self):
        with pytest.raises(ParameterError):
            AccompanyingVector(3, (1,))
        with pytest.raises(ParameterError):
            AccompanyingVector.parse(3, "1,x")
        with pytest.raises(ParameterError):
            ggs(3, (0, 0))

    def test_families(self):
        assert GS.generator_names == ("a", "b", "c")
        assert ggs(3, (1, 2)).generator_names == ("a", "b")
        assert f_subgroup(3, (1, 2)).generator_names == ("a", "c")


class TestGenerators:
    def test_b(self):
        b = generator(ggs(3, (1, 2)), "b")
        assert b.activity == 0
        assert portrait_equal(section_at(b, (0,)), cyclic(3, 1), 5)
        assert portrait_equal(section_at(b, (1,)), cyclic(3, 2), 5)
        assert portrait_equal(section_at(b, (2,)), b, 5)

    def test_c(self):
        c = generator(GS, "c")
        assert portrait_equal(section_at(c, (0,)), c, 5)
        assert portrait_equal(section_at(c, (1,)), cyclic(3, 1), 5)
        assert portrait_equal(section_at(c, (2,)), cyclic(3, 2), 5)

    def test_a(self):
        for fam in FAMILIES:
            a = generator(fam, "a")
            assert a.activity == 1
            assert portrait(section_at(a, (0,)), 3).is_trivial()

    def test_unknown_generator(self):
        with pytest.raises(ParameterError):
            generator(ggs(3, (1, 2)), "c")

    @pytest.mark.parametrize("fam", [GS, P5])
    def test_conjugator(self, fam):
        C = conjugator_C(fam)
        assert C.activity == 1
        for n in range(7 if fam.p == 3 else 5):
            assert portrait_equal(conjugate(generator(fam, "a"), C), generator(fam, "a"), n)
            assert portrait_equal(conjugate(generator(fam, "b"), C), generator(fam, "c"), n)

    def test_conjugator_requires_egs(self):
        with pytest.raises(PreconditionError):
            conjugator_C(ggs(3, (1, 2)))


class TestWords:
    def test_reduction(self):
        assert parse_word("a*a*a", GS).syllables == ()
        assert str(parse_word("b*b^2*c", GS)) == "c"
        assert str(parse_word("c^-1*b", GS)) == "c^2*b"

    def test_empty_word(self):
        assert portrait(word_to_aut(GroupWord.identity(GS)), 4).is_trivial()
        assert portrait(word_to_aut(parse_word("a*a*a", GS)), 4).is_trivial()

    def test_commutator(self):
        w = parse_word("[b,a]", GS)
        g = word_to_aut(w)
        assert is_level_trivial(g, 1)
        assert not is_level_trivial(g, 2)
        assert w == commutator(GroupWord.gen(GS, "b"), GroupWord.gen(GS, "a"))

    def test_parser(self):
        w = parse_word("[b,a]^2 * c^-1", GS)
        ba = commutator(GroupWord.gen(GS, "b"), GroupWord.gen(GS, "a"))
        assert w == ba * ba * GroupWord.gen(GS, "c", -1)
        assert parse_word("a b", GS) == parse_word("a*b", GS)
        assert parse_word("(a*b)^-1", GS) == parse_word("b^-1*a^-1", GS)
        assert parse_word("1", GS) == GroupWord.identity(GS)

    @pytest.mark.parametrize("text,pos", [("[b,a", 4), ("b^", 2), ("a*d", 2), ("a*)", 2), ("", 0)])
    def test_parse_errors(self, text, pos):
        with pytest.raises(WordSyntaxError) as exc:
            parse_word(text, GS)
        assert exc.value.position == pos

    def test_c_in_ggs_rejected(self):
        with pytest.raises(WordSyntaxError):
            parse_word("c", ggs(3, (1, 2)))
        with pytest.raises(ParameterError):
            GroupWord.gen(ggs(3, (1, 2)), "c")

    def test_abelianization_examples(self):
        assert abelianization(parse_word("a*b*a^2*b^2", GS)) == (0, 0, 0)
        assert abelianization(parse_word("c^-1*b", GS)) == (0, 1, 2)
        assert abelianization(parse_word("[b,a]", GS)) == (0, 0, 0)
        assert abelianization(parse_word("a*b", ggs(3, (1, 2)))).c == 0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_abelianization_homomorphism(self, seed):
        rng = np.random.default_rng(seed)
        fam = FAMILIES[seed % len(FAMILIES)]
        x, y = random_word(fam, 5, rng), random_word(fam, 5, rng)
        ex, ey, exy = abelianization(x), abelianization(y), abelianization(x * y)
        assert tuple((u + v) % fam.p for u, v in zip(ex, ey)) == tuple(exy)
        assert abelianization(commutator(x, y)).is_zero()
        assert tuple((-u) % fam.p for u in ex) == tuple(abelianization(x.inverse()))

    def test_syllable_length(self):
        assert syllable_length(parse_word("a", GS)) == 0
        assert syllable_length(parse_word("b*a", GS)) == 1
        assert syllable_length(parse_word("a*b*a*b", GS)) == 2


class TestSections:
    def test_b_last(self):
        assert word_section(GroupWord.gen(GS, "b"), 2) == GroupWord.gen(GS, "b")

    def test_c_inv_b(self):
        w = parse_word("c^-1*b", GS)
        assert [str(word_section(w, i)) for i in range(3)] == ["c^2*a", "a", "a*b"]

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            word_section(parse_word("a*b", GS), 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_sections_match_automorphisms(self, seed):
        rng = np.random.default_rng(seed)
        fam = FAMILIES[seed % len(FAMILIES)]
        w = random_word(fam, 6, rng)
        g = word_to_aut(w)
        for v in [(0,), (fam.p - 1,), (1, 0)]:
            assert portrait_equal(word_to_aut(section_word(w, v)), section_at(g, v), 4)
            assert word_action(w, v) == g.act(v)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_circulant_relation(self, seed):
        # d_a of the sections equals A_alpha applied to (d_b + d_c) of the sections
        rng = np.random.default_rng(seed)
        fam = [GS, P5, ggs(3, (1, 2)), egs(5, (1, 4, 0, 0)), egs(7, (1, 2, 3, 4, 5, 6))][seed % 5]
        p = fam.p
        w = stab1_word(fam, rng)
        secs = [abelianization(word_section(w, i)) for i in range(p)]
        bc = [(e.b + e.c) % p for e in secs]
        lhs = [e.a for e in secs]
        assert list(circulant_from_alpha(fam.vector).apply(bc)) == lhs

    def test_level_two_kernel_relation(self):
        # Stab(2) elements: b+c section exponents lie in the kernel of A_alpha, so their total vanishes
        rng = np.random.default_rng(5)
        for _ in range(30):
            w = stab1_word(GS, rng)
            if not is_level_trivial(word_to_aut(w), 2):
                continue
            secs = [abelianization(word_section(w, i)) for i in range(3)]
            assert all(e.a == 0 for e in secs)
            assert sum(e.b + e.c for e in secs) % 3 == 0

    @pytest.mark.parametrize("fam", [GS, P5, ggs(3, (1, 2)), f_subgroup(5, (1, 2, 3, 4)), egs(5, (0, 3, 0, 2))])
    def test_recurrence(self, fam):
        for g in fam.generator_names:
            for i in range(fam.p):
                w = recurrence_witness(fam, g, i)
                assert abelianization(w).a == 0
                assert word_section(w, i) == GroupWord.gen(fam, g)

    def test_level_sections_order(self):
        w = parse_word("c^-1*b", GS) * parse_word("c^-1*b", GS).conjugate(GroupWord.gen(GS, "a"))
        secs = level_sections(w, 1)
        assert [str(s) for s in secs] == [str(section_word(w, (i,))) for i in range(3)]


class TestPlacedWords:
    def test_placement(self):
        cb = parse_word("c^-1*b", GS)
        x = PlacedWord.at(cb, (1,))
        assert x.depth == 1
        assert [str(w) for w in x.words] == ["1", "c^2*b", "1"]
        g = x.to_automorphism()
        assert portrait_equal(section_at(g, (1,)), word_to_aut(cb), 5)

    def test_from_word(self):
        w = parse_word("[b,a]", GS)
        x = PlacedWord.from_word(w, 1)
        assert portrait_equal(x.to_automorphism(), word_to_aut(w), 5)
        with pytest.raises(PreconditionError):
            PlacedWord.from_word(parse_word("b", GS), 2)

    def test_algebra(self):
        cb = parse_word("c^-1*b", GS)
        x = PlacedWord.at(cb, (0, 2))
        y = PlacedWord.at(cb, (1, 1))
        assert portrait_equal((x * y).to_automorphism(), compose(x.to_automorphism(), y.to_automorphism()), 5)
        assert portrait_equal(x.inverse().to_automorphism(), invert(x.to_automorphism()), 5)
        assert [tuple(e) for e in (x * x.inverse()).abelianizations()] == [(0, 0, 0)] * 9
