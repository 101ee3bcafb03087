import json
import threading

import numpy as np
import pytest

from treegroups.groups import egs, f_subgroup, generator, ggs, parse_word, word_to_aut
from treegroups.quotient import (
    CACHE_ENV,
    DegreeError,
    PermGroup,
    SubgroupHandle,
    ch_subgroup,
    derived_subgroup,
    enumerate_closure,
    family_derived,
    family_lower_central,
    h_image,
    hn_image_membership,
    identity_perm,
    is_identity_perm,
    labels_to_perm,
    level_rep,
    lower_central,
    normal_closure,
    perm_comm,
    perm_inv,
    perm_labels,
    perm_mul,
    perm_pow,
    place_perm,
    quotient_group,
    restrict,
    rn_image_membership,
    section_perm,
    stab_image,
    tn_image_membership,
)
from treegroups.tree import DepthCapError, compose, identity, level_offset, level_vertices, rist_place

GS = egs(3, (1, 2))
GGS3 = ggs(3, (1, 2))
GGS5 = ggs(5, (1, 2, 3, 4))


def random_wreath_perm(rng, p, n):
    labels = rng.integers(0, p, size=level_offset(p, n))
    return labels_to_perm(labels, p, n)


def brute_derived(elements):
    """Subgroup generated by all commutators, by closure over the commutator set."""
    els = [np.array(e) for e in elements]
    comms = {tuple(perm_comm(x, y)) for x in els for y in els}
    gens = [np.array(c) for c in comms if not is_identity_perm(np.array(c))]
    return enumerate_closure(gens) if gens else {tuple(range(len(els[0])))}


class TestPermutations:
    def test_level_rep_examples(self):
        assert level_rep(generator(GGS3, "a"), 1).tolist() == [1, 2, 0]
        assert level_rep(generator(GGS3, "b"), 1).tolist() == [0, 1, 2]
        assert is_identity_perm(level_rep(identity(3), 3))

    def test_level_rep_errors(self):
        with pytest.raises(ValueError):
            level_rep(generator(GGS3, "a"), 0)
        with pytest.raises(DepthCapError):
            level_rep(generator(GGS3, "a"), 13)

    def test_labels_roundtrip(self, rng):
        for _ in range(20):
            labels = rng.integers(0, 3, size=level_offset(3, 4))
            assert perm_labels(labels_to_perm(labels, 3, 4), 3).tolist() == labels.tolist()

    def test_products(self, rng):
        x = random_wreath_perm(rng, 3, 3)
        assert perm_mul(x, perm_inv(x)).tolist() == list(range(27))
        assert perm_pow(x, 9).tolist() == perm_mul(perm_pow(x, 4), perm_pow(x, 5)).tolist()
        assert perm_pow(x, -2).tolist() == perm_inv(perm_mul(x, x)).tolist()
        g, h = generator(GS, "b"), generator(GS, "c")
        assert perm_mul(level_rep(g, 3), level_rep(h, 3)).tolist() == level_rep(compose(g, h), 3).tolist()

    def test_restrict_and_sections(self, rng):
        g = word_to_aut(parse_word("[b,a]*c", GS))
        assert restrict(level_rep(g, 4), 3).tolist() == level_rep(g, 3).tolist()
        x = level_rep(word_to_aut(parse_word("[b,a]", GS)), 3)
        ba = word_to_aut(parse_word("[b,a]", GS))
        assert section_perm(x, (1,), 3).tolist() == level_rep(ba.section((1,)), 2).tolist()
        d = level_rep(generator(GS, "b"), 2)
        placed = place_perm(d, (2,), 3)
        assert placed.tolist() == level_rep(rist_place(generator(GS, "b"), (2,)), 3).tolist()
        with pytest.raises(ValueError):
            section_perm(level_rep(generator(GS, "a"), 2), (0,), 3)


class TestOrders:
    # log_p orders of the level-n quotients, and of their commutator subgroups
    FROZEN = {
        ("GGS", 3): ([1, 3, 7, 19, 55], [0, 1, 5, 17, 53]),
        ("EGS", 3): ([1, 3, 7, 19, 55], [0, 1, 5, 17, 53]),
        ("F", 3): ([1, 3, 7, 19, 55], [0, 1, 5, 17, 53]),
        ("EGS", 5): ([1, 3, 11], [0, 1, 9]),
        ("GGS", 5): ([1, 3, 11], [0, 1, 9]),
    }

    @pytest.mark.parametrize("key", sorted(FROZEN))
    def test_frozen_orders(self, key):
        kind, p = key
        vec = (1, 2) if p == 3 else (1, 2, 3, 4)
        from treegroups.groups import GroupFamily, AccompanyingVector

        fam = GroupFamily(kind, AccompanyingVector(p, vec))
        orders, derived = self.FROZEN[key]
        for n, (lo, ld) in enumerate(zip(orders, derived), start=1):
            Q = quotient_group(fam, n)
            assert Q.log_order() == lo
            assert family_derived(fam, n).log_order() == ld
            assert lo <= level_offset(p, n)

    def test_gupta_sidki_small(self):
        assert quotient_group(GGS3, 1).order() == 3
        assert quotient_group(GGS3, 2).order() == 27

    @pytest.mark.parametrize("fam,n", [(GGS3, 1), (GGS3, 2), (GGS3, 3), (GS, 3), (f_subgroup(3, (1, 2)), 3),
                                       (GGS5, 2), (egs(5, (1, 2, 3, 4)), 2), (egs(3, (1, 1)), 3)])
    def test_bfs_oracle(self, fam, n):
        Q = quotient_group(fam, n)
        assert len(enumerate_closure(Q.generators)) == Q.order()

    def test_membership_oracle(self, rng):
        Q = quotient_group(GGS3, 3)
        members = enumerate_closure(Q.generators)
        hits = 0
        for _ in range(300):
            x = random_wreath_perm(rng, 3, 3)
            inside = tuple(int(v) for v in x) in members
            hits += inside
            assert Q.contains(x) == inside
        assert 0 < hits < 300
        for m in list(members)[:200]:
            assert Q.contains(np.array(m))

    def test_c_image_in_gupta_sidki_level_two(self):
        # t_2 = b^a agrees with c modulo Stab(2), so c's level-2 image lies in the GGS quotient
        Q = quotient_group(GGS3, 2)
        c2 = level_rep(generator(GS, "c"), 2)
        assert tuple(int(v) for v in c2) in enumerate_closure(Q.generators)
        assert Q.contains(c2)

    def test_c_image_in_every_level(self):
        for n in range(2, 6):
            assert quotient_group(GGS3, n).contains(level_rep(generator(GS, "c"), n))

    def test_not_member(self):
        Q = quotient_group(GGS3, 3)
        x = level_rep(rist_place(generator(GS, "a"), (0,)), 3)
        assert not Q.contains(x)
        assert tuple(int(v) for v in x) not in enumerate_closure(Q.generators)

    def test_contains_and_cosets(self):
        Q = quotient_group(GGS3, 3)
        x = level_rep(word_to_aut(parse_word("[b,a]", GGS3)), 3)
        assert Q.contains(x)
        assert Q.coset_equal(x, x)
        with pytest.raises(DegreeError):
            Q.contains(np.arange(9))

    def test_power_of_p(self):
        for fam in [GGS3, GS, GGS5]:
            for n in range(1, 4):
                o = quotient_group(fam, n).order()
                while o % fam.p == 0:
                    o //= fam.p
                assert o == 1


class TestSubgroups:
    def test_derived_level_one_trivial(self):
        assert family_derived(GGS3, 1).is_trivial()

    def test_normal_closure_identity(self):
        Q = quotient_group(GGS3, 3)
        assert normal_closure(Q, [identity_perm(27)]).is_trivial()

    def test_derived_against_brute_force(self):
        for fam in [GGS3, GGS5, GS]:
            Q = quotient_group(fam, 2)
            els = enumerate_closure(Q.generators)
            assert len(brute_derived(els)) == family_derived(fam, 2).order()
        Q = quotient_group(GGS3, 3)
        D = derived_subgroup(Q)
        els = [np.array(e) for e in list(enumerate_closure(Q.generators))[:60]]
        for x in els:
            for y in els[:10]:
                assert D.contains(perm_comm(x, y))

    def test_egs_abelianization_index(self):
        # measured index p^2 at every level >= 2: c^-1 b is in the commutator image of every quotient
        for n in range(2, 6):
            Q = quotient_group(GS, n)
            D = family_derived(GS, n)
            assert Q.log_order() - D.log_order() == 2
            assert D.contains(level_rep(word_to_aut(parse_word("c^-1*b", GS)), n))

    def test_lower_central(self):
        Q = quotient_group(GGS3, 3)
        g1, g2, g3 = (lower_central(Q, k) for k in (1, 2, 3))
        assert g1.order() == Q.order()
        assert g2.order() == derived_subgroup(Q).order()
        assert g3.is_subgroup_of(g2) and g3.order() < g2.order()
        assert family_lower_central(GGS3, 3, 3).order() == g3.order()
        with pytest.raises(ValueError):
            lower_central(Q, 0)

    def test_stab_images(self):
        for n in range(1, 5):
            assert stab_image(GGS3, n, n).is_trivial()
            assert stab_image(GGS3, 0, n).order() == quotient_group(GGS3, n).order()
        assert stab_image(GGS3, 2, 3).is_subgroup_of(family_derived(GGS3, 3))
        with pytest.raises(ValueError):
            stab_image(GGS3, 4, 3)

    def test_stab_image_is_pointwise_stabilizer(self):
        Q = quotient_group(GS, 3)
        S = stab_image(GS, 1, 3)
        els = enumerate_closure(Q.generators)
        fixing = [e for e in els if all(e[i] // 9 == i // 9 for i in range(27))]
        assert len(fixing) == S.order()

    def test_tower(self):
        for fam in [GGS3, GS]:
            for n in range(2, 5):
                R = quotient_group(fam, n).restricted()
                P = quotient_group(fam, n - 1)
                assert R.is_subgroup_of(P) and P.is_subgroup_of(R)

    def test_recurrence(self):
        for fam in [GGS3, GS]:
            for n in range(2, 5):
                S = stab_image(fam, 1, n)
                for j in range(3):
                    sec = PermGroup(3, n - 1, [section_perm(s, (j,), 3) for s in S.strong_generators])
                    assert sec.order() == quotient_group(fam, n - 1).order()


class TestDistinguished:
    def test_hn_examples(self):
        assert hn_image_membership(GS, 1, 3, identity_perm(27))
        ba = word_to_aut(parse_word("[b,a]", GS))
        for v in level_vertices(3, 1):
            assert hn_image_membership(GS, 1, 3, level_rep(rist_place(ba, v), 3))
        cb = level_rep(word_to_aut(parse_word("c^-1*b", GS)), 3)
        assert not hn_image_membership(GS, 1, 3, cb)
        assert not hn_image_membership(GS, 2, 3, cb)
        with pytest.raises(ValueError):
            hn_image_membership(GS, 3, 3, cb)
        with pytest.raises(DegreeError):
            hn_image_membership(GS, 1, 3, identity_perm(9))

    def test_hn_matches_h_image(self, rng):
        H = h_image(GS, 1, 3)
        Q = quotient_group(GS, 3)
        for _ in range(100):
            x = Q.random_element(rng)
            assert hn_image_membership(GS, 1, 3, x) == H.contains(x)

    def test_hn_subgroup(self, rng):
        H = h_image(GS, 1, 4)
        for _ in range(30):
            x, y = H.random_element(rng), H.random_element(rng)
            assert hn_image_membership(GS, 1, 4, perm_mul(x, y))
            assert hn_image_membership(GS, 1, 4, perm_inv(x))

    def test_tn_rn(self):
        ba = word_to_aut(parse_word("[b,a]", GGS3))
        assert tn_image_membership(GGS3, 0, 3, level_rep(ba, 3))
        assert not tn_image_membership(GGS3, 1, 3, level_rep(ba, 3))
        assert tn_image_membership(GGS3, 1, 3, level_rep(rist_place(ba, (1,)), 3))
        ca = word_to_aut(parse_word("[c,a]", GS))
        assert rn_image_membership(GS, 0, 3, level_rep(ca, 3))
        assert rn_image_membership(GS, 1, 3, level_rep(rist_place(ca, (2,)), 3))

    def test_ch(self):
        # log_p orders of the CH_n images at levels m = n+1, ..., 5
        frozen = {0: [0, 1, 1, 2, 2], 1: [0, 3, 3, 6], 2: [0, 9, 9]}
        for n, logs in frozen.items():
            assert [ch_subgroup(GS, n, m).log_order() for m in range(n + 1, 6)] == logs
        G = ch_subgroup(GS, 1, 4)
        for x in G.generators:
            for y in G.generators:
                assert is_identity_perm(perm_comm(x, y))

    def test_handles(self):
        assert SubgroupHandle(GS, "full", 3).resolve().order() == quotient_group(GS, 3).order()
        assert SubgroupHandle(GS, "stab", 3, 2).resolve().order() == stab_image(GS, 2, 3).order()
        assert SubgroupHandle(GS, "H", 3, 1).contains(identity_perm(27))
        assert SubgroupHandle(GS, "gamma", 3, 3).resolve().order() == family_lower_central(GS, 3, 3).order()
        with pytest.raises(ValueError):
            SubgroupHandle(GS, "nonsense", 3).resolve()


class TestCache:
    def test_disk_roundtrip(self, tmp_path, monkeypatch):
        monkeypatch.setenv(CACHE_ENV, str(tmp_path))
        quotient_group.cache_clear()
        try:
            Q = quotient_group(GS, 4)
            files = list(tmp_path.glob("egs-p3-n4-full-*.json"))
            assert len(files) == 1
            rec = json.loads(files[0].read_text())
            assert rec["version"] == 1 and rec["degree"] == 81 and rec["base"] == Q.base
            quotient_group.cache_clear()
            Q2 = quotient_group(GS, 4)
            assert [s.tolist() for s in Q2.strong_generators] == [s.tolist() for s in Q.strong_generators]
            files[0].write_text("{broken")
            quotient_group.cache_clear()
            assert quotient_group(GS, 4).order() == Q.order()
        finally:
            quotient_group.cache_clear()

    def test_record_roundtrip(self):
        Q = quotient_group(GGS3, 3)
        R = PermGroup.from_record(json.loads(json.dumps(Q.to_record())))
        assert R.order() == Q.order() and R.base == Q.base
        rec = Q.to_record()
        rec["version"] = 99
        with pytest.raises(ValueError):
            PermGroup.from_record(rec)

    def test_concurrent_construction(self):
        fams = [egs(3, (2, 1)), ggs(3, (2, 1)), egs(5, (4, 3, 2, 1))]
        out = {}

        def work(f):
            out[f] = PermGroup(f.p, 3, [level_rep(generator(f, g), 3) for g in f.generator_names]).log_order()

        threads = [threading.Thread(target=work, args=(f,)) for f in fams]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert out == {f: quotient_group(f, 3).log_order() for f in fams}
