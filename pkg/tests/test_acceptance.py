"""One test group per acceptance criterion, each with its time budget.

The terminal summary (see conftest.py) prints one pass/fail line per criterion.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from treegroups.gfp import circulant_from_alpha, kernel_basis
from treegroups.groups import (
    GroupWord,
    abelianization,
    conjugator_C,
    egs,
    generator,
    ggs,
    parse_word,
    word_to_aut,
)
from treegroups.kernel import (
    canonical_element,
    cb_child_word,
    cb_word,
    check_summation,
    commute_to_depth,
    extend_assignment,
    path_sum,
    power_in_hn,
    quotient_separates,
    random_assignment,
    separates,
    t_element,
    theta,
)
from treegroups.quotient import (
    derived_subgroup,
    enumerate_closure,
    family_derived,
    level_rep,
    lower_central,
    perm_mul,
    place_perm,
    quotient_group,
    restrict,
    stab_image,
)
from treegroups.tree import (
    compose,
    conjugate,
    invert,
    is_level_trivial,
    level_vertices,
    portrait_equal,
    rist_place,
)
from treegroups.verify import (
    PASS,
    check_gamma3_inclusion,
    check_no_congruence,
    check_stab2_in_derived,
    random_stabilizer_words,
    run_suite,
    suite_json,
)

GS = egs(3, (1, 2))


@contextmanager
def budget(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def circulant_rows(p, alpha):
    """Independent construction: row i is the first row (0, alpha_1, ..., alpha_{p-1}) shifted right by i."""
    first = [0] + list(alpha)
    return np.array([[first[(j - i) % p] for j in range(p)] for i in range(p)])


def random_periodic(p, rng):
    while True:
        head = [int(x) for x in rng.integers(0, p, size=p - 2)]
        alpha = head + [(-sum(head)) % p]
        if any(alpha):
            return tuple(alpha)


# 1 -------------------------------------------------------------------------

def test_criterion_01_kernel_coordinate_sum():
    rng = np.random.default_rng(1)
    with budget(5):
        for p in (3, 5, 7):
            for _ in range(200):
                alpha = random_periodic(p, rng)
                M = circulant_rows(p, alpha)
                basis = kernel_basis(circulant_from_alpha((p, alpha)))
                assert basis, "a periodic vector gives a singular circulant"
                for v in basis:
                    v = np.array(list(v))
                    assert not (M @ v % p).any()
                    assert int(v.sum()) % p == 0


# 2 -------------------------------------------------------------------------

def test_criterion_02_stab2_in_derived():
    with budget(30):
        for p, alpha in [(3, (1, 2)), (5, (1, 2, 3, 4))]:
            fam = ggs(p, alpha)
            assert stab_image(fam, 2, 3).is_subgroup_of(family_derived(fam, 3))
            assert check_stab2_in_derived(p, alpha, 3).verdict == PASS
        fam = ggs(3, (1, 2))
        words = random_stabilizer_words(fam, 2, 500, np.random.default_rng(2))
        assert len(words) == 500
        for w in words:
            assert is_level_trivial(word_to_aut(w), 2)
            e = abelianization(w)
            assert e.a % 3 == 0 and e.b % 3 == 0


# 3 -------------------------------------------------------------------------

def test_criterion_03_gamma3_and_derived_inclusions():
    with budget(60):
        for fam, target in [(ggs(3, (1, 2)), "gamma3"), (GS, "derived")]:
            Q = quotient_group(fam, 3)
            T = lower_central(Q, 3) if target == "gamma3" else derived_subgroup(Q)
            D = family_derived(fam, 2)
            assert D.strong_generators
            for d in D.strong_generators:
                for v in level_vertices(3, 1):
                    assert T.contains(place_perm(d, v, 3))
        assert check_gamma3_inclusion(3, (1, 2), 3, "GGS").verdict == PASS
        assert check_gamma3_inclusion(3, (1, 2), 3, "EGS").verdict == PASS


# 4 -------------------------------------------------------------------------

def test_criterion_04_no_congruence_witness():
    b, c, a = (generator(GS, g) for g in "bca")
    with budget(120):
        assert portrait_equal(t_element(GS, 2), conjugate(b, a), 8)
        for n in range(1, 5):
            m = n + 1
            t = t_element(GS, n)
            assert is_level_trivial(compose(invert(c), t), n)
            x = level_rep(t, m)
            assert quotient_group(GS, m).contains(x)
            assert family_derived(GS, m).coset_equal(x, level_rep(b, m))
            assert check_no_congruence(3, (1, 2), n, m).verdict == PASS


# 5 -------------------------------------------------------------------------

def test_criterion_05_quotient_tower():
    fam = ggs(3, (1, 2))
    rng = np.random.default_rng(5)
    with budget(60):
        assert quotient_group(fam, 1).order() == 3
        assert len(enumerate_closure(quotient_group(fam, 1).generators)) == 3
        assert quotient_group(fam, 2).order() == 27
        assert len(enumerate_closure(quotient_group(fam, 2).generators)) == 27
        for f in (fam, GS):
            for n in range(2, 5):
                Q, P = quotient_group(f, n), quotient_group(f, n - 1)
                R = Q.restricted()
                assert R.is_subgroup_of(P) and P.is_subgroup_of(R)
                for _ in range(20):
                    x, y = Q.random_element(rng), Q.random_element(rng)
                    assert (restrict(perm_mul(x, y), 3) == perm_mul(restrict(x, 3), restrict(y, 3))).all()
                    assert P.contains(restrict(x, 3))


# 6 -------------------------------------------------------------------------

def _kernel_samples(rng, count):
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 4))
        out.append(random_assignment(3, n, rng))
    return out


def test_criterion_06_kernel_structure():
    rng = np.random.default_rng(6)
    with budget(120):
        for asg in _kernel_samples(rng, 100):
            ext = extend_assignment(asg, rng)
            assert check_summation(ext)
            assert ext.restrict(asg.depth) == asg
            assert theta(ext.leaf_vector()) == asg.leaf_vector()
        shallow = [random_assignment(3, int(rng.integers(1, 3)), rng) for _ in range(12)]
        elements = [(a.depth, canonical_element(GS, a)) for a in shallow]
        for a, (n, g) in zip(shallow, elements):
            assert is_level_trivial(g, n)
            assert power_in_hn(GS, a)
        for n, g in elements:
            for m, h in elements:
                if n == m:
                    assert commute_to_depth(g, h, 6)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            x, y = random_assignment(3, n, rng), random_assignment(3, n, rng)
            assert separates(GS, x, y, n) == (x.leaf_vector() != y.leaf_vector())


@pytest.mark.xfail(strict=True, reason="(c^-1 b)^3 moves a vertex at depth 4; only g^p in H_n holds")
def test_criterion_06_literal_exponent_p_portrait():
    rng = np.random.default_rng(61)
    for _ in range(20):
        a = random_assignment(3, int(rng.integers(1, 3)), rng)
        g = canonical_element(GS, a)
        assert (g ** 3).portrait(6).is_trivial()


@pytest.mark.xfail(strict=True, reason="c^-1 b lies in every finite commutator image, so level-m H_n tests never separate")
def test_criterion_06_literal_quotient_separation():
    rng = np.random.default_rng(62)
    pairs = 0
    while pairs < 50:
        n = int(rng.integers(1, 3))
        x, y = random_assignment(3, n, rng), random_assignment(3, n, rng)
        if x.leaf_vector() == y.leaf_vector():
            continue
        pairs += 1
        assert any(quotient_separates(GS, x, y, n, m) for m in range(n + 1, min(n + 2, 4) + 1))


# 7 -------------------------------------------------------------------------

def test_criterion_07_base_of_convergence_identity():
    with budget(10):
        for fam in (GS, egs(5, (1, 2, 3, 4))):
            cb = word_to_aut(cb_word(fam))
            a = generator(fam, "a")
            lhs_word = GroupWord((("c", -1),), fam) * parse_word("b", fam).conjugate(parse_word("a", fam))
            for i in range(fam.p):
                target = conjugate(word_to_aut(lhs_word), a ** i)
                assert portrait_equal(rist_place(cb, (i,)), target, 6)
                assert portrait_equal(target, word_to_aut(cb_child_word(fam, i)), 6)


# 8 -------------------------------------------------------------------------

def test_criterion_08_conjugacy_by_C():
    with budget(10):
        for fam in (GS, egs(5, (1, 2, 3, 4))):
            C = conjugator_C(fam)
            a, b, c = (generator(fam, g) for g in "abc")
            assert portrait_equal(conjugate(b, C), c, 5)
            assert portrait_equal(conjugate(a, C), a, 5)


# 9 -------------------------------------------------------------------------

def test_criterion_09_path_sum_density():
    rng = np.random.default_rng(9)
    with budget(5):
        for _ in range(100):
            z = random_assignment(3, 2, rng)
            assert path_sum(z) == z
            # direct arithmetic: add weight z_v at every vertex on the path from the root to leaf v
            acc = {(): 0}
            for v in level_vertices(3, 2):
                for k in range(3):
                    acc[v[:k]] = acc.get(v[:k], 0) + z.index(v)
            for u, total in acc.items():
                assert total % 3 == z.index(u)


# 10 ------------------------------------------------------------------------

def test_criterion_10_determinism():
    first = suite_json(run_suite(seed=12345))
    second = suite_json(run_suite(seed=12345))
    assert first == second
    assert '"seed":12345' in first
