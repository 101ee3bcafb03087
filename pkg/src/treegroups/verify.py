"""Named finite-level checks with structured, reproducible reports.

Each ``check_*`` function returns a :class:`CheckReport`.  A check whose
hypotheses fail (a non-periodic or symmetric vector, say) reports
``not-asserted`` instead of running; one that hits a resource cap reports
``skipped``.  A ``fail`` verdict always carries ``evidence["counterexample"]``.
"""

from __future__ import annotations

import inspect
import json
import platform
import time
import zlib
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .gfp import circulant_from_alpha, coordinate_sum, kernel_basis
from .groups import (
    GroupFamily,
    GroupWord,
    abelianization,
    egs,
    generator,
    ggs,
    parse_word,
    random_word,
    word_to_aut,
    conjugator_C,
)
from .kernel import (
    IndexAssignment,
    LevelVector,
    assignment_from_leaves,
    canonical_element,
    cb_word,
    check_summation,
    commute_to_depth,
    count_extensions,
    extend_assignment,
    has_exponent_p,
    kernel_condition_holds,
    nesting_holds,
    nesting_holds_exact,
    path_assignment,
    path_sum,
    power_in_hn,
    quotient_separates,
    random_assignment,
    separates,
    t_element,
    theta,
)
from .quotient import (
    PermGroup,
    enumerate_closure,
    family_derived,
    family_lower_central,
    h_image,
    is_identity_perm,
    level_rep,
    normal_closure,
    perm_inv,
    perm_mul,
    place_perm,
    quotient_group,
    restrict,
    section_perm,
    stab_image,
)
from .tree import (
    DepthCapError,
    compose,
    conjugate,
    cyclic,
    invert,
    is_level_trivial,
    level_vertices,
    portrait_equal,
    rist_place,
)

PASS, FAIL, SKIPPED, NOT_ASSERTED = "pass", "fail", "skipped", "not-asserted"
VERDICTS = (PASS, FAIL, SKIPPED, NOT_ASSERTED)


def versions() -> dict:
    return {"treegroups": __version__, "numpy": np.__version__, "python": platform.python_version()}


@dataclass
class CheckReport:
    check: str
    params: dict
    verdict: str
    evidence: dict = field(default_factory=dict)
    seed: int | None = None
    duration_ms: float = 0.0
    versions: dict = field(default_factory=versions)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and "counterexample" not in self.evidence:
            raise ValueError("a failing report needs a counterexample")

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "check": self.check,
            "params": self.params,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "seed": self.seed,
            "versions": self.versions,
        }
        if timing:
            d["duration_ms"] = round(self.duration_ms, 3)
        return d

    def to_json(self, timing: bool = False) -> str:
        """Canonical JSON; timing is left out unless asked for."""
        return json.dumps(self.to_dict(timing), sort_keys=True, separators=(",", ":"), default=_jsonable)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(d["check"], d["params"], d["verdict"], d.get("evidence", {}), d.get("seed"),
                   d.get("duration_ms", 0.0), d.get("versions", versions()))


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _params(fam: GroupFamily, **extra) -> dict:
    d = {"family": fam.kind, "p": fam.p, "alpha": list(fam.vector.values)}
    d.update(extra)
    return d


_CHECK_NAMES = {
    "check_kernel_sum": "kernel-sum",
    "check_stab2_in_derived": "stab2-derived",
    "check_gamma3_inclusion": "gamma3-inclusion",
    "check_no_congruence": "no-congruence",
    "check_small_cong": "small-cong",
    "check_conjugate_groups": "conjugate-groups",
    "check_base_of_convergence": "base-of-convergence",
    "check_t_sequence": "t-sequence",
    "check_quotient_tower": "quotient-tower",
    "check_kernel_structure": "kernel-structure",
    "check_density_Bomega": "density",
    "check_section_probe": "section-probe",
}


def _timed(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    sig = inspect.signature(fn)

    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        try:
            rep = fn(*args, **kwargs)
        except DepthCapError as exc:
            bound = sig.bind(*args, **kwargs)
            bound.apply_defaults()
            params = {k: list(v) if isinstance(v, tuple) else v for k, v in bound.arguments.items()}
            rep = CheckReport(_CHECK_NAMES.get(fn.__name__, fn.__name__), params, SKIPPED, {"reason": str(exc)})
        rep.duration_ms = (time.perf_counter() - t0) * 1000
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


# linear algebra ------------------------------------------------------------

@_timed
def check_kernel_sum(p: int, alpha) -> CheckReport:
    """Kernel vectors of the circulant matrix of a periodic vector have zero coordinate sum."""
    fam = ggs(p, alpha)
    params = _params(fam)
    if not fam.vector.is_periodic:
        return CheckReport("kernel-sum", params, NOT_ASSERTED, {"reason": "vector is not periodic"})
    basis = kernel_basis(circulant_from_alpha(fam.vector))
    bad = [list(v) for v in basis if int(coordinate_sum(v)) != 0]
    ev = {"basis": [list(v) for v in basis], "dimension": len(basis)}
    if bad:
        ev["counterexample"] = {"vector": bad[0]}
    return CheckReport("kernel-sum", params, _verdict(not bad), ev)


# level-2 stabilizer and commutators ----------------------------------------

def level_word_table(fam: GroupFamily, n: int) -> dict[tuple[int, ...], GroupWord]:
    """A word for every element of the level-n quotient, found by breadth-first search."""
    gens = [(GroupWord.gen(fam, g), level_rep(generator(fam, g), n)) for g in fam.generator_names]
    start = tuple(range(fam.p**n))
    table = {start: GroupWord.identity(fam)}
    queue = deque([(start, GroupWord.identity(fam))])
    while queue:
        x, w = queue.popleft()
        xa = np.array(x)
        for gw, gp in gens:
            y = tuple(int(v) for v in gp[xa])
            if y not in table:
                table[y] = w * gw
                queue.append((y, w * gw))
    return table


def random_stabilizer_words(fam: GroupFamily, n: int, count: int, rng, syllables: int = 8) -> list[GroupWord]:
    """Random words in the level-n stabilizer: a random word times a word for the inverse of its image."""
    table = level_word_table(fam, n)
    out = []
    for _ in range(count):
        w = random_word(fam, int(rng.integers(1, syllables + 1)), rng)
        img = level_rep(word_to_aut(w), n)
        fix = table[tuple(int(v) for v in perm_inv(img))]
        out.append(w * fix)
    return out


@_timed
def check_stab2_in_derived(p: int, alpha, m: int = 3, words: int = 0, seed: int = 0) -> CheckReport:
    """Image of Stab(2) lies in the commutator image at level m; optionally sampled at word level."""
    fam = ggs(p, alpha)
    params = _params(fam, m=m, words=words)
    if not fam.vector.is_periodic:
        return CheckReport("stab2-derived", params, NOT_ASSERTED, {"reason": "vector is not periodic"}, seed)
    S = stab_image(fam, 2, m)
    D = family_derived(fam, m)
    outside = [s for s in S.strong_generators if not D.contains(s)]
    ev = {"stab2_log_order": S.log_order(), "derived_log_order": D.log_order(),
          "quotient_log_order": quotient_group(fam, m).log_order()}
    if outside:
        ev["counterexample"] = {"permutation": outside[0].tolist()}
        return CheckReport("stab2-derived", params, FAIL, ev, seed)
    if words:
        rng = _rng(seed, "stab2-derived")
        for w in random_stabilizer_words(fam, 2, words, rng):
            if not is_level_trivial(word_to_aut(w), 2):
                ev["counterexample"] = {"word": str(w), "reason": "sampled word not level-2 trivial"}
                return CheckReport("stab2-derived", params, FAIL, ev, seed)
            e = abelianization(w)
            if e.a or e.b:
                ev["counterexample"] = {"word": str(w), "exponents": list(e)}
                return CheckReport("stab2-derived", params, FAIL, ev, seed)
        ev["words_checked"] = words
    return CheckReport("stab2-derived", params, PASS, ev, seed)


@_timed
def check_gamma3_inclusion(p: int, alpha, m: int = 3, kind: str = "GGS") -> CheckReport:
    """Commutator-image elements placed below one first-level vertex lie in gamma_3 (GGS) or the commutator image (EGS)."""
    fam = GroupFamily(kind, ggs(p, alpha).vector)
    params = _params(fam, m=m)
    if not fam.vector.is_periodic or fam.vector.is_symmetric:
        return CheckReport("gamma3-inclusion", params, NOT_ASSERTED,
                           {"reason": "needs a periodic nonsymmetric vector"})
    D = family_derived(fam, m - 1)
    target = family_lower_central(fam, m, 3) if kind == "GGS" else family_derived(fam, m)
    checked = 0
    for d in D.strong_generators:
        for j in range(p):
            x = place_perm(d, (j,), p)
            checked += 1
            if not target.contains(x):
                ev = {"counterexample": {"vertex": [j], "section": d.tolist()}}
                return CheckReport("gamma3-inclusion", params, FAIL, ev)
    ev = {"placed_elements": checked, "target": "gamma3" if kind == "GGS" else "derived",
          "target_log_order": target.log_order()}
    return CheckReport("gamma3-inclusion", params, PASS, ev)


# failure of the congruence property ----------------------------------------

@_timed
def check_no_congruence(p: int, alpha, n: int, m: int | None = None) -> CheckReport:
    """t_n agrees with c modulo Stab(n) yet lies in b[G,G]: the commutator subgroup contains no Stab(n)."""
    m = n + 1 if m is None else m
    fam = egs(p, alpha)
    params = _params(fam, n=n, m=m)
    if not fam.vector.is_periodic or fam.vector.is_symmetric:
        return CheckReport("no-congruence", params, NOT_ASSERTED, {"reason": "needs a periodic nonsymmetric vector"})
    if m <= n:
        raise ValueError("need n < m")
    b = generator(fam, "b")
    c = generator(fam, "c")
    a = generator(fam, "a")
    tn = t_element(fam, n)
    diff = compose(invert(c), tn)
    level_n_trivial = is_level_trivial(diff, n)
    level_n1_nontrivial = not is_level_trivial(diff, n + 1)
    Q = quotient_group(fam, m)
    D = family_derived(fam, m)
    tp = level_rep(tn, m)
    in_group = Q.contains(tp)
    in_b_coset = D.coset_equal(tp, level_rep(b, m))
    t2 = portrait_equal(t_element(fam, 2), conjugate(b, a), max(m, 4))
    cb = abelianization(cb_word(fam))
    ev = {
        "c_inv_tn_level_n_trivial": level_n_trivial,
        "c_inv_tn_level_n_plus_1_nontrivial": level_n1_nontrivial,
        "tn_in_quotient": in_group,
        "tn_in_b_derived_coset": in_b_coset,
        "t2_equals_b_conjugated_by_a": t2,
        "c_inv_b_exponents": list(cb),
        "abelianization_index_log": Q.log_order() - D.log_order(),
        "c_inv_tn_in_derived_image": D.contains(perm_mul(perm_inv(level_rep(c, m)), tp)),
    }
    ok = level_n_trivial and in_group and in_b_coset and t2 and not cb.is_zero()
    if not ok:
        ev["counterexample"] = {"n": n, "m": m, "t_n_level_m": tp.tolist()}
    return CheckReport("no-congruence", params, _verdict(ok), ev)


@_timed
def check_small_cong(p: int, alpha, x: str, m: int = 3) -> CheckReport:
    """Least n with the H_n image inside the normal closure of x at level m."""
    fam = egs(p, alpha)
    params = _params(fam, word=x, m=m)
    if fam.vector.is_symmetric:
        return CheckReport("small-cong", params, NOT_ASSERTED, {"reason": "vector is symmetric"})
    w = parse_word(x, fam)
    xp = level_rep(word_to_aut(w), m)
    if is_identity_perm(xp):
        return CheckReport("small-cong", params, SKIPPED, {"reason": f"{x} is trivial at level {m}"})
    Q = quotient_group(fam, m)
    N = normal_closure(Q, [xp])
    found = None
    for n in range(1, m):
        if h_image(fam, n, m).is_subgroup_of(N):
            found = n
            break
    ev = {"normal_closure_log_order": N.log_order(), "least_n": found,
          "nontrivial_at_this_level": found is not None and found < m - 1}
    return CheckReport("small-cong", params, PASS, ev)


# conjugacy and word identities ---------------------------------------------

@_timed
def check_conjugate_groups(p: int, alpha, depth: int = 5) -> CheckReport:
    """b^C = c and a^C = a as portraits."""
    fam = egs(p, alpha)
    params = _params(fam, depth=depth)
    C = conjugator_C(fam)
    a, b, c = (generator(fam, g) for g in "abc")
    bc = portrait_equal(conjugate(b, C), c, depth)
    ac = portrait_equal(conjugate(a, C), a, depth)
    ev = {"b_conj_C_is_c": bc, "a_conj_C_is_a": ac}
    if not (bc and ac):
        ev["counterexample"] = {"generator": "b" if not bc else "a", "depth": depth}
    return CheckReport("conjugate-groups", params, _verdict(bc and ac), ev)


@_timed
def check_base_of_convergence(p: int, alpha, depth: int = 6) -> CheckReport:
    """``(c^-1 b) * i`` equals ``(c^-1 b^a)^(a^i)`` as portraits for every i."""
    fam = egs(p, alpha)
    params = _params(fam, depth=depth)
    a = generator(fam, "a")
    cb = word_to_aut(cb_word(fam))
    cba = compose(invert(generator(fam, "c")), conjugate(generator(fam, "b"), a))
    bad = [i for i in range(p) if not portrait_equal(rist_place(cb, (i,)), conjugate(cba, cyclic(p, i)), depth)]
    ev = {"coordinates": p}
    if bad:
        ev["counterexample"] = {"coordinate": bad[0]}
    return CheckReport("base-of-convergence", params, _verdict(not bad), ev)


@_timed
def check_t_sequence(p: int, alpha, n_max: int = 4) -> CheckReport:
    """c^-1 t_n is level-n trivial but not level-(n+1) trivial, and t_n lies in b[G,G] at level n+1."""
    fam = egs(p, alpha)
    params = _params(fam, n_max=n_max)
    if not fam.vector.is_periodic or fam.vector.is_symmetric:
        return CheckReport("t-sequence", params, NOT_ASSERTED, {"reason": "needs a periodic nonsymmetric vector"})
    c = generator(fam, "c")
    b = generator(fam, "b")
    rows = []
    for n in range(1, n_max + 1):
        d = compose(invert(c), t_element(fam, n))
        m = n + 1
        row = {
            "n": n,
            "level_n_trivial": is_level_trivial(d, n),
            "level_n_plus_1_trivial": is_level_trivial(d, n + 1),
            "b_coset": family_derived(fam, m).coset_equal(level_rep(t_element(fam, n), m), level_rep(b, m)),
        }
        rows.append(row)
        if not row["level_n_trivial"] or row["level_n_plus_1_trivial"] or not row["b_coset"]:
            return CheckReport("t-sequence", params, FAIL, {"rows": rows, "counterexample": row})
    return CheckReport("t-sequence", params, PASS, {"rows": rows})


# quotient tower ------------------------------------------------------------

@_timed
def check_quotient_tower(p: int, alpha, kind: str = "GGS", max_level: int = 4, seed: int = 0) -> CheckReport:
    """Restriction from level n to n-1 is a surjective homomorphism; small orders match brute force."""
    fam = GroupFamily(kind, ggs(p, alpha).vector)
    params = _params(fam, max_level=max_level)
    rng = _rng(seed, "quotient-tower")
    rows = []
    for n in range(1, max_level + 1):
        Q = quotient_group(fam, n)
        row = {"level": n, "log_order": Q.log_order()}
        if Q.order() <= 10**5:
            row["enumerated_order"] = len(enumerate_closure(Q.generators))
        if n >= 2:
            P = quotient_group(fam, n - 1)
            R = Q.restricted()
            row["restriction_onto"] = R.is_subgroup_of(P) and P.is_subgroup_of(R)
            hom = True
            for _ in range(10):
                x, y = Q.random_element(rng), Q.random_element(rng)
                if not np.array_equal(restrict(perm_mul(x, y), p), perm_mul(restrict(x, p), restrict(y, p))):
                    hom = False
            row["restriction_homomorphic"] = hom
            row["divides"] = Q.log_order() >= P.log_order()
            sec = PermGroup(p, n - 1, [section_perm(s, (0,), p) for s in stab_image(fam, 1, n).strong_generators])
            row["first_level_sections_onto"] = sec.log_order() == P.log_order()
        D = family_derived(fam, n)
        row["abelianization_log_index"] = Q.log_order() - D.log_order()
        rows.append(row)
    def broken(r):
        if r.get("enumerated_order", p ** r["log_order"]) != p ** r["log_order"]:
            return True
        return any(r.get(k) is False for k in ("restriction_onto", "restriction_homomorphic", "first_level_sections_onto"))

    bad = [r for r in rows if broken(r)]
    ev = {"levels": rows}
    if bad:
        ev["counterexample"] = bad[0]
    return CheckReport("quotient-tower", params, _verdict(not bad), ev, seed)


# kernel structure ----------------------------------------------------------

@_timed
def check_kernel_structure(p: int, alpha, max_depth: int = 3, samples: int = 100, pairs: int = 50,
                           portrait_depth: int = 6, seed: int = 0) -> CheckReport:
    """Theta compatibility, valid extensions, canonical elements, and separation of distinct assignments."""
    fam = egs(p, alpha)
    params = _params(fam, max_depth=max_depth, samples=samples, pairs=pairs, portrait_depth=portrait_depth)
    rng = _rng(seed, "kernel-structure")
    ev: dict = {}

    def fail(what, detail):
        ev["counterexample"] = {"property": what, **detail}
        return CheckReport("kernel-structure", params, FAIL, ev, seed)

    # theta against extensions
    for _ in range(samples):
        n = int(rng.integers(0, max_depth))
        asg = random_assignment(p, n, rng)
        ext = extend_assignment(asg, rng)
        if not check_summation(ext):
            return fail("extension-valid", {"assignment": ext.to_dict()})
        if ext.restrict(n) != asg:
            return fail("extension-restricts", {"assignment": asg.to_dict()})
        if n >= 1 and theta(ext.leaf_vector()) != asg.leaf_vector():
            return fail("theta", {"assignment": asg.to_dict()})
    ev["theta_samples"] = samples
    ev["extensions_from_zero"] = count_extensions(IndexAssignment.zero(p, 0))

    # canonical elements
    for n in range(1, max_depth + 1):
        asgs = [random_assignment(p, n, rng) for _ in range(4)]
        elems = [canonical_element(fam, s) for s in asgs]
        for s, g in zip(asgs, elems):
            if not is_level_trivial(g, n):
                return fail("level-trivial", {"assignment": s.to_dict()})
            if not power_in_hn(fam, s):
                return fail("exponent-p", {"assignment": s.to_dict()})
            if not kernel_condition_holds(fam, s):
                return fail("chain-condition", {"assignment": s.to_dict()})
        for i in range(len(elems)):
            for j in range(i + 1, len(elems)):
                if not commute_to_depth(elems[i], elems[j], portrait_depth):
                    return fail("commute", {"first": asgs[i].to_dict(), "second": asgs[j].to_dict()})
    ev["canonical_depths"] = max_depth
    probe = canonical_element(fam, path_assignment(p, (), 1))
    ev["pth_power_trivial_in_aut_t"] = has_exponent_p(probe, portrait_depth)

    # separation
    quotient_hits = 0
    for k in range(pairs):
        n = 1 + k % max_depth
        s1 = random_assignment(p, n, rng)
        s2 = random_assignment(p, n, rng)
        if s1.leaf_vector() == s2.leaf_vector():
            e = list(s2.leaf_vector().entries)
            e[0] = (e[0] + 1) % p
            s2 = assignment_from_leaves(LevelVector(p, n, tuple(e)))
        if not separates(fam, s1, s2, n):
            return fail("separation", {"first": s1.to_dict(), "second": s2.to_dict()})
        if n + 2 <= 5 and quotient_separates(fam, s1, s2, n, n + 2):
            quotient_hits += 1
    ev["separated_pairs"] = pairs
    ev["quotient_level_separations"] = quotient_hits

    # nesting of placed elements
    nest = all(nesting_holds(fam, u, i, len(u) + 2) and nesting_holds_exact(fam, u, i)
               for u in [(), (0,), (p - 1,)] for i in range(p))
    ev["nesting"] = nest
    if not nest:
        return fail("nesting", {})
    ev["root_conventions_accepted"] = ["free", "zero"]
    return CheckReport("kernel-structure", params, PASS, ev, seed)


@_timed
def check_density_Bomega(p: int, alpha, n: int = 2, samples: int = 100, seed: int = 0) -> CheckReport:
    """Weighted sums of path indicators rebuild every valid assignment at depth n."""
    fam = egs(p, alpha)
    params = _params(fam, n=n, samples=samples)
    rng = _rng(seed, "density")
    for _ in range(samples):
        z = random_assignment(p, n, rng)
        if path_sum(z) != z:
            return CheckReport("density", params, FAIL, {"counterexample": {"assignment": z.to_dict()}}, seed)
    ev = {"samples": samples}
    for v in level_vertices(p, n):
        if not check_summation(path_assignment(p, v, n)):
            ev["counterexample"] = {"path_stem": list(v)}
            return CheckReport("density", params, FAIL, ev, seed)
    return CheckReport("density", params, PASS, ev, seed)


# section-subgroup probes ---------------------------------------------------

def _section_group(X: PermGroup, u: tuple[int, ...], p: int) -> PermGroup:
    """Sections at u of the level-|u| stabilizer of X (a subgroup of the vertex stabilizer's sections)."""
    tail = X.stabilizer_tail(len(u))
    return PermGroup(p, X.n - len(u), [section_perm(s, u, p) for s in tail.strong_generators])


@_timed
def check_section_probe(p: int, alpha, x: str, m: int = 4, full: bool = False) -> CheckReport:
    """Search for a vertex u whose section group of the normal closure of x contains b (or everything)."""
    fam = ggs(p, alpha)
    name = "section-is-whole-group" if full else "section-contains-b"
    params = _params(fam, word=x, m=m)
    if not fam.vector.is_periodic:
        return CheckReport(name, params, NOT_ASSERTED, {"reason": "vector is not periodic"})
    w = parse_word(x, fam)
    xp = level_rep(word_to_aut(w), m)
    if is_identity_perm(xp):
        return CheckReport(name, params, SKIPPED, {"reason": f"{x} is trivial at level {m}"})
    X = normal_closure(quotient_group(fam, m), [xp])
    for k in range(0, m - 1):
        target_level = m - k
        b_img = level_rep(generator(fam, "b"), target_level)
        for u in level_vertices(p, k):
            S = _section_group(X, u, p)
            hit = S.log_order() == quotient_group(fam, target_level).log_order() if full else S.contains(b_img)
            if hit:
                ev = {"vertex": list(u), "depth": k, "section_level": target_level}
                return CheckReport(name, params, PASS, ev)
    return CheckReport(name, params, SKIPPED, {"reason": f"no vertex found with sections of depth >= 2 at level {m}"})


# suite ---------------------------------------------------------------------

GUPTA_SIDKI = (3, (1, 2))


def suite_checks(seed: int = 0, words: int = 100) -> list[tuple[str, Callable[[], CheckReport]]]:
    """The default grid, as (sort key, thunk) pairs."""
    p3, a3 = GUPTA_SIDKI
    p5, a5 = 5, (1, 2, 3, 4)
    checks = [
        ("kernel-sum/3", lambda: check_kernel_sum(p3, a3)),
        ("kernel-sum/5", lambda: check_kernel_sum(p5, a5)),
        ("kernel-sum/3-nonperiodic", lambda: check_kernel_sum(3, (1, 1))),
        ("stab2-derived/3", lambda: check_stab2_in_derived(p3, a3, 3, words, seed)),
        ("stab2-derived/5", lambda: check_stab2_in_derived(p5, a5, 3, words, seed)),
        ("gamma3-inclusion/ggs", lambda: check_gamma3_inclusion(p3, a3, 3, "GGS")),
        ("gamma3-inclusion/egs", lambda: check_gamma3_inclusion(p3, a3, 3, "EGS")),
        ("gamma3-inclusion/symmetric", lambda: check_gamma3_inclusion(5, (1, 2, 2, 1), 3, "GGS")),
        ("conjugate-groups/3", lambda: check_conjugate_groups(p3, a3, 5)),
        ("conjugate-groups/5", lambda: check_conjugate_groups(p5, a5, 4)),
        ("base-of-convergence/3", lambda: check_base_of_convergence(p3, a3, 6)),
        ("quotient-tower/ggs", lambda: check_quotient_tower(p3, a3, "GGS", 4, seed)),
        ("quotient-tower/egs", lambda: check_quotient_tower(p3, a3, "EGS", 4, seed)),
        ("t-sequence/3", lambda: check_t_sequence(p3, a3, 4)),
        ("density/3", lambda: check_density_Bomega(p3, a3, 2, 100, seed)),
        ("kernel-structure/3", lambda: check_kernel_structure(p3, a3, 2, 30, 20, 5, seed)),
        ("small-cong/b", lambda: check_small_cong(p3, a3, "b", 3)),
        ("small-cong/[a,b]", lambda: check_small_cong(p3, a3, "[a,b]", 3)),
        ("section-contains-b/b*a", lambda: check_section_probe(p3, a3, "b*a", 4)),
        ("section-is-whole-group/[a,b]", lambda: check_section_probe(p3, a3, "[a,b]", 4, True)),
    ]
    for n in range(1, 4):
        checks.append((f"no-congruence/{n}", lambda n=n: check_no_congruence(p3, a3, n, n + 1)))
    return sorted(checks, key=lambda kv: kv[0])


SUITES = {
    "all": None,
    "kernel-sum": "kernel-sum",
    "stab2-derived": "stab2-derived",
    "gamma3": "gamma3-inclusion",
    "no-congruence": "no-congruence",
    "conjugate": "conjugate-groups",
    "tower": "quotient-tower",
    "kernel": "kernel-structure",
    "density": "density",
    "base-of-convergence": "base-of-convergence",
    "t-sequence": "t-sequence",
    "small-cong": "small-cong",
    "probes": ("section-contains-b", "section-is-whole-group"),
}


def run_suite(seed: int = 0, name: str = "all", words: int = 100) -> list[CheckReport]:
    """Run the default grid (or the part selected by ``name``) in a fixed order."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    prefix = SUITES[name]
    prefixes = (prefix,) if isinstance(prefix, str) else prefix
    out = []
    for key, thunk in suite_checks(seed, words):
        if prefixes is None or key.split("/")[0] in prefixes:
            rep = thunk()
            rep.seed = seed
            out.append(rep)
    return out


def suite_json(reports: list[CheckReport]) -> str:
    """JSON lines, one report per line, without timing."""
    return "\n".join(r.to_json() for r in reports) + "\n"


_RERUN: dict[str, Callable[[dict, int | None], CheckReport]] = {
    "kernel-sum": lambda P, s: check_kernel_sum(P["p"], P["alpha"]),
    "stab2-derived": lambda P, s: check_stab2_in_derived(P["p"], P["alpha"], P["m"], P["words"], s or 0),
    "gamma3-inclusion": lambda P, s: check_gamma3_inclusion(P["p"], P["alpha"], P["m"], P["family"]),
    "no-congruence": lambda P, s: check_no_congruence(P["p"], P["alpha"], P["n"], P["m"]),
    "small-cong": lambda P, s: check_small_cong(P["p"], P["alpha"], P["word"], P["m"]),
    "conjugate-groups": lambda P, s: check_conjugate_groups(P["p"], P["alpha"], P["depth"]),
    "base-of-convergence": lambda P, s: check_base_of_convergence(P["p"], P["alpha"], P["depth"]),
    "t-sequence": lambda P, s: check_t_sequence(P["p"], P["alpha"], P["n_max"]),
    "quotient-tower": lambda P, s: check_quotient_tower(P["p"], P["alpha"], P["family"], P["max_level"], s or 0),
    "kernel-structure": lambda P, s: check_kernel_structure(
        P["p"], P["alpha"], P["max_depth"], P["samples"], P["pairs"], P["portrait_depth"], s or 0),
    "density": lambda P, s: check_density_Bomega(P["p"], P["alpha"], P["n"], P["samples"], s or 0),
    "section-contains-b": lambda P, s: check_section_probe(P["p"], P["alpha"], P["word"], P["m"]),
    "section-is-whole-group": lambda P, s: check_section_probe(P["p"], P["alpha"], P["word"], P["m"], True),
}


def rerun(report: dict | CheckReport) -> CheckReport:
    """Run a check again from its serialized name, parameters and seed."""
    d = report.to_dict() if isinstance(report, CheckReport) else report
    try:
        fn = _RERUN[d["check"]]
    except KeyError:
        raise KeyError(f"no re-run hook for {d.get('check')!r}") from None
    rep = fn(d["params"], d.get("seed"))
    rep.seed = d.get("seed")
    return rep
