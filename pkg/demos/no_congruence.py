"""The elements t_n: congruent to c modulo Stab(n), yet in the coset b[G,G].

Run: python demos/no_congruence.py
"""

from treegroups import egs, generator, quotient_group, t_element
from treegroups.groups import abelianization, parse_word
from treegroups.quotient import family_derived, level_rep
from treegroups.tree import compose, conjugate, invert, is_level_trivial, portrait_equal

fam = egs(3, (1, 2))
a, b, c = (generator(fam, x) for x in "abc")

print("t_2 = b^a:", portrait_equal(t_element(fam, 2), conjugate(b, a), 8))
for n in range(1, 5):
    t = t_element(fam, n)
    diff = compose(invert(c), t)
    m = n + 1
    x = level_rep(t, m)
    print(
        f"n={n}: c^-1 t_n trivial on level {n}: {is_level_trivial(diff, n)}, "
        f"on level {n + 1}: {is_level_trivial(diff, n + 1)}; "
        f"t_n in b[Q,Q] at level {m}: {family_derived(fam, m).coset_equal(x, level_rep(b, m))}, "
        f"in Q: {quotient_group(fam, m).contains(x)}"
    )

# b and c differ in the abelianization, so no Stab(n) lies in [G,G]
print("exponent sums of c^-1 b:", tuple(abelianization(parse_word("c^-1*b", fam))))
