"""Index assignments, canonical kernel elements and the chain condition.

Run: python demos/kernel_assignments.py
"""

import numpy as np

from treegroups import IndexAssignment, canonical_element, check_summation, egs, extend_assignment
from treegroups.groups import parse_word
from treegroups.kernel import (
    kernel_condition_holds,
    kernel_coset_witness,
    path_assignment,
    path_sum,
    random_assignment,
    separates,
)
from treegroups.tree import is_level_trivial

fam = egs(3, (1, 2))
rng = np.random.default_rng(7)

asg = IndexAssignment.from_levels(3, [[1], [1, 0, 0]])
print("root 1, children (1,0,0) valid:", check_summation(asg))
print("same with the root forced to zero:", check_summation(asg, "zero"))

deep = extend_assignment(asg, rng)
deep = extend_assignment(deep, rng)
print("extended twice:", deep.to_json())
print("chain condition g_{k+1} in g_k H_k:", kernel_condition_holds(fam, deep))

g = canonical_element(fam, deep)
print("canonical element trivial on level 3:", is_level_trivial(g, 3))

# every assignment is a weighted sum of path indicators v00...
print("rebuilt from paths:", path_sum(deep) == deep)
print("path through 1,2:", path_assignment(3, (1, 2), 3).to_json())

# distinct leaf vectors give distinct H_n cosets
x, y = random_assignment(3, 2, rng), random_assignment(3, 2, rng)
print("random pair separated:", separates(fam, x, y, 2), "(leaf vectors differ:", x.leaf_vector() != y.leaf_vector(), ")")

for word in ("c^-1*a^-1*b*a", "c^-1*b", "[b,a]"):
    v = kernel_coset_witness(fam, 1, 3, parse_word(word, fam))
    print(f"witness for {word}: exists={v.exists} exponents={v.exponents} failing vertex={v.failing_vertex}")
