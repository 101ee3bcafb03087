"""Orders of the level-n quotients of GGS and EGS groups, and their commutator subgroups.

Run: python demos/quotient_tower.py
"""

from treegroups import egs, ggs, quotient_group
from treegroups.quotient import enumerate_closure, family_derived, stab_image

for fam in (ggs(3, (1, 2)), egs(3, (1, 2))):
    print(f"{fam.kind}(3, (1,2))")
    for n in range(1, 6):
        Q = quotient_group(fam, n)
        D = family_derived(fam, n)
        line = f"  level {n}: |Q| = 3^{Q.log_order():<3d} [Q,Q] index 3^{Q.log_order() - D.log_order()}"
        if Q.order() <= 10**4:
            line += f"   (brute force: {len(enumerate_closure(Q.generators))})"
        print(line)

# the image of Stab(2) sits inside the commutator image
G = ggs(3, (1, 2))
print("Stab(2) image inside [Q,Q] at level 3:", stab_image(G, 2, 3).is_subgroup_of(family_derived(G, 3)))
