"""Portraits of generators and t_n, written as GraphViz files.

Run: python demos/portraits.py [output-dir]
"""

import sys
from pathlib import Path

from treegroups import egs, generator, t_element
from treegroups.groups import conjugator_C, parse_word, word_to_aut

out = Path(sys.argv[1] if len(sys.argv) > 1 else "portraits")
out.mkdir(exist_ok=True)

fam = egs(3, (1, 2))
items = {
    "b": generator(fam, "b"),
    "c": generator(fam, "c"),
    "C": conjugator_C(fam),
    "t_3": t_element(fam, 3),
    "commutator_ba": word_to_aut(parse_word("[b,a]", fam)),
}
for name, g in items.items():
    port = g.portrait(3)
    (out / f"{name}.dot").write_text(port.to_dot(name))
    print(f"{name}: level-1 labels {port.level(1).tolist()}, wrote {out / (name + '.dot')}")
