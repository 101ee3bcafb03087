"""Exact computation with GGS and EGS groups acting on rooted p-ary trees."""

__version__ = "0.1.0"

from .gfp import (
    CirculantMatrix,
    FpScalar,
    FpVector,
    ParameterError,
    circulant_from_alpha,
    coordinate_sum,
    kernel_basis,
)
from .tree import (
    DepthCapError,
    Portrait,
    Recursive,
    act_on_vertex,
    compose,
    invert,
    is_level_trivial,
    portrait,
    rist_place,
    section_at,
)
from .groups import (
    AccompanyingVector,
    GroupFamily,
    GroupWord,
    abelianization,
    conjugator_C,
    egs,
    f_subgroup,
    generator,
    ggs,
    parse_word,
    word_section,
    word_to_aut,
)
from .quotient import (
    PermGroup,
    ch_subgroup,
    derived_subgroup,
    hn_image_membership,
    level_rep,
    lower_central,
    normal_closure,
    quotient_group,
    stab_image,
)
from .kernel import (
    IndexAssignment,
    LevelVector,
    canonical_element,
    check_summation,
    extend_assignment,
    kernel_coset_witness,
    path_assignment,
    t_element,
    theta,
)

__all__ = [
    "__version__",
    "CirculantMatrix",
    "FpScalar",
    "FpVector",
    "ParameterError",
    "circulant_from_alpha",
    "coordinate_sum",
    "kernel_basis",
    "DepthCapError",
    "Portrait",
    "Recursive",
    "act_on_vertex",
    "compose",
    "invert",
    "is_level_trivial",
    "portrait",
    "rist_place",
    "section_at",
    "AccompanyingVector",
    "GroupFamily",
    "GroupWord",
    "abelianization",
    "conjugator_C",
    "egs",
    "f_subgroup",
    "generator",
    "ggs",
    "parse_word",
    "word_section",
    "word_to_aut",
    "PermGroup",
    "ch_subgroup",
    "derived_subgroup",
    "hn_image_membership",
    "level_rep",
    "lower_central",
    "normal_closure",
    "quotient_group",
    "stab_image",
    "IndexAssignment",
    "LevelVector",
    "canonical_element",
    "check_summation",
    "extend_assignment",
    "kernel_coset_witness",
    "path_assignment",
    "t_element",
    "theta",
]
