"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .gfp import ParameterError, circulant_from_alpha, kernel_basis
from .groups import (
    AccompanyingVector,
    GroupFamily,
    PreconditionError,
    WordSyntaxError,
    conjugator_C,
    generator,
    parse_word,
    word_to_aut,
)
from .kernel import (
    ROOT_CONVENTIONS,
    IndexAssignment,
    canonical_element,
    check_summation,
    extend_assignment,
    kernel_coset_witness,
    path_assignment,
    summation_failures,
    t_element,
)
from .quotient import CACHE_ENV, family_derived, quotient_group, set_table_budget, stab_image
from .tree import DepthCapError, set_max_leaves
from . import verify

PRESETS = {"gupta-sidki": (3, "1,2")}
FAMILY_NAMES = {"ggs": "GGS", "egs": "EGS", "f": "F"}

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _family(args, default: str = "ggs", fallback: str | None = None) -> GroupFamily:
    p, alpha = args.p, args.alpha
    preset = getattr(args, "preset", None)
    if preset is None and p is None and alpha is None:
        preset = fallback
    if preset:
        p, alpha = PRESETS[preset]
    if p is None or alpha is None:
        raise UsageError("give --p and --alpha (or --preset gupta-sidki)")
    kind = FAMILY_NAMES[(args.family or default).lower()]
    return GroupFamily(kind, AccompanyingVector.parse(p, alpha))


def _add_group_args(sp, family_default: str | None = None):
    sp.add_argument("--p", type=int, help="odd prime")
    sp.add_argument("--alpha", help="accompanying vector, comma separated")
    sp.add_argument("--family", choices=sorted(FAMILY_NAMES), default=family_default)
    sp.add_argument("--preset", choices=sorted(PRESETS))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _recursion_text(fam: GroupFamily) -> dict:
    p, v = fam.p, fam.vector
    powers = [f"a^{v[i]}" for i in range(1, p)]
    rec = {"a": "activity 1, trivial sections"}
    if "b" in fam.generator_names:
        rec["b"] = "(" + ", ".join(powers + ["b"]) + ")"
    if "c" in fam.generator_names:
        rec["c"] = "(" + ", ".join(["c"] + powers) + ")"
    return rec


# commands ------------------------------------------------------------------

def cmd_group_info(args) -> int:
    fam = _family(args)
    info = {
        "family": fam.kind,
        "p": fam.p,
        "alpha": list(fam.vector.values),
        "periodic": fam.vector.is_periodic,
        "symmetric": fam.vector.is_symmetric,
        "generators": list(fam.generator_names),
        "recursions": _recursion_text(fam),
        "circulant_kernel": [list(x) for x in kernel_basis(circulant_from_alpha(fam.vector))],
    }
    if args.format == "json":
        print(json.dumps(info, sort_keys=True))
    else:
        for k in ("family", "p", "alpha", "periodic", "symmetric", "generators"):
            val = info[k]
            if isinstance(val, bool):
                val = str(val).lower()
            elif isinstance(val, list):
                val = ",".join(map(str, val))
            print(f"{k}={val}")
        for g, r in info["recursions"].items():
            print(f"{g}: {r}")
    return EXIT_OK


def cmd_quotient(args) -> int:
    fam = _family(args)
    n = args.level
    Q = quotient_group(fam, n)
    D = family_derived(fam, n)
    info = {
        "family": fam.kind,
        "p": fam.p,
        "alpha": list(fam.vector.values),
        "level": n,
        "order": str(Q.order()),
        "log_order": Q.log_order(),
        "derived_log_index": Q.log_order() - D.log_order(),
        "stab_log_index": {str(k): Q.log_order() - stab_image(fam, k, n).log_order() for k in range(n + 1)},
    }
    if args.format == "json":
        print(json.dumps(info, sort_keys=True))
    else:
        print(f"order={info['order']} (p^{info['log_order']})")
        print(f"derived index=p^{info['derived_log_index']}")
        for k, v in info["stab_log_index"].items():
            print(f"stab({k}) index=p^{v}")
    return EXIT_OK


def _single_check(args):
    name = args.suite
    fam = _family(args)
    p, alpha = fam.p, fam.vector.values
    if name == "kernel-sum":
        return [verify.check_kernel_sum(p, alpha)]
    if name == "stab2-derived":
        return [verify.check_stab2_in_derived(p, alpha, args.m or 3, args.words, args.seed)]
    if name == "gamma3":
        kind = fam.kind if args.family else "GGS"
        return [verify.check_gamma3_inclusion(p, alpha, args.m or 3, kind)]
    if name == "no-congruence":
        n = args.n or 2
        return [verify.check_no_congruence(p, alpha, n, args.m or n + 1)]
    if name == "conjugate":
        return [verify.check_conjugate_groups(p, alpha, args.depth or 5)]
    if name == "tower":
        return [verify.check_quotient_tower(p, alpha, fam.kind, args.m or 4, args.seed)]
    if name == "kernel":
        return [verify.check_kernel_structure(p, alpha, args.n or 3, seed=args.seed)]
    if name == "density":
        return [verify.check_density_Bomega(p, alpha, args.n or 2, seed=args.seed)]
    if name == "base-of-convergence":
        return [verify.check_base_of_convergence(p, alpha, args.depth or 6)]
    if name == "t-sequence":
        return [verify.check_t_sequence(p, alpha, args.n or 4)]
    if name == "small-cong":
        return [verify.check_small_cong(p, alpha, args.word or "b", args.m or 3)]
    if name == "probes":
        w = args.word or "b*a"
        return [verify.check_section_probe(p, alpha, w, args.m or 4),
                verify.check_section_probe(p, alpha, w, args.m or 4, True)]
    raise UsageError(f"suite {name!r} takes no parameters")


def cmd_verify(args) -> int:
    if args.suite not in verify.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(verify.SUITES)}")
    if args.p is not None or args.preset:
        reports = _single_check(args)
        for r in reports:
            r.seed = args.seed
    else:
        reports = verify.run_suite(args.seed, args.suite, args.words)
    for r in reports:
        print(r.to_json(timing=args.timing))
    return EXIT_FAIL if any(r.verdict == verify.FAIL for r in reports) else EXIT_OK


def _builtin(fam: GroupFamily, name: str, n: int | None):
    if name in ("a", "b", "c"):
        return generator(fam, name)
    if name == "C":
        return conjugator_C(fam)
    if name == "t_n":
        if n is None:
            raise UsageError("--builtin t_n needs --n")
        return t_element(fam, n)
    raise UsageError(f"unknown builtin {name!r}")


def cmd_portrait(args) -> int:
    fam = _family(args, "egs", fallback="gupta-sidki")
    if (args.word is None) == (args.builtin is None):
        raise UsageError("give exactly one of --word and --builtin")
    if args.word is not None:
        g = word_to_aut(parse_word(args.word, fam))
        name = "word"
    else:
        g = _builtin(fam, args.builtin, args.n)
        name = args.builtin if args.builtin != "t_n" else f"t_{args.n}"
    port = g.portrait(args.depth)
    text = port.to_dot(name) if args.format == "dot" else port.to_json() + "\n"
    _emit(text, args.output)
    return EXIT_OK


def _load_assignment(path: str) -> IndexAssignment:
    with open(path) as fh:
        try:
            return IndexAssignment.from_json(fh.read())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from None


def cmd_kernel(args) -> int:
    if args.action == "check":
        asg = _load_assignment(args.file)
        bad = summation_failures(asg, args.root_convention)
        out = {"valid": not bad, "root_convention": args.root_convention,
               "failing_vertices": [list(v) for v in bad]}
        print(json.dumps(out, sort_keys=True))
        return EXIT_OK if not bad else EXIT_FAIL
    if args.action == "extend":
        asg = _load_assignment(args.file)
        if not check_summation(asg):
            raise UsageError("assignment violates the summation condition")
        rng = np.random.default_rng(args.seed) if args.seed is not None else None
        for _ in range(args.levels):
            asg = extend_assignment(asg, rng)
        _emit(asg.to_json() + "\n", args.output)
        return EXIT_OK
    if args.action == "path":
        fam = _family(args, "egs")
        stem = [int(x) for x in args.stem.split(",")] if args.stem else []
        _emit(path_assignment(fam.p, stem, args.n).to_json() + "\n", args.output)
        return EXIT_OK
    if args.action == "element":
        asg = _load_assignment(args.file)
        fam = _family(args, "egs")
        if fam.p != asg.p:
            raise UsageError("assignment prime differs from --p")
        port = canonical_element(fam, asg).portrait(args.depth)
        text = port.to_dot("kernel") if args.format == "dot" else port.to_json() + "\n"
        _emit(text, args.output)
        return EXIT_OK
    if args.action == "witness":
        fam = _family(args, "egs")
        w = parse_word(args.word, fam)
        verdict = kernel_coset_witness(fam, args.n, args.m, w)
        print(json.dumps(verdict.to_dict(), sort_keys=True))
        return EXIT_OK
    raise UsageError(f"unknown kernel action {args.action!r}")


# parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treegroups", description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", help=f"directory for cached quotients (overrides ${CACHE_ENV})")
    ap.add_argument("--max-leaves", type=int, help="leaf budget for portraits and quotients")
    ap.add_argument("--table-budget", type=int, help="worst-case BSGS table cells allowed per quotient")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="group construction")
    gsub = g.add_subparsers(dest="action", required=True)
    info = gsub.add_parser("info", help="validity and recursions")
    _add_group_args(info)
    info.add_argument("--format", choices=("text", "json"), default="text")
    info.set_defaults(func=cmd_group_info)

    q = sub.add_parser("quotient", help="order and subgroup indices of a level quotient")
    _add_group_args(q)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--format", choices=("text", "json"), default="text")
    q.set_defaults(func=cmd_quotient)

    v = sub.add_parser("verify", help="run verification checks")
    v.add_argument("suite", help="one of: " + ", ".join(verify.SUITES))
    _add_group_args(v)
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--depth", type=int)
    v.add_argument("--word")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--words", type=int, default=100, help="random words for word-level sampling")
    v.add_argument("--timing", action="store_true", help="include duration_ms in the reports")
    v.set_defaults(func=cmd_verify)

    pt = sub.add_parser("portrait", help="export a portrait as DOT or JSON")
    _add_group_args(pt)
    pt.add_argument("--word")
    pt.add_argument("--builtin", choices=("a", "b", "c", "C", "t_n"))
    pt.add_argument("--n", type=int)
    pt.add_argument("--depth", type=int, required=True)
    pt.add_argument("--format", choices=("dot", "json"), default="dot")
    pt.add_argument("-o", "--output")
    pt.set_defaults(func=cmd_portrait)

    k = sub.add_parser("kernel", help="index assignments and kernel sequences")
    k.add_argument("action", choices=("check", "extend", "path", "element", "witness"))
    _add_group_args(k)
    k.add_argument("--file", help="IndexAssignment JSON")
    k.add_argument("--root-convention", choices=ROOT_CONVENTIONS, default="free")
    k.add_argument("--levels", type=int, default=1)
    k.add_argument("--seed", type=int)
    k.add_argument("--stem")
    k.add_argument("--n", type=int, default=1)
    k.add_argument("--m", type=int)
    k.add_argument("--word")
    k.add_argument("--depth", type=int, default=3)
    k.add_argument("--format", choices=("dot", "json"), default="json")
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_kernel)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.cache_dir:
        os.environ[CACHE_ENV] = args.cache_dir
    if args.max_leaves:
        set_max_leaves(args.max_leaves)
    if args.table_budget:
        set_table_budget(args.table_budget)
    if args.command == "kernel" and args.action in ("check", "extend", "element") and not args.file:
        print("error: --file is required", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "kernel" and args.action == "witness" and not args.word:
        print("error: --word is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except DepthCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ParameterError, WordSyntaxError, PreconditionError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
