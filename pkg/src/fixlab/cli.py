"""Command-line front end.

Exit codes: 0 success (check passed / witness found), 1 negative result
of a check or search, 2 usage or input errors.  All output is plain
UTF-8 text and deterministic for equal inputs and seeds.

Subgroups are always printed in canonical form: lattice basis elements
first, then the coset representatives, each as a normalized word.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Optional, Sequence

from .certify import (
    check_compressed_certificate,
    classify,
    describe_witness,
    paper_suite,
    sample_inertia_property,
    search_compression_counterexample,
    search_inertia_counterexample,
)
from .groupcore import (
    EuclideanBlock,
    GroupSpec,
    canonicalize_spec,
    format_element,
    parse_word,
    sqrt_in_axes,
)
from .morphism import (
    apply,
    endo_from_words,
    fixed_family,
    fixed_subgroup,
    is_automorphism,
)
from .subgroup import (
    Subgroup,
    decompose_euc2,
    from_generators,
    generator_words,
    index,
    intersect,
    membership,
    rank,
)

_FACTOR = re.compile(r"(NS2|T2|P2|Z2|Z|1)(?:\^([1-9][0-9]*))?$")

_BLOCKS = {
    "NS2": EuclideanBlock.KLEIN,
    "Z": EuclideanBlock.Z,
    "T2": EuclideanBlock.TORUS,
    "Z2": EuclideanBlock.Z2,
    "P2": EuclideanBlock.Z2,  # projective plane, same group
    "1": EuclideanBlock.TRIVIAL,
}


def parse_group(text: str) -> GroupSpec:
    """Grammar: factors separated by `x`, each NS2|Z|Z2|T2|P2|1 with an
    optional ^k repeat, e.g. "NS2 x Z^2 x Z2"."""
    blocks = []
    for part in text.split("x"):
        part = part.strip()
        m = _FACTOR.match(part)
        if not m:
            raise ValueError(f"bad group factor {part!r}")
        blocks.extend([_BLOCKS[m.group(1)]] * int(m.group(2) or "1"))
    return canonicalize_spec(blocks)


def parse_map_file(path: str) -> dict[str, str]:
    """Lines of `name -> word`; `#` starts a comment."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'name -> word'")
            name, word = (s.strip() for s in line.split("->", 1))
            if not name or not word:
                raise ValueError(f"{path}:{lineno}: expected 'name -> word'")
            if name in mapping:
                raise ValueError(f"{path}:{lineno}: duplicate image for {name}")
            mapping[name] = word
    return mapping


def parse_subgroup(spec: GroupSpec, text: str) -> Subgroup:
    words = [w.strip() for w in text.split(";")]
    gens = [parse_word(spec, w) for w in words if w]
    return from_generators(spec, gens)


def _print_subgroup(h: Subgroup) -> None:
    print(", ".join(generator_words(h)))


def _endo_from_args(spec: GroupSpec, args):
    return endo_from_words(spec, parse_map_file(args.map), args.partial_identity)


def _bool(x: bool) -> str:
    return "true" if x else "false"


# ------------------------------------------------------------------- commands


def _cmd_normalize(args) -> int:
    spec = parse_group(args.group)
    print(format_element(parse_word(spec, args.word)))
    return 0


def _cmd_mul(args) -> int:
    spec = parse_group(args.group)
    if len(args.word) != 2:
        raise ValueError("mul needs exactly two -w words")
    g = parse_word(spec, args.word[0]) * parse_word(spec, args.word[1])
    print(format_element(g))
    return 0


def _cmd_inv(args) -> int:
    spec = parse_group(args.group)
    print(format_element(parse_word(spec, args.word).inv()))
    return 0


def _cmd_pow(args) -> int:
    spec = parse_group(args.group)
    print(format_element(parse_word(spec, args.word) ** args.exponent))
    return 0


def _cmd_member(args) -> int:
    spec = parse_group(args.group)
    h = parse_subgroup(spec, args.sub)
    ok = membership(parse_word(spec, args.word), h)
    print(_bool(ok))
    return 0 if ok else 1


def _cmd_rank(args) -> int:
    spec = parse_group(args.group)
    cert = rank(parse_subgroup(spec, args.sub))
    if cert.exact:
        print(f"rank: {cert.value} (exact)")
    else:
        print(f"rank: between {cert.lower} and {cert.upper} (inexact)")
    print("generators: " + (", ".join(format_element(g) for g in cert.generators) or "1"))
    return 0


def _cmd_index(args) -> int:
    spec = parse_group(args.group)
    h = parse_subgroup(spec, args.sub)
    k = parse_subgroup(spec, args.sup)
    out = index(h, k)
    print("infinite" if out is None else str(out))
    return 0


def _cmd_intersect(args) -> int:
    spec = parse_group(args.group)
    if len(args.sub) != 2:
        raise ValueError("intersect needs exactly two --sub subgroups")
    _print_subgroup(
        intersect(parse_subgroup(spec, args.sub[0]), parse_subgroup(spec, args.sub[1]))
    )
    return 0


def _cmd_fix(args) -> int:
    spec = parse_group(args.group)
    _print_subgroup(fixed_subgroup(_endo_from_args(spec, args)).subgroup)
    return 0


def _cmd_fix_family(args) -> int:
    spec = parse_group(args.group)
    endos = [
        endo_from_words(spec, parse_map_file(path), args.partial_identity)
        for path in args.map
    ]
    _print_subgroup(fixed_family(endos))
    return 0


def _cmd_check_endo(args) -> int:
    spec = parse_group(args.group)
    try:
        _endo_from_args(spec, args)
    except ValueError as exc:
        print(f"invalid: {exc}")
        return 1
    print("valid")
    return 0


def _cmd_check_auto(args) -> int:
    spec = parse_group(args.group)
    endo = _endo_from_args(spec, args)
    ok = is_automorphism(endo)
    print(_bool(ok))
    return 0 if ok else 1


def _cmd_sqrt(args) -> int:
    spec = parse_group(args.group)
    print(format_element(sqrt_in_axes(parse_word(spec, args.word))))
    return 0


def _cmd_decompose(args) -> int:
    spec = parse_group(args.group)
    out = decompose_euc2(parse_subgroup(spec, args.sub))
    print(f"projection: {out.projection_type}")
    for proj, lift in out.splitting:
        print(f"pair: {format_element(proj)} -> {format_element(lift)}")
    print("torsion: " + ", ".join(generator_words(out.torsion_part)))
    return 0


def _cmd_classify(args) -> int:
    got = classify(parse_group(args.group))
    print(
        f"case={got.case} compressed_all={_bool(got.compressed_all)}"
        f" inert_all={_bool(got.inert_all)}"
    )
    return 0


def _cmd_certify_compressed(args) -> int:
    spec = parse_group(args.group)
    cert = check_compressed_certificate(parse_subgroup(spec, args.sub))
    if cert is None:
        print("no certificate")
        return 1
    print(
        f"certified: sqrt-closed, rank {cert.rank_cert.value} ="
        f" abelian image rank {cert.abelian_image_rank}"
    )
    return 0


def _cmd_search_compression(args) -> int:
    spec = parse_group(args.group)
    w = search_compression_counterexample(
        parse_subgroup(spec, args.sub), args.max_word_len, args.max_gens
    )
    if w is None:
        print("no witness found within bounds")
        return 1
    print(describe_witness(w))
    return 0


def _cmd_search_inertia(args) -> int:
    spec = parse_group(args.group)
    w = search_inertia_counterexample(
        parse_subgroup(spec, args.sub), args.max_word_len, args.max_gens
    )
    if w is None:
        print("no witness found within bounds")
        return 1
    print(describe_witness(w))
    return 0


def _cmd_sample_inertia(args) -> int:
    spec = parse_group(args.group)
    report = sample_inertia_property(
        spec,
        args.trials,
        gen_bound=args.max_gens,
        word_len=args.max_word_len,
        seed=args.seed,
    )
    print(report.render())
    return 0 if report.passed else 1


def _cmd_paper_suite(args) -> int:
    report = paper_suite(args.scale)
    print(report.render())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixlab",
        description="Exact workbench for products of flat surface groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, group=True, word=0, map_files=0,
            subs=0, sup=False, search=False, exponent=False, trials=False,
            scale=False, partial=False):
        p = sub.add_parser(name, help=help_text)
        if group:
            p.add_argument("-g", "--group", required=True, help="group spec, e.g. 'NS2 x Z^2 x Z2'")
        if word == 1:
            p.add_argument("-w", "--word", required=True, help="word in the generators")
        elif word > 1:
            p.add_argument("-w", "--word", action="append", required=True,
                           help="word in the generators (repeatable)")
        if map_files == 1:
            p.add_argument("-m", "--map", required=True, help="endomorphism map file")
        elif map_files > 1:
            p.add_argument("-m", "--map", action="append", required=True,
                           help="endomorphism map file (repeatable)")
        if subs == 1:
            p.add_argument("--sub", required=True, help="subgroup generators 'w1; w2; ...'")
        elif subs > 1:
            p.add_argument("--sub", action="append", required=True,
                           help="subgroup generators 'w1; w2; ...' (repeatable)")
        if sup:
            p.add_argument("--sup", required=True, help="ambient subgroup 'w1; w2; ...'")
        if search or trials:
            p.add_argument("--max-word-len", type=int, default=3)
            p.add_argument("--max-gens", type=int, default=3)
        if exponent:
            p.add_argument("-k", "--exponent", type=int, required=True)
        if trials:
            p.add_argument("--trials", type=int, default=100)
            p.add_argument("--seed", type=int, default=0)
        if scale:
            p.add_argument("--scale", choices=["quick", "full"], default="quick")
        if partial:
            p.add_argument("--partial-identity", action="store_true",
                           help="unmapped generators go to themselves")
        p.set_defaults(func=func)
        return p

    add("normalize", _cmd_normalize, "normal form of a word", word=1)
    add("mul", _cmd_mul, "product of two words", word=2)
    add("inv", _cmd_inv, "inverse of a word", word=1)
    add("pow", _cmd_pow, "power of a word", word=1, exponent=True)
    add("member", _cmd_member, "test membership in a subgroup", word=1, subs=1)
    add("rank", _cmd_rank, "rank certificate of a subgroup", subs=1)
    add("index", _cmd_index, "index of --sub inside --sup", subs=1, sup=True)
    add("intersect", _cmd_intersect, "intersection of two subgroups", subs=2)
    add("fix", _cmd_fix, "fixed subgroup of an endomorphism", map_files=1, partial=True)
    add("fix-family", _cmd_fix_family, "common fixed subgroup of several maps",
        map_files=2, partial=True)
    add("check-endo", _cmd_check_endo, "validate an endomorphism map file",
        map_files=1, partial=True)
    add("check-auto", _cmd_check_auto, "test whether a map is an automorphism",
        map_files=1, partial=True)
    add("sqrt", _cmd_sqrt, "square root inside the a-generator subgroup", word=1)
    add("decompose-euc2", _cmd_decompose, "split a subgroup of NS2 x Z2^q", subs=1)
    add("classify", _cmd_classify, "compression/inertia classification of a group")
    add("certify-compressed", _cmd_certify_compressed,
        "one-sided compression certificate", subs=1)
    add("search-compression", _cmd_search_compression,
        "search for an overgroup of smaller rank", subs=1, search=True)
    add("search-inertia", _cmd_search_inertia,
        "search for an intersection of larger rank", subs=1, search=True)
    add("sample-inertia", _cmd_sample_inertia,
        "randomized inertia property check", trials=True)
    add("paper-suite", _cmd_paper_suite, "run the bundled example suite",
        group=False, scale=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
