"""Endomorphisms by generator images, and exact fixed subgroups.

An endomorphism is a tuple of images, one per generator in the order of
GroupSpec.generator_names().  The constructor checks the defining
relations (flip relation per Klein factor, squares of torsion images,
cross-factor commuting), so every constructed value really is a
homomorphism.

Fixed subgroups are computed exactly by splitting the group along all
exponent parities: writing each exponent as (parity + 2 * unknown) makes
every coordinate of phi(g) an affine integer form in the unknowns,
because the sign twists (-1)^t only ever see parity constants.  Each
parity class then contributes one exact linear system; class-0 kernel
vectors plus one canonical solution per solvable class generate the
fixed subgroup.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .groupcore import Element, GroupSpec, format_element, parse_word
from .intlat import IntMatrix, solve_linear
from .subgroup import Subgroup, from_generators, intersect, special_subgroup


@dataclass(frozen=True)
class Endomorphism:
    spec: GroupSpec
    images: tuple[Element, ...]

    def __post_init__(self):
        names = self.spec.generator_names()
        if len(self.images) != len(names):
            raise ValueError(
                f"expected {len(names)} images, got {len(self.images)}"
            )
        for name, img in zip(names, self.images):
            if img.spec != self.spec:
                raise ValueError(f"image of {name} lives in a different group")
        by_name = dict(zip(names, self.images))
        l, p, q = self.spec.klein_count, self.spec.free_rank, self.spec.torsion_count
        for i in range(1, l + 1):
            va, vb = by_name[f"a{i}"], by_name[f"b{i}"]
            if not (vb * va * vb.inv() * va).is_identity():
                raise ValueError(
                    f"images of a{i} and b{i} violate the flip relation"
                )
        for k in range(1, q + 1):
            vd = by_name[f"d{k}"]
            if not (vd * vd).is_identity():
                raise ValueError(f"image of d{k} must square to the identity")
        factors = [[f"a{i}", f"b{i}"] for i in range(1, l + 1)]
        factors += [[f"c{j}"] for j in range(1, p + 1)]
        factors += [[f"d{k}"] for k in range(1, q + 1)]
        for fi, f1 in enumerate(factors):
            for f2 in factors[fi + 1:]:
                for x in f1:
                    for y in f2:
                        gx, gy = by_name[x], by_name[y]
                        if gx * gy != gy * gx:
                            raise ValueError(
                                f"images of {x} and {y} must commute"
                            )

    def image_of(self, name: str) -> Element:
        names = self.spec.generator_names()
        return self.images[names.index(name)]


def apply(endo: Endomorphism, g: Element) -> Element:
    """phi(g), evaluated on the normal form of g."""
    if g.spec != endo.spec:
        raise ValueError("element does not match the endomorphism's spec")
    l, p = endo.spec.klein_count, endo.spec.free_rank
    out = endo.spec.identity()
    for i, (s, t) in enumerate(g.klein):
        out = out * endo.images[2 * i] ** s
        out = out * endo.images[2 * i + 1] ** t
    for j, n in enumerate(g.free):
        out = out * endo.images[2 * l + j] ** n
    for k, e in enumerate(g.tor):
        if e:
            out = out * endo.images[2 * l + p + k]
    return out


def identity_endo(spec: GroupSpec) -> Endomorphism:
    return Endomorphism(spec, tuple(spec.generators()))


def compose(outer: Endomorphism, inner: Endomorphism) -> Endomorphism:
    """outer after inner."""
    if outer.spec != inner.spec:
        raise ValueError("endomorphisms live on different groups")
    return Endomorphism(outer.spec, tuple(apply(outer, g) for g in inner.images))


def endo_from_words(
    spec: GroupSpec,
    mapping: Mapping[str, str],
    fill_identity: bool = False,
) -> Endomorphism:
    """Build an endomorphism from generator-name -> word strings; with
    fill_identity, unmapped generators go to themselves."""
    names = spec.generator_names()
    unknown = set(mapping) - set(names)
    if unknown:
        raise ValueError(f"unknown generators in mapping: {sorted(unknown)}")
    images = []
    for name in names:
        if name in mapping:
            images.append(parse_word(spec, mapping[name]))
        elif fill_identity:
            images.append(spec.generator(name))
        else:
            raise ValueError(f"no image given for generator {name}")
    return Endomorphism(spec, tuple(images))


def is_automorphism(endo: Endomorphism) -> bool:
    """Surjectivity test; these groups are Hopfian, so onto means
    bijective."""
    return from_generators(endo.spec, endo.images) == special_subgroup(
        endo.spec, "full"
    )


def random_endo(
    spec: GroupSpec,
    rng: Optional[random.Random] = None,
    seed: Optional[int] = None,
    max_word_len: int = 3,
    attempts: int = 2000,
) -> Endomorphism:
    """Rejection-sample a valid endomorphism from random generator words."""
    if rng is None:
        rng = random.Random(seed)
    gens = spec.generators()
    if not gens:
        return identity_endo(spec)
    for _ in range(attempts):
        images = []
        for _ in gens:
            g = spec.identity()
            for _ in range(rng.randint(0, max_word_len)):
                base = rng.choice(gens)
                g = g * (base if rng.random() < 0.5 else base.inv())
            images.append(g)
        try:
            return Endomorphism(spec, tuple(images))
        except ValueError:
            continue
    raise RuntimeError(f"no valid endomorphism found in {attempts} attempts")


# ------------------------------------------------------------ fixed subgroups
#
# Affine integer forms (c0, c1, ..., cN): value c0 + sum ci * xi.  All
# exponent substitutions are parity + 2 * unknown, so every form carries
# even unknown coefficients; parities of form values are therefore class
# constants, which is what keeps the Klein sign twists linear.


def _form_const(c: int, n: int) -> tuple[int, ...]:
    return (c,) + (0,) * n


def _form_add(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(f, g))


def _form_scale(f: Sequence[int], k: int) -> tuple[int, ...]:
    return tuple(k * x for x in f)


def _form_parity(f: Sequence[int]) -> int:
    assert all(c % 2 == 0 for c in f[1:]), "unknown coefficient must be even"
    return f[0] % 2


@dataclass
class _SymElement:
    """Group element whose exponents are affine forms (torsion bits stay
    plain ints)."""

    klein: list[tuple[tuple[int, ...], tuple[int, ...]]]
    free: list[tuple[int, ...]]
    tor: list[int]


def _sym_identity(spec: GroupSpec, n: int) -> _SymElement:
    zero = _form_const(0, n)
    return _SymElement(
        [(zero, zero) for _ in range(spec.klein_count)],
        [zero for _ in range(spec.free_rank)],
        [0] * spec.torsion_count,
    )


def _sym_mul(x: _SymElement, y: _SymElement) -> _SymElement:
    klein = []
    for (s1, t1), (s2, t2) in zip(x.klein, y.klein):
        sign = -1 if _form_parity(t1) else 1
        klein.append((_form_add(s1, _form_scale(s2, sign)), _form_add(t1, t2)))
    free = [_form_add(f1, f2) for f1, f2 in zip(x.free, y.free)]
    tor = [e1 ^ e2 for e1, e2 in zip(x.tor, y.tor)]
    return _SymElement(klein, free, tor)


def _sym_pow(g: Element, k_form: Sequence[int], n: int) -> _SymElement:
    """Concrete element raised to an affine exponent (which must have
    even unknown coefficients)."""
    k_parity = _form_parity(k_form)
    klein = []
    for s, t in g.klein:
        if t % 2 == 0:
            klein.append((_form_scale(k_form, s), _form_scale(k_form, t)))
        else:
            klein.append((_form_const(s * k_parity, n), _form_scale(k_form, t)))
    free = [_form_scale(k_form, v) for v in g.free]
    tor = [e * k_parity for e in g.tor]
    return _SymElement(klein, free, tor)


@dataclass(frozen=True)
class FixResult:
    """Fixed subgroup plus the per-parity-class evidence: one canonical
    fixed element per solvable nonzero class, and the count of solvable
    classes including the zero class."""

    subgroup: Subgroup
    class_reps: tuple[Element, ...]
    solved_classes: int


def fixed_subgroup(endo: Endomorphism) -> FixResult:
    spec = endo.spec
    l, p, q = spec.klein_count, spec.free_rank, spec.torsion_count
    n_unk = 2 * l + p

    def unknown_form(slot: int, parity: int) -> tuple[int, ...]:
        coeffs = [0] * n_unk
        coeffs[slot] = 2
        return (parity,) + tuple(coeffs)

    def element_at(bits: Sequence[int], xhat: Sequence[int]) -> Element:
        klein = tuple(
            (bits[2 * i] + 2 * xhat[2 * i], bits[2 * i + 1] + 2 * xhat[2 * i + 1])
            for i in range(l)
        )
        free = tuple(bits[2 * l + j] + 2 * xhat[2 * l + j] for j in range(p))
        return Element(spec, klein, free, tuple(bits[2 * l + p:]))

    gens = []
    class_reps = []
    solved = 0
    for bits in itertools.product((0, 1), repeat=2 * l + p + q):
        exp_forms = [unknown_form(slot, bits[slot]) for slot in range(n_unk)]
        phi = _sym_identity(spec, n_unk)
        for i in range(l):
            phi = _sym_mul(phi, _sym_pow(endo.images[2 * i], exp_forms[2 * i], n_unk))
            phi = _sym_mul(
                phi, _sym_pow(endo.images[2 * i + 1], exp_forms[2 * i + 1], n_unk)
            )
        for j in range(p):
            phi = _sym_mul(
                phi, _sym_pow(endo.images[2 * l + j], exp_forms[2 * l + j], n_unk)
            )
        one = _form_const(1, n_unk)
        for k in range(q):
            if bits[2 * l + p + k]:
                phi = _sym_mul(phi, _sym_pow(endo.images[2 * l + p + k], one, n_unk))

        if phi.tor != list(bits[2 * l + p:]):
            continue
        phi_forms = []
        for s_form, t_form in phi.klein:
            phi_forms.append(s_form)
            phi_forms.append(t_form)
        phi_forms.extend(phi.free)
        rows = []
        rhs = []
        for f_phi, f_g in zip(phi_forms, exp_forms):
            rows.append([a - b for a, b in zip(f_phi[1:], f_g[1:])])
            rhs.append(f_g[0] - f_phi[0])
        sol = solve_linear(IntMatrix.from_rows(rows, n_unk), tuple(rhs))
        if sol is None:
            continue
        solved += 1
        if not any(bits):
            assert not any(sol.offset), "identity must be fixed"
            for row in sol.lattice.basis.entries:
                gens.append(element_at(bits, row))
        else:
            rep = element_at(bits, sol.offset)
            class_reps.append(rep)
            gens.append(rep)
    return FixResult(from_generators(spec, gens), tuple(class_reps), solved)


def fixed_family(endos: Iterable[Endomorphism]) -> Subgroup:
    """Common fixed subgroup of a family; empty family fixes everything."""
    endos = list(endos)
    if not endos:
        raise ValueError("need at least one endomorphism")
    out = fixed_subgroup(endos[0]).subgroup
    for endo in endos[1:]:
        if endo.spec != endos[0].spec:
            raise ValueError("family members live on different groups")
        out = intersect(out, fixed_subgroup(endo).subgroup)
    return out


def describe_endo(endo: Endomorphism) -> str:
    parts = [
        f"{name} -> {format_element(img)}"
        for name, img in zip(endo.spec.generator_names(), endo.images)
    ]
    return ", ".join(parts)
