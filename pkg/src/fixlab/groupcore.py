"""Normal-form arithmetic in groups G = K^l x Z^p x (Z/2)^q where K is
the Klein bottle group < a, b | b a b^-1 a >.

Every element has a unique normal form

    a1^s1 b1^t1 ... al^sl bl^tl c1^n1 ... cp^np d1^e1 ... dq^eq

with integer s, t, n and e in {0, 1}; an ``Element`` stores exactly these
exponents, so equality is structural.  The whole multiplication table
follows from the relation b a = a^-1 b: pushing a power of b past a power
of a flips the sign of the a-exponent when the b-exponent is odd,

    (s, t) * (s', t') = (s + (-1)^t s', t + t').

Words use the generator names above, e.g. ``"a1^2 b1^-3 c1 d2"``; the
empty word and the token ``"1"`` both denote the identity.

>>> spec = GroupSpec(1, 0, 0)
>>> format_element(parse_word(spec, "b1 a1"))
'a1^-1 b1'

Useful substructures all have coordinate descriptions: the parity class
map sends g to all exponents mod 2, the parity quotient keeps only the
b-exponent parities and the torsion bits, and its kernel (every
b-exponent even, torsion trivial) is free abelian of rank 2l + p with
coordinates (s_i, t_i/2, n_j).  Conjugation acts on that kernel by
flipping the sign of s_i exactly when the conjugator's t_i is odd.
Elements of the commutator subgroup (even powers of the a-generators)
have unique square roots, found by halving.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class EuclideanBlock(Enum):
    """Building blocks for group specs, one per flat closed surface
    group up to isomorphism: the trivial group, Z (annulus-like free
    factor), Z^2 (torus), Z/2 (projective-plane abelianization quotient
    used as the order-two factor), and the Klein bottle group."""

    TRIVIAL = "1"
    Z = "Z"
    TORUS = "T2"
    Z2 = "Z2"
    KLEIN = "NS2"


@dataclass(frozen=True)
class GroupSpec:
    """Shape of G = K^klein_count x Z^free_rank x (Z/2)^torsion_count."""

    klein_count: int
    free_rank: int
    torsion_count: int

    def __post_init__(self):
        if self.klein_count < 0 or self.free_rank < 0 or self.torsion_count < 0:
            raise ValueError("spec counts must be non-negative")

    @property
    def exponent_dim(self) -> int:
        """Number of integer exponent coordinates (2l + p)."""
        return 2 * self.klein_count + self.free_rank

    @property
    def parity_dim(self) -> int:
        """Dimension of the full parity class space (2l + p + q)."""
        return 2 * self.klein_count + self.free_rank + self.torsion_count

    @property
    def quotient_parity_dim(self) -> int:
        """Dimension of the parity quotient (l + q)."""
        return self.klein_count + self.torsion_count

    def identity(self) -> "Element":
        return Element(
            self,
            ((0, 0),) * self.klein_count,
            (0,) * self.free_rank,
            (0,) * self.torsion_count,
        )

    def generator_names(self) -> list[str]:
        names = []
        for i in range(1, self.klein_count + 1):
            names.append(f"a{i}")
            names.append(f"b{i}")
        names += [f"c{j}" for j in range(1, self.free_rank + 1)]
        names += [f"d{j}" for j in range(1, self.torsion_count + 1)]
        return names

    def generator(self, name: str) -> "Element":
        m = re.fullmatch(r"([abcd])([1-9][0-9]*)", name)
        if not m:
            raise ValueError(f"unknown generator name {name!r}")
        kind, idx = m.group(1), int(m.group(2))
        klein = [[0, 0] for _ in range(self.klein_count)]
        free = [0] * self.free_rank
        tor = [0] * self.torsion_count
        if kind in ("a", "b"):
            if idx > self.klein_count:
                raise ValueError(f"generator {name!r} out of range for this spec")
            klein[idx - 1][0 if kind == "a" else 1] = 1
        elif kind == "c":
            if idx > self.free_rank:
                raise ValueError(f"generator {name!r} out of range for this spec")
            free[idx - 1] = 1
        else:
            if idx > self.torsion_count:
                raise ValueError(f"generator {name!r} out of range for this spec")
            tor[idx - 1] = 1
        return Element(self, tuple((s, t) for s, t in klein), tuple(free), tuple(tor))

    def generators(self) -> list["Element"]:
        return [self.generator(n) for n in self.generator_names()]


def canonicalize_spec(blocks: Iterable[EuclideanBlock]) -> GroupSpec:
    """Collapse a list of blocks to counts; order never matters since the
    product is direct."""
    l = p = q = 0
    for b in blocks:
        if b is EuclideanBlock.KLEIN:
            l += 1
        elif b is EuclideanBlock.TORUS:
            p += 2
        elif b is EuclideanBlock.Z:
            p += 1
        elif b is EuclideanBlock.Z2:
            q += 1
        elif b is EuclideanBlock.TRIVIAL:
            pass
        else:
            raise ValueError(f"unknown block {b!r}")
    return GroupSpec(l, p, q)


@dataclass(frozen=True, slots=True)
class Element:
    """Group element in normal form: klein holds (s_i, t_i) pairs, free
    the c-exponents, tor the d-bits (always 0/1)."""

    spec: GroupSpec
    klein: tuple[tuple[int, int], ...]
    free: tuple[int, ...]
    tor: tuple[int, ...]

    def __post_init__(self):
        if (
            len(self.klein) != self.spec.klein_count
            or len(self.free) != self.spec.free_rank
            or len(self.tor) != self.spec.torsion_count
        ):
            raise ValueError("exponent tuples do not match the spec")
        if any(e not in (0, 1) for e in self.tor):
            raise ValueError("torsion bits must be 0 or 1")

    def __mul__(self, other: "Element") -> "Element":
        if self.spec != other.spec:
            raise ValueError("elements live in different groups")
        klein = tuple(
            (s + (s2 if t % 2 == 0 else -s2), t + t2)
            for (s, t), (s2, t2) in zip(self.klein, other.klein)
        )
        free = tuple(n + n2 for n, n2 in zip(self.free, other.free))
        tor = tuple(e ^ e2 for e, e2 in zip(self.tor, other.tor))
        return Element(self.spec, klein, free, tor)

    def inv(self) -> "Element":
        klein = tuple((-s if t % 2 == 0 else s, -t) for s, t in self.klein)
        return Element(self.spec, klein, tuple(-n for n in self.free), self.tor)

    def __pow__(self, k: int) -> "Element":
        klein = tuple(
            (k * s, k * t) if t % 2 == 0 else (s * (k % 2), k * t) for s, t in self.klein
        )
        free = tuple(k * n for n in self.free)
        tor = tuple((k * e) % 2 for e in self.tor)
        return Element(self.spec, klein, free, tor)

    def is_identity(self) -> bool:
        return (
            all(s == 0 and t == 0 for s, t in self.klein)
            and not any(self.free)
            and not any(self.tor)
        )

    def sort_key(self):
        return (self.klein, self.free, self.tor)


def mul(g: Element, h: Element) -> Element:
    return g * h


def inv(g: Element) -> Element:
    return g.inv()


def pow(g: Element, k: int) -> Element:  # noqa: A001 - contract name
    return g ** k


_TOKEN = re.compile(r"([abcd])([1-9][0-9]*)(?:\^(-?[0-9]+))?$")


class WordError(ValueError):
    """Raised for malformed words; carries the offending token position."""


def parse_word(spec: GroupSpec, text: str) -> Element:
    """Parse a word over the spec's generators and return its normal
    form.  The empty word and "1" denote the identity."""
    out = spec.identity()
    for pos, tok in enumerate(text.split()):
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise WordError(f"token {pos + 1}: cannot parse {tok!r}")
        name = m.group(1) + m.group(2)
        k = int(m.group(3)) if m.group(3) is not None else 1
        try:
            gen = spec.generator(name)
        except ValueError as exc:
            raise WordError(f"token {pos + 1}: {exc}") from None
        out = out * gen ** k
    return out


def format_element(g: Element) -> str:
    """Normal-form word for g; the identity prints as "1"."""
    parts = []
    for i, (s, t) in enumerate(g.klein, start=1):
        if s:
            parts.append(f"a{i}" if s == 1 else f"a{i}^{s}")
        if t:
            parts.append(f"b{i}" if t == 1 else f"b{i}^{t}")
    for j, n in enumerate(g.free, start=1):
        if n:
            parts.append(f"c{j}" if n == 1 else f"c{j}^{n}")
    for j, e in enumerate(g.tor, start=1):
        if e:
            parts.append(f"d{j}")
    return " ".join(parts) if parts else "1"


def parse_and_normalize(spec: GroupSpec, text: str) -> str:
    return format_element(parse_word(spec, text))


def parity_class(g: Element) -> tuple[int, ...]:
    """All exponents mod 2, in normal-form order; a homomorphism onto
    (Z/2)^(2l+p+q)."""
    out = []
    for s, t in g.klein:
        out.append(s % 2)
        out.append(t % 2)
    out += [n % 2 for n in g.free]
    out += list(g.tor)
    return tuple(out)


def parity_quotient(g: Element) -> tuple[int, ...]:
    """b-exponent parities and torsion bits: the quotient whose kernel is
    the even kernel."""
    return tuple(t % 2 for _, t in g.klein) + g.tor


def in_even_kernel(g: Element) -> bool:
    return all(t % 2 == 0 for _, t in g.klein) and not any(g.tor)


def t_coords(g: Element) -> tuple[int, ...]:
    """Free abelian coordinates (s_i, t_i/2, ..., n_j) of an even-kernel
    element."""
    if not in_even_kernel(g):
        raise ValueError("element is not in the even kernel")
    out = []
    for s, t in g.klein:
        out.append(s)
        out.append(t // 2)
    return tuple(out) + g.free


def element_from_t_coords(spec: GroupSpec, coords: Sequence[int]) -> Element:
    if len(coords) != spec.exponent_dim:
        raise ValueError("coordinate length does not match the spec")
    l = spec.klein_count
    klein = tuple((coords[2 * i], 2 * coords[2 * i + 1]) for i in range(l))
    free = tuple(coords[2 * l:])
    return Element(spec, klein, free, (0,) * spec.torsion_count)


def chart_coords(g: Element) -> tuple[int, ...]:
    """Integer chart (s_i, (t_i - t_i mod 2)/2, ..., n_j) for an
    arbitrary element; together with parity_quotient(g) it determines
    g."""
    out = []
    for s, t in g.klein:
        out.append(s)
        out.append((t - (t % 2)) // 2)
    return tuple(out) + g.free


def element_from_chart(
    spec: GroupSpec, coords: Sequence[int], quotient_bits: Sequence[int]
) -> Element:
    """Inverse of (chart_coords, parity_quotient)."""
    if len(coords) != spec.exponent_dim:
        raise ValueError("coordinate length does not match the spec")
    l = spec.klein_count
    if len(quotient_bits) != spec.quotient_parity_dim:
        raise ValueError("parity length does not match the spec")
    klein = tuple(
        (coords[2 * i], 2 * coords[2 * i + 1] + quotient_bits[i]) for i in range(l)
    )
    free = tuple(coords[2 * l:])
    tor = tuple(int(b) for b in quotient_bits[l:])
    return Element(spec, klein, free, tor)


def conjugation_signs(g: Element) -> tuple[int, ...]:
    """Sign vector of the action of conjugation by g on even-kernel
    coordinates: s_i flips iff t_i(g) is odd; t/2 and n coordinates are
    untouched."""
    out = []
    for _, t in g.klein:
        out.append(-1 if t % 2 else 1)
        out.append(1)
    return tuple(out) + (1,) * g.spec.free_rank


def apply_signs(signs: Sequence[int], vec: Sequence[int]) -> tuple[int, ...]:
    return tuple(s * v for s, v in zip(signs, vec))


_SPECIAL = ("axes", "commutator", "even_kernel")


def in_special(g: Element, which: str) -> bool:
    """Membership in a distinguished subgroup: "axes" is the free abelian
    group on the a-generators, "commutator" its index-2^l sublattice of
    even a-powers (the commutator subgroup of G), "even_kernel" the
    kernel of the parity quotient."""
    if which == "axes":
        return all(t == 0 for _, t in g.klein) and not any(g.free) and not any(g.tor)
    if which == "commutator":
        return (
            all(t == 0 and s % 2 == 0 for s, t in g.klein)
            and not any(g.free)
            and not any(g.tor)
        )
    if which == "even_kernel":
        return in_even_kernel(g)
    raise ValueError(f"unknown distinguished subgroup {which!r}; pick from {_SPECIAL}")


def sqrt_in_axes(g: Element) -> Element:
    """The unique square root of a commutator-subgroup element; it lies
    in the axes subgroup and is found by halving the a-exponents."""
    if not in_special(g, "commutator"):
        raise ValueError("element is not in the commutator subgroup")
    klein = tuple((s // 2, 0) for s, _ in g.klein)
    return Element(g.spec, klein, g.free, g.tor)
