"""Finitely generated subgroups with canonical, comparable data.

A subgroup H is stored as three pieces:

  * parity_basis: a reduced echelon basis of the image F of H in the
    parity quotient (Z/2)^(l+q);
  * reps: one canonical coset representative per basis vector;
  * lattice: the intersection of H with the even kernel, as a canonical
    HNF lattice in the (s_i, t_i/2, n_j) coordinates.

The even kernel has finite index, so this is a complete description:
membership, intersection, index and friends all reduce to parity algebra
over GF(2) plus exact lattice arithmetic.  Conjugation inside H acts on
the lattice by per-factor sign flips, and the stored lattice is closed
under the flips of the stored representatives; that closure is what
makes coset charts { chart(g) : g in H, parity f } = chart(rep_f) +
lattice valid, and it also makes every piece canonical.  Two Subgroup
values are equal as records exactly when they describe the same
subgroup.

Representatives are canonicalized by reducing their chart coordinates
modulo the lattice, and the basis representative product taken in
ascending pivot order plays the role of a transversal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .groupcore import (
    Element,
    GroupSpec,
    apply_signs,
    chart_coords,
    conjugation_signs,
    element_from_chart,
    element_from_t_coords,
    format_element,
    in_even_kernel,
    parity_quotient,
    sqrt_in_axes,
    t_coords,
)
from .intlat import (
    IntMatrix,
    Lattice,
    affine_meet,
    AffineLattice,
    lattice_index,
    lattice_join,
    lattice_meet,
    snf,
    snf_generators,
)


@dataclass(frozen=True)
class Subgroup:
    spec: GroupSpec
    parity_basis: tuple[tuple[int, ...], ...]
    reps: tuple[Element, ...]
    lattice: Lattice

    def stored_generators(self) -> list[Element]:
        """Lattice basis rows read back as elements, then the reps; a
        generating set of the subgroup."""
        out = [
            element_from_t_coords(self.spec, row) for row in self.lattice.basis.entries
        ]
        out.extend(self.reps)
        return out

    def coset_rep(self, bits: Sequence[int]) -> Optional[Element]:
        """Canonical representative with the given parity-quotient image,
        or None when the image is not realized in the subgroup."""
        v = list(bits)
        out = self.spec.identity()
        for basis_bits, rep in zip(self.parity_basis, self.reps):
            piv = basis_bits.index(1)
            if v[piv]:
                v = [x ^ y for x, y in zip(v, basis_bits)]
                out = out * rep
        if any(v):
            return None
        return out

    def is_trivial(self) -> bool:
        return not self.parity_basis and self.lattice.rank == 0


@dataclass(frozen=True)
class RankCertificate:
    """lower comes from the abelianization; upper from an explicit
    generating set (stored in generators).  exact means they met."""

    lower: int
    upper: int
    exact: bool
    generators: tuple[Element, ...]

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError("certificate is not exact")
        return self.lower


def from_generators(spec: GroupSpec, gens: Iterable[Element]) -> Subgroup:
    """Canonical subgroup data for the subgroup generated by gens."""
    dim = spec.exponent_dim
    gens = list(gens)
    entries: list[list] = []  # [pivot, bits, element], kept in RREF, sorted by pivot

    for g in gens:
        if g.spec != spec:
            raise ValueError("generator does not match the spec")
        if g.is_identity():
            continue
        v = list(parity_quotient(g))
        elt = g
        for piv, bits, belt in entries:
            if v[piv]:
                v = [x ^ y for x, y in zip(v, bits)]
                elt = elt * belt
        if any(v):
            piv = v.index(1)
            for e in entries:
                if e[1][piv]:
                    e[1] = [x ^ y for x, y in zip(e[1], v)]
                    e[2] = e[2] * elt
            entries.append([piv, v, elt])
            entries.sort(key=lambda e: e[0])

    # full transversal of the even-kernel cosets inside the subgroup
    transversal = {}
    k = len(entries)
    for mask in range(1 << k):
        bits = (0,) * spec.quotient_parity_dim
        elt = spec.identity()
        for i in range(k):
            if mask >> i & 1:
                bits = tuple(x ^ y for x, y in zip(bits, entries[i][1]))
                elt = elt * entries[i][2]
        transversal[bits] = elt  # ascending pivot order is the canonical product

    # Schreier generators of H meet even kernel over that transversal
    vectors = []
    gen_list = [g for g in gens if not g.is_identity()]
    for r in transversal.values():
        for x in gen_list:
            u = r * x
            rbar = transversal[tuple(parity_quotient(u))]
            m = rbar.inv() * u
            assert in_even_kernel(m)
            vec = t_coords(m)
            if any(vec):
                vectors.append(vec)
    lat = Lattice.span(dim, vectors)

    # close under conjugation sign flips of the representatives
    sigs = [conjugation_signs(e[2]) for e in entries]
    while True:
        extra = [
            apply_signs(sig, row)
            for sig in sigs
            for row in lat.basis.entries
            if not lat.contains(apply_signs(sig, row))
        ]
        if not extra:
            break
        lat = lattice_join(lat, Lattice.span(dim, extra))

    # canonical representatives: reduce charts modulo the lattice
    parity_basis = []
    reps = []
    for piv, bits, elt in entries:
        reduced = lat.reduce(chart_coords(elt))
        parity_basis.append(tuple(bits))
        reps.append(element_from_chart(spec, reduced, bits))
    return Subgroup(spec, tuple(parity_basis), tuple(reps), lat)


def membership(g: Element, h: Subgroup) -> bool:
    if g.spec != h.spec:
        raise ValueError("element does not match the subgroup's spec")
    rep = h.coset_rep(parity_quotient(g))
    if rep is None:
        return False
    m = rep.inv() * g
    return h.lattice.contains(t_coords(m))


def containment(h: Subgroup, k: Subgroup) -> bool:
    """Is h a subgroup of k?"""
    if h.spec != k.spec:
        raise ValueError("subgroups live in different groups")
    return all(membership(g, k) for g in h.stored_generators())


def equals(h: Subgroup, k: Subgroup) -> bool:
    """Canonical data makes this plain equality of records."""
    return h == k


def intersect(h: Subgroup, k: Subgroup) -> Subgroup:
    if h.spec != k.spec:
        raise ValueError("subgroups live in different groups")
    spec = h.spec
    meet_lat = lattice_meet(h.lattice, k.lattice)
    gens = [element_from_t_coords(spec, row) for row in meet_lat.basis.entries]
    # walk the nonzero parity classes shared by both subgroups
    for mask in range(1, 1 << len(h.parity_basis)):
        bits = (0,) * spec.quotient_parity_dim
        for i in range(len(h.parity_basis)):
            if mask >> i & 1:
                bits = tuple(x ^ y for x, y in zip(bits, h.parity_basis[i]))
        rep_h = h.coset_rep(bits)
        rep_k = k.coset_rep(bits)
        if rep_k is None:
            continue
        meet = affine_meet(
            AffineLattice.make(chart_coords(rep_h), h.lattice),
            AffineLattice.make(chart_coords(rep_k), k.lattice),
        )
        if meet is not None:
            gens.append(element_from_chart(spec, meet.offset, bits))
    return from_generators(spec, gens)


def index(h: Subgroup, k: Subgroup) -> Optional[int]:
    """[k : h] for h <= k; None when infinite."""
    if not containment(h, k):
        raise ValueError("index requires the first subgroup inside the second")
    li = lattice_index(h.lattice, k.lattice)
    if li is None:
        return None
    return (1 << (len(k.parity_basis) - len(h.parity_basis))) * li


def commutator_subgroup(h: Subgroup) -> Subgroup:
    """Derived subgroup: the sign-flip closure of the span of pairwise
    commutators of the stored generators."""
    spec = h.spec
    gens = h.stored_generators()
    vecs = []
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            c = x * y * x.inv() * y.inv()
            if not c.is_identity():
                vecs.append(t_coords(c))
    lat = Lattice.span(spec.exponent_dim, vecs)
    sigs = [conjugation_signs(rep) for rep in h.reps]
    while True:
        extra = [
            apply_signs(sig, row)
            for sig in sigs
            for row in lat.basis.entries
            if not lat.contains(apply_signs(sig, row))
        ]
        if not extra:
            break
        lat = lattice_join(lat, Lattice.span(spec.exponent_dim, extra))
    return Subgroup(spec, (), (), lat)


def _relation_rows(h: Subgroup) -> list[list[int]]:
    """Abelianized defining relations of h over the stored generators
    (lattice basis first, then reps): rep squares land in the lattice,
    conjugation twists lattice vectors, rep pairs commute up to the
    lattice."""
    r = h.lattice.rank
    m = len(h.reps)
    rows = []
    for j, rep in enumerate(h.reps):
        w = h.lattice.coords_of(t_coords(rep * rep))
        assert w is not None, "rep square escaped the lattice"
        row = [-x for x in w] + [0] * m
        row[r + j] = 2
        rows.append(row)
        sig = conjugation_signs(rep)
        for u in h.lattice.basis.entries:
            diff = [a - b for a, b in zip(apply_signs(sig, u), u)]
            if any(diff):
                w2 = h.lattice.coords_of(diff)
                assert w2 is not None, "lattice is not conjugation closed"
                rows.append(list(w2) + [0] * m)
    for j1 in range(m):
        for j2 in range(j1 + 1, m):
            c = h.reps[j1] * h.reps[j2] * h.reps[j1].inv() * h.reps[j2].inv()
            if not c.is_identity():
                w3 = h.lattice.coords_of(t_coords(c))
                assert w3 is not None
                rows.append(list(w3) + [0] * m)
    return rows


def abelianization(h: Subgroup) -> tuple[int, tuple[int, ...]]:
    """(free rank, invariant factors > 1) of h made abelian."""
    n = h.lattice.rank + len(h.reps)
    rows = _relation_rows(h)
    mat = IntMatrix.from_rows(rows, n) if rows else IntMatrix(n, ())
    factors, free = snf(mat)
    return free, tuple(f for f in factors if f > 1)


def _all_commute(gens: Sequence[Element]) -> bool:
    return all(
        x * y == y * x for i, x in enumerate(gens) for y in gens[i + 1:]
    )


def rank(h: Subgroup, search_cap: int = 20000) -> RankCertificate:
    """Two-sided rank certificate.

    The lower bound is the rank of the abelianization.  For abelian
    subgroups a matching generating set is produced directly from the
    Smith transform, so the certificate is exact.  Otherwise the stored
    generators are greedily thinned; if that does not meet the lower
    bound, generating subsets drawn from the stored generators and their
    pairwise products are searched, smallest size first, up to
    search_cap combinations per size.
    """
    stored = h.stored_generators()
    if not stored:
        return RankCertificate(0, 0, True, ())
    free, torsion = abelianization(h)
    lower = free + len(torsion)
    n = len(stored)
    if _all_commute(stored):
        rows = _relation_rows(h)
        mat = IntMatrix.from_rows(rows, n) if rows else IntMatrix(n, ())
        gens = []
        for _, vec in snf_generators(mat):
            g = h.spec.identity()
            for coef, base in zip(vec, stored):
                if coef:
                    g = g * base ** coef
            gens.append(g)
        assert len(gens) == lower
        assert from_generators(h.spec, gens) == h, "smith generators failed to regenerate"
        return RankCertificate(lower, lower, True, tuple(gens))

    current = list(stored)
    i = 0
    while i < len(current):
        trial = current[:i] + current[i + 1:]
        if trial and from_generators(h.spec, trial) == h:
            current = trial
        else:
            i += 1
    upper_set = tuple(current)
    if len(upper_set) > lower:
        pool = []
        seen = set()
        products = [
            x * y for i, x in enumerate(stored) for y in stored[i + 1:]
        ]
        for g in list(stored) + products:
            if g.is_identity() or g in seen:
                continue
            seen.add(g)
            pool.append(g)
        for size in range(lower, len(upper_set)):
            if math.comb(len(pool), size) > search_cap:
                break
            hit = None
            for combo in itertools.combinations(pool, size):
                if from_generators(h.spec, list(combo)) == h:
                    hit = combo
                    break
            if hit is not None:
                upper_set = tuple(hit)
                break
    return RankCertificate(lower, len(upper_set), len(upper_set) == lower, upper_set)


_SPECIAL_GENS = {
    "full": lambda spec: spec.generators(),
    "trivial": lambda spec: [],
    "axes": lambda spec: [
        spec.generator(f"a{i}") for i in range(1, spec.klein_count + 1)
    ],
    "commutator": lambda spec: [
        spec.generator(f"a{i}") ** 2 for i in range(1, spec.klein_count + 1)
    ],
    "even_kernel": lambda spec: [
        spec.generator(f"a{i}") for i in range(1, spec.klein_count + 1)
    ]
    + [spec.generator(f"b{i}") ** 2 for i in range(1, spec.klein_count + 1)]
    + [spec.generator(f"c{j}") for j in range(1, spec.free_rank + 1)],
}


def special_subgroup(spec: GroupSpec, which: str) -> Subgroup:
    """Named subgroups: full, trivial, axes (the a-generators),
    commutator (their even powers), even_kernel (parity quotient
    kernel)."""
    try:
        gens = _SPECIAL_GENS[which](spec)
    except KeyError:
        raise ValueError(
            f"unknown special subgroup {which!r}; pick from {sorted(_SPECIAL_GENS)}"
        ) from None
    return from_generators(spec, gens)


def is_sqrt_closed(h: Subgroup) -> bool:
    """Does h contain the square root of each of its commutator-subgroup
    elements?  Checking a lattice basis of the intersection suffices
    because roots halve coordinates linearly."""
    meet = intersect(h, special_subgroup(h.spec, "commutator"))
    for row in meet.lattice.basis.entries:
        root = sqrt_in_axes(element_from_t_coords(h.spec, row))
        if not membership(root, h):
            return False
    return True


@dataclass(frozen=True)
class SurfaceSplit:
    """Result of splitting a subgroup of K x (Z/2)^q over its Klein
    projection: projection_type names the projection, splitting pairs
    each projection generator with a preimage in the subgroup, and
    torsion_part is the central intersection with (Z/2)^q."""

    projection_type: str
    splitting: tuple[tuple[Element, Element], ...]
    torsion_part: Subgroup


def decompose_euc2(h: Subgroup) -> SurfaceSplit:
    """Split h <= K x (Z/2)^q as (Klein projection) x (torsion part).

    The projection is trivial, Z, Z^2, or all of K up to isomorphism;
    each projection generator lifts into h after decorating it with one
    of the 2^q torsion vectors, and the lifted generators together with
    the torsion part regenerate h.
    """
    spec = h.spec
    if spec.klein_count != 1 or spec.free_rank != 0:
        raise ValueError("decomposition requires a spec with one Klein factor and no free part")
    ns2 = GroupSpec(1, 0, 0)
    proj = from_generators(
        ns2, [Element(ns2, g.klein, (), ()) for g in h.stored_generators()]
    )
    torsion = intersect(
        h,
        from_generators(
            spec, [spec.generator(f"d{j}") for j in range(1, spec.torsion_count + 1)]
        ),
    )
    if not proj.parity_basis:
        rk = proj.lattice.rank
        if rk == 0:
            ptype, pgens = "trivial", []
        elif rk == 1:
            ptype = "Z"
            pgens = [element_from_t_coords(ns2, proj.lattice.basis.entries[0])]
        else:
            ptype = "Z^2"
            pgens = [element_from_t_coords(ns2, row) for row in proj.lattice.basis.entries]
    else:
        rep = proj.reps[0]
        if proj.lattice.rank == 1:
            # abelian: the canonical odd representative generates everything
            assert proj.lattice.basis.entries[0][0] == 0
            ptype, pgens = "Z", [rep]
        else:
            ptype = "NS2"
            u_vec, v_vec = proj.lattice.basis.entries
            assert u_vec[1] == 0 and v_vec[0] == 0, "nonabelian projection lattice must be diagonal"
            pgens = [element_from_t_coords(ns2, u_vec), rep]
    assert from_generators(ns2, pgens) == proj

    split = []
    for w in pgens:
        lifted = None
        for bits in itertools.product((0, 1), repeat=spec.torsion_count):
            cand = Element(spec, w.klein, (), bits)
            if membership(cand, h):
                lifted = cand
                break
        assert lifted is not None, "projection generator has no preimage"
        split.append((w, lifted))
    regen = from_generators(
        spec, [g for _, g in split] + torsion.stored_generators()
    )
    if regen != h:
        raise ArithmeticError("splitting failed to regenerate the subgroup")
    return SurfaceSplit(ptype, tuple(split), torsion)


def generator_words(h: Subgroup) -> list[str]:
    """Normal-form words for the stored generators (lattice rows first,
    then coset reps); the trivial subgroup yields ["1"]."""
    gens = h.stored_generators()
    if not gens:
        return ["1"]
    return [format_element(g) for g in gens]
