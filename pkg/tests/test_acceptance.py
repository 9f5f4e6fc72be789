"""Acceptance gate: nine instance-reproduction and property criteria.

Each test prints one `ACCEPTANCE <n> <label>: PASS|FAIL [elapsed/budget]`
line directly to the terminal (capture disabled) and enforces its runtime
budget.  Expected values are frozen; nothing here is derived from the
implementation under test.
"""

import contextlib
import itertools
import random
import time

import pytest

from fixlab.certify import (
    check_compressed_certificate,
    classify,
    search_compression_counterexample,
    sample_inertia_property,
)
from fixlab.cli import main, parse_subgroup
from fixlab.groupcore import Element, GroupSpec, format_element, parse_word
from fixlab.intlat import IntMatrix, hnf, lattice_meet, snf, solve_linear
from fixlab.morphism import (
    apply,
    endo_from_words,
    fixed_subgroup,
    is_automorphism,
    random_endo,
)
from fixlab.subgroup import (
    abelianization,
    from_generators,
    generator_words,
    index,
    intersect,
    is_sqrt_closed,
    membership,
    rank,
)


@pytest.fixture
def report(capsys):
    @contextlib.contextmanager
    def _report(num, label, budget):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nACCEPTANCE {num} {label}: FAIL")
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < budget
        with capsys.disabled():
            print(
                f"\nACCEPTANCE {num} {label}:"
                f" {'PASS' if ok else 'FAIL'} [{elapsed:.2f}s / {budget:.0f}s]"
            )
        assert ok, f"runtime {elapsed:.2f}s exceeded the {budget}s budget"

    return _report


def sub(spec, *words):
    return from_generators(spec, [parse_word(spec, w) for w in words])


def test_criterion_1_twist_map_reproduction(report, tmp_path, capsys):
    with report(1, "twist-map-reproduction", 10.0):
        spec = GroupSpec(1, 2, 1)
        images = {
            "a1": "a1 d1",
            "b1": "b1 a1",
            "c1": "c1 d1",
            "c2": "c2^-1",
            "d1": "d1",
        }
        phi = endo_from_words(spec, images)

        map_path = tmp_path / "twist.map"
        map_path.write_text("".join(f"{k} -> {v}\n" for k, v in images.items()))
        assert main(["check-auto", "-g", "NS2 x Z^2 x Z2", "-m", str(map_path)]) == 0
        assert capsys.readouterr().out == "true\n"
        assert is_automorphism(phi)

        fix = fixed_subgroup(phi).subgroup
        assert fix == sub(spec, "a1^2", "b1^2", "a1 c1", "d1")

        cert = rank(fix)
        assert cert.exact and cert.value == 4
        assert abelianization(fix) == (3, (2,))

        w = search_compression_counterexample(fix, max_word_len=3, max_extra_gens=2)
        assert w is not None
        assert w.k == sub(spec, "a1 c1", "b1", "d1")
        assert w.k_rank.exact and w.k_rank.value == 3


def test_criterion_2_shear_fix_and_meet(report):
    with report(2, "shear-fix-and-meet", 5.0):
        spec = GroupSpec(1, 1, 0)
        phi = endo_from_words(spec, {"b1": "b1 a1"}, fill_identity=True)
        fix = fixed_subgroup(phi).subgroup
        assert fix == sub(spec, "a1", "b1^2", "c1")
        assert rank(fix).value == 3

        k = sub(spec, "a1 c1", "b1")
        meet = intersect(fix, k)
        assert meet == sub(spec, "a1 c1", "a1^2", "b1^2")
        assert rank(meet).value == 3
        assert rank(k).value == 2
        assert index(meet, fix) == 2


def test_criterion_3_two_block_inertia_witness(report, capsys):
    with report(3, "two-block-inertia-witness", 30.0):
        spec = GroupSpec(2, 0, 0)
        phi = endo_from_words(
            spec, {"b1": "b1 a1", "b2": "b2^-1"}, fill_identity=True
        )
        assert is_automorphism(phi)
        fix = fixed_subgroup(phi).subgroup
        assert fix == sub(spec, "a1", "b1^2", "a2")
        assert rank(fix).value == 3

        code = main(
            ["search-inertia", "-g", "NS2^2",
             "--sub", "; ".join(generator_words(fix))]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "kind: inertia"
        ranks = lines[-1]  # "rank(H meet K) = m, rank(K) = k"
        meet_rank = int(ranks.split("= ")[1].split(",")[0])
        k_rank = int(ranks.rsplit("= ", 1)[1])
        assert meet_rank > k_rank


def test_criterion_4_even_powers_compression(report, capsys):
    with report(4, "even-powers-compression", 5.0):
        spec = GroupSpec(1, 1, 0)
        k = sub(spec, "a1 c1", "b1")
        assert membership(parse_word(spec, "a1^2"), k)
        assert membership(parse_word(spec, "c1^2"), k)

        h = sub(spec, "a1^2", "b1^2", "c1^2")
        cert = rank(h)
        assert cert.exact and cert.value == 3

        code = main(
            ["search-compression", "-g", "NS2 x Z", "--sub", "a1^2; b1^2; c1^2"]
        )
        out = capsys.readouterr().out
        assert code == 0
        k_words = out.splitlines()[2].removeprefix("K = ")
        assert parse_subgroup(spec, k_words.replace(",", ";")) == k
        assert out.splitlines()[3] == "rank(H) = 3, rank(K) = 2"


def test_criterion_5_inertia_sampling(report):
    with report(5, "inertia-property-sampling", 300.0):
        for q in range(4):
            spec = GroupSpec(1, 0, q)
            out = sample_inertia_property(
                spec, trials=500, gen_bound=3, word_len=4, seed=100 + q
            )
            assert out.trials == 500
            assert not out.violations, (q, out.render())
            assert out.checked >= 0.9 * out.trials, (q, out.render())


def test_criterion_6_fixed_subgroups_compressed(report):
    with report(6, "fixed-subgroups-compressed", 600.0):
        shapes = [(1, 0, 0), (1, 1, 0), (2, 0, 0), (2, 1, 0)]
        for si, shape in enumerate(shapes):
            spec = GroupSpec(*shape)
            for i in range(200):
                phi = random_endo(spec, seed=1000 * si + i)
                fix = fixed_subgroup(phi).subgroup
                assert is_sqrt_closed(fix), (shape, i)
                assert check_compressed_certificate(fix) is not None, (shape, i)
                assert (
                    search_compression_counterexample(fix, 3, 2) is None
                ), (shape, i)


def test_criterion_7_fixed_point_box_oracle(report):
    with report(7, "fixed-point-box-oracle", 300.0):
        shapes = [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1),
                  (2, 0, 0), (1, 2, 0), (1, 0, 2)]
        assert all(2 * l + p + q <= 4 for l, p, q in shapes)
        for i in range(50):
            spec = GroupSpec(*shapes[i % len(shapes)])
            phi = random_endo(spec, seed=5000 + i)
            fix = fixed_subgroup(phi).subgroup
            l = spec.klein_count
            ranges = [range(-3, 4)] * (2 * l + spec.free_rank)
            ranges += [range(2)] * spec.torsion_count
            for coords in itertools.product(*ranges):
                klein = tuple(
                    (coords[2 * j], coords[2 * j + 1]) for j in range(l)
                )
                free = coords[2 * l: 2 * l + spec.free_rank]
                tor = coords[2 * l + spec.free_rank:]
                g = Element(spec, klein, tuple(free), tuple(tor))
                assert (apply(phi, g) == g) == membership(g, fix), (i, g)


def test_criterion_8_classification_table(report):
    with report(8, "classification-table", 1.0):
        for l, p, q in itertools.product(range(4), repeat=3):
            got = classify(GroupSpec(l, p, q))
            want_compressed = l == 0 or (l == 1 and p == 0) or q == 0
            want_inert = l == 0 or (l == 1 and p == 0)
            assert got.compressed_all == want_compressed, (l, p, q)
            assert got.inert_all == want_inert, (l, p, q)


def test_criterion_9_kernel_property_suites(report):
    with report(9, "kernel-property-suites", 60.0):
        rng = random.Random(90210)

        def rand_matrix():
            n = rng.randint(1, 4)
            m = rng.randint(1, 4)
            return IntMatrix.from_rows(
                [[rng.randint(-6, 6) for _ in range(m)] for _ in range(n)], m
            )

        for _ in range(1000):
            a = rand_matrix()
            lat, _ = hnf(a)
            assert all(lat.contains(row) for row in a.entries)
            relat, _ = hnf(lat.basis)
            assert relat.basis.entries == lat.basis.entries

            factors, free = snf(a)
            assert len(factors) + free == a.ncols
            assert all(x > 0 for x in factors)
            assert all(y % x == 0 for x, y in zip(factors, factors[1:]))

            x = [rng.randint(-4, 4) for _ in range(a.ncols)]
            b = [sum(r * v for r, v in zip(row, x)) for row in a.entries]
            sol = solve_linear(a, b)
            assert sol is not None and sol.contains(x)
            y = sol.offset
            assert [sum(r * v for r, v in zip(row, y)) for row in a.entries] == b

            dim = a.ncols
            l1 = lat
            l2, _ = hnf(IntMatrix.from_rows(
                [[rng.randint(-6, 6) for _ in range(dim)]
                 for _ in range(rng.randint(1, 4))], dim))
            meet = lattice_meet(l1, l2)
            for row in meet.basis.entries:
                assert l1.contains(row) and l2.contains(row)
            probe = [rng.randint(-3, 3) for _ in range(dim)]
            assert meet.contains(probe) == (l1.contains(probe) and l2.contains(probe))

        def rand_element(spec):
            klein = tuple(
                (rng.randint(-4, 4), rng.randint(-4, 4))
                for _ in range(spec.klein_count)
            )
            free = tuple(rng.randint(-4, 4) for _ in range(spec.free_rank))
            tor = tuple(rng.randint(0, 1) for _ in range(spec.torsion_count))
            return Element(spec, klein, free, tor)

        for _ in range(1000):
            spec = GroupSpec(rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2))
            g, h, k = (rand_element(spec) for _ in range(3))
            one = spec.identity()
            assert (g * h) * k == g * (h * k)
            assert g * one == g == one * g
            assert g * g.inv() == one == g.inv() * g
            n = rng.randint(-3, 3)
            power = one
            for _ in range(abs(n)):
                power = power * (g if n > 0 else g.inv())
            assert g ** n == power
            assert parse_word(spec, format_element(g)) == g
