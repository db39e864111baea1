from fractions import Fraction

import pytest

from arithfractal import (
    FractalSystem,
    IntAffineMap,
    IntPoint,
    ProjPoint,
    audit_exactness,
    curve_intersection_probe,
    enumerate_system,
    is_member,
    load_corpus_system,
    parse_polynomial,
    replay_certificate,
)
from arithfractal.errors import ConfigError, UnsupportedSpaceError
from arithfractal.spaces import system_from_dict


def digit_oracle(bound, digits):
    """Brute scan: nonnegative integers whose decimal digits lie in a set."""
    allowed = set(str(d) for d in digits)
    return [m for m in range(bound + 1) if set(str(m)) <= allowed]


# --- enumerate --------------------------------------------------------------


def test_digits_bag_matches_brute_scan(digits01):
    bag = enumerate_system(digits01, 1000)
    assert [e.point.value for e in bag.entries] == digit_oracle(1000, (0, 1))
    assert len(bag) == 9
    assert not bag.truncated


def test_binary_bag_is_integer_interval(z_binary):
    bag = enumerate_system(z_binary, 7)
    assert [e.point.value for e in bag.entries] == list(range(8))


def test_p1_bag_with_unit_seed():
    # Seed (1:1) generates exactly the nonnegative powers of two.
    data = {
        "space": "projq",
        "label": "p1-up",
        "maps": [
            {"kind": "proj_homog", "forms": [
                [{"coeff": "1", "exponents": [2, 0]}],
                [{"coeff": "1", "exponents": [0, 2]}],
            ]},
            {"kind": "proj_homog", "forms": [
                [{"coeff": "2", "exponents": [2, 0]}],
                [{"coeff": "1", "exponents": [0, 2]}],
            ]},
        ],
        "seeds": [["1", "1"]],
    }
    system = system_from_dict(data)
    bag = enumerate_system(system, 2**5)
    assert [e.point for e in bag.entries] == [
        ProjPoint((2**k, 1)) if k else ProjPoint((1, 1)) for k in range(6)
    ]
    assert len(bag) == 6


def test_bag_sorted_and_deduplicated(q2_powers2):
    bag = enumerate_system(q2_powers2, 2**6)
    sizes = bag.raw_sizes()
    assert sizes == sorted(sizes)
    assert len(set(bag.points())) == len(bag)


def test_monotone_window_prefix(digits01):
    small = enumerate_system(digits01, 10**4)
    large = enumerate_system(digits01, 10**6)
    assert large.entries[: len(small)] == small.entries


def test_determinism(gauss_base):
    one = enumerate_system(gauss_base, 2**10)
    two = enumerate_system(gauss_base, 2**10)
    assert one.entries == two.entries


def test_truncation_flag(z_binary):
    bag = enumerate_system(z_binary, 10**6, max_points=100)
    assert bag.truncated
    assert len(bag) == 100


def test_depths_are_generations(digits01):
    bag = enumerate_system(digits01, 1000)
    by_value = {e.point.value: e.depth for e in bag.entries}
    assert by_value[0] == 0
    assert by_value[1] == 1
    assert by_value[10] == 2
    assert by_value[101] == 3


def test_bound_below_seed_rejected(z_2x3x):
    with pytest.raises(ConfigError):
        enumerate_system(z_2x3x, 0)


def test_ec_enumeration_unsupported():
    system = load_corpus_system("ec-37a")
    with pytest.raises(UnsupportedSpaceError):
        enumerate_system(system, 100)


# --- membership -------------------------------------------------------------


def test_member_digit_examples(digits01):
    result = is_member(digits01, IntPoint(101))
    assert result.member and not result.via_fallback
    assert result.path == (1, 0, 1)
    assert replay_certificate(digits01, result) == IntPoint(101)
    assert not is_member(digits01, IntPoint(12)).member


def test_member_fixed_point_certificate_empty():
    system = FractalSystem("int", (IntAffineMap(2, 1),), (IntPoint(-1),), "fixed")
    result = is_member(system, IntPoint(-1))
    assert result.member and result.path == ()


def test_member_branching_system(z_2x3x):
    bag = enumerate_system(z_2x3x, 10**4)
    members = {e.point.value for e in bag.entries}
    for m in list(range(1, 200)) + [2**5 * 3**4, 9999]:
        assert is_member(z_2x3x, IntPoint(m)).member == (m in members)


def test_member_agrees_with_enumeration_window(digits012):
    bag = enumerate_system(digits012, 10**4)
    members = {e.point.value for e in bag.entries}
    for m in range(-300, 10**4, 37):
        result = is_member(digits012, IntPoint(m))
        assert result.member == (m in members)
        if result.member:
            assert replay_certificate(digits012, result) == IntPoint(m)


def test_member_fallback_for_projective(p1_doubling):
    result = is_member(p1_doubling, ProjPoint((1, 16)))
    assert result.member and result.via_fallback
    assert not is_member(p1_doubling, ProjPoint((3, 1))).member


# --- exactness audit ---------------------------------------------------------


def test_audit_digits_clean(digits01):
    report = audit_exactness(digits01, 10**6)
    assert report.exact
    assert report.overlap_count == 0 and report.uncovered_count == 0
    assert report.seed_coverage[0].is_image  # 0 = 10*0


def test_audit_overlap_at_six(z_2x3x):
    report = audit_exactness(z_2x3x, 100)
    assert not report.exact
    overlap_points = {rec.point.value for rec in report.overlaps}
    assert 6 in overlap_points
    six = next(rec for rec in report.overlaps if rec.point.value == 6)
    witnesses = {(i, q.value) for i, q in six.witnesses}
    assert witnesses == {(0, 3), (1, 2)}


def test_audit_ambient_window_int(z_binary):
    # Z is a fractal with respect to {2x, 2x+1}: the whole window is covered.
    report = audit_exactness(z_binary, 10**3, window="ambient")
    assert report.exact


def test_audit_ambient_window_catches_bad_cover():
    mutated = FractalSystem(
        "int", (IntAffineMap(2, 0), IntAffineMap(5, 1)), (IntPoint(0),), "z-2x-5x1"
    )
    report = audit_exactness(mutated, 10**4, window="ambient")
    assert not report.exact
    # Uncovered are exactly the odd numbers not congruent to 1 mod 5:
    # 10^4 odds minus the 2000 covered ones.  Overlaps sit at 6 mod 10.
    assert report.uncovered_count == 8000
    assert report.overlap_count == 2000
    small = audit_exactness(mutated, 10, window="ambient")
    uncovered = {p.value for p in small.uncovered}
    assert 3 in uncovered  # 3 is neither 2q nor 5q+1


def test_audit_p1_window_not_a_fractal(p1_doubling):
    # The full rational projective line is self-similar but not a fractal:
    # most points (e.g. (3:1)) are not images under the doubling maps.
    report = audit_exactness(p1_doubling, 50, window="ambient")
    assert report.uncovered_count > 0
    uncovered = {p.coords for p in report.uncovered}
    assert (3, 1) in uncovered


def test_audit_gauss_clean_small(gauss_base):
    report = audit_exactness(gauss_base, 2**12)
    assert report.exact


def test_audit_exact_corpus_projective(p1_doubling, p1_full):
    for system in (p1_doubling, p1_full):
        report = audit_exactness(system, 2**20)
        assert report.exact


def test_audit_exact_corpus_affine(q2_powers2):
    report = audit_exactness(q2_powers2, 2**12)
    assert report.exact


# --- intersection probe -------------------------------------------------------


def test_intersection_line_sum_six(q2_powers2):
    curve = parse_polynomial("x1 + x2 - 6", 2)
    probe = curve_intersection_probe(q2_powers2, curve, [16, 256, 4096])
    assert probe.counts == (2, 2, 2)
    assert probe.stabilized
    hits = {tuple(c for c in p.coords) for p in probe.hits_per_bound[-1]}
    assert hits == {(Fraction(2), Fraction(4)), (Fraction(4), Fraction(2))}


def test_intersection_diagonal_grows(q2_powers2):
    curve = parse_polynomial("x1 - x2", 2)
    probe = curve_intersection_probe(q2_powers2, curve, [16, 256, 4096])
    assert probe.counts[0] < probe.counts[1] < probe.counts[2]
    assert not probe.stabilized


def test_intersection_hyperbola(q2_powers2):
    # x1*x2 = 1 over this nonnegative-power orbit: only (1,1) qualifies,
    # pinned by the brute evaluation below.
    curve = parse_polynomial("x1*x2 - 1", 2)
    bag = enumerate_system(q2_powers2, 4096)
    brute = [
        e.point
        for e in bag.entries
        if e.point.coords[0] * e.point.coords[1] == 1
    ]
    assert [p.coords for p in brute] == [(Fraction(1), Fraction(1))]
    probe = curve_intersection_probe(q2_powers2, curve, [4, 256, 4096])
    assert probe.counts == (1, 1, 1)
    assert probe.stabilized


def test_intersection_requires_affine(z_binary):
    with pytest.raises(UnsupportedSpaceError):
        curve_intersection_probe(z_binary, parse_polynomial("x1", 1), [10])
