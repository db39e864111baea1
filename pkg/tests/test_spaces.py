import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithfractal import (
    AffPoint,
    FractalSystem,
    GaussAffineMap,
    GaussPoint,
    IntAffineMap,
    IntPoint,
    ProjPoint,
    apply,
    canonicalize,
    load_corpus_system,
    preimage,
    system_from_dict,
    system_to_dict,
    validate_system,
)
from arithfractal.corpus import corpus_names
from arithfractal.errors import (
    SpaceMismatchError,
    UnsupportedMapKindError,
    ZeroProjectivePointError,
)
from arithfractal.spaces import PolyTupleMap, parse_point
from arithfractal.polynomials import Polynomial


# --- canonicalize ---------------------------------------------------------


def test_projective_gcd_and_sign():
    assert canonicalize(ProjPoint((4, 6))).coords == (2, 3)
    assert canonicalize(ProjPoint((-2, -4))).coords == (1, 2)
    assert canonicalize(ProjPoint((2, 3))).coords == (2, 3)
    assert canonicalize(ProjPoint((0, -5))).coords == (0, 1)


def test_zero_projective_point_rejected():
    with pytest.raises(ZeroProjectivePointError):
        canonicalize(ProjPoint((0, 0)))


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_canonicalize_idempotent_projective(a, b):
    if a == 0 and b == 0:
        return
    once = canonicalize(ProjPoint((a, b)))
    assert canonicalize(once) == once
    lead = next(c for c in once.coords if c)
    assert lead > 0


# --- apply ----------------------------------------------------------------


def test_apply_int_affine():
    assert apply(IntAffineMap(2, 1), IntPoint(3)) == IntPoint(7)


def test_apply_projective_canonicalizes():
    system = load_corpus_system("p1-doubling")
    doubling_with_2 = system.maps[1]  # (2 x1^2 : x2^2)
    image = apply(doubling_with_2, ProjPoint((1, 2)))
    assert image == ProjPoint((1, 2))  # (2:4) reduced


def test_apply_affine_tuple():
    system = load_corpus_system("q2-powers2")
    f2 = system.maps[1]  # (2 x1^2, x2^2)
    image = apply(f2, AffPoint((Fraction(2), Fraction(2))))
    assert image == AffPoint((Fraction(8), Fraction(4)))


def test_apply_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        apply(IntAffineMap(2, 1), GaussPoint(1, 0))


@given(st.integers(-10**4, 10**4), st.integers(-10**4, 10**4))
def test_apply_output_always_canonical(a, b):
    if a == 0 and b == 0:
        return
    system = load_corpus_system("p1-doubling")
    point = canonicalize(ProjPoint((a, b)))
    for map_ in system.maps:
        image = apply(map_, point)
        assert canonicalize(image) == image


# --- preimage -------------------------------------------------------------


def test_preimage_int():
    assert preimage(IntAffineMap(2, 1), IntPoint(7)) == IntPoint(3)
    assert preimage(IntAffineMap(2, 1), IntPoint(8)) is None


def test_preimage_gauss():
    one_plus_i = GaussAffineMap(GaussPoint(1, 1), GaussPoint(0, 0))
    assert preimage(one_plus_i, GaussPoint(1, 1)) == GaussPoint(1, 0)
    # (1+i) does not divide 1
    assert preimage(one_plus_i, GaussPoint(1, 0)) is None


def test_preimage_monomial_tuple():
    system = load_corpus_system("q2-powers2")
    f2 = system.maps[1]  # (2 x1^2, x2^2)
    point = apply(f2, AffPoint((Fraction(2), Fraction(3))))
    assert preimage(f2, point) == AffPoint((Fraction(2), Fraction(3)))
    assert preimage(f2, AffPoint((Fraction(3), Fraction(1)))) is None


def test_preimage_unsupported_for_projective():
    system = load_corpus_system("p1-doubling")
    with pytest.raises(UnsupportedMapKindError):
        preimage(system.maps[0], ProjPoint((1, 2)))


@given(st.integers(-10**9, 10**9), st.integers(2, 50), st.integers(-100, 100))
def test_int_roundtrip(value, a, b):
    map_ = IntAffineMap(a, b)
    image = apply(map_, IntPoint(value))
    assert preimage(map_, image) == IntPoint(value)


@given(
    st.integers(-10**4, 10**4),
    st.integers(-10**4, 10**4),
    st.integers(-5, 5),
    st.integers(-5, 5),
    st.integers(-20, 20),
    st.integers(-20, 20),
)
def test_gauss_roundtrip(pr, pi, ar, ai, br, bi):
    if ar * ar + ai * ai <= 1:
        return
    map_ = GaussAffineMap(GaussPoint(ar, ai), GaussPoint(br, bi))
    point = GaussPoint(pr, pi)
    assert preimage(map_, apply(map_, point)) == point


# --- validate -------------------------------------------------------------


def test_validate_all_corpus_systems():
    for name in corpus_names():
        assert validate_system(load_corpus_system(name)) == []


def test_validate_rejects_non_expanding():
    bad = FractalSystem("int", (IntAffineMap(1, 1),), (IntPoint(0),), "bad")
    violations = validate_system(bad)
    assert any(v.code == "NonExpanding" and v.index == 0 for v in violations)


def test_validate_rejects_corpus_mutated_to_unit_multiplier():
    for name in corpus_names():
        system = load_corpus_system(name)
        if system.space != "int":
            continue
        first = system.maps[0]
        mutated = FractalSystem(
            "int",
            (IntAffineMap(1, first.b),) + system.maps[1:],
            system.seeds,
            system.label + "-mutated",
        )
        assert any(v.code == "NonExpanding" for v in validate_system(mutated))


def test_validate_gauss_expanding():
    ok = load_corpus_system("gauss-base")
    assert validate_system(ok) == []
    bad = FractalSystem(
        "gauss",
        (GaussAffineMap(GaussPoint(1, 0), GaussPoint(1, 0)),),
        (GaussPoint(0, 0),),
        "unit",
    )
    assert any(v.code == "NonExpanding" for v in validate_system(bad))


def test_validate_projective_degree_rule():
    # Degree-1 projective tuples are rejected, the affine space allows them.
    linear_forms = (
        Polynomial(2, [((1, 0), Fraction(2))]),
        Polynomial(2, [((0, 1), Fraction(1))]),
    )
    from arithfractal.spaces import ProjHomogMap

    bad = FractalSystem(
        "projq", (ProjHomogMap(linear_forms),), (ProjPoint((1, 1)),), "linear"
    )
    assert any(v.code == "DegreeTooLow" for v in validate_system(bad))
    linear_affine = FractalSystem(
        "affq",
        (PolyTupleMap((Polynomial(1, [((1,), Fraction(3))]),)),),
        (AffPoint((Fraction(1),)),),
        "3x",
    )
    assert validate_system(linear_affine) == []


def test_validate_common_zero_grid():
    from arithfractal.spaces import ProjHomogMap

    # Forms x1*x2 : x1*x2 vanish at (1:0) and (0:1).
    cross = Polynomial(2, [((1, 1), Fraction(1))])
    bad = FractalSystem(
        "projq", (ProjHomogMap((cross, cross)),), (ProjPoint((1, 1)),), "zeros"
    )
    assert any(v.code == "CommonZeroOnGrid" for v in validate_system(bad))


# --- serialization --------------------------------------------------------


def test_system_json_round_trip():
    for name in corpus_names():
        system = load_corpus_system(name)
        again = system_from_dict(json.loads(json.dumps(system_to_dict(system))))
        assert again == system


def test_parse_point_literals():
    assert parse_point("7", "int") == IntPoint(7)
    assert parse_point("3+4i", "gauss") == GaussPoint(3, 4)
    assert parse_point("-i", "gauss") == GaussPoint(0, -1)
    assert parse_point("2:4", "projq") == ProjPoint((1, 2))
    assert parse_point("1/2,3", "affq") == AffPoint((Fraction(1, 2), Fraction(3)))
