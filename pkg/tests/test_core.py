"""Graded arithmetic, differentials, presentations, morphisms."""

import random
from fractions import Fraction

import pytest

from secat.core import (CdgaError, CdgaMorphism, DegreeMismatch, Inhomogeneous,
                        NotSquareZero, Presentation, RangeExceedsCap,
                        direct_sum, identity_morphism, quotient_by_ideal,
                        sub_presentation, tensor, tensor_power,
                        word_length_truncation)
from secat.lang import parse_element

import oracles as orc


def random_element(P, d, rng, density=0.6):
    basis = P.basis(d)
    if not basis:
        return P.zero()
    el = P.zero()
    for mono in basis:
        if rng.random() < density:
            c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if c:
                el = el + P.element({mono: c})
    return el


def as_words(el, P):
    return orc.engine_to_words(el.terms, orc.odd_map(P))


MIXED = Presentation([("a", 2), ("b", 3), ("c", 3), ("e", 4), ("f", 5)], 20)


def test_products_match_oracle_on_random_words():
    rng = random.Random(7)
    odd = orc.odd_map(MIXED)
    names = [g.name for g in MIXED.generators]
    for _ in range(300):
        w1 = tuple(rng.choices(names, k=rng.randint(1, 3)))
        w2 = tuple(rng.choices(names, k=rng.randint(1, 3)))
        e1 = MIXED.one()
        for n in w1:
            e1 = e1 * MIXED.gen(n)
        e2 = MIXED.one()
        for n in w2:
            e2 = e2 * MIXED.gen(n)
        got = as_words(e1 * e2, MIXED)
        want = orc.mul_elements(as_words(e1, MIXED), as_words(e2, MIXED), odd)
        assert got == want


def test_graded_commutativity_and_odd_squares():
    rng = random.Random(11)
    for _ in range(100):
        d1, d2 = rng.randint(2, 6), rng.randint(2, 6)
        x = random_element(MIXED, d1, rng)
        y = random_element(MIXED, d2, rng)
        sign = -1 if (d1 % 2 and d2 % 2) else 1
        assert x * y == sign * (y * x)
    for g in MIXED.generators:
        if g.degree % 2:
            assert not (MIXED.gen(g.name) * MIXED.gen(g.name)).terms


def test_associativity_and_distributivity():
    rng = random.Random(13)
    for _ in range(60):
        x = random_element(MIXED, rng.randint(2, 5), rng)
        y = random_element(MIXED, rng.randint(2, 5), rng)
        z = random_element(MIXED, rng.randint(2, 5), rng)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z


COFORMAL = Presentation(
    [("a", 3), ("b", 3), ("x", 5)], 14,
    differentials={"x": {(("a", 1), ("b", 1)): Fraction(1)}})


@pytest.mark.parametrize("P", [
    COFORMAL,
    Presentation([("a", 2), ("x", 3)], 12,
                 differentials={"x": {(("a", 2),): Fraction(1)}}),
])
def test_differential_matches_oracle(P):
    rng = random.Random(17)
    diffs = orc.diffs_of(P)
    odd, deg = orc.odd_map(P), orc.deg_map(P)
    for _ in range(150):
        x = random_element(P, rng.randint(2, 9), rng)
        assert as_words(P.d(x), P) == orc.differentiate(as_words(x, P),
                                                        diffs, odd, deg)


def test_leibniz_rule(models):
    rng = random.Random(19)
    for P in (models["C"], models["S2"], models["G"], models["T"]):
        top = P.cap if P.is_free else P.cap - 1
        for _ in range(60):
            d1 = rng.randint(1, max(1, top // 2))
            d2 = rng.randint(1, max(1, top - d1 - 1))
            x = random_element(P, d1, rng)
            y = random_element(P, d2, rng)
            sign = -1 if d1 % 2 else 1
            assert (x * y).d() == x.d() * y + sign * (x * y.d())


def test_d_squared_zero_on_all_model_bases(models):
    for P in models.values():
        hi = (P.cap if P.is_free else P.cap - 1) - 1
        for d in range(1, hi + 1):
            for mono in P.basis(d):
                el = P.element({mono: Fraction(1)})
                assert not P.d(P.d(el)).terms


def test_square_nonzero_differential_rejected():
    with pytest.raises(NotSquareZero):
        Presentation([("a", 2), ("x", 3), ("y", 4)], 12,
                     differentials={"x": {(("a", 2),): Fraction(1)},
                                    "y": {(("a", 1), ("x", 1)): Fraction(1)}})


def test_inhomogeneous_differential_rejected():
    with pytest.raises(Inhomogeneous):
        Presentation([("a", 2), ("x", 5)], 12,
                     differentials={"x": {(("a", 1),): Fraction(1),
                                          (("a", 3),): Fraction(1)}})


def test_cap_semantics():
    free = Presentation([("u", 3)], 6)
    assert list(free.basis(9)) == []    # free presentations evaluate anywhere
    quo = Presentation([("a", 2)], 6, relations=({(("a", 3),): 1},))
    assert quo.dim(4) == 1 and quo.dim(6) == 0
    with pytest.raises(RangeExceedsCap):
        quo.basis(7)


def test_dims_match_oracle_quotient_bases(models):
    for name in ("CP2", "T", "W", "S4"):
        P = models[name]
        gens = orc.gen_triples(P)
        rels = [tuple(n for n, e in mono for _ in range(e))
                for mono in (m for rel in P.relations for m in rel)]
        for d in range(P.cap + 1):
            assert P.dim(d) == len(orc.quotient_basis(gens, rels, d)), (name, d)


def test_monomial_relations_reduce_to_zero(models):
    CP2, T = models["CP2"], models["T"]
    assert not parse_element("a^3", CP2).terms
    assert not parse_element("2*a^4 - a*b", T).terms
    assert parse_element("a^3", T).terms


def test_top_degree_detection(models):
    assert models["T"].top_degree_if_finite() == 8
    assert models["W"].top_degree_if_finite() == 8
    assert models["CP2"].top_degree_if_finite() == 4
    assert models["S3"].top_degree_if_finite() == 3      # odd free: exact
    assert models["P"].top_degree_if_finite() == 6
    assert models["S2"].top_degree_if_finite() is None    # even free: infinite
    assert models["Q"].top_degree_if_finite() is None


def test_tensor_dimensions_convolve(models):
    S3, S4 = models["S3"], models["S4"]
    t = tensor(S3, S4, cap=10)
    d3 = {d: S3.dim(d) for d in range(11)}
    d4 = {d: S4.dim(d) for d in range(11)}
    want = orc.convolve(d3, d4, 10)
    for d in range(11):
        assert t.pres.dim(d) == want[d]
    # inclusions are validated chain maps
    u = S3.gen("u")
    assert t.include_left.apply(u).degree() == 3


def test_tensor_power_naming(models):
    tp = tensor_power(models["S3"], 3, cap=9)
    assert [g.name for g in tp.pres.generators] == ["u1", "u2", "u3"]
    assert tp.pres.dim(9) == 1        # u1 u2 u3


def test_word_length_truncation(models):
    S2 = models["S2"]
    trunc, proj = word_length_truncation(S2, 1)
    assert trunc.dim(2) == 1 and trunc.dim(3) == 1
    assert trunc.dim(4) == 0          # a^2 has word length 2
    assert not proj.apply(parse_element("a^2", S2)).terms


def test_quotient_by_ideal_commutes_with_d(models):
    S2 = models["S2"]
    Q, proj = quotient_by_ideal(S2, [parse_element("a^2", S2)])
    rng = random.Random(23)
    for _ in range(40):
        x = random_element(S2, rng.randint(2, 8), rng)
        assert proj.apply(S2.d(x)) == Q.d(proj.apply(x))


def test_sub_presentation_extracts_honest_base(models):
    Q = models["Q"]
    base, incl = sub_presentation(Q, ["a"])
    assert [g.name for g in base.generators] == ["a"]
    assert base.is_free and not base._diff_raw
    assert incl.apply(base.gen("a")) == Q.gen("a")

    T = models["T"]
    sub, _ = sub_presentation(T, ["a"])
    assert sub.dim(6) == 1 and sub.dim(8) == 0   # keeps the pure relation a^4

    with pytest.raises(CdgaError):
        sub_presentation(Q, ["a", "x"])          # d x = a^2 + b^2 escapes
    mixed = Presentation([("a", 2), ("b", 2)], 8,
                         relations=({(("a", 2),): Fraction(1),
                                     (("b", 2),): Fraction(1)},))
    with pytest.raises(CdgaError):
        sub_presentation(mixed, ["a"])           # relation a^2 + b^2 mixes
    with pytest.raises(CdgaError):
        sub_presentation(Q, ["nope"])


def test_morphism_validation(models):
    S3, S2 = models["S3"], models["S2"]
    with pytest.raises(DegreeMismatch):
        CdgaMorphism(S3, S2, {"u": S2.gen("a")}, check=True)
    # a chain-condition violation: send x to 0 but a to a
    with pytest.raises(CdgaError):
        CdgaMorphism(S2, S2, {"a": S2.gen("a"), "x": S2.zero()}, check=True)


def test_identity_and_composition(models):
    S2 = models["S2"]
    ident = identity_morphism(S2)
    rng = random.Random(29)
    x = random_element(S2, 5, rng)
    assert ident.apply(x) == x
    Q, proj = quotient_by_ideal(S2, [parse_element("a^3", S2)])
    comp = proj.compose(ident)
    assert comp.apply(x) == proj.apply(x)


def test_direct_sum_dims(models):
    S3, CP2 = models["S3"], models["CP2"]
    s = direct_sum(S3, CP2, cap=6)
    for d in range(1, 7):
        assert s.pres.dim(d) == S3.dim(d) + CP2.dim(d)
    assert s.pres.dim(0) == 1
    # cross products vanish
    u = s.include_left.apply(S3.gen("u"))
    a = s.include_right.apply(CP2.gen("a"))
    assert not (u * a).terms


def test_element_introspection(models):
    S2 = models["S2"]
    el = parse_element("a^2 + a*x", S2)
    assert not el.is_homogeneous()
    assert el.homogeneous_part(4) == parse_element("a^2", S2)
    assert el.max_word_length() == 2
    assert parse_element("a*x", S2).degree() == 5
    assert el.word_part(2) == el
