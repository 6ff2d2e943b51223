"""Scheme algebra: construction, moments, decomposition, scaling, JSON."""

from fractions import Fraction
from math import factorial, prod

import pytest
from hypothesis import given, settings, strategies as st

from grdcalc import (
    CalculusError,
    DuplicateNodes,
    InconsistentSystem,
    InvalidOrder,
    Scheme,
    Term,
    UnderdeterminedSystem,
    WrongNodeCount,
    ZeroDilation,
    ZeroNodeParityError,
    ZeroScale,
    ZeroScheme,
    canonicalize,
    combine,
    construct_exact,
    construct_exact_symmetric,
    decompose,
    format_rational,
    format_scheme,
    is_symmetric,
    moment,
    normalized,
    order_info,
    parse_rational,
    reflect,
    scale,
    scheme_from_json,
    scheme_to_json_dict,
)

rationals = st.fractions(
    min_value=Fraction(-30), max_value=Fraction(30), max_denominator=12
)
small_orders = st.integers(min_value=1, max_value=5)


def distinct_nodes(n: int):
    return st.lists(rationals, min_size=n + 1, max_size=n + 1, unique=True)


def lagrange_coefficients(nodes, n):
    """Independent oracle: the exact coefficients are n! times the leading
    coefficients of the Lagrange basis polynomials on the nodes."""
    return [
        Fraction(factorial(n))
        / prod(nodes[k] - nodes[j] for j in range(len(nodes)) if j != k)
        for k in range(len(nodes))
    ]


# --- rationals, terms, canonical form -------------------------------------


def test_parse_and_format_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
    assert format_rational(Fraction(1, 2)) == "1/2"
    assert format_rational(Fraction(5)) == "5/1"
    assert format_rational(Fraction(-7, 3)) == "-7/3"
    with pytest.raises(CalculusError):
        parse_rational("pi")
    with pytest.raises(CalculusError):
        parse_rational("1/0")


def test_canonicalize_merges_and_drops():
    s = canonicalize([(1, 2), (2, 0), (-1, 2), (1, 1), (0, 5)])
    assert s.nodes == (0, 1)
    assert s.coeffs == (2, 1)


def test_scheme_rejects_duplicates_and_zero_coeffs():
    with pytest.raises(DuplicateNodes):
        Scheme((Term(1, 1), Term(2, 1)))
    with pytest.raises(CalculusError):
        Scheme((Term(0, 1),))


def test_scheme_sorts_terms():
    s = Scheme((Term(1, 3), Term(2, -1)))
    assert s.nodes == (-1, 3)
    assert s.coeff_at(3) == 1
    assert s.coeff_at(7) == 0


@given(st.lists(st.tuples(rationals, rationals), max_size=8))
def test_canonicalize_idempotent(pairs):
    once = canonicalize(pairs)
    again = canonicalize(once)
    assert once == again


# --- construction ----------------------------------------------------------


def test_construct_second_difference():
    s = construct_exact([0, 1, 2], 2)
    assert s == canonicalize([(1, 0), (-2, 1), (1, 2)])


def test_construct_backward_third():
    s = construct_exact([-1, 0, 1, 2], 3)
    assert s == canonicalize([(-1, -1), (3, 0), (-3, 1), (1, 2)])


def test_construct_errors():
    with pytest.raises(InvalidOrder):
        construct_exact([0, 1], 0)
    with pytest.raises(WrongNodeCount):
        construct_exact([0, 1, 2], 1)
    with pytest.raises(DuplicateNodes):
        construct_exact([0, 1, 1], 2)


@settings(max_examples=60)
@given(small_orders.flatmap(lambda n: st.tuples(st.just(n), distinct_nodes(n))))
def test_construct_matches_lagrange_oracle(case):
    n, nodes = case
    built = construct_exact(nodes, n)
    expected = canonicalize(zip(lagrange_coefficients(nodes, n), nodes))
    assert built == expected


@settings(max_examples=60)
@given(small_orders.flatmap(lambda n: st.tuples(st.just(n), distinct_nodes(n))))
def test_construct_moment_conditions(case):
    n, nodes = case
    s = construct_exact(nodes, n)
    for j in range(n):
        assert moment(s, j) == 0
    assert moment(s, n) == factorial(n)
    info = order_info(s)
    assert info.order == n and info.normalizer == 1


def test_symmetric_construction_fixtures():
    second = construct_exact_symmetric([1], True, 2)
    assert second == canonicalize([(1, -1), (-2, 0), (1, 1)])
    third = construct_exact_symmetric([1, 2], False, 3)
    assert third == canonicalize(
        [
            (Fraction(-1, 2), -2),
            (1, -1),
            (-1, 1),
            (Fraction(1, 2), 2),
        ]
    )
    for s, n in ((second, 2), (third, 3)):
        assert is_symmetric(s, n)
        assert order_info(s) == order_info(normalized(s))
        assert moment(s, n) == factorial(n)


def test_symmetric_construction_errors():
    with pytest.raises(ZeroNodeParityError):
        construct_exact_symmetric([1], True, 3)
    with pytest.raises(UnderdeterminedSystem):
        construct_exact_symmetric([1, 2, 3], False, 3)
    with pytest.raises(CalculusError):
        construct_exact_symmetric([-1], True, 2)
    with pytest.raises(DuplicateNodes):
        construct_exact_symmetric([1, 1], False, 3)


def test_symmetric_overdetermined_pairs_must_be_consistent():
    # one pair cannot satisfy the two parity conditions of order 4
    with pytest.raises((InconsistentSystem, UnderdeterminedSystem)):
        construct_exact_symmetric([1], False, 4)


@settings(max_examples=40)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(
                st.fractions(
                    min_value=Fraction(1, 6), max_value=Fraction(8), max_denominator=6
                ),
                min_size=(n + 2) // 2,
                max_size=(n + 2) // 2,
                unique=True,
            ),
        )
    )
)
def test_symmetric_construction_properties(case):
    n, pairs = case
    include_zero = n % 2 == 0
    if include_zero:
        pairs = pairs[: n // 2]
    s = construct_exact_symmetric(pairs, include_zero, n)
    assert is_symmetric(s, n)
    assert order_info(s).order == n
    assert order_info(s).normalizer == 1


# --- order and normalization ------------------------------------------------


def test_order_info_zero_scheme():
    with pytest.raises(ZeroScheme):
        order_info(canonicalize([]))


def test_order_detection_not_exact_count():
    s = canonicalize([(1, 0), (-2, 1), (1, 2), (1, 3), (-1, 4)])
    info = order_info(s)
    assert info.order == 1
    assert info.leading_moment == moment(s, 1)


def test_normalized():
    s = canonicalize([(2, 0), (-4, 1), (2, 2)])
    assert order_info(s).normalizer == Fraction(1, 2)
    norm = normalized(s)
    assert norm == construct_exact([0, 1, 2], 2)
    assert normalized(norm) is norm


# --- scale / reflect / decompose / combine ----------------------------------


def test_scale_fixture():
    member = canonicalize([(Fraction(2, 3), 1), (-1, 2), (Fraction(1, 3), 4)])
    scaled = scale(member, 2)
    assert scaled == canonicalize(
        [(Fraction(1, 6), 2), (Fraction(-1, 4), 4), (Fraction(1, 12), 8)]
    )


def test_scale_errors():
    s = construct_exact([0, 1], 1)
    with pytest.raises(ZeroScale):
        scale(s, 0)
    with pytest.raises(ZeroScheme):
        scale(canonicalize([]), 2)


@settings(max_examples=60)
@given(
    small_orders.flatmap(lambda n: st.tuples(st.just(n), distinct_nodes(n))),
    st.fractions(min_value=Fraction(-4), max_value=Fraction(4), max_denominator=6).filter(
        lambda r: r != 0
    ),
)
def test_scale_properties(case, r):
    n, nodes = case
    s = construct_exact(nodes, n)
    scaled = scale(s, r)
    info = order_info(scaled)
    assert info.order == n and info.normalizer == 1
    assert scale(scaled, 1 / r) == s
    assert scale(s, 1) == s


def test_reflect_involution_and_even_scale():
    s = construct_exact([0, 1, 2], 2)
    assert reflect(reflect(s)) == s
    # at even order, reflection is exactly the scale by -1
    assert reflect(s) == scale(s, -1)


def test_decompose_backward_third_fixture():
    base = construct_exact([-1, 0, 1, 2], 3)
    plus, minus = decompose(base, 3)
    assert plus == canonicalize(
        [(Fraction(-1, 2), -2), (1, -1), (-1, 1), (Fraction(1, 2), 2)]
    )
    assert minus == canonicalize(
        [(Fraction(1, 2), -2), (-2, -1), (3, 0), (-2, 1), (Fraction(1, 2), 2)]
    )


@settings(max_examples=60)
@given(small_orders.flatmap(lambda n: st.tuples(st.just(n), distinct_nodes(n))))
def test_decompose_reconstruction_and_parity(case):
    n, nodes = case
    s = construct_exact(nodes, n)
    plus, minus = decompose(s, n)
    assert canonicalize(list(plus) + list(minus)) == s
    assert is_symmetric(plus, n)
    sign = Fraction(-1) ** n
    for t in minus:
        assert minus.coeff_at(-t.node) == -sign * t.coeff
    # the symmetric part keeps the parity-n moments, the skew part the others
    for j in range(n + 2):
        if j % 2 == n % 2:
            assert moment(plus, j) == moment(s, j) and moment(minus, j) == 0
        else:
            assert moment(minus, j) == moment(s, j) and moment(plus, j) == 0


def test_combine_half_difference_identity():
    # (3/5)*C(h) + (-2/5)*C(-h) collapses to the plain first difference
    c = canonicalize([(2, -1), (-5, 0), (3, 1)])
    combined = combine([(Fraction(3, 5), 1, c), (Fraction(-2, 5), -1, c)])
    assert combined == canonicalize([(-1, 0), (1, 1)])


def test_combine_rewrite_identity():
    # backward third plus the symmetric second gives the forward second
    d31 = construct_exact([-1, 0, 1, 2], 3)
    d2s = construct_exact_symmetric([1], True, 2)
    assert combine([(1, 1, d31), (1, 1, d2s)]) == construct_exact([0, 1, 2], 2)


def test_combine_zero_dilation():
    s = construct_exact([0, 1], 1)
    with pytest.raises(ZeroDilation):
        combine([(1, 0, s)])


def test_is_symmetric():
    assert is_symmetric(canonicalize([]))
    assert is_symmetric(construct_exact_symmetric([1, 2], False, 3))
    assert not is_symmetric(construct_exact([0, 1, 2], 2))


# --- JSON and formatting ----------------------------------------------------


def test_json_fixture():
    s = construct_exact([-1, 0, 1, 2], 3)
    data = scheme_to_json_dict(s)
    assert data == {
        "terms": [
            {"coeff": "-1/1", "node": "-1/1"},
            {"coeff": "3/1", "node": "0/1"},
            {"coeff": "-3/1", "node": "1/1"},
            {"coeff": "1/1", "node": "2/1"},
        ]
    }
    assert scheme_from_json(data) == s


def test_json_accepts_integer_shorthand():
    s = scheme_from_json('{"terms": [{"coeff": -1, "node": 0}, {"coeff": 1, "node": 1}]}')
    assert s == construct_exact([0, 1], 1)


def test_json_errors():
    with pytest.raises(CalculusError):
        scheme_from_json("not json")
    with pytest.raises(CalculusError):
        scheme_from_json('{"nope": []}')
    with pytest.raises(CalculusError):
        scheme_from_json('{"terms": [{"coeff": "1"}]}')


@settings(max_examples=60)
@given(st.lists(st.tuples(rationals, rationals), max_size=6))
def test_json_round_trip(pairs):
    s = canonicalize(pairs)
    assert scheme_from_json(scheme_to_json_dict(s)) == s


def test_format_scheme():
    s = construct_exact([-1, 0, 1, 2], 3)
    assert format_scheme(s) == "f(x+2h) - 3*f(x+h) + 3*f(x) - f(x-h)"
    assert format_scheme(canonicalize([])) == "0"
    half = canonicalize([(Fraction(1, 2), Fraction(1, 2))])
    assert format_scheme(half) == "(1/2)*f(x+(1/2)h)"
