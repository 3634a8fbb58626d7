import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklsolve.expr import ExprError, ExprEvalError, ExprSyntaxError, parse


@pytest.mark.parametrize(
    "text,point,value",
    [
        ("2+3*4", [0.0], 14.0),
        ("x1^2 + x2^2", [3.0, 4.0], 25.0),
        ("abs(x1)", [-2.0], 2.0),
        ("sin(0)", [0.0], 0.0),
        ("2^3^2", [0.0], 512.0),  # right associative
        ("-2^2", [0.0], -4.0),  # ^ binds tighter than unary minus
        ("(-2)^2", [0.0], 4.0),
        ("8/4/2", [0.0], 1.0),  # left associative
        ("10-4-3", [0.0], 3.0),
        ("2*-3", [0.0], -6.0),
        ("--3", [0.0], 3.0),
        ("-x1*x2", [2.0, 5.0], -10.0),
        ("  1 +\t2 ", [0.0], 3.0),
        ("min(x1, 3) + max(x1, 3) + pow(2, 10)", [1.0], 1028.0),
        ("exp(log(5)) + sqrt(16)", [0.0], 9.0),
        ("cos(pi)", [0.0], -1.0),
        ("1.5e2 + .5", [0.0], 150.5),
        ("(-8)^(1/3)^0", [0.0], -8.0),
    ],
)
def test_examples(text, point, value):
    e = parse(text, len(point))
    assert e(point) == pytest.approx(value, rel=1e-14, abs=1e-14)


def test_vectorized():
    e = parse("x1*x2 + 1", 2)
    np.testing.assert_allclose(e(np.array([[1.0, 2.0], [3.0, 4.0]])), [3.0, 13.0])


@pytest.mark.parametrize(
    "text,d,pos,fragment",
    [
        ("2*(x1", 1, 5, "unbalanced"),
        ("2x1", 1, 1, ""),
        ("x3", 2, 0, "dimension"),
        ("foo(1)", 1, 0, "unknown function"),
        ("y", 1, 0, "unknown identifier"),
        ("sin(1, 2)", 1, 0, "argument"),
        ("max(1)", 1, 0, "argument"),
        ("sin", 1, 0, "called"),
        ("1 +", 1, 3, ""),
        ("", 1, 0, ""),
        (")", 1, 0, ""),
        ("1 $ 2", 1, 2, ""),
        ("1e999", 1, 0, "range"),
        ("x0", 1, 0, ""),
    ],
)
def test_syntax_errors(text, d, pos, fragment):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text, d)
    assert info.value.position == pos
    assert fragment in info.value.message


@pytest.mark.parametrize(
    "text,point,fragment",
    [
        ("1/x1", [0.0], "division by zero"),
        ("log(x1)", [-1.0], "log"),
        ("log(x1)", [0.0], "log"),
        ("sqrt(x1)", [-1.0], "sqrt"),
        ("x1^0.5", [-1.0], ""),
        ("0^x1", [-1.0], ""),
        ("exp(x1)", [1000.0], ""),
    ],
)
def test_evaluation_errors(text, point, fragment):
    e = parse(text, 1)
    with pytest.raises(ExprEvalError) as info:
        e(point)
    assert fragment in info.value.message
    assert 0 <= info.value.position < len(text)


def test_evaluation_error_points_at_subexpression():
    e = parse("1 + log(x1 - 3)", 1)
    with pytest.raises(ExprEvalError) as info:
        e([1.0])
    assert info.value.position == 4
    assert "log" in str(info.value.node)


def test_non_finite_input_rejected():
    with pytest.raises(ExprError):
        parse("x1", 1)([np.nan])


def test_wrong_point_dimension():
    with pytest.raises(ValueError):
        parse("x1 + x2", 2)([1.0, 2.0, 3.0])


def test_deep_nesting_is_an_error_not_a_crash():
    with pytest.raises(ExprSyntaxError):
        parse("(" * 5000 + "1" + ")" * 5000, 1)
    with pytest.raises(ExprSyntaxError):
        parse("-" * 5000 + "1", 1)


def test_variables():
    assert parse("x1 + sin(x3) * 2", 3).variables() == {1, 3}


# -- properties -------------------------------------------------------------------

ALPHABET = "x1234567890.+-*/^(), eEsincoexplgqrtabmpw_$"


def test_fuzz_10k_random_strings():
    rng = np.random.default_rng(2024)
    errors = 0
    for _ in range(10_000):
        n = int(rng.integers(0, 25))
        text = "".join(rng.choice(list(ALPHABET), n))
        try:
            e = parse(text, 3)
        except ExprError as exc:
            assert 0 <= exc.position <= len(text)
            errors += 1
            continue
        try:
            e([0.5, -1.5, 2.0])
        except ExprError as exc:
            assert 0 <= exc.position <= len(text)
    assert errors > 0


@settings(max_examples=500, deadline=None)
@given(st.binary(max_size=40))
def test_fuzz_bytes(data):
    text = data.decode("latin-1")
    try:
        parse(text, 2)
    except ExprError as exc:
        assert 0 <= exc.position <= len(text)


leaf = st.one_of(
    st.floats(0, 1e6, allow_nan=False).map(repr),
    st.sampled_from(["x1", "x2", "pi"]),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/^"), children).map(lambda t: f"({t[0]}){t[1]}({t[2]})"),
        children.map(lambda c: f"-({c})"),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        st.tuples(st.sampled_from(["min", "max"]), children, children).map(lambda t: f"{t[0]}({t[1]}, {t[2]})"),
    )


expressions = st.recursive(leaf, _combine, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_print_parse_idempotent(text):
    e1 = parse(text, 2)
    e2 = parse(str(e1), 2)
    assert e1.tree == e2.tree
    assert str(e2) == str(e1)


@settings(max_examples=200, deadline=None)
@given(expressions, st.tuples(st.floats(-3, 3), st.floats(-3, 3)))
def test_evaluation_deterministic(text, point):
    e = parse(text, 2)
    try:
        a = e(list(point))
    except ExprEvalError:
        return
    assert math.isfinite(a)
    assert a == parse(str(e), 2)(list(point))
