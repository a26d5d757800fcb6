import pytest
from hypothesis import given, strategies as st

from oddforms.errors import DimensionError, HomogeneityError, SystemSyntaxError
from oddforms.forms import (
    Form, FormSystem, format_system, linear_combination, parse_system, restrict_hyperplane,
    scale_variables,
)

from conftest import system


def test_parse_infers_natural_order():
    sys = parse_system("form deg=3: x10^3 + x2*x1^2\nform deg=1: x2 - x10")
    assert sys.names == ("x1", "x2", "x10")
    assert sys.degrees == (3, 1)
    assert sys.D == 4 and sys.R == 2


def test_parse_explicit_vars_keeps_unused():
    sys = parse_system("vars: a b c\nform deg=1: a + 2*b")
    assert sys.s == 3
    assert sys.forms[0].coefficient((0, 1, 0)) == 2


def test_forms_sorted_by_degree_stably():
    sys = system("1: x1; 3: x1^3; 1: x2; 3: x2^3")
    assert [str(f) for f in sys.forms] == ["x1^3", "x2^3", "x1", "x2"]


def test_homogeneity_error_names_the_form():
    with pytest.raises(HomogeneityError, match="form #2"):
        parse_system("form deg=1: x1\nform deg=3: x1^3 + x2")


@pytest.mark.parametrize("text", [
    "form deg=3: x1^^3",
    "form deg=1: 3",
    "form deg=0: x1",
    "garbage line",
    "form deg=1: x1 +",
])
def test_syntax_errors(text):
    with pytest.raises((SystemSyntaxError, HomogeneityError)):
        parse_system(text)


def test_syntax_error_has_position():
    with pytest.raises(SystemSyntaxError) as exc:
        parse_system("form deg=1: x1\nform deg=1: x1 $ x2")
    assert exc.value.line == 2


def test_zero_form_rejected_in_system():
    with pytest.raises(ValueError):
        FormSystem.on(2, [Form.zero(2, 3)])


def test_roundtrip_format():
    sys = system("3: x1^3 - 4*x2*x3^2 + x3^3; 1: x1 - x2")
    assert parse_system(format_system(sys)) == sys


def test_evaluate_and_jacobian():
    sys = system("3: x1^2*x2 + x3^3; 1: x1 - x2")
    assert sys.evaluate((1, 2, 3)) == (29, -1)
    assert sys.jacobian((1, 2, 3)) == [[4, 1, 27], [1, -1, 0]]
    with pytest.raises(DimensionError):
        sys.evaluate((1, 2))


def test_restrict_hyperplane_drops_vanishing_forms():
    sys = system("3: x1*x2*x3; 1: x1 + x2")
    out, dropped = restrict_hyperplane(sys, [0])
    assert dropped == [0]
    assert out.names == ("x2", "x3")
    assert out.R == 1 and out.forms[0].coefficient((1, 0)) == 1


def test_linear_combination_primitive():
    a, b = system("3: 2*x1^3 + 2*x2^3; 3: x1^3").forms
    comb = linear_combination([a, b], [1, -2])
    assert str(comb.form) == "x2^3"
    assert linear_combination([b, b], [1, -1]).is_zero


def test_split_variable():
    f = system("3: x1^2*x3 + x2^3 - x1*x2*x3").forms[0]
    g, h = f.split_variable(2)
    assert f == g * Form.variable(3, 2) + h


# -- properties ---------------------------------------------------------------

coeffs = st.integers(-5, 5)
points = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


@st.composite
def cubic_forms(draw):
    mons = [(3, 0, 0), (0, 3, 0), (0, 0, 3), (2, 1, 0), (1, 1, 1), (0, 1, 2), (1, 0, 2)]
    cs = draw(st.lists(coeffs, min_size=len(mons), max_size=len(mons)))
    return Form.from_dict(3, 3, dict(zip(mons, cs)))


@given(cubic_forms(), cubic_forms(), points)
def test_evaluation_is_additive(f, g, x):
    assert (f + g).evaluate(x) == f.evaluate(x) + g.evaluate(x)


@given(cubic_forms(), points, st.integers(-3, 3))
def test_homogeneity(f, x, t):
    assert f.evaluate([t * v for v in x]) == t**3 * f.evaluate(x)


@given(cubic_forms(), points)
def test_odd_forms_are_odd(f, x):
    assert f.evaluate([-v for v in x]) == -f.evaluate(x)


@given(cubic_forms(), points, st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_scaling_conjugation(f, w, y):
    if f.is_zero:
        return
    sys = FormSystem.on(3, [f])
    scaled = scale_variables(sys, y)
    assert scaled.evaluate(w) == sys.evaluate([a * b for a, b in zip(y, w)])


@given(cubic_forms(), points, st.integers(2, 13))
def test_modular_evaluation_agrees(f, x, m):
    assert f.evaluate(x, m) == f.evaluate(x) % m


@given(cubic_forms(), cubic_forms(), points)
def test_product_evaluates_to_product(f, g, x):
    assert (f * g).evaluate(x) == f.evaluate(x) * g.evaluate(x)
