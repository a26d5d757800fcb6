import pytest
from hypothesis import given, strategies as st

from oddforms.errors import NoSolutionFound
from oddforms.local import find_nonsingular_unit_solutions
from oddforms.padic import (
    PAdicPoint, find_padic_nonzero_solution, hensel_lift, is_nonsingular, minor_valuation,
)

from conftest import system


def cube_roots_of_two_mod_125():
    return [r for r in range(125) if (r**3 - 2) % 125 == 0]


def test_scalar_lift_against_exhaustive_roots():
    pt = hensel_lift(system("3: x^3 - 2*y^3", "x y"), (3, 1), 5, 3, frozen=(1,))
    assert pt.coords == (53, 1)
    assert [r for r in cube_roots_of_two_mod_125() if r % 5 == 3] == [53]


@pytest.mark.parametrize("k", [1, 2, 5, 8, 12])
def test_lift_precision(k):
    sys = system("3: x1^3 + x2^3 - 2*x3^3; 1: x1 - x2 + 3*x3")
    p = 7
    for seed in find_nonsingular_unit_solutions(sys, p, limit=5):
        pt = hensel_lift(sys, seed, p, k)
        assert all(f.evaluate(pt.coords, p**k) == 0 for f in sys.forms)
        assert tuple(c % p for c in pt.coords) == seed


def test_frozen_coordinates_stay_fixed():
    sys = system("3: x1^3 + x2^3 - 2*x3^3")
    pt = hensel_lift(sys, (1, 1, 1), 5, 6, frozen=(1, 2))
    assert pt.coords[1:] == (1, 1)


def test_singular_seed_rejected():
    with pytest.raises(ValueError, match="singular"):
        hensel_lift(system("3: x1^2*x2", "x1 x2"), (0, 1), 5, 4)


def test_alternating_equation_at_two():
    res = find_padic_nonzero_solution(system("1: x1 - 4*x2 + 16*x3"), 2, 8)
    assert res.point.signed() == (-12, 1, 1)
    assert res.point.valuations == (2, 0, 0)
    assert res.delta == (2, 0, 0)


@pytest.mark.parametrize("p,vals", [(2, (0, 0, 1)), (3, (0, 0, 0))])
def test_alternating_sign_equation(p, vals):
    sys = system("1: x1 - x2 + x3")
    pt = find_padic_nonzero_solution(sys, p, 8).point
    assert pt.valuations == vals
    assert sys.forms[0].evaluate(pt.coords, pt.modulus) == 0


def test_layer_order_is_by_total_then_lex():
    from oddforms.padic import _layers
    pats = _layers(3, 1)
    assert pats[0] == (0, 0, 0) and pats[1:4] == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_anisotropic_cubic_has_no_two_adic_zero():
    # x^3 + 2y^3 + 4z^3 only vanishes at 0 over Q_2
    with pytest.raises(NoSolutionFound) as exc:
        find_padic_nonzero_solution(system("3: x1^3 + 2*x2^3 + 4*x3^3"), 2, 8, delta_max=3)
    assert exc.value.exhaustive


def test_budget_exhaustion_is_not_exhaustive():
    with pytest.raises(NoSolutionFound) as exc:
        find_padic_nonzero_solution(system("3: x1^3 + 2*x2^3 + 4*x3^3"), 2, 8, budget=3)
    assert not exc.value.exhaustive


def test_nonsingularity_by_minor_valuation():
    sys = system("1: x1 - 4*x2 + 16*x3")
    pt = PAdicPoint(2, 8, (-12, 1, 1))
    assert minor_valuation(sys.forms, pt) == 0 and is_nonsingular(sys.forms, pt)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 6),
       st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=4))
def test_reconstruct_roundtrip(p, k, xs):
    pt = PAdicPoint(p, k, xs)
    assert pt.reconstruct() == pt.coords
    for c, e in zip(pt.coords, pt.valuations):
        assert e == k or (c % p ** e == 0 and c % p ** (e + 1) != 0)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 6), st.integers(-1000, 1000))
def test_signed_is_balanced(p, k, x):
    pt = PAdicPoint(p, k, (x,))
    (v,) = pt.signed()
    assert -pt.modulus // 2 <= v <= pt.modulus // 2 and (v - x) % pt.modulus == 0


def test_deep_path_when_every_unit_zero_is_singular():
    # mod 3 the gradient of a diagonal cubic vanishes, so the search has to go deeper
    six = system("3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3 + x6^3")
    res = find_padic_nonzero_solution(six, 3, 8)
    pt = res.point
    assert pt.all_nonzero
    assert six.forms[0].evaluate(pt.coords, 3**8) == 0
    assert 0 < minor_valuation(six.forms, pt) < 4


def test_deep_hensel_matches_brute_force_lift():
    from oddforms.padic import deep_seeds, hensel_lift_deep
    F = system("3: x1^3 + x2^3 - 2*x3^3")
    seed, v = next(deep_seeds(F.forms, 3, 3, 1))
    assert v == 1 and F.forms[0].evaluate(seed, 27) == 0
    pt = hensel_lift_deep(F.forms, seed, 3, 10)
    assert F.forms[0].evaluate(pt.coords, 3**10) == 0
    # the lift agrees with the seed modulo p^(v+1)
    assert all((a - b) % 9 == 0 for a, b in zip(pt.coords, seed))


def test_deep_hensel_rejects_shallow_seed():
    from oddforms.padic import hensel_lift_deep
    F = system("3: x1^3 + x2^3 - 2*x3^3")
    with pytest.raises(ValueError):
        hensel_lift_deep(F.forms, (1, 2, 1), 3, 6)
