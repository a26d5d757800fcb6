import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oddforms import kernels
from oddforms.counting import CountQuery, almost_prime_count
from oddforms.forms import Form, FormSystem

from conftest import brute_zeros, system


def rank_mod_p(rows, p):
    """Row rank by plain Gaussian elimination over F_p (oracle)."""
    m = [[v % p for v in r] for r in rows]
    r = 0
    for c in range(len(m[0]) if m else 0):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return r


@st.composite
def small_systems(draw, s=3):
    """One or two forms of degree 1 or 3 in ``s`` variables with small coefficients."""
    forms = []
    for _ in range(draw(st.integers(1, 2))):
        deg = draw(st.sampled_from([1, 3]))
        mons = [e for e in itertools.product(range(deg + 1), repeat=s) if sum(e) == deg]
        cs = draw(st.lists(st.integers(-3, 3), min_size=len(mons), max_size=len(mons)))
        f = Form.from_dict(s, deg, dict(zip(mons, cs)))
        if not f.is_zero:
            forms.append(f)
    if not forms:
        forms = [Form.variable(s, 0)]
    return FormSystem.on(s, forms)


def test_both_backends_present():
    assert "python" in kernels.available_backends()


@given(small_systems(), st.sampled_from([2, 3, 5, 7]))
def test_scan_matches_bruteforce(sys, p):
    want = list(brute_zeros(sys, p))
    units = [x for x in want if all(x)]

    def nonsingular(x):
        J = [[g.evaluate(x, p) for g in f.gradient] for f in sys.forms]
        return rank_mod_p(J, p) == sys.R

    for name in kernels.available_backends():
        with kernels.use_backend(name):
            res = kernels.scan_fp(sys.forms, sys.s, p)
        assert res.total == len(want)
        assert res.unit_total == len(units)
        assert res.nonsingular_unit_total == sum(nonsingular(x) for x in units)


@given(small_systems(), st.sampled_from([3, 5, 7]))
def test_deficient_count_matches_bruteforce(sys, p):
    want = 0
    for x in itertools.product(range(p), repeat=sys.s):
        J = [[g.evaluate(x, p) for g in f.gradient] for f in sys.forms]
        want += rank_mod_p(J, p) < sys.R
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            assert kernels.deficient_count(sys.forms, sys.s, p) == want


@given(small_systems(), st.sampled_from([2, 5, 7]))
def test_value_counts_histogram(sys, p):
    f = sys.forms[0]
    want = np.zeros(p, dtype=np.int64)
    for x in itertools.product(range(p), repeat=sys.s):
        want[f.evaluate(x, p)] += 1
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            assert list(kernels.value_counts(f.terms, sys.s, p)) == list(want)


def test_fermat_cubic_has_no_unit_zeros_mod_7(backend):
    # unit cubes mod 7 are +-1, and three of them never sum to 0
    sys = system("3: x1^3 + x2^3 + x3^3")
    assert kernels.scan_fp(sys.forms, 3, 7, units_only=True).unit_total == 0


def test_found_points_are_lexicographic_and_limited(backend):
    sys = system("3: x1^3 + x2^3 - 2*x3^3")
    res = kernels.scan_fp(sys.forms, 3, 7, units_only=True, limit=5, stop_at_limit=True)
    assert len(res.found) == 5 and res.found == sorted(res.found)
    assert not res.complete


@pytest.mark.parametrize("text", ["1: x1 + x2 - 2*x3", "3: x1^3 - x2^3; 1: x1 - x3", "3: x1^2*x2 - x3^3"])
@pytest.mark.parametrize("N", [10, 40])
def test_box_count_backends_and_exact_path_agree(text, N):
    q = CountQuery(system(text), N, Y=2, allow_zero_y=True)
    results = []
    for name in kernels.available_backends():
        with kernels.use_backend(name):
            results.append(almost_prime_count(q).count)
    assert len(set(results)) == 1


def test_poly_bound():
    f = system("3: 2*x1^3 - x1*x2*x3").forms[0]
    assert kernels.poly_bound(f, 10) == 3000


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
