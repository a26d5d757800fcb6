import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from oddforms.errors import CapExceeded
from oddforms.forms import Form, FormSystem
from oddforms.rank import (
    CSV_FIELDS, EXACT, ESTIMATE, Product, birch_rank, block_ranks, dimension_from_counts,
    expand, find_decomposition, linear_rank, min_weight_combination, reproduces, schmidt_rank,
    schmidt_rank_system, trivial_decomposition, verify_lampert_codim, verify_strength_birch,
)

from conftest import system


def form(text, names=None):
    return system(text, names).forms[0]


def test_linear_rank():
    assert linear_rank(form("1: x1 - 4*x2 + 16*x3")) == 3
    with pytest.raises(ValueError):
        linear_rank(form("3: x1^3"))


def test_min_weight_combination():
    block = system("1: x1 + x2 + x3; 1: x1 + x2 - x3").forms
    w, c = min_weight_combination(block)
    assert w == 1
    comb = [sum(ci * Fraction(f.coefficient(e)) for ci, f in zip(c, block))
            for e in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]]
    assert sum(1 for v in comb if v) == 1


def weight_oracle(rows):
    """Minimum support over integer combinations in a small box (brute force)."""
    best = None
    for c in itertools.product(range(-3, 4), repeat=len(rows)):
        if not any(c):
            continue
        v = [sum(a * r[j] for a, r in zip(c, rows)) for j in range(len(rows[0]))]
        w = sum(1 for x in v if x)
        if w and (best is None or w < best):
            best = w
    return best


@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=1, max_size=2))
def test_min_weight_matches_bruteforce(rows):
    import numpy as np
    if np.linalg.matrix_rank(np.array(rows)) < len(rows):
        return
    block = [Form.from_dict(4, 1, {tuple(int(i == j) for i in range(4)): c for j, c in enumerate(r)})
             for r in rows]
    assert min_weight_combination(block)[0] == weight_oracle(rows)


# -- Birch rank ----------------------------------------------------------------------------


def test_birch_diagonal_is_support_size():
    est = birch_rank([form("3: x1^3 - 2*x3^3 + x4^3", "x1 x2 x3 x4")])
    assert est.value == 3 and est.exact and est.confidence == EXACT


def test_birch_linear_block():
    assert birch_rank(system("1: x1 + x2").forms).value == 2
    assert birch_rank(system("1: x1 + x2; 1: x1").forms).value == 1


def test_birch_estimate_for_product():
    # singular locus of x1 x2 x3 is the union of the coordinate axes: codim 2
    est = birch_rank([form("3: x1*x2*x3")])
    assert est.value == 2 and est.confidence == ESTIMATE and not est.low_confidence


def test_birch_estimate_two_cubics():
    # Jacobian of {x1^3 + x2^3, x3^3 + x4^3} drops rank where one row vanishes: codim 2
    est = birch_rank(system("3: x1^3 + x2^3; 3: x3^3 + x4^3").forms)
    assert est.value == 2


def test_birch_cap():
    f = form("3: x1^3 + x2^3 + x1*x2*x3 + x4*x5*x6")
    with pytest.raises(CapExceeded):
        birch_rank([f], sbound=100)


def test_dimension_from_counts_majority_and_tie():
    assert dimension_from_counts({7: 49, 11: 121, 13: 169}, 3)[0] == 2
    dim, low, note = dimension_from_counts({7: 7, 11: 121}, 3)
    assert dim == 2 and low and "tie" in note
    assert dimension_from_counts({7: 0, 11: 0, 13: 0}, 3)[0] == -1


def test_birch_rank_is_permutation_invariant():
    f = form("3: x1^2*x2 + x3^3 - x1*x2*x3")
    g = form("3: x3^2*x1 + x2^3 - x1*x2*x3")
    assert birch_rank([f]).value == birch_rank([g]).value


# -- Schmidt rank --------------------------------------------------------------------------


@pytest.mark.parametrize("text,lo,hi", [
    ("3: x1*x2*x3", 1, 1),
    ("3: x1^3 + x2^3 + x3^3", 2, 2),
    ("3: x1^2*x2 + x3^2*x4", 1, 2),
    ("3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3", 3, 3),
])
def test_schmidt_examples(text, lo, hi):
    f = form(text)
    iv = schmidt_rank(f)
    assert (iv.lower, iv.upper) == (lo, hi)
    assert reproduces(f, iv.witness)
    assert all(p.v.degree % 2 == 1 and p.v.degree < f.degree for p in iv.witness)


def test_fermat_witness_shape():
    iv = schmidt_rank(form("3: x1^3 + x2^3 + x3^3"))
    assert sorted(str(p.v) for p in iv.witness) == ["x1 + x2 - x3", "x3"]


def test_block_minimum_over_combinations():
    iv = schmidt_rank_system(system("3: x1^3; 3: x1^3 + x2^3").forms)
    assert iv.upper == 1 and not iv.exhaustive


def test_dependent_block_has_strength_zero():
    iv = schmidt_rank_system(system("3: x1^3 + x2^3; 3: 2*x1^3 + 2*x2^3").forms)
    assert iv.upper == 0


def test_trivial_decomposition_reproduces():
    f = form("3: x1^2*x3 + x2^3 - 4*x1*x2*x3 + x3^3")
    w = trivial_decomposition(f)
    assert reproduces(f, w) and len(w) == 3


def test_expand_clears_denominators():
    x1 = Form.variable(2, 0)
    w = (Product(Fraction(1, 2), x1 * x1, x1), Product(Fraction(1, 3), x1 * x1, x1))
    num, den = expand(w, 2, 3)
    assert den == 6 and num == (x1 * x1 * x1) * 5


def test_budget_exhaustion_not_exhaustive():
    out = find_decomposition(form("3: x1^3 + x2^3 + x3^3 + x4^3"), 1, budget=2)
    assert out.witness is None and not out.exhaustive


def test_interval_validation():
    from oddforms.rank import SchmidtRankInterval
    with pytest.raises(ValueError):
        SchmidtRankInterval(3, 2)


linear_coeffs = st.lists(st.integers(-1, 1), min_size=3, max_size=3).filter(any)
quad_coeffs = st.lists(st.integers(-3, 3), min_size=6, max_size=6).filter(any)
QUAD_MONS = [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1)]
X = sympy.symbols("x1:4")


def to_sympy(f):
    return sum(c * sympy.prod(v**a for v, a in zip(X, e)) for e, c in f.terms)


@given(linear_coeffs, quad_coeffs)
def test_products_have_strength_one(lc, qc):
    lin = Form.from_dict(3, 1, {tuple(int(i == j) for i in range(3)): c for j, c in enumerate(lc)})
    quad = Form.from_dict(3, 2, dict(zip(QUAD_MONS, qc)))
    f = lin * quad
    iv = schmidt_rank(f, max_level=1)
    assert iv.upper == 1 and reproduces(f, iv.witness)


@given(st.lists(st.integers(-2, 2), min_size=10, max_size=10).filter(any))
def test_strength_one_only_for_reducible_cubics(cs):
    mons = [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]
    f = Form.from_dict(3, 3, dict(zip(mons, cs)))
    iv = schmidt_rank(f, max_level=1)
    _, factors = sympy.factor_list(to_sympy(f))
    reducible = sum(m for _, m in factors) > 1
    if iv.upper == 1:
        assert reducible
    if not reducible:
        assert iv.upper >= 2


@given(st.permutations(range(3)), st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3))
def test_strength_invariant_under_signed_permutation(perm, signs):
    base = form("3: x1^3 + x2^3 + x3^3")
    moved = Form.zero(3, 3)
    for e, c in base.terms:
        ne = tuple(e[perm[i]] for i in range(3))
        moved = moved + Form.from_dict(3, 3, {ne: c})
    moved = moved.scale(signs)
    a, b = schmidt_rank(base), schmidt_rank(moved)
    assert (a.lower, a.upper) == (b.lower, b.upper)


@given(st.integers(0, 2))
def test_hyperplane_restriction_keeps_witness_valid(i):
    f = form("3: x1^3 + x2^3 + x3^3")
    iv = schmidt_rank(f)
    restricted = [Product(p.coefficient, p.u.restrict([i]), p.v.restrict([i])) for p in iv.witness]
    g = f.restrict([i])
    num, den = expand(restricted, g.s, 3)
    assert num == g * den
    assert schmidt_rank(g).upper <= iv.upper


# -- inequalities ---------------------------------------------------------------------------


def test_block_ranks_csv():
    rows = [r.csv_row() for r in block_ranks(system("3: x1^3 + x2^3 + x3^3; 1: x1 + x2"))]
    assert all(tuple(r) == CSV_FIELDS for r in rows)
    assert rows[0]["degree"] == 3 and rows[1]["h_upper"] == 2


@pytest.mark.parametrize("text", [
    "3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3",
    "3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3; 1: x1 + x2 + x3 + x4 + x5",
    "1: x1 - 4*x2 + 16*x3",
    "3: x1^3 + 2*x2^3 - 3*x3^3",
])
def test_inequalities_hold(text):
    sys = system(text)
    ranks = block_ranks(sys)
    a = verify_strength_birch(sys, ranks)
    assert a.holds and a.margin >= 0
    b = verify_lampert_codim(sys, birch=[r.birch for r in ranks])
    assert b.holds and b.measured >= b.bound


def test_codim_of_empty_singular_locus_is_s():
    b = verify_lampert_codim(system("1: x1 + x2 + x3"))
    assert b.measured == 3


def test_strength_birch_needs_every_block():
    sys = system("3: x1^3 + x2^3; 1: x1")
    with pytest.raises(ValueError):
        verify_strength_birch(sys, block_ranks(system("3: x1^3 + x2^3")))
