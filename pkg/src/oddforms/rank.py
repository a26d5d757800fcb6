"""Schmidt rank (strength) and Birch rank: bounds, estimates and the inequalities between them."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from math import lcm
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapExceeded
from .forms import Form, FormSystem, linear_combination
from .linalg import rank as mat_rank, left_kernel_vector, solve

EXACT = "exact-symbolic"
ESTIMATE = "point-count-estimate"

DEFAULT_BIRCH_PRIMES = (7, 11, 13)
DEFAULT_SBOUND = 2 * 10**6
DEFAULT_BUDGET = 2000


# -- linear forms ---------------------------------------------------------------


def linear_rank(f: Form) -> int:
    """Number of non-zero coefficients of a linear form."""
    if f.degree != 1:
        raise ValueError(f"linear_rank needs a degree-1 form, got degree {f.degree}")
    return len(f.terms)


def _linear_matrix(block: Sequence[Form]) -> list[list[int]]:
    s = block[0].s
    rows = []
    for f in block:
        row = [0] * s
        for e, c in f.terms:
            row[e.index(1)] = c
        rows.append(row)
    return rows


def min_weight_combination(block: Sequence[Form]) -> tuple[int, tuple[Fraction, ...]]:
    """Smallest support of a non-trivial rational combination of linear forms.

    Returns the weight and the coefficient vector attaining it.  A combination
    vanishing on the columns ``Z`` exists iff those columns have rank below the
    block size, so we look for the largest such ``Z``.
    """
    A = _linear_matrix(block)
    r, s = len(A), len(A[0])
    for size in range(s, -1, -1):
        for Z in combinations(range(s), size):
            sub = [[row[j] for j in Z] for row in A] if Z else [[] for _ in A]
            if Z and mat_rank(sub) >= r:
                continue
            c = left_kernel_vector(sub) if Z else [Fraction(int(i == 0)) for i in range(r)]
            if c is None:
                continue
            w = sum(1 for j in range(s) if sum(ci * row[j] for ci, row in zip(c, A)) != 0)
            return w, tuple(c)
    raise AssertionError("unreachable: the empty column set always qualifies")


# -- Birch rank -----------------------------------------------------------------


@dataclass(frozen=True)
class BirchRankEstimate:
    value: int
    per_prime_counts: dict = field(default_factory=dict)
    confidence: str = EXACT
    low_confidence: bool = False
    note: str = ""

    @property
    def exact(self) -> bool:
        return self.confidence == EXACT


def _usable_primes(primes, s, d, sbound):
    return [p for p in primes if p > d and p**s <= sbound]


def dimension_from_counts(counts: dict, s: int) -> tuple[int, bool, str]:
    """Majority of ``round(log_p count)``; returns (dim, low_confidence, note).

    A count of 0 is read as an empty variety (dimension -1 in the affine cone
    sense); the caller maps it to codimension ``s``.
    """
    dims = {}
    for p, c in counts.items():
        dims[p] = -1 if c == 0 else round(math.log(c) / math.log(p))
    tally = Counter(dims.values()).most_common()
    best, n = tally[0]
    note = ""
    if len(tally) > 1 and tally[1][1] == n:
        # tie: report it and keep the larger dimension (the conservative codim)
        best = max(d for d, k in tally if k == n)
        note = "tie between primes: " + ", ".join(f"p={p}: dim {d}" for p, d in dims.items())
    low = (max(dims.values()) - min(dims.values()) > 1) or bool(note)
    return best, low, note


def birch_rank(block: Sequence[Form], primes: Sequence[int] = DEFAULT_BIRCH_PRIMES,
               sbound: int = DEFAULT_SBOUND) -> BirchRankEstimate:
    """Codimension of the locus where the block's Jacobian drops rank."""
    if not block:
        raise ValueError("empty block")
    d = block[0].degree
    s = block[0].s
    if any(f.degree != d for f in block):
        raise ValueError("birch_rank needs forms of a single degree")
    if d == 1:
        w, _ = min_weight_combination(block)
        return BirchRankEstimate(w, {}, EXACT)
    if len(block) == 1 and block[0].is_diagonal():
        # grad f = (d a_i x_i^(d-1)) vanishes exactly on {x_i = 0 : i in support}
        return BirchRankEstimate(len(block[0].support), {}, EXACT)
    usable = _usable_primes(primes, s, d, sbound)
    if not usable:
        raise CapExceeded(f"no prime in {list(primes)} above degree {d} with p^{s} <= {sbound}")
    counts = {p: kernels.deficient_count(block, s, p) for p in usable}
    dim, low, note = dimension_from_counts(counts, s)
    value = s if dim < 0 else s - dim
    if len(usable) < 3:
        low = True
        note = (note + "; " if note else "") + f"only {len(usable)} prime(s) within the cap"
    return BirchRankEstimate(value, counts, ESTIMATE, low, note)


# -- Schmidt rank -----------------------------------------------------------------


@dataclass(frozen=True)
class Product:
    """One term ``coefficient * u * v`` of a decomposition; ``v`` is the odd factor."""

    coefficient: Fraction
    u: Form
    v: Form


def expand(witness: Sequence[Product], s: int, degree: int) -> tuple[Form, int]:
    """``(numerator, denominator)`` with ``sum c_i u_i v_i == numerator / denominator``."""
    den = lcm(*(p.coefficient.denominator for p in witness)) if witness else 1
    acc = Form.zero(s, degree)
    for t in witness:
        acc = acc + (t.u * t.v) * int(t.coefficient * den)
    return acc, den


def reproduces(f: Form, witness: Sequence[Product]) -> bool:
    num, den = expand(witness, f.s, f.degree)
    return num == f * den


@dataclass(frozen=True)
class SchmidtRankInterval:
    lower: int
    upper: int
    witness: tuple[Product, ...] | None = None
    exhaustive: bool = False
    lower_exact: bool = True
    coefficients: tuple | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} above upper bound {self.upper}")
        if self.witness is not None and len(self.witness) != self.upper:
            raise ValueError("witness length must equal the upper bound")


@lru_cache(maxsize=None)
def monomials_of_degree(s: int, e: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in combinations_with_replacement(range(s), e):
        ex = [0] * s
        for j in combo:
            ex[j] += 1
        out.append(tuple(ex))
    return tuple(sorted(out, reverse=True))


def _canonical_vectors(n: int, height: int):
    """Integer vectors in ``[-height, height]^n``, primitive with first non-zero entry positive."""
    for vec in product(range(-height, height + 1), repeat=n):
        nz = next((c for c in vec if c), 0)
        if nz <= 0:
            continue
        if height > 1 and math.gcd(*vec) != 1:
            continue
        yield vec


@lru_cache(maxsize=4096)
def _candidate_factors(s: int, e: int, height: int) -> tuple[Form, ...]:
    mons = monomials_of_degree(s, e)
    return tuple(Form.from_dict(s, e, dict(zip(mons, vec))) for vec in _canonical_vectors(len(mons), height))


def _factor_degrees(d: int) -> list[int]:
    if d % 2:
        return list(range(1, d, 2))
    return list(range(1, d // 2 + 1))


def trivial_decomposition(f: Form) -> tuple[Product, ...]:
    """Group monomials by their first variable: ``f = sum_j x_j * u_j``."""
    groups: dict[int, dict] = {}
    for e, c in f.terms:
        j = next(i for i, a in enumerate(e) if a)
        ne = list(e)
        ne[j] -= 1
        groups.setdefault(j, {})[tuple(ne)] = c
    return tuple(
        Product(Fraction(1), Form.from_dict(f.s, f.degree - 1, g), Form.variable(f.s, j))
        for j, g in sorted(groups.items())
    )


_FILTER_PRIME = 2_147_483_647


def _consistent_mod(A: np.ndarray, b: np.ndarray, P: int = _FILTER_PRIME) -> bool:
    """Whether ``A x = b`` is solvable modulo a large prime (a fast necessary test)."""
    M = np.concatenate([A % P, (b % P)[:, None]], axis=1)
    rows, cols = M.shape
    r = 0
    for c in range(cols - 1):
        nz = np.flatnonzero(M[r:, c])
        if not len(nz):
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), -1, P) % P
        f = M[:, c].copy()
        f[r] = 0
        nzr = np.flatnonzero(f)
        if len(nzr):
            M[nzr] = (M[nzr] - (f[nzr, None] * M[r]) % P) % P
        r += 1
        if r == rows:
            break
    return not np.any(M[r:, cols - 1])


def _try_factors(f: Form, vs: Sequence[Form]) -> tuple[Product, ...] | None:
    """Solve ``f = sum u_i v_i`` for the ``u_i`` by linear algebra on coefficients."""
    d, s = f.degree, f.s
    targets = monomials_of_degree(s, d)
    index = {m: k for k, m in enumerate(targets)}
    cols, owners = [], []
    for i, v in enumerate(vs):
        for mu in monomials_of_degree(s, d - v.degree):
            col = [0] * len(targets)
            for e, c in v.terms:
                col[index[tuple(a + b for a, b in zip(e, mu))]] += c
            cols.append(col)
            owners.append((i, mu))
    b = [f.coefficient(m) for m in targets]
    if not _consistent_mod(np.array(cols, dtype=np.int64).T, np.array(b, dtype=np.int64)):
        return None
    A = [list(r) for r in zip(*cols)]
    sol = solve(A, b)
    if sol is None:
        return None
    out = []
    for i, v in enumerate(vs):
        coeffs = {mu: x for (k, mu), x in zip(owners, sol) if k == i and x != 0}
        if not coeffs:
            continue
        den = lcm(*(x.denominator for x in coeffs.values()))
        ints = {mu: int(x * den) for mu, x in coeffs.items()}
        g = math.gcd(*ints.values())
        u = Form.from_dict(s, d - v.degree, {mu: c // g for mu, c in ints.items()})
        out.append(Product(Fraction(g, den), u, v))
    return tuple(out)


def _factor_choices(pools):
    """Lazy product of ``combinations(pool, k)`` over ``(pool, k)`` pairs."""
    if not pools:
        yield ()
        return
    pool, k = pools[0]
    for head in combinations(pool, k):
        for tail in _factor_choices(pools[1:]):
            yield head + tail


@dataclass
class SearchOutcome:
    witness: tuple[Product, ...] | None
    exhaustive: bool
    attempts: int


def find_decomposition(f: Form, level: int, height_bound: int = 1,
                       budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    """Search for ``f = sum_{i<=level} u_i v_i`` with integer ``v_i`` of height ``<= height_bound``.

    Co-factor degree splits are tried with odd ``v`` degrees ascending, then
    ``v`` coefficient vectors in order.  Linear factor sets are required to be
    independent (dependent sets are covered at a lower level).
    """
    attempts = 0
    for degs in combinations_with_replacement(_factor_degrees(f.degree), level):
        groups = Counter(degs)
        pools = [(_candidate_factors(f.s, e, height_bound), k) for e, k in sorted(groups.items())]
        for vs in _factor_choices(pools):
            lin = [v for v in vs if v.degree == 1]
            if len(lin) > 1 and mat_rank(_linear_matrix(lin)) < len(lin):
                continue
            if attempts >= budget:
                return SearchOutcome(None, False, attempts)
            attempts += 1
            w = _try_factors(f, vs)
            if w is not None:
                return SearchOutcome(w, True, attempts)
    return SearchOutcome(None, True, attempts)


def schmidt_lower_bound(f: Form, primes: Sequence[int] = DEFAULT_BIRCH_PRIMES,
                        sbound: int = DEFAULT_SBOUND) -> tuple[int, bool, BirchRankEstimate | None]:
    """``max(1, ceil(B/2))`` and whether ``B`` was obtained symbolically."""
    if f.is_zero:
        return 0, True, None
    try:
        est = birch_rank([f], primes, sbound)
    except CapExceeded:
        return 1, True, None
    return max(1, -(-est.value // 2)), est.exact, est


def schmidt_rank(f: Form, height_bound: int = 1, budget: int = DEFAULT_BUDGET,
                 max_level: int | None = None, primes: Sequence[int] = DEFAULT_BIRCH_PRIMES,
                 sbound: int = DEFAULT_SBOUND) -> SchmidtRankInterval:
    """Interval for the strength of a form of degree at least 2.

    The upper end comes from the best decomposition found (the grouping by
    first variable is always available); the lower end from the singular
    locus: ``f = sum_{i<=h} u_i v_i`` forces ``V*(f)`` to contain the common
    zeros of all ``u_i, v_i``, so ``h >= ceil(B/2)``.
    """
    if f.degree < 2:
        raise ValueError("schmidt_rank needs degree >= 2; use linear_rank for linear forms")
    if f.is_zero:
        return SchmidtRankInterval(0, 0, (), True)
    best = trivial_decomposition(f)
    lower, lower_exact, _ = schmidt_lower_bound(f, primes, sbound)
    # a point-count Birch estimate can overshoot; never let it cross a witness
    lower = min(lower, len(best))
    exhaustive = True
    top = len(best) - 1 if max_level is None else min(len(best) - 1, max_level)
    remaining = budget
    for h in range(1, top + 1):
        if h < lower and lower_exact:
            continue
        out = find_decomposition(f, h, height_bound, remaining)
        remaining -= out.attempts
        if out.witness is not None:
            best = out.witness
            break
        if not out.exhaustive:
            exhaustive = False
            break
    else:
        if top < len(best) - 1:
            exhaustive = False
    if lower > len(best):
        if lower_exact:
            raise AssertionError(f"witness of length {len(best)} below the exact bound {lower}")
        lower = len(best)
    if lower_exact and lower == len(best):
        exhaustive = True
    return SchmidtRankInterval(lower, len(best), best, exhaustive, lower_exact)


def _coefficient_box(r: int, height: int):
    for vec in product(range(-height, height + 1), repeat=r):
        nz = next((c for c in vec if c), 0)
        if nz > 0 and math.gcd(*vec) == 1:
            yield vec


def schmidt_rank_system(block: Sequence[Form], coeff_box: int = 1, height_bound: int = 1,
                        budget: int = DEFAULT_BUDGET, **kw) -> SchmidtRankInterval:
    """Strength of a block: minimum over coefficient vectors in ``[-coeff_box, coeff_box]^r``."""
    if not block:
        raise ValueError("empty block")
    if len(block) == 1:
        out = schmidt_rank(block[0], height_bound, budget, **kw)
        return SchmidtRankInterval(out.lower, out.upper, out.witness, out.exhaustive,
                                   out.lower_exact, (1,))
    monos = sorted({e for f in block for e, _ in f.terms})
    rows = [[f.coefficient(e) for e in monos] for f in block]
    dep = left_kernel_vector(rows) if mat_rank(rows) < len(block) else None
    if dep is not None:
        den = lcm(*(x.denominator for x in dep))
        return SchmidtRankInterval(0, 0, (), True, True, tuple(int(x * den) for x in dep))
    best = None
    lower = None
    lower_exact = True
    exhaustive = True
    for c in _coefficient_box(len(block), coeff_box):
        comb = linear_combination(block, c)
        if comb.is_zero:
            return SchmidtRankInterval(0, 0, (), True, True, c)
        iv = schmidt_rank(comb.form, height_bound, budget, **kw)
        lower = iv.lower if lower is None else min(lower, iv.lower)
        lower_exact = lower_exact and iv.lower_exact
        exhaustive = exhaustive and iv.exhaustive
        if best is None or iv.upper < best.upper:
            best = SchmidtRankInterval(iv.lower, iv.upper, iv.witness, iv.exhaustive,
                                       iv.lower_exact, c)
    # a box search over Q^r is never complete
    lower = min(lower, best.upper)
    return SchmidtRankInterval(lower, best.upper, best.witness, False, lower_exact, best.coefficients)


# -- whole-system rank data and the inequalities ------------------------------------


@dataclass(frozen=True)
class BlockRanks:
    degree: int
    size: int
    schmidt: SchmidtRankInterval
    birch: BirchRankEstimate

    def csv_row(self) -> dict:
        return {
            "degree": self.degree,
            "r": self.size,
            "h_lower": self.schmidt.lower,
            "h_upper": self.schmidt.upper,
            "exhaustive": str(self.schmidt.exhaustive).lower(),
            "B_value": self.birch.value,
            "confidence": self.birch.confidence,
        }


CSV_FIELDS = ("degree", "r", "h_lower", "h_upper", "exhaustive", "B_value", "confidence")


def block_ranks(sys: FormSystem, coeff_box: int = 1, height_bound: int = 1,
                budget: int = DEFAULT_BUDGET, primes: Sequence[int] = DEFAULT_BIRCH_PRIMES,
                sbound: int = DEFAULT_SBOUND) -> list[BlockRanks]:
    out = []
    for deg, block in sys.blocks.items():
        B = birch_rank(block, primes, sbound)
        if deg == 1:
            w = B.value
            iv = SchmidtRankInterval(w, w, None, True, True)
        else:
            iv = schmidt_rank_system(block, coeff_box, height_bound, budget,
                                     primes=primes, sbound=sbound)
        out.append(BlockRanks(deg, len(block), iv, B))
    return out


@dataclass(frozen=True)
class InequalityCheck:
    holds: bool
    lhs: int
    rhs: int

    @property
    def margin(self) -> int:
        return self.rhs - self.lhs


def verify_strength_birch(sys: FormSystem, ranks: Sequence[BlockRanks]) -> InequalityCheck:
    """``h(F) <= 4^d d^2 R (B(F) + R - 1)`` with ``h, B`` minimised over blocks."""
    if not ranks:
        raise ValueError("no rank data supplied")
    if {r.degree for r in ranks} != set(sys.degrees):
        raise ValueError("rank data does not cover every block of the system")
    d, R = sys.max_degree, sys.R
    h = min(r.schmidt.upper for r in ranks)
    B = min(r.birch.value for r in ranks)
    rhs = 4**d * d * d * R * (B + R - 1)
    return InequalityCheck(h <= rhs, h, rhs)


@dataclass(frozen=True)
class CodimCheck:
    holds: bool
    measured: int
    bound: int
    per_prime_counts: dict
    low_confidence: bool


def singular_codim(sys: FormSystem, primes: Sequence[int], cap: int) -> tuple[int, dict, bool]:
    """Codimension of the joint rank-deficient locus of the full Jacobian, from counts."""
    usable = [p for p in primes if p > sys.max_degree and p**sys.s <= cap]
    if not usable:
        raise CapExceeded(f"no usable prime in {list(primes)} for s={sys.s} under cap {cap}")
    counts = {p: kernels.deficient_count(sys.forms, sys.s, p) for p in usable}
    dim, low, _ = dimension_from_counts(counts, sys.s)
    return (sys.s if dim < 0 else sys.s - dim), counts, low


def verify_lampert_codim(sys: FormSystem, primes: Sequence[int] = (5, 7, 11),
                         cap: int = DEFAULT_SBOUND, birch: Sequence[BirchRankEstimate] | None = None,
                         sbound: int = DEFAULT_SBOUND) -> CodimCheck:
    """Measured codim of the joint singular locus is at least ``B - R - d + 2``."""
    if birch is None:
        birch = [birch_rank(b, primes, sbound) for b in sys.blocks.values()]
    B = min(b.value for b in birch)
    bound = B - sys.R - sys.max_degree + 2
    measured, counts, low = singular_codim(sys, primes, cap)
    return CodimCheck(measured >= bound, measured, bound, counts, low)
