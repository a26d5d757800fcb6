"""Almost-prime and von Mangoldt weighted solution counts in boxes, plus growth fits."""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapExceeded
from .forms import Form, FormSystem
from .primes import primes_up_to, von_mangoldt_table

DEFAULT_COUNT_CAP = 2 * 10**9


@dataclass(frozen=True)
class CountQuery:
    """Which solutions of ``system`` in ``[-N, N]^s`` to count.

    Outside ``J`` every coordinate is ``y * p`` with ``p`` prime and
    ``1 <= |y| <= Y`` (plus 0 when ``allow_zero_y``).  ``multipliers`` pins
    ``y_i`` to one value per coordinate (primes then range over positive
    values only); ``zero_J`` forces the ``J`` coordinates to 0 instead of
    leaving them free.
    """

    system: FormSystem
    N: int
    Y: int = 1
    J: tuple[int, ...] = ()
    allow_zero_y: bool = False
    multipliers: tuple[int, ...] | None = None
    zero_J: bool = False
    sample_limit: int = 10
    cap: int = DEFAULT_COUNT_CAP

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.Y < 1:
            raise ValueError("Y must be at least 1")
        if any(not 0 <= j < self.system.s for j in self.J):
            raise ValueError(f"J contains an index outside 0..{self.system.s - 1}")
        if self.multipliers is not None and len(self.multipliers) != self.system.s:
            raise ValueError("one multiplier per variable is required")


def allowed_values(q: CountQuery, i: int, primes: Sequence[int]) -> list[int]:
    N = q.N
    if i in q.J:
        return [0] if q.zero_J else list(range(-N, N + 1))
    vals = {0} if q.allow_zero_y else set()
    if q.multipliers is not None:
        m = q.multipliers[i]
        if m == 0:
            return [0]
        vals.update(m * p for p in primes if abs(m) * p <= N)
    else:
        for y in range(1, q.Y + 1):
            for p in primes:
                if y * p > N:
                    break
                vals.add(y * p)
                vals.add(-y * p)
    return sorted(vals)


def choose_solve_variable(forms: Sequence[Form], sizes: Sequence[int]) -> tuple[int, int] | None:
    """``(variable, form index)`` for the last-coordinate solve, or None.

    Candidates are variables in which some form is linear; prefer the
    largest value set, ties going to the highest index.
    """
    best = None
    for j in range(len(sizes)):
        k = next((i for i, f in enumerate(forms) if f.degree_in(j) == 1), None)
        if k is None:
            continue
        key = (sizes[j], j)
        if best is None or key > best[0]:
            best = (key, j, k)
    return None if best is None else (best[1], best[2])


@dataclass(frozen=True)
class CountResult:
    count: int
    weighted: float
    samples: tuple[tuple[int, ...], ...]
    solved_variable: int | None
    work: int
    exact_arithmetic: bool


def _box_count(forms: Sequence[Form], s: int, lists: Sequence[Sequence[int]],
               weights: Sequence[Sequence[float]], N: int, limit: int, cap: int) -> CountResult:
    sizes = [len(v) for v in lists]
    choice = choose_solve_variable(forms, sizes) if forms else None
    if choice is None:
        order = list(range(s))
    else:
        j = choice[0]
        order = [i for i in range(s) if i != j] + [j]
    work = math.prod(sizes[i] for i in (order[:-1] if choice else order))
    if work > cap:
        raise CapExceeded(f"box enumeration of {work} points exceeds cap {cap}")
    # position k of the permuted vector holds original variable order[k]
    pos = [0] * s
    for k, i in enumerate(order):
        pos[i] = k
    pforms = [f.embed(s, pos) for f in forms]
    m = s - 1 if choice else s
    vals = np.array([v for i in order[:m] for v in lists[i]], dtype=np.int64)
    wts = np.array([w for i in order[:m] for w in weights[i]], dtype=np.float64)
    vst = np.cumsum([0] + [sizes[i] for i in order[:m]]).astype(np.int64)
    solve, skip, last_w = None, -1, np.zeros(2 * N + 1)
    if choice:
        j, k = choice
        skip = k
        solve = pforms[k].split_variable(s - 1)
        last_w[:] = -1.0
        for v, w in zip(lists[j], weights[j]):
            last_w[v + N] = w
    exact = any(kernels.poly_bound(f, N) >= kernels.INT64_SAFE for f in pforms)
    if solve is not None:
        exact = exact or any(kernels.poly_bound(g, N) >= kernels.INT64_SAFE for g in solve)
    count, wsum, samples = kernels.box_count(vals, wts, vst, pforms, s, skip, solve, last_w, N,
                                             limit, exact=exact)
    back = tuple(tuple(row[pos[i]] for i in range(s)) for row in samples)
    return CountResult(count, wsum, back, choice[0] if choice else None, work, exact)


def almost_prime_count(q: CountQuery) -> CountResult:
    """Exact number of solution vectors ``x`` (not representations ``(y, p)``)."""
    s = q.system.s
    primes = primes_up_to(q.N)
    lists = [allowed_values(q, i, primes) for i in range(s)]
    weights = [[1.0] * len(v) for v in lists]
    return _box_count(q.system.forms, s, lists, weights, q.N, q.sample_limit, q.cap)


def weighted_prime_count(sys: FormSystem, N: int, cap: int = DEFAULT_COUNT_CAP) -> float:
    """``sum_{x in [1, N]^s, F(x) = 0} Lambda(x_1) ... Lambda(x_s)``."""
    if N < 1:
        raise ValueError("N must be positive")
    lam = von_mangoldt_table(N)
    support = [n for n in range(2, N + 1) if lam[n] > 0]
    lists = [support] * sys.s
    weights = [[float(lam[n]) for n in support]] * sys.s
    return _box_count(sys.forms, sys.s, lists, weights, N, 0, cap).weighted


# -- records and growth fits ---------------------------------------------------------------


@dataclass(frozen=True)
class CountRecord:
    N: int
    Y: int
    count: int
    predicted: float
    elapsed: float = 0.0

    @property
    def ratio(self) -> float:
        return self.count / self.predicted


def predicted_size(N: int, s: int, D: int) -> float:
    """``N^(s-D) / (log N)^s``."""
    return N ** (s - D) / math.log(N) ** s


def count_record(q: CountQuery, s_eff: int | None = None, D_eff: int | None = None) -> tuple[CountRecord, CountResult]:
    s = q.system.s if s_eff is None else s_eff
    D = q.system.D if D_eff is None else D_eff
    t0 = time.perf_counter()
    res = almost_prime_count(q)
    return CountRecord(q.N, q.Y, res.count, predicted_size(q.N, s, D), time.perf_counter() - t0), res


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    log_corrected_slope: float
    constant: float
    residuals: tuple[float, ...]
    used: tuple[int, ...]
    excluded: tuple[int, ...]


def _lstsq_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), y - A @ coef


def growth_fit(records: Sequence[CountRecord], s: int, D: int) -> GrowthFit:
    """Least-squares exponent of ``count ~ N^a``.

    ``slope`` regresses ``log count`` on ``log N``; ``log_corrected_slope``
    first multiplies counts by ``(log N)^s``, which is the exponent of the
    law ``N^(s-D) / (log N)^s`` itself.  ``constant`` is the mean of
    ``count / predicted``.
    """
    used = [r for r in records if r.count > 0]
    excluded = tuple(r.N for r in records if r.count <= 0)
    if excluded:
        warnings.warn(f"records with zero count excluded from the fit: N={list(excluded)}")
    if len({r.N for r in used}) < 3:
        raise ValueError("growth_fit needs at least 3 records with distinct N and positive counts")
    x = np.log([float(r.N) for r in used])
    y = np.log([float(r.count) for r in used])
    slope, res = _lstsq_slope(x, y)
    corrected, _ = _lstsq_slope(x, y + s * np.log(x))
    const = float(np.mean([r.count / predicted_size(r.N, s, D) for r in used]))
    return GrowthFit(slope, corrected, const, tuple(float(v) for v in res),
                     tuple(r.N for r in used), excluded)
