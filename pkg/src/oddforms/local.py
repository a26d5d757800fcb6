"""Finite-field point counts, exponential sums and real non-singular zeros."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapExceeded, NoSolutionFound
from .forms import FormSystem

DEFAULT_CAP = 10**7


def check_cap(p: int, s: int, cap: int, units_only: bool = False) -> None:
    size = (p - 1 if units_only else p) ** s
    if size > cap:
        raise CapExceeded(f"enumeration of {size} points (p={p}, s={s}) exceeds cap {cap}")


@dataclass(frozen=True)
class FpPointCount:
    p: int
    s: int
    R: int
    total: int
    unit_total: int
    nonsingular_unit_total: int

    @property
    def expected(self) -> Fraction:
        return Fraction(self.p) ** (self.s - self.R)

    @property
    def bound(self) -> Fraction:
        return Fraction(self.p) ** (self.s - self.R - 1)

    @property
    def deviation(self) -> Fraction:
        return abs(self.total - self.expected)

    @property
    def bound_satisfied(self) -> bool:
        return self.deviation <= self.bound


def count_points(sys: FormSystem, p: int, cap: int = DEFAULT_CAP) -> FpPointCount:
    check_cap(p, sys.s, cap)
    res = kernels.scan_fp(sys.forms, sys.s, p, need_jac=True)
    return FpPointCount(p, sys.s, sys.R, res.total, res.unit_total, res.nonsingular_unit_total)


def combined_terms(sys: FormSystem, a: Sequence[int], p: int) -> dict:
    """Terms of the polynomial ``a . G`` reduced mod ``p`` (degrees may mix)."""
    if len(a) != sys.R:
        raise ValueError(f"coefficient vector of length {len(a)} for {sys.R} forms")
    acc: dict = {}
    for ai, f in zip(a, sys.forms):
        if ai % p:
            for e, c in f.terms:
                acc[e] = (acc.get(e, 0) + ai * c) % p
    return {e: c for e, c in acc.items() if c}


def exponential_sum(sys: FormSystem, a: Sequence[int], p: int, cap: int = DEFAULT_CAP) -> complex:
    """``sum_{x in F_p^s} e_p(a . G(x))`` by enumeration of ``F_p^s``."""
    check_cap(p, sys.s, cap)
    counts = kernels.value_counts(tuple(combined_terms(sys, a, p).items()), sys.s, p)
    roots = np.exp(2j * np.pi * np.arange(p) / p)
    return complex(np.dot(counts, roots))


def fourier_count(sys: FormSystem, p: int, cap: int = DEFAULT_CAP) -> complex:
    """``sum_a exponential_sum(sys, a, p)``; equals ``p^R`` times the zero count."""
    total = 0j
    for a in product(range(p), repeat=sys.R):
        total += exponential_sum(sys, a, p, cap)
    return total


def find_nonsingular_unit_solutions(sys: FormSystem, p: int, cap: int = DEFAULT_CAP,
                                    limit: int = 10) -> list[tuple[int, ...]]:
    """Up to ``limit`` zeros in ``(F_p^*)^s`` with full-rank Jacobian, in lexicographic order."""
    check_cap(p, sys.s, cap, units_only=True)
    res = kernels.scan_fp(sys.forms, sys.s, p, units_only=True, need_jac=True,
                          limit=limit, stop_at_limit=True)
    return res.found


# -- real solutions -------------------------------------------------------------


class _FloatSystem:
    def __init__(self, sys: FormSystem):
        self.s = sys.s
        self.R = sys.R
        self.forms = [(np.array([c for _, c in f.terms], dtype=float),
                       np.array([e for e, _ in f.terms], dtype=np.int64).reshape(-1, sys.s))
                      for f in sys.forms]
        self.grads = [[(np.array([c for _, c in g.terms], dtype=float),
                        np.array([e for e, _ in g.terms], dtype=np.int64).reshape(-1, sys.s))
                       for g in f.gradient] for f in sys.forms]

    @staticmethod
    def _ev(poly, x):
        co, ex = poly
        if not len(co):
            return 0.0
        return float(np.dot(co, np.prod(x[None, :] ** ex, axis=1)))

    def value(self, x):
        return np.array([self._ev(f, x) for f in self.forms])

    def jac(self, x):
        return np.array([[self._ev(g, x) for g in row] for row in self.grads]).reshape(self.R, self.s)


def real_nonsingular_solution(sys: FormSystem, tolerance: float = 1e-9, budget: int = 200,
                              seed: int = 0, coord_floor: float = 1e-3) -> np.ndarray:
    """A real zero in ``(-1, 1)^s`` with no small coordinate and full-rank Jacobian.

    Random restarts followed by least-norm Newton steps; each iterate is
    rescaled to sup-norm 0.9, which homogeneity allows and which keeps Newton
    away from the trivial zero.
    """
    rng = np.random.default_rng(seed)
    fs = _FloatSystem(sys)
    floor = max(tolerance, coord_floor)
    for _ in range(budget):
        x = rng.uniform(-1, 1, sys.s)
        x *= 0.9 / np.max(np.abs(x))
        if sys.R == 0:
            if np.all(np.abs(x) > floor):
                return x
            continue
        for _ in range(60):
            r = fs.value(x)
            if np.linalg.norm(r) < tolerance * 1e-3:
                break
            step = np.linalg.lstsq(fs.jac(x), r, rcond=None)[0]
            x = x - step
            m = np.max(np.abs(x))
            if not np.isfinite(m) or m == 0:
                break
            x *= 0.9 / m
        if not np.all(np.isfinite(x)):
            continue
        if np.linalg.norm(fs.value(x)) >= tolerance:
            continue
        if np.any(np.abs(x) <= floor):
            continue
        sv = np.linalg.svd(fs.jac(x), compute_uv=False)
        if len(sv) < sys.R or sv.min() <= tolerance:
            continue
        return x
    raise NoSolutionFound(f"no non-singular real zero found in {budget} restarts")


def real_residual(sys: FormSystem, x) -> float:
    return float(np.linalg.norm(_FloatSystem(sys).value(np.asarray(x, dtype=float))))


def real_jacobian_smin(sys: FormSystem, x) -> float:
    if sys.R == 0:
        return float("inf")
    sv = np.linalg.svd(_FloatSystem(sys).jac(np.asarray(x, dtype=float)), compute_uv=False)
    return float(sv.min()) if len(sv) == sys.R else 0.0

