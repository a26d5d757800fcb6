"""Bad primes, scaling multipliers and verification of the scaled system's local solutions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NoSolutionFound, VerificationError
from .forms import FormSystem, scale_variables
from .linalg import min_minor_valuation
from .local import DEFAULT_CAP, real_jacobian_smin, real_residual
from .padic import DEFAULT_PRECISION, LayerResult, PAdicPoint, find_padic_nonzero_solution, hensel_lift
from .primes import primes_up_to

DEFAULT_P_MAX = 30

GOOD, BAD, UNDETERMINED = "good", "bad", "undetermined"


@dataclass(frozen=True)
class PrimeDiagnosis:
    p: int
    status: str
    unit_solutions: int | None = None
    nonsingular_unit_solutions: int | None = None
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class BadPrimeReport:
    diagnoses: tuple[PrimeDiagnosis, ...]

    @property
    def bad(self) -> tuple[int, ...]:
        return tuple(d.p for d in self.diagnoses if d.status == BAD)

    @property
    def undetermined(self) -> tuple[int, ...]:
        return tuple(d.p for d in self.diagnoses if d.status == UNDETERMINED)

    @property
    def good(self) -> tuple[int, ...]:
        return tuple(d.p for d in self.diagnoses if d.status == GOOD)


def detect_bad_primes(sys: FormSystem, p_max: int = DEFAULT_P_MAX, cap: int = DEFAULT_CAP) -> BadPrimeReport:
    """Primes up to ``p_max`` with no non-singular zero in ``(F_p^*)^s``."""
    out = []
    for p in primes_up_to(p_max):
        if (p - 1) ** sys.s > cap:
            out.append(PrimeDiagnosis(p, UNDETERMINED))
            continue
        res = kernels.scan_fp(sys.forms, sys.s, p, units_only=True, need_jac=True, limit=1)
        status = GOOD if res.nonsingular_unit_total else BAD
        out.append(PrimeDiagnosis(p, status, res.unit_total, res.nonsingular_unit_total,
                                  res.found[0] if res.found else None))
    return BadPrimeReport(tuple(out))


@dataclass(frozen=True)
class ScalingPlan:
    bad_primes: tuple[int, ...]
    solutions: dict = field(default_factory=dict)
    y: tuple[int, ...] = ()
    k: int = DEFAULT_PRECISION
    sign_source: tuple[float, ...] | None = None

    @property
    def Y(self) -> int:
        return max((abs(v) for v in self.y), default=1)

    def exponent(self, i: int, p: int) -> int:
        return self.solutions[p].point.valuations[i]

    def p_part(self, i: int, p: int) -> int:
        """Largest power of ``p`` dividing ``y_i``."""
        v, n = 0, abs(self.y[i])
        while n % p == 0:
            n //= p
            v += 1
        return p**v

    def cofactor(self, i: int, p: int) -> int:
        """``M_{i,p} = |y_i| / p^{e_{i,p}}``, a unit at ``p``."""
        return abs(self.y[i]) // self.p_part(i, p)

    def report(self, names: Sequence[str]) -> str:
        lines = ["[scaling plan]", f"precision = {self.k}",
                 "bad_primes = " + ",".join(str(p) for p in self.bad_primes),
                 "y = " + ",".join(str(v) for v in self.y), f"Y = {self.Y}"]
        if self.sign_source is not None:
            lines.append("sign_source = " + ",".join(f"{v:.12g}" for v in self.sign_source))
        for p in self.bad_primes:
            lr: LayerResult = self.solutions[p]
            lines.append(f"solution_p{p} = " + ",".join(str(c) for c in lr.point.signed()))
            lines.append(f"valuations_p{p} = " + ",".join(str(e) for e in lr.point.valuations))
        for i, n in enumerate(names):
            lines.append(f"multiplier {n} = {self.y[i]}")
        return "\n".join(lines) + "\n"


def build_multipliers(sys: FormSystem, bad_primes: Sequence[int], k: int = DEFAULT_PRECISION,
                      budget: int = 10**7, delta_max: int = 2, cap: int = DEFAULT_CAP) -> ScalingPlan:
    """``y_i = prod_{p in S} p^{e_{i,p}}`` from a non-singular p-adic zero with no zero coordinate."""
    sols = {}
    y = [1] * sys.s
    for p in bad_primes:
        try:
            lr = find_padic_nonzero_solution(sys, p, k, budget, delta_max, cap)
        except NoSolutionFound as exc:
            raise NoSolutionFound(f"bad prime {p}: {exc}", exc.exhaustive) from exc
        sols[p] = lr
        for i, e in enumerate(lr.point.valuations):
            y[i] *= p**e
    return ScalingPlan(tuple(bad_primes), sols, tuple(y), k)


def apply_signs(plan: ScalingPlan, real_solution: Sequence[float]) -> ScalingPlan:
    """Give ``y_i`` the sign of the real solution's ``i``-th coordinate."""
    x = [float(v) for v in real_solution]
    if len(x) != len(plan.y):
        raise ValueError("real solution has the wrong length")
    if any(v == 0 for v in x):
        raise ValueError("real solution has a zero coordinate")
    y = tuple(abs(v) if xi > 0 else -abs(v) for v, xi in zip(plan.y, x))
    return replace(plan, y=y, sign_source=tuple(x))


@dataclass(frozen=True)
class LocalWitness:
    p: int
    case: str
    w: tuple[int, ...]
    residues: tuple[int, ...]
    minor_valuation: int
    all_units: bool

    @property
    def ok(self) -> bool:
        return not any(self.residues) and self.all_units and 2 * self.minor_valuation < self.k_used

    k_used: int = DEFAULT_PRECISION


@dataclass(frozen=True)
class ScaledVerification:
    witnesses: tuple[LocalWitness, ...]
    failures: tuple[str, ...]
    real_residual: float | None = None
    real_smin: float | None = None
    real_positive: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.failures and all(w.ok for w in self.witnesses) and self.real_positive is not False

    def report(self) -> str:
        lines = ["[local verification]"]
        for w in self.witnesses:
            lines.append(f"p={w.p} case={w.case} w=" + ",".join(str(c) for c in w.w)
                         + f" minor_valuation={w.minor_valuation} ok={str(w.ok).lower()}")
        for f in self.failures:
            lines.append(f"failure: {f}")
        if self.real_residual is not None:
            lines.append(f"real_residual = {self.real_residual:.3e}")
            lines.append(f"real_jacobian_smin = {self.real_smin:.6g}")
            lines.append(f"real_scaled_positive = {str(self.real_positive).lower()}")
        lines.append(f"verdict = {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _witness(sys: FormSystem, scaled: FormSystem, p: int, k: int, case: str, w) -> LocalWitness:
    m = p**k
    w = tuple(int(c) % m for c in w)
    residues = tuple(f.evaluate(w, m) for f in scaled.forms)
    J = [[g.evaluate(w, m) for g in f.gradient] for f in scaled.forms]
    val = min_minor_valuation(J, p, k)[0] if scaled.forms else 0
    return LocalWitness(p, case, w, residues, val, all(c % p for c in w), k)


def verify_scaled_local(sys: FormSystem, plan: ScalingPlan, primes_to_check: Sequence[int] | None = None,
                        k: int | None = None, cap: int = DEFAULT_CAP) -> ScaledVerification:
    """A unit non-singular zero of ``G_y`` modulo ``p^k`` for every checked prime.

    Bad primes reuse the p-adic zero ``x``: ``w_i = sign(y_i) u_i M_{i,p}^{-1}``
    so that ``y_i w_i = x_i``.  Good primes lift a unit zero ``x`` of ``G`` and
    take ``w = x / y``.  Non-singular means some maximal minor has valuation
    below ``k/2``.
    """
    k = k or plan.k
    primes = list(primes_to_check) if primes_to_check is not None else primes_up_to(DEFAULT_P_MAX)
    scaled = scale_variables(sys, plan.y)
    out, failures = [], []
    for p in primes:
        m = p**k
        if p in plan.bad_primes:
            pt: PAdicPoint = plan.solutions[p].point
            if pt.k < k:
                failures.append(f"p={p}: stored solution has precision {pt.k} < {k}")
                continue
            w = []
            for i, (u, e) in enumerate(zip(pt.unit_parts, pt.valuations)):
                M = plan.cofactor(i, p)
                sign = 1 if plan.y[i] > 0 else -1
                w.append(sign * u * pow(M, -1, p ** (k - e)) % m)
            out.append(_witness(sys, scaled, p, k, "bad-prime", w))
            continue
        if any(v % p == 0 for v in plan.y):
            failures.append(f"p={p}: multiplier divisible by a prime outside the bad set")
            continue
        if (p - 1) ** sys.s > cap:
            failures.append(f"p={p}: unit enumeration exceeds cap {cap}")
            continue
        res = kernels.scan_fp(sys.forms, sys.s, p, units_only=True, need_jac=True,
                              limit=1, stop_at_limit=True)
        if not res.found:
            failures.append(f"p={p}: no non-singular unit zero although the prime is not in the bad set")
            continue
        x = hensel_lift(sys, res.found[0], p, k).coords
        w = [xi * pow(yi, -1, m) % m for xi, yi in zip(x, plan.y)]
        out.append(_witness(sys, scaled, p, k, "good-prime", w))
    rres = smin = pos = None
    if plan.sign_source is not None and sys.forms:
        xs = np.array(plan.sign_source)
        ws = xs / np.array(plan.y, dtype=float)
        rres = real_residual(scaled, ws)
        smin = real_jacobian_smin(sys, xs)
        pos = bool(np.all(ws > 0))
    return ScaledVerification(tuple(out), tuple(failures), rres, smin, pos)


def require(verification: ScaledVerification) -> ScaledVerification:
    if not verification.ok:
        bad = [f"p={w.p}" for w in verification.witnesses if not w.ok] + list(verification.failures)
        raise VerificationError("local verification failed: " + "; ".join(bad))
    return verification
