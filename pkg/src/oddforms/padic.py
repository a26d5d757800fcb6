"""Truncated p-adic solutions: Hensel lifting and the valuation-layered search."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from . import kernels
from .errors import NoSolutionFound
from .forms import Form, FormSystem
from .linalg import det, min_minor_valuation, solve, solve_mod, valuation
from .local import DEFAULT_CAP, check_cap

DEFAULT_PRECISION = 8


@dataclass(frozen=True)
class PAdicPoint:
    """A point of ``(Z/p^k)^s`` read as a truncated p-adic vector."""

    p: int
    k: int
    coords: tuple[int, ...]

    def __post_init__(self):
        m = self.p**self.k
        object.__setattr__(self, "coords", tuple(int(c) % m for c in self.coords))

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def valuations(self) -> tuple[int, ...]:
        """``min(v_p(x_i), k)``; the value ``k`` means zero at this precision."""
        return tuple(valuation(c, self.p, self.k) for c in self.coords)

    @property
    def unit_parts(self) -> tuple[int, ...]:
        """``x_i / p^e_i`` modulo ``p^(k - e_i)`` (0 where ``e_i == k``)."""
        out = []
        for c, e in zip(self.coords, self.valuations):
            out.append(0 if e == self.k else (c // self.p**e) % self.p ** (self.k - e))
        return tuple(out)

    def reconstruct(self) -> tuple[int, ...]:
        return tuple(self.p**e * u % self.modulus for e, u in zip(self.valuations, self.unit_parts))

    @property
    def all_nonzero(self) -> bool:
        return all(e < self.k for e in self.valuations)

    @property
    def all_units(self) -> bool:
        return all(e == 0 for e in self.valuations)

    def signed(self) -> tuple[int, ...]:
        """Coordinates as balanced residues in ``(-p^k/2, p^k/2]``."""
        m = self.modulus
        return tuple(c - m if c > m // 2 else c for c in self.coords)


def _forms_of(polys) -> tuple[Form, ...]:
    return tuple(polys.forms) if isinstance(polys, FormSystem) else tuple(polys)


def _jac(forms, x, modulus):
    return [[g.evaluate(x, modulus) for g in f.gradient] for f in forms]


def unit_minor_columns(forms: Sequence[Form], x: Sequence[int], p: int,
                       frozen: Sequence[int] = ()) -> tuple[int, ...] | None:
    """First (lexicographic) set of R free columns whose minor is a unit mod p."""
    R = len(forms)
    if R == 0:
        return ()
    J = _jac(forms, x, p)
    free = [j for j in range(len(x)) if j not in set(frozen)]
    for cols in combinations(free, R):
        if det([[row[c] for c in cols] for row in J]) % p:
            return cols
    return None


def hensel_lift(polys, seed: Sequence[int], p: int, k: int, frozen: Sequence[int] = ()) -> PAdicPoint:
    """Lift a non-singular zero mod ``p`` to a zero mod ``p^k`` by Newton iteration.

    Coordinates listed in ``frozen`` are held fixed; a form system with a
    frozen coordinate is how a dehomogenized polynomial is lifted (for
    ``x^3 - 2`` use the form ``x^3 - 2*y^3`` with ``y`` frozen at 1).
    """
    forms = _forms_of(polys)
    x = [int(v) for v in seed]
    if any(f.evaluate(x, p) for f in forms):
        raise ValueError("seed is not a zero modulo p")
    cols = unit_minor_columns(forms, x, p, frozen)
    if cols is None:
        raise ValueError("seed is singular modulo p: no unit maximal minor on the free coordinates")
    x = [v % p for v in x]
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        m = p**prec
        F = [f.evaluate(x, m) for f in forms]
        if any(F):
            J = _jac(forms, x, m)
            delta = solve_mod([[row[c] for c in cols] for row in J], F, p, m)
            for c, d in zip(cols, delta):
                x[c] = (x[c] - d) % m
    m = p**k
    x = [v % m for v in x]
    if any(f.evaluate(x, m) for f in forms):
        raise RuntimeError("Hensel iteration left a non-zero residue")  # cannot happen for valid seeds
    return PAdicPoint(p, k, tuple(x))


def _to_residue(q, p: int, m: int) -> int:
    """A p-integral rational as a residue mod ``m``."""
    num, den = q.numerator, q.denominator
    while den % p == 0:
        if num % p:
            raise ValueError("Newton step is not p-integral")
        num //= p
        den //= p
    return num * pow(den, -1, m) % m


def hensel_lift_deep(polys, seed: Sequence[int], p: int, k: int) -> PAdicPoint:
    """Newton iteration from a zero whose best minor is divisible by ``p``.

    With ``v`` the smallest valuation of a maximal Jacobian minor at ``seed``,
    the iteration converges when every form vanishes modulo ``p^(2v+1)``
    (each step keeps that minor's valuation and at least doubles the excess
    valuation of the residue).
    """
    forms = _forms_of(polys)
    R = len(forms)
    x = [int(c) for c in seed]
    work = k + 1
    while True:
        m = p**work
        v, cols = min_minor_valuation(_jac(forms, x, m), p, work)
        if cols is None or 2 * v + 1 > work:
            work += 2
            continue
        break
    F = [f.evaluate(x) for f in forms]
    if any(c and valuation(c, p) < 2 * v + 1 for c in F):
        raise ValueError(f"seed needs every form to vanish mod p^{2 * v + 1} (minor valuation {v})")
    work = k + 2 * v + 1
    m = p**work
    x = [c % m for c in x]
    for _ in range(4 * work):
        F = [f.evaluate(x, m) for f in forms]
        if not any(F):
            break
        J = [[g.evaluate(x) for g in f.gradient] for f in forms]
        delta = solve([[row[c] for c in cols] for row in J], F)
        for c, d in zip(cols, delta):
            x[c] = (x[c] - _to_residue(d, p, m)) % m
    mk = p**k
    x = [c % mk for c in x]
    if any(f.evaluate(x, mk) for f in forms) or R and 2 * v >= k:
        raise ValueError("deep Hensel iteration did not converge to precision k")
    return PAdicPoint(p, k, tuple(x))


def deep_seeds(forms: Sequence[Form], s: int, p: int, max_minor_valuation: int = 1,
               budget: int = 10**6):
    """Unit zeros modulo ``p^(2v+1)`` whose best minor has valuation ``v``.

    Digit-by-digit depth-first search over unit starting digits; yields
    ``(point, v)`` and spends at most ``budget`` candidate evaluations.
    """
    spent = 0
    depth = 2 * max_minor_valuation + 1
    stack = [([1] * s, 0)]
    while stack:
        x, j = stack.pop()
        m = p**j
        if j >= 3:
            v, cols = min_minor_valuation(_jac(forms, x, m), p, j)
            if cols is not None and 2 * v + 1 <= j:
                yield tuple(x), v
                continue
        if j >= depth:
            continue
        mj = p ** (j + 1)
        children = []
        for t in product(range(1, p) if j == 0 else range(p), repeat=s):
            spent += 1
            if spent > budget:
                return
            y = list(t) if j == 0 else [a + m * b for a, b in zip(x, t)]
            if not any(f.evaluate(y, mj) for f in forms):
                children.append((y, j + 1))
        stack.extend(reversed(children))


def minor_valuation(forms: Sequence[Form], point: PAdicPoint) -> int:
    """Smallest valuation of a maximal Jacobian minor at ``point`` (capped at k)."""
    J = _jac(forms, point.coords, point.modulus)
    return min_minor_valuation(J, point.p, point.k)[0]


def is_nonsingular(forms: Sequence[Form], point: PAdicPoint) -> bool:
    """Some maximal minor has valuation below ``k/2``."""
    return 2 * minor_valuation(forms, point) < point.k


def _layers(s: int, delta_max: int):
    pats = list(product(range(delta_max + 1), repeat=s))
    pats.sort(key=lambda d: (sum(d), d))
    return pats


def _reduced_layer(forms: Sequence[Form], delta: Sequence[int], p: int) -> list[Form]:
    """Forms ``g(p^delta * z)`` divided by their p-power content."""
    y = [p**d for d in delta]
    out = []
    for f in forms:
        g = f.scale(y)
        c = g.content()
        out.append(g.exact_div(p ** valuation(c, p)))
    return out


@dataclass(frozen=True)
class LayerResult:
    point: PAdicPoint
    delta: tuple[int, ...]
    seed: tuple[int, ...]
    points_scanned: int


def _deep_lifts(forms, s, p, k, budget):
    for seed, v in deep_seeds(forms, s, p, max(1, (k - 1) // 2 - 1), max(budget, 0)):
        if 2 * v < k:
            try:
                yield hensel_lift_deep(forms, seed, p, k)
            except ValueError:
                continue


def find_padic_nonzero_solution(sys: FormSystem, p: int, k: int = DEFAULT_PRECISION,
                                budget: int = 10**7, delta_max: int = 2,
                                cap: int = DEFAULT_CAP) -> LayerResult:
    """Non-singular zero mod ``p^k`` with every coordinate non-zero.

    Valuation patterns ``delta`` are tried by increasing total then
    lexicographically; for each, unit ``z`` with ``G(p^delta z) = 0`` are
    found mod ``p``, lifted and mapped back to ``x = p^delta z``.
    Raises :class:`NoSolutionFound` (``exhaustive`` set when every layer up
    to ``delta_max`` was searched completely).
    """
    forms = sys.forms
    s = sys.s
    if not forms:
        return LayerResult(PAdicPoint(p, k, (1,) * s), (0,) * s, (1,) * s, 0)
    scanned = 0
    for delta in _layers(s, delta_max):
        if max(delta) >= k:
            continue
        check_cap(p, s, cap, units_only=True)
        if scanned + (p - 1) ** s > budget:
            raise NoSolutionFound(
                f"budget of {budget} points exhausted before layer {delta} (p={p})", exhaustive=False
            )
        reduced = _reduced_layer(forms, delta, p)
        res = kernels.scan_fp(reduced, s, p, units_only=True, need_jac=True,
                              limit=8, stop_at_limit=True)
        scanned += (p - 1) ** s
        lifts = (hensel_lift(reduced, z0, p, k) for z0 in res.found)
        if not res.found and res.unit_total:
            # every unit zero is singular mod p (e.g. p divides the degree): go deeper
            lifts = _deep_lifts(reduced, s, p, k, min(budget - scanned, 10**6))
        for z in lifts:
            z0 = tuple(c % p for c in z.coords)
            x = tuple(p**d * c for d, c in zip(delta, z.coords))
            pt = PAdicPoint(p, k, x)
            if any(f.evaluate(pt.coords, pt.modulus) for f in forms):
                continue
            if pt.all_nonzero and is_nonsingular(forms, pt):
                return LayerResult(pt, tuple(delta), tuple(z0), scanned)
    raise NoSolutionFound(
        f"no non-singular p-adic zero with valuations <= {delta_max} (p={p})", exhaustive=True
    )
