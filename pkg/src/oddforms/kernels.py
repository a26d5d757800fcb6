"""Backend selection and packing for the enumeration kernels.

The compiled ``_ckernels`` module is used when it imports; otherwise the numpy
implementation in ``_pykernels`` takes over.  ``use_backend`` switches
explicitly (the benchmark and the cross-check tests rely on it).
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _BACKENDS.get("cython", _pykernels)

INT64_SAFE = 2**62


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend_name() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} is not available (have {available_backends()})")
    _active = _BACKENDS[name]


@contextmanager
def use_backend(name: str):
    prev = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _terms_of(poly):
    return poly.terms if hasattr(poly, "terms") else tuple(poly)


def pack(polys: Iterable, s: int, modulus: int | None = None):
    """Flatten polynomials into ``(coeffs, exponents, starts)`` int64 arrays."""
    co, ex, st = [], [], [0]
    for poly in polys:
        for e, c in _terms_of(poly):
            co.append(c % modulus if modulus else c)
            ex.append(e)
        st.append(len(co))
    coeffs = np.array(co, dtype=np.int64) if co else np.zeros(0, dtype=np.int64)
    exps = np.array(ex, dtype=np.int64).reshape(-1, s) if ex else np.zeros((0, s), dtype=np.int64)
    return coeffs, exps, np.array(st, dtype=np.int64)


def max_exponent(exps: np.ndarray) -> int:
    return int(exps.max()) if exps.size else 0


def jacobian_polys(forms: Sequence, s: int) -> list:
    return [g for f in forms for g in f.gradient] if forms else []


@dataclass(frozen=True)
class ScanResult:
    total: int
    unit_total: int
    nonsingular_unit_total: int
    found: list[tuple[int, ...]]
    complete: bool


def scan_fp(forms: Sequence, s: int, p: int, *, units_only=False, need_jac=True,
            limit=0, stop_at_limit=False) -> ScanResult:
    """Exhaustive pass over ``F_p^s`` (or the units) counting common zeros."""
    co, ex, st = pack(forms, s, p)
    jco, jex, jst = pack(jacobian_polys(forms, s), s, p)
    maxdeg = max(max_exponent(ex), max_exponent(jex), 1)
    total, unit_total, ns, found, complete = _active.fp_scan(
        co, ex, st, jco, jex, jst, s, p, maxdeg, units_only, need_jac, limit, stop_at_limit
    )
    return ScanResult(int(total), int(unit_total), int(ns),
                      [tuple(int(v) for v in row) for row in found], bool(complete))


def deficient_count(forms: Sequence, s: int, p: int) -> int:
    """Number of ``x`` in ``F_p^s`` where the Jacobian of ``forms`` has rank < len(forms)."""
    jco, jex, jst = pack(jacobian_polys(forms, s), s, p)
    maxdeg = max(max_exponent(jex), 1)
    return int(_active.fp_deficient(jco, jex, jst, len(forms), s, p, maxdeg))


def value_counts(terms, s: int, p: int) -> np.ndarray:
    """Histogram of the values mod ``p`` of one polynomial over ``F_p^s``."""
    co, ex, _ = pack([terms], s, p)
    return np.asarray(_active.fp_value_counts(co, ex, s, p, max(max_exponent(ex), 1)))


def poly_bound(poly, N: int) -> int:
    """Upper bound for ``|poly(x)|`` over the box ``|x_i| <= N``."""
    return sum(abs(c) * N ** sum(e) for e, c in _terms_of(poly))


def box_count(vals, wts, vst, forms, s, skip, solve, last_w, N, limit, exact=False):
    """Enumerate the integer box; see ``_pykernels.box_count`` for the contract.

    ``solve`` is ``None`` or a pair ``(g, h)`` of polynomials with the solved
    variable last; ``exact`` forces arbitrary-precision arithmetic.
    """
    co, ex, st = pack(forms, s)
    if solve is None:
        gco, gex, _ = pack([()], s)
        hco, hex_ = gco, gex
    else:
        gco, gex, _ = pack([solve[0]], s)
        hco, hex_, _ = pack([solve[1]], s)
    args = (np.asarray(vals, dtype=np.int64), np.asarray(wts, dtype=np.float64),
            np.asarray(vst, dtype=np.int64), co, ex, st, skip, solve is not None,
            gco, gex, hco, hex_, np.asarray(last_w, dtype=np.float64), N, limit)
    impl = _pykernels if exact else _active
    count, wsum, samples = impl.box_count(*args, exact=exact)
    return int(count), float(wsum), [tuple(int(v) for v in row) for row in samples]
