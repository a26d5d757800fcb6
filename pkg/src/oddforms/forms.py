"""Exact integral forms and degree-graded systems of forms.

A :class:`Form` is a homogeneous polynomial with integer coefficients stored
sparsely as ``{exponent vector: coefficient}``.  A :class:`FormSystem` keeps
its forms in block order: descending degree, then declaration order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import DimensionError, HomogeneityError, SystemSyntaxError

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class Monomial:
    coefficient: int
    exponents: Exponents

    def __post_init__(self):
        if self.coefficient == 0:
            raise ValueError("monomial coefficient must be non-zero")
        if any(e < 0 for e in self.exponents):
            raise ValueError("negative exponent")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _mono_value(exps: Exponents, point: Sequence[int], modulus: int | None) -> int:
    v = 1
    for x, e in zip(point, exps):
        if e:
            v *= pow(x, e, modulus) if modulus else x**e
    return v


@dataclass(frozen=True)
class Form:
    """Homogeneous polynomial in ``s`` variables.

    ``terms`` is a tuple of ``(exponents, coefficient)`` pairs sorted by
    exponent vector in descending lexicographic order, with no zero
    coefficients.  The zero form has ``terms == ()`` and keeps the degree it
    was produced with.
    """

    s: int
    degree: int
    terms: tuple[tuple[Exponents, int], ...]

    def __post_init__(self):
        seen = set()
        for exps, c in self.terms:
            if len(exps) != self.s:
                raise DimensionError(
                    f"exponent vector of length {len(exps)} in a form on {self.s} variables"
                )
            if c == 0:
                raise ValueError("zero coefficient stored in a form")
            if sum(exps) != self.degree:
                raise HomogeneityError(
                    f"monomial of degree {sum(exps)} in a form of degree {self.degree}"
                )
            if exps in seen:
                raise ValueError("duplicate exponent vector")
            seen.add(exps)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, s: int, degree: int, coeffs: Mapping[Exponents, int]) -> "Form":
        terms = tuple(sorted(((tuple(e), int(c)) for e, c in coeffs.items() if c), reverse=True))
        return cls(s, degree, terms)

    @classmethod
    def from_monomials(cls, s: int, degree: int, monomials: Iterable[Monomial]) -> "Form":
        acc: dict[Exponents, int] = {}
        for m in monomials:
            acc[m.exponents] = acc.get(m.exponents, 0) + m.coefficient
        return cls.from_dict(s, degree, acc)

    @classmethod
    def zero(cls, s: int, degree: int) -> "Form":
        return cls(s, degree, ())

    @classmethod
    def variable(cls, s: int, j: int) -> "Form":
        exps = [0] * s
        exps[j] = 1
        return cls(s, 1, ((tuple(exps), 1),))

    @classmethod
    def linear(cls, coeffs: Sequence[int]) -> "Form":
        s = len(coeffs)
        d = {}
        for j, c in enumerate(coeffs):
            if c:
                e = [0] * s
                e[j] = 1
                d[tuple(e)] = c
        return cls.from_dict(s, 1, d)

    # -- basic properties -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def monomials(self) -> list[Monomial]:
        return [Monomial(c, e) for e, c in self.terms]

    @cached_property
    def coeffs(self) -> dict[Exponents, int]:
        return dict(self.terms)

    def coefficient(self, exps: Exponents) -> int:
        return self.coeffs.get(tuple(exps), 0)

    @cached_property
    def support(self) -> tuple[int, ...]:
        """Indices of variables that occur in some monomial."""
        return tuple(j for j in range(self.s) if any(e[j] for e, _ in self.terms))

    def content(self) -> int:
        return reduce(gcd, (abs(c) for _, c in self.terms), 0)

    def degree_in(self, j: int) -> int:
        return max((e[j] for e, _ in self.terms), default=0)

    def is_diagonal(self) -> bool:
        """True for ``sum c_i x_i^degree`` (every monomial a pure power)."""
        return all(sum(1 for a in e if a) == 1 for e, _ in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _check_compatible(self, other: "Form"):
        if other.s != self.s:
            raise DimensionError(f"forms on {self.s} and {other.s} variables")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if other.degree != self.degree:
            raise HomogeneityError("cannot add forms of different degrees")
        acc = dict(self.coeffs)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return Form.from_dict(self.s, self.degree, acc)

    def __neg__(self) -> "Form":
        return Form(self.s, self.degree, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, other) -> "Form":
        if isinstance(other, Form):
            self._check_compatible(other)
            acc: dict[Exponents, int] = {}
            for e1, c1 in self.terms:
                for e2, c2 in other.terms:
                    e = tuple(a + b for a, b in zip(e1, e2))
                    acc[e] = acc.get(e, 0) + c1 * c2
            return Form.from_dict(self.s, self.degree + other.degree, acc)
        k = int(other)
        if k != other:
            raise TypeError("forms have integer coefficients; scale by an integer")
        return Form.from_dict(self.s, self.degree, {e: c * k for e, c in self.terms})

    __rmul__ = __mul__

    def exact_div(self, k: int) -> "Form":
        for _, c in self.terms:
            if c % k:
                raise ValueError(f"{k} does not divide every coefficient")
        return Form(self.s, self.degree, tuple((e, c // k) for e, c in self.terms))

    def primitive(self) -> "Form":
        """Divide by the (positive) content; the sign is kept."""
        g = self.content()
        return self if g in (0, 1) else self.exact_div(g)

    # -- calculus and substitution ---------------------------------------

    def derivative(self, j: int) -> "Form":
        acc = {}
        for e, c in self.terms:
            if e[j]:
                ne = list(e)
                ne[j] -= 1
                acc[tuple(ne)] = c * e[j]
        return Form.from_dict(self.s, max(self.degree - 1, 0), acc)

    @cached_property
    def gradient(self) -> tuple["Form", ...]:
        return tuple(self.derivative(j) for j in range(self.s))

    def evaluate(self, point: Sequence[int], modulus: int | None = None) -> int:
        if len(point) != self.s:
            raise DimensionError(f"point of length {len(point)} for a form on {self.s} variables")
        if modulus:
            point = [x % modulus for x in point]
        total = 0
        for e, c in self.terms:
            total += c * _mono_value(e, point, modulus)
        return total % modulus if modulus else total

    def evaluate_float(self, point) -> float:
        total = 0.0
        for e, c in self.terms:
            v = float(c)
            for x, a in zip(point, e):
                if a:
                    v *= x**a
            total += v
        return total

    def restrict(self, zeroed: Iterable[int]) -> "Form":
        """Set ``x_j = 0`` for ``j`` in ``zeroed`` and drop those variables."""
        zeroed = set(zeroed)
        keep = [j for j in range(self.s) if j not in zeroed]
        acc = {}
        for e, c in self.terms:
            if any(e[j] for j in zeroed):
                continue
            acc[tuple(e[j] for j in keep)] = c
        return Form.from_dict(len(keep), self.degree, acc)

    def scale(self, y: Sequence[int]) -> "Form":
        """The form ``w -> f(y_1 w_1, ..., y_s w_s)``."""
        return Form.from_dict(
            self.s, self.degree, {e: c * _mono_value(e, y, None) for e, c in self.terms}
        )

    def split_variable(self, j: int) -> tuple["Form", "Form"]:
        """Write ``f = x_j * g + h`` with ``h`` free of ``x_j``.

        Only valid when ``degree_in(j) <= 1``; ``g`` then does not involve
        ``x_j`` either.
        """
        if self.degree_in(j) > 1:
            raise ValueError(f"form has degree {self.degree_in(j)} in variable {j}")
        g, h = {}, {}
        for e, c in self.terms:
            if e[j]:
                ne = list(e)
                ne[j] = 0
                g[tuple(ne)] = c
            else:
                h[e] = c
        return (
            Form.from_dict(self.s, max(self.degree - 1, 0), g),
            Form.from_dict(self.s, self.degree, h),
        )

    def embed(self, s: int, positions: Sequence[int]) -> "Form":
        """Re-home the form into ``s`` variables; variable k goes to ``positions[k]``."""
        acc = {}
        for e, c in self.terms:
            ne = [0] * s
            for k, a in enumerate(e):
                ne[positions[k]] = a
            acc[tuple(ne)] = c
        return Form.from_dict(s, self.degree, acc)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{j + 1}" for j in range(self.s)]
        if self.is_zero:
            return "0"
        parts = []
        for e, c in self.terms:
            factors = []
            for j, a in enumerate(e):
                if a == 1:
                    factors.append(names[j])
                elif a > 1:
                    factors.append(f"{names[j]}^{a}")
            mono = "*".join(factors)
            mag = abs(c)
            body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else str(mag))
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()


def _natural_key(name: str):
    m = re.match(r"^(.*?)(\d*)$", name)
    prefix, digits = m.group(1), m.group(2)
    return (prefix, int(digits) if digits else -1, name)


@dataclass(frozen=True)
class OddnessCertificate:
    all_odd: bool
    offending_degrees: tuple[int, ...]


@dataclass(frozen=True)
class FormSystem:
    """Graded system ``F = (F^(d), ..., F^(1))`` on named variables."""

    names: tuple[str, ...]
    forms: tuple[Form, ...] = ()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        for f in self.forms:
            if f.s != len(self.names):
                raise DimensionError(
                    f"form on {f.s} variables in a system on {len(self.names)} variables"
                )
            if f.is_zero:
                raise ValueError("the zero form cannot be stored in a system")
        # stable sort: descending degree, then declaration order
        ordered = tuple(sorted(self.forms, key=lambda f: -f.degree))
        object.__setattr__(self, "forms", ordered)

    @classmethod
    def on(cls, s: int, forms: Iterable[Form] = ()) -> "FormSystem":
        return cls(tuple(f"x{j + 1}" for j in range(s)), tuple(forms))

    @property
    def s(self) -> int:
        return len(self.names)

    @property
    def R(self) -> int:
        return len(self.forms)

    @property
    def D(self) -> int:
        return sum(f.degree for f in self.forms)

    @property
    def max_degree(self) -> int:
        return max((f.degree for f in self.forms), default=0)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({f.degree for f in self.forms}, reverse=True))

    @property
    def blocks(self) -> dict[int, list[Form]]:
        out: dict[int, list[Form]] = {}
        for f in self.forms:
            out.setdefault(f.degree, []).append(f)
        return out

    @property
    def profile(self) -> dict[int, int]:
        return {ell: len(b) for ell, b in self.blocks.items()}

    def oddness(self) -> OddnessCertificate:
        even = tuple(ell for ell in self.degrees if ell % 2 == 0)
        return OddnessCertificate(not even, even)

    def with_forms(self, forms: Iterable[Form]) -> "FormSystem":
        return FormSystem(self.names, tuple(f for f in forms if not f.is_zero))

    def evaluate(self, point, modulus=None):
        return evaluate(self, point, modulus)

    def jacobian(self, point, modulus=None):
        return jacobian(self, point, modulus)

    def __str__(self):
        return format_system(self)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S)")


def _tokenize(text: str, lineno: int, col0: int):
    out = []
    for m in _TOKEN.finditer(text):
        col = col0 + m.start()
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*^":
                raise SystemSyntaxError(f"unexpected character {ch!r}", lineno, col)
            out.append((ch, ch, col))
    return out


def _parse_terms(text: str, lineno: int, col0: int):
    """Parse a signed sum of monomials into ``[(coeff, {var: exp}, col)]``."""
    toks = _tokenize(text, lineno, col0)
    if not toks:
        raise SystemSyntaxError("empty form", lineno, col0)
    i = 0
    terms = []

    def peek():
        return toks[i] if i < len(toks) else None

    while i < len(toks):
        sign = 1
        start = toks[i][2]
        if toks[i][0] in ("+", "-"):
            sign = -1 if toks[i][0] == "-" else 1
            i += 1
        elif terms:
            raise SystemSyntaxError("expected '+' or '-' between monomials", lineno, toks[i][2])
        tok = peek()
        if tok is None:
            raise SystemSyntaxError("dangling sign", lineno, start)
        coeff = 1
        powers: dict[str, int] = {}
        if tok[0] == "int":
            coeff = tok[1]
            i += 1
            nxt = peek()
            if nxt is None or nxt[0] in ("+", "-"):
                raise SystemSyntaxError("bare integer term (degree 0) is not allowed", lineno, tok[2])
            if nxt[0] != "*":
                raise SystemSyntaxError("expected '*' after coefficient", lineno, nxt[2])
            i += 1
        while True:
            tok = peek()
            if tok is None or tok[0] != "name":
                col = tok[2] if tok else start
                raise SystemSyntaxError("expected a variable name", lineno, col)
            name = tok[1]
            i += 1
            exp = 1
            tok = peek()
            if tok is not None and tok[0] == "^":
                i += 1
                tok = peek()
                if tok is None or tok[0] != "int":
                    raise SystemSyntaxError("expected an integer exponent", lineno, tok[2] if tok else start)
                exp = tok[1]
                i += 1
            powers[name] = powers.get(name, 0) + exp
            tok = peek()
            if tok is not None and tok[0] == "*":
                i += 1
                continue
            break
        terms.append((sign * coeff, powers, start))
    return terms


_FORM_LINE = re.compile(r"^form\s+deg\s*=\s*(-?\d+)\s*:(.*)$")


def parse_system(text: str) -> FormSystem:
    """Parse the plain-text system format.

    ``vars: x1 x2 ...`` declares the variables; each ``form deg=<l>: ...``
    line declares one form.  ``#`` starts a comment.  Without a ``vars:``
    line the variables are the names used, in natural order.
    """
    declared: list[str] | None = None
    raw_forms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col0 = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("vars:"):
            if declared is not None:
                raise SystemSyntaxError("duplicate 'vars:' line", lineno, col0)
            declared = stripped[len("vars:"):].split()
            if not declared:
                raise SystemSyntaxError("'vars:' declares no variables", lineno, col0)
            for name in declared:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                    raise SystemSyntaxError(f"invalid variable name {name!r}", lineno, col0)
            if len(set(declared)) != len(declared):
                raise SystemSyntaxError("duplicate variable name", lineno, col0)
            continue
        m = _FORM_LINE.match(stripped)
        if not m:
            raise SystemSyntaxError("expected 'vars:' or 'form deg=<l>:'", lineno, col0)
        deg = int(m.group(1))
        if deg <= 0:
            raise SystemSyntaxError("form degree must be positive", lineno, col0)
        body_col = col0 + m.start(2)
        terms = _parse_terms(m.group(2), lineno, body_col)
        raw_forms.append((lineno, deg, terms))

    used = {v for _, _, terms in raw_forms for _, powers, _ in terms for v in powers}
    if declared is None:
        names = sorted(used, key=_natural_key)
    else:
        undeclared = used - set(declared)
        if undeclared:
            raise DimensionError(
                f"variables {sorted(undeclared, key=_natural_key)} used but not declared in 'vars:'"
            )
        names = declared
    index = {n: j for j, n in enumerate(names)}
    s = len(names)

    forms = []
    for k, (lineno, deg, terms) in enumerate(raw_forms, start=1):
        acc: dict[Exponents, int] = {}
        for coeff, powers, col in terms:
            exps = [0] * s
            for v, a in powers.items():
                exps[index[v]] = a
            if sum(exps) != deg:
                raise HomogeneityError(
                    f"form #{k} (line {lineno}): monomial at column {col} has degree "
                    f"{sum(exps)}, declared degree {deg}"
                )
            key = tuple(exps)
            acc[key] = acc.get(key, 0) + coeff
        f = Form.from_dict(s, deg, acc)
        if f.is_zero:
            raise HomogeneityError(f"form #{k} (line {lineno}) is identically zero")
        forms.append(f)
    return FormSystem(tuple(names), tuple(forms))


def format_system(sys: FormSystem) -> str:
    lines = ["vars: " + " ".join(sys.names)]
    for f in sys.forms:
        lines.append(f"form deg={f.degree}: {f.to_str(sys.names)}")
    return "\n".join(lines) + "\n"


# -- operations on systems ----------------------------------------------------


def _check_point(sys: FormSystem, point):
    if len(point) != sys.s:
        raise DimensionError(f"point of length {len(point)} for a system on {sys.s} variables")


def evaluate(sys: FormSystem, point: Sequence[int], modulus: int | None = None) -> tuple[int, ...]:
    _check_point(sys, point)
    return tuple(f.evaluate(point, modulus) for f in sys.forms)


def jacobian(sys: FormSystem, point: Sequence[int], modulus: int | None = None) -> list[list[int]]:
    _check_point(sys, point)
    return [[g.evaluate(point, modulus) for g in f.gradient] for f in sys.forms]


def restrict_hyperplane(sys: FormSystem, var_indices: Iterable[int]) -> tuple[FormSystem, list[int]]:
    """Substitute ``x_j = 0`` for ``j`` in ``var_indices`` and drop those variables.

    Returns the restricted system and the block-order indices of the forms
    that vanished identically (these are removed).
    """
    zeroed = sorted(set(var_indices))
    for j in zeroed:
        if not 0 <= j < sys.s:
            raise DimensionError(f"variable index {j} out of range")
    if not zeroed:
        return sys, []
    names = tuple(n for j, n in enumerate(sys.names) if j not in set(zeroed))
    kept, dropped = [], []
    for k, f in enumerate(sys.forms):
        g = f.restrict(zeroed)
        if g.is_zero:
            dropped.append(k)
        else:
            kept.append(g)
    return FormSystem(names, tuple(kept)), dropped


def scale_variables(sys: FormSystem, multipliers: Sequence[int]) -> FormSystem:
    _check_point(sys, multipliers)
    if any(y == 0 for y in multipliers):
        raise ValueError("scaling multipliers must be non-zero")
    return FormSystem(sys.names, tuple(f.scale(multipliers) for f in sys.forms))


@dataclass(frozen=True)
class Combination:
    form: Form
    is_zero: bool


def linear_combination(block: Sequence[Form], coeffs: Sequence) -> Combination:
    """Rational combination of equal-degree forms, cleared to a primitive integer form."""
    if len(block) != len(coeffs):
        raise DimensionError("coefficient vector length differs from block size")
    if not block:
        raise ValueError("empty block")
    fr = [Fraction(c) for c in coeffs]
    if all(c == 0 for c in fr):
        raise ValueError("all-zero coefficient vector")
    s, deg = block[0].s, block[0].degree
    for f in block:
        if f.s != s or f.degree != deg:
            raise HomogeneityError("block forms must share degree and variable count")
    den = lcm(*(c.denominator for c in fr))
    ints = [int(c * den) for c in fr]
    acc: dict[Exponents, int] = {}
    for c, f in zip(ints, block):
        if c:
            for e, a in f.terms:
                acc[e] = acc.get(e, 0) + c * a
    out = Form.from_dict(s, deg, acc).primitive()
    return Combination(out, out.is_zero)
