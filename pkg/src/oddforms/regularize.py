"""Odd-degree regularization and the two cleanup passes that produce the reduced system.

Every change to the working list of forms goes through :func:`apply_step`, so
a certificate's step list replays to the same system exactly.  Variables are
never renumbered: zeroed variables stay in the ambient space and simply stop
occurring in the forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import kernels
from .errors import CapExceeded, EvenDegreeError, OddFormsError
from .forms import Form, FormSystem, format_system, linear_combination
from .linalg import in_span, independent_subset
from .rank import (
    DEFAULT_BIRCH_PRIMES, DEFAULT_SBOUND, Product, _coefficient_box, _linear_matrix,
    find_decomposition, min_weight_combination, monomials_of_degree, schmidt_lower_bound,
    trivial_decomposition,
)

DEFAULT_CLEANUP_PRIMES = (5, 7, 11)
DEFAULT_CLEANUP_CAP = 10**7


# -- growth functions ---------------------------------------------------------------


@dataclass(frozen=True)
class Growth:
    """``a * (R + d)^b + c``, or an explicit ``{(R, d): value}`` table."""

    a: int = 2
    b: int = 2
    c: int = 0
    table: Mapping[tuple[int, int], int] | None = None

    def __call__(self, R: int, d: int) -> int:
        if self.table is not None:
            try:
                return int(self.table[(R, d)])
            except KeyError:
                raise KeyError(f"growth table has no entry for (R={R}, d={d})") from None
        return self.a * (R + d) ** self.b + self.c

    @classmethod
    def constant(cls, value: int) -> "Growth":
        return cls(0, 0, value)

    @classmethod
    def parse(cls, text: str) -> "Growth":
        """``"a,b,c"`` or a single integer for a constant."""
        parts = [int(x) for x in text.replace(" ", "").split(",") if x]
        if len(parts) == 1:
            return cls.constant(parts[0])
        if len(parts) != 3:
            raise ValueError(f"growth parameters must be 'a,b,c' or one integer, got {text!r}")
        return cls(*parts)

    def describe(self) -> str:
        if self.table is not None:
            return "table(" + ", ".join(f"{k}={v}" for k, v in sorted(self.table.items())) + ")"
        return f"{self.a}*(R+d)^{self.b}+{self.c}"


@dataclass(frozen=True)
class GrowthFunctions:
    """Rank thresholds ``H_l(R, d)`` per odd degree and the cleanup threshold ``R_target(R, d)``."""

    per_degree: Mapping[int, Growth] = field(default_factory=dict)
    default: Growth = Growth()
    target: Growth = Growth.constant(2)

    def H(self, ell: int, R: int, d: int) -> int:
        return self.per_degree.get(ell, self.default)(R, d)

    def R_target(self, R: int, d: int) -> int:
        return self.target(R, d)

    def is_monotone(self, degrees: Sequence[int] = (3, 5, 7), grid: int = 8) -> bool:
        """Spot check that every function is non-decreasing in ``R`` and ``d``."""
        funcs = [self.target] + [self.per_degree.get(ell, self.default) for ell in degrees]
        for g in funcs:
            for R in range(grid):
                for d in range(1, grid):
                    try:
                        v = g(R, d)
                        if g(R + 1, d) < v or g(R, d + 1) < v:
                            return False
                    except KeyError:
                        continue
        return True

    @classmethod
    def constant(cls, value: int, target: int = 2) -> "GrowthFunctions":
        return cls({}, Growth.constant(value), Growth.constant(target))

    def describe(self) -> str:
        parts = [f"H_default={self.default.describe()}"]
        parts += [f"H_{ell}={g.describe()}" for ell, g in sorted(self.per_degree.items())]
        parts.append(f"R_target={self.target.describe()}")
        return "; ".join(parts)


# -- steps and replay ------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One edit of the working form list: zero variables, then remove, then add."""

    kind: str
    degree: int = 0
    coefficients: tuple = ()
    witness: tuple[Product, ...] = ()
    added: tuple[Form, ...] = ()
    removed: tuple[Form, ...] = ()
    zeroed: tuple[int, ...] = ()
    note: str = ""


def zero_variables(f: Form, zeroed: Sequence[int]) -> Form:
    """``f`` with ``x_j = 0`` for ``j`` in ``zeroed``, still on all ``s`` variables."""
    if not zeroed:
        return f
    keep = [j for j in range(f.s) if j not in set(zeroed)]
    return f.restrict(zeroed).embed(f.s, keep)


def apply_step(forms: list[Form], step: Step) -> list[Form]:
    out = list(forms)
    if step.zeroed:
        out = [g for g in (zero_variables(f, step.zeroed) for f in out) if not g.is_zero]
    for f in step.removed:
        out.remove(f)
    out.extend(step.added)
    return out


def _ordered(names, forms) -> list[Form]:
    return list(FormSystem(names, tuple(forms)).forms)


def replay(system: FormSystem, steps: Sequence[Step]) -> tuple[FormSystem, tuple[int, ...]]:
    forms = list(system.forms)
    zeroed: set[int] = set()
    for st in steps:
        forms = apply_step(forms, st)
        zeroed |= set(st.zeroed)
    return FormSystem(system.names, tuple(forms)), tuple(sorted(zeroed))


# -- certificates -------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockEvidence:
    degree: int
    size: int
    target: int
    lower: int
    best_upper: int | None
    exhaustive: bool

    @property
    def certified(self) -> bool:
        """The block has rank at least the target on the whole searched box."""
        return self.lower >= self.target or self.exhaustive


@dataclass(frozen=True)
class RegularizationCertificate:
    input: FormSystem
    output: FormSystem
    steps: tuple[Step, ...]
    zeroed: tuple[int, ...]
    evidence: tuple[BlockEvidence, ...]
    R_prime: int
    J_bound: int
    evidence_only: bool
    budget_hit: bool
    low_confidence: bool
    growth: str = ""

    @property
    def J_within_bound(self) -> bool:
        return len(self.zeroed) <= self.J_bound

    def replay(self) -> tuple[FormSystem, tuple[int, ...]]:
        return replay(self.input, self.steps)

    def replays_exactly(self) -> bool:
        out, zeroed = self.replay()
        return format_system(out) == format_system(self.output) and zeroed == self.zeroed

    def report(self) -> str:
        names = self.input.names
        lines = ["[regularization]", f"growth = {self.growth}",
                 f"input_forms = {self.input.R}", f"output_forms = {self.output.R}",
                 f"R_prime = {self.R_prime}",
                 "J_F = " + ",".join(names[j] for j in self.zeroed),
                 f"J_F_size = {len(self.zeroed)}", f"J_F_bound = {self.J_bound}",
                 f"J_F_within_bound = {str(self.J_within_bound).lower()}",
                 f"evidence_only = {str(self.evidence_only).lower()}",
                 f"budget_hit = {str(self.budget_hit).lower()}",
                 f"low_confidence = {str(self.low_confidence).lower()}", ""]
        for k, st in enumerate(self.steps, 1):
            lines.append(f"[step {k}]")
            lines.append(f"kind = {st.kind}")
            if st.degree:
                lines.append(f"degree = {st.degree}")
            if st.coefficients:
                lines.append("coefficients = " + ",".join(str(c) for c in st.coefficients))
            for t in st.witness:
                lines.append(f"witness = ({t.coefficient}) * ({t.u.to_str(names)}) * ({t.v.to_str(names)})")
            for f in st.removed:
                lines.append(f"removed = {f.to_str(names)}")
            for f in st.added:
                lines.append(f"added = {f.to_str(names)}")
            if st.zeroed:
                lines.append("zeroed = " + ",".join(names[j] for j in st.zeroed))
            if st.note:
                lines.append(f"note = {st.note}")
            lines.append("")
        lines.append("[block ranks]")
        for ev in self.evidence:
            lines.append(f"degree={ev.degree} size={ev.size} target={ev.target} lower={ev.lower} "
                         f"best_upper={ev.best_upper} exhaustive={str(ev.exhaustive).lower()} "
                         f"certified={str(ev.certified).lower()}")
        lines.append("")
        lines.append("[output system]")
        lines.append(format_system(self.output).rstrip("\n"))
        return "\n".join(lines) + "\n"


# -- regularize ------------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchOptions:
    coeff_height: int = 1
    height_bound: int = 1
    budget: int = 2000
    max_steps: int = 200
    birch_primes: tuple[int, ...] = DEFAULT_BIRCH_PRIMES
    sbound: int = DEFAULT_SBOUND


def _check_odd(sys: FormSystem):
    cert = sys.oddness()
    if not cert.all_odd:
        raise EvenDegreeError(f"even degree form present (degrees {list(cert.offending_degrees)})")


def _coeff_vector(f: Form) -> list[int]:
    return [f.coefficient(m) for m in monomials_of_degree(f.s, f.degree)]


def _reduce_linear(forms: list[Form]) -> Step | None:
    lin = [f for f in forms if f.degree == 1]
    if not lin:
        return None
    keep = set(independent_subset(_linear_matrix(lin)))
    drop = tuple(f for k, f in enumerate(lin) if k not in keep)
    if not drop:
        return None
    return Step("drop-dependent", 1, removed=drop, note="maximal independent set of linear forms")


def _project(f: Form, support: Sequence[int]) -> Form:
    others = [j for j in range(f.s) if j not in set(support)]
    return f.restrict(others)


def _lift_witness(witness, s, support) -> tuple[Product, ...]:
    return tuple(Product(t.coefficient, t.u.embed(s, support), t.v.embed(s, support)) for t in witness)


def _adjoin(forms: list[Form], witness: Sequence[Product]) -> tuple[Form, ...]:
    """Odd factors of the witness not already in the span of forms of their degree."""
    added: list[Form] = []
    for t in witness:
        v = t.v.primitive()
        if v.coefficient(v.terms[0][0]) < 0:
            v = -v
        same = [f for f in forms + added if f.degree == v.degree]
        if in_span([_coeff_vector(f) for f in same], _coeff_vector(v)):
            continue
        added.append(v)
    return tuple(added)


def _block_search(forms: list[Form], ell: int, target: int, d: int, opt: SearchOptions):
    """Look for a combination of the degree-``ell`` block of strength below ``target``.

    Returns ``(step or None, evidence, budget_hit)``.  Levels are the outer
    loop and combinations the inner one, so the shortest witness wins and ties
    go to the first coefficient vector in enumeration order.
    """
    block = [f for f in forms if f.degree == ell]
    s = block[0].s
    support = sorted({j for f in block for j in f.support})
    combos = []
    lower_all = None
    for c in _coefficient_box(len(block), opt.coeff_height):
        comb = linear_combination(block, c)
        if comb.is_zero:
            j = max(k for k, ck in enumerate(c) if ck)
            step = Step("drop-dependent", ell, tuple(c), removed=(block[j],),
                        note="block combination vanishes identically")
            return step, BlockEvidence(ell, len(block), target, 0, 0, True), False
        g = _project(comb.form, support)
        lower, exact, _ = schmidt_lower_bound(g, opt.birch_primes, opt.sbound)
        triv = trivial_decomposition(g)
        lower = min(lower, len(triv))
        lower_all = lower if lower_all is None else min(lower_all, lower)
        if exact and lower >= target:
            continue
        combos.append((c, g, lower if exact else 1, triv))
    if not combos:
        return None, BlockEvidence(ell, len(block), target, lower_all, None, True), False
    best_upper = min(len(t) for _, _, _, t in combos)
    remaining = opt.budget * len(combos)
    exhaustive = True
    budget_hit = False
    for h in range(1, target):
        for c, g, lo, triv in combos:
            if h < lo:
                continue
            if len(triv) <= h:
                w = triv
            elif budget_hit:
                continue
            else:
                out = find_decomposition(g, h, opt.height_bound, remaining)
                remaining -= out.attempts
                if not out.exhaustive:
                    budget_hit = True
                    exhaustive = False
                    continue
                w = out.witness
                if w is None:
                    continue
            witness = _lift_witness(w, s, support)
            j = max(k for k, ck in enumerate(c) if ck)
            step = Step("decompose", ell, tuple(c), witness, _adjoin(forms, witness), (block[j],),
                        note=f"strength <= {len(w)} < {target}")
            return step, BlockEvidence(ell, len(block), target, lower_all, len(w), exhaustive), budget_hit
    # the coefficient box is finite, so even a complete search is evidence only
    return None, BlockEvidence(ell, len(block), target, lower_all, best_upper, False), budget_hit


@dataclass(frozen=True)
class RegularizeResult:
    system: FormSystem
    steps: tuple[Step, ...]
    evidence: tuple[BlockEvidence, ...]
    evidence_only: bool
    budget_hit: bool


def regularize(sys: FormSystem, H: GrowthFunctions | None = None, options: SearchOptions | None = None,
               d: int | None = None) -> RegularizeResult:
    """Replace low-strength blocks by their odd factors until every block tests as high rank.

    The zero locus can only shrink: a dropped form is a rational combination
    of forms that remain plus products whose odd factor is kept in the system.
    """
    _check_odd(sys)
    H = H or GrowthFunctions()
    opt = options or SearchOptions()
    d = d or max(sys.max_degree, 1)
    forms = list(sys.forms)
    steps: list[Step] = []
    budget_hit = False
    while True:
        if len(steps) >= opt.max_steps:
            budget_hit = True
            break
        st = _reduce_linear(forms)
        if st is None:
            st = None
            Rp = len(forms)
            for ell in sorted({f.degree for f in forms if f.degree >= 3}, reverse=True):
                st, _, hit = _block_search(forms, ell, H.H(ell, Rp, d), d, opt)
                budget_hit = budget_hit or hit
                if st is not None:
                    break
        if st is None:
            break
        forms = _ordered(sys.names, apply_step(forms, st))
        steps.append(st)
    # final evidence pass on the settled system
    evidence = []
    Rp = len(forms)
    for ell in sorted({f.degree for f in forms if f.degree >= 3}, reverse=True):
        st, ev, hit = _block_search(forms, ell, H.H(ell, Rp, d), d, opt)
        evidence.append(ev)
    out = FormSystem(sys.names, tuple(forms))
    evidence_only = budget_hit or not all(ev.certified for ev in evidence)
    return RegularizeResult(out, tuple(steps), tuple(evidence), evidence_only, budget_hit)


# -- cleanups ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class CleanupResult:
    system: FormSystem
    zeroed: tuple[int, ...]
    steps: tuple[Step, ...]
    low_confidence: bool = False


def linear_cleanup(sys: FormSystem, threshold: int) -> CleanupResult:
    """Zero the support of any linear combination with fewer than ``threshold`` terms."""
    forms = list(sys.forms)
    steps: list[Step] = []
    zeroed: set[int] = set()
    while True:
        st = _reduce_linear(forms)
        if st is not None:
            forms = _ordered(sys.names, apply_step(forms, st))
            steps.append(st)
            continue
        lin = [f for f in forms if f.degree == 1]
        if not lin:
            break
        w, c = min_weight_combination(lin)
        if w >= threshold:
            break
        combo = linear_combination(lin, c).form
        J = tuple(combo.support)
        j = max(k for k, ck in enumerate(c) if ck)
        target = zero_variables(lin[j], J)
        # after zeroing, the chosen form is a combination of the others (or vanishes)
        st = Step("zero-linear-support", 1, tuple(c), zeroed=J,
                  removed=() if target.is_zero else (target,),
                  note=f"combination {combo} has {w} < {threshold} terms")
        forms = _ordered(sys.names, apply_step(forms, st))
        steps.append(st)
        zeroed |= set(J)
    return CleanupResult(FormSystem(sys.names, tuple(forms)), tuple(sorted(zeroed)), tuple(steps))


def slice_count(forms: Sequence[Form], s: int, zeroed: Sequence[int], i: int, p: int) -> int:
    """Points of ``V(forms)`` in ``F_p`` over the free variables with ``x_i = 0`` as well."""
    dead = sorted(set(zeroed) | {i})
    polys = [g for g in (f.restrict(dead) for f in forms)]
    n = s - len(dead)
    live = [g for g in polys if not g.is_zero]
    if not live:
        return p**n
    return kernels.scan_fp(live, n, p, need_jac=False).total


def hyperplane_cleanup(sys: FormSystem, zeroed: Sequence[int] = (),
                       primes: Sequence[int] = DEFAULT_CLEANUP_PRIMES,
                       cap: int = DEFAULT_CLEANUP_CAP) -> CleanupResult:
    """Restrict to coordinate hyperplanes that contain a top-dimensional component.

    The test is on slice counts: a component of dimension ``s' - R'`` inside
    ``{x_i = 0}`` contributes about ``p^(s'-R')`` points there, a proper
    intersection only ``O(p^(s'-R'-1))``.  Majority vote over the primes.
    """
    forms = list(sys.forms)
    dead = set(zeroed)
    s = sys.s
    Rp = len(forms)
    dim_target = (s - len(dead)) - Rp
    steps: list[Step] = []
    low = False
    if Rp == 0 or dim_target <= 0:
        return CleanupResult(sys, (), ())
    newly: list[int] = []
    for _ in range(Rp):
        if not forms:
            break
        n_free = s - len(dead)
        usable = [p for p in primes if p ** (n_free - 1) <= cap]
        if not usable:
            raise CapExceeded(f"slice enumeration p^{n_free - 1} exceeds cap {cap} for every prime")
        if len(usable) < len(primes):
            low = True
        hit = None
        for i in range(s):
            if i in dead:
                continue
            votes = [2 * slice_count(forms, s, sorted(dead), i, p) >= p**dim_target for p in usable]
            if 0 < sum(votes) < len(votes):
                low = True
            if 2 * sum(votes) > len(votes):
                hit = i
                break
        if hit is None:
            break
        st = Step("zero-hyperplane", zeroed=(hit,),
                  note=f"slice x{hit + 1}=0 holds at least half of p^{dim_target} points")
        forms = _ordered(sys.names, apply_step(forms, st))
        steps.append(st)
        dead.add(hit)
        newly.append(hit)
    return CleanupResult(FormSystem(sys.names, tuple(forms)), tuple(sorted(newly)), tuple(steps), low)


# -- the composite ------------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedSystem:
    system: FormSystem
    J: tuple[int, ...]
    certificate: RegularizationCertificate

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.system.s) if j not in set(self.J))

    def projected(self) -> FormSystem:
        """The reduced system on the variables outside ``J`` only."""
        names = tuple(self.system.names[j] for j in self.kept)
        return FormSystem(names, tuple(f.restrict(self.J) for f in self.system.forms))


def prepare_reduced_system(sys: FormSystem, H: GrowthFunctions | None = None,
                           threshold: int | None = None,
                           primes: Sequence[int] = DEFAULT_CLEANUP_PRIMES,
                           cap: int = DEFAULT_CLEANUP_CAP, options: SearchOptions | None = None,
                           max_rounds: int = 10) -> ReducedSystem:
    """Regularize, then linear cleanup, then hyperplane cleanup, repeating while cleanup bites."""
    _check_odd(sys)
    H = H or GrowthFunctions()
    opt = options or SearchOptions()
    d = max(sys.max_degree, 1)
    cur = sys
    steps: list[Step] = []
    J: set[int] = set()
    evidence: tuple[BlockEvidence, ...] = ()
    evidence_only = budget_hit = low = False
    R_prime = 0
    J_bound = 0
    for _ in range(max_rounds):
        reg = regularize(cur, H, opt, d)
        steps += reg.steps
        evidence = reg.evidence
        evidence_only = evidence_only or reg.evidence_only
        budget_hit = budget_hit or reg.budget_hit
        Rp = reg.system.R
        thr = threshold if threshold is not None else H.R_target(Rp, d)
        if Rp >= R_prime:
            R_prime = Rp
            J_bound = H.R_target(Rp, d) * Rp + Rp if threshold is None else thr * Rp + Rp
        lin = linear_cleanup(reg.system, thr)
        steps += lin.steps
        J |= set(lin.zeroed)
        hyp = hyperplane_cleanup(lin.system, sorted(J), primes, cap)
        steps += hyp.steps
        J |= set(hyp.zeroed)
        low = low or hyp.low_confidence
        cur = hyp.system
        if not lin.zeroed and not hyp.zeroed:
            break
    else:
        raise OddFormsError(f"regularization and cleanup did not settle within {max_rounds} rounds")
    cert = RegularizationCertificate(
        sys, cur, tuple(steps), tuple(sorted(J)), evidence, R_prime, J_bound,
        evidence_only, budget_hit, low, H.describe(),
    )
    return ReducedSystem(cur, tuple(sorted(J)), cert)


def regularization_certificate(sys: FormSystem, result: RegularizeResult,
                               H: GrowthFunctions | None = None) -> RegularizationCertificate:
    """Certificate for a bare :func:`regularize` run (no variables zeroed)."""
    H = H or GrowthFunctions()
    Rp = result.system.R
    d = max(sys.max_degree, 1)
    return RegularizationCertificate(sys, result.system, result.steps, (), result.evidence, Rp,
                                     H.R_target(Rp, d) * Rp + Rp, result.evidence_only,
                                     result.budget_hit, False, H.describe())
