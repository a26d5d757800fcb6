"""End-to-end run: reduce, find local solutions, scale, count through the embedding."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .config import PipelineConfig
from .counting import CountQuery, CountRecord, GrowthFit, count_record, growth_fit
from .errors import NoSolutionFound, OddFormsError
from .forms import FormSystem, format_system, parse_system, scale_variables
from .linalg import rank as mat_rank
from .local import real_nonsingular_solution
from .primes import primes_up_to
from .rank import _linear_matrix
from .regularize import ReducedSystem, SearchOptions, prepare_reduced_system
from .reports import atomic_write, csv_text
from .scaling import (
    BadPrimeReport, ScaledVerification, ScalingPlan, apply_signs, build_multipliers,
    detect_bad_primes, verify_scaled_local,
)

COUNT_FIELDS = ("N", "Y", "count", "predicted", "ratio")


@dataclass
class PipelineReport:
    config: PipelineConfig
    system: FormSystem
    reduced: ReducedSystem | None = None
    primes: BadPrimeReport | None = None
    plan: ScalingPlan | None = None
    verification: ScaledVerification | None = None
    records: list[CountRecord] = field(default_factory=list)
    samples: dict = field(default_factory=dict)
    fit: GrowthFit | None = None
    fit_note: str = ""
    notes: list[str] = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    failure: str | None = None

    @property
    def verdict(self) -> str:
        return "PASS" if self.failure is None and self.checks and all(self.checks.values()) else "FAIL"

    def count_csv(self) -> str:
        rows = [{"N": r.N, "Y": r.Y, "count": r.count, "predicted": f"{r.predicted:.6g}",
                 "ratio": f"{r.ratio:.6g}"} for r in self.records]
        return csv_text(COUNT_FIELDS, rows)

    def text(self) -> str:
        names = self.system.names
        out = ["[pipeline]", f"variables = {' '.join(names)}",
               f"forms = {self.system.R}", f"D = {self.system.D}", f"seed = {self.config.seed}", "",
               "[config]", self.config.describe(), ""]
        if self.reduced is not None:
            out.append(self.reduced.certificate.report())
        if self.primes is not None:
            out.append("[primes]")
            for d in self.primes.diagnoses:
                extra = "" if d.witness is None else " witness=" + ",".join(map(str, d.witness))
                out.append(f"p={d.p} status={d.status} unit_zeros={d.unit_solutions} "
                           f"nonsingular_unit_zeros={d.nonsingular_unit_solutions}{extra}")
            out.append("")
        if self.plan is not None and self.reduced is not None:
            out.append(self.plan.report(self.reduced.projected().names))
        if self.verification is not None:
            out.append(self.verification.report())
        if self.records:
            out.append("[counts]")
            out.append(self.count_csv().rstrip("\n"))
            for N, samp in self.samples.items():
                for x in samp:
                    out.append(f"sample N={N}: " + ",".join(map(str, x)))
            out.append("")
        if self.fit is not None:
            out += ["[growth fit]", f"slope = {self.fit.slope:.6f}",
                    f"log_corrected_slope = {self.fit.log_corrected_slope:.6f}",
                    f"constant = {self.fit.constant:.6g}", ""]
        elif self.fit_note:
            out += ["[growth fit]", f"skipped = {self.fit_note}", ""]
        if self.notes:
            out.append("[notes]")
            out += [f"- {n}" for n in self.notes]
            out.append("")
        out.append("[verdict]")
        for k, v in self.checks.items():
            out.append(f"{k} = {str(v).lower()}")
        if self.failure:
            out.append(f"failure = {self.failure}")
        out.append(f"verdict = {self.verdict}")
        return "\n".join(out) + "\n"


def _embedding(sys: FormSystem, red: ReducedSystem, plan: ScalingPlan) -> tuple[int, ...]:
    y = [0] * sys.s
    for k, i in enumerate(red.kept):
        y[i] = plan.y[k]
    return tuple(y)


def run_pipeline(cfg: PipelineConfig, system: FormSystem | None = None, write: bool = True) -> PipelineReport:
    """Run every stage; a hard failure stops the run and is recorded in the report."""
    sys = system if system is not None else parse_system(Path(cfg.system).read_text())
    rep = PipelineReport(cfg, sys)
    try:
        _run(cfg, sys, rep)
    except (OddFormsError, ValueError) as exc:
        rep.failure = f"{type(exc).__name__}: {exc}"
    if write:
        write_outputs(rep)
    return rep


def _run(cfg: PipelineConfig, sys: FormSystem, rep: PipelineReport) -> None:
    opt = SearchOptions(cfg.coeff_height, cfg.height_bound, cfg.rank_budget, cfg.max_steps,
                        cfg.birch_primes, cfg.sbound)
    red = prepare_reduced_system(sys, cfg.growth, cfg.threshold, cfg.cleanup_primes, cfg.enum_cap,
                                 opt, cfg.max_rounds)
    rep.reduced = red
    cert = red.certificate
    rep.checks["certificate_replays"] = cert.replays_exactly()
    rep.checks["J_F_within_bound"] = cert.J_within_bound
    lin = [f for f in red.system.forms if f.degree == 1]
    rep.checks["linear_block_independent"] = not lin or mat_rank(_linear_matrix(lin)) == len(lin)
    if cert.evidence_only:
        rep.notes.append("rank conclusions are evidence only (finite search box or budget)")
    G = red.projected()
    if G.R == 0:
        rep.notes.append("reduced system is empty: every counted solution has x_j = 0 on J_F "
                         "and arbitrary prime coordinates elsewhere")
        rep.plan = ScalingPlan((), {}, (1,) * G.s, cfg.precision)
    else:
        rep.primes = detect_bad_primes(G, cfg.p_max, cfg.enum_cap)
        if rep.primes.undetermined:
            raise OddFormsError(f"primes {list(rep.primes.undetermined)} exceed the enumeration cap")
        plan = build_multipliers(G, rep.primes.bad, cfg.precision, cfg.padic_budget,
                                 cfg.delta_max, cfg.enum_cap)
        try:
            x = real_nonsingular_solution(G, cfg.real_tolerance, cfg.real_budget, cfg.seed)
            plan = apply_signs(plan, x)
            rep.checks["real_solution_found"] = True
        except NoSolutionFound as exc:
            rep.notes.append(f"real solution: {exc}; signs need manual input")
            rep.checks["real_solution_found"] = False
        rep.plan = plan
        rep.verification = verify_scaled_local(G, plan, primes_up_to(cfg.p_max), cfg.precision,
                                               cfg.enum_cap)
        rep.checks["local_verification"] = rep.verification.ok
    y = _embedding(sys, red, rep.plan)
    sound = True
    for N in cfg.N:
        q = CountQuery(sys, N, rep.plan.Y, red.J, multipliers=y, zero_J=True,
                       sample_limit=cfg.sample_limit, cap=cfg.count_cap)
        rec, res = count_record(q, s_eff=G.s, D_eff=G.D)
        rep.records.append(CountRecord(rec.N, rec.Y, rec.count, rec.predicted))
        rep.samples[N] = res.samples
        sound = sound and all(not any(sys.evaluate(x)) for x in res.samples)
    rep.checks["samples_satisfy_original"] = sound
    rep.checks["count_positive_at_largest_N"] = rep.records[-1].count > 0
    usable = [r for r in rep.records if r.count > 0]
    if len(usable) >= 3:
        rep.fit = growth_fit(rep.records, G.s, G.D)
    else:
        rep.fit_note = "fewer than 3 positive counts"


def write_outputs(rep: PipelineReport) -> None:
    out = Path(rep.config.output_dir)
    atomic_write(out / "report.txt", rep.text())
    if rep.reduced is not None:
        atomic_write(out / "reduced.sys", format_system(rep.reduced.system))
        atomic_write(out / "certificate.txt", rep.reduced.certificate.report())
    if rep.plan is not None and rep.reduced is not None:
        G = rep.reduced.projected()
        atomic_write(out / "plan.txt", rep.plan.report(G.names))
        if G.R:
            atomic_write(out / "scaled.sys", format_system(scale_variables(G, rep.plan.y)))
    if rep.records:
        atomic_write(out / "counts.csv", rep.count_csv())
