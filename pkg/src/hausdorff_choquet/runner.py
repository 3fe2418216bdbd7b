"""Execution of preset and custom cases, and deterministic report files."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .content import ParameterError
from .domains import PRESET_DOMAINS, Box, DomainSpec, domain_from_record, outer_regularity_estimate, rasterize
from .functions import sample_function
from .inequalities import (CSV_HEADER, GROWTH_LIMIT, TheoremId, csv_row, estimate_constant,
                           growth_factor, validate_params)
from .operators import check_adams_bound, check_hedberg_split
from .presets import ADAMS, FAMILIES, HEDBERG, OUTER, Case, Preset

BRACKET_TOL = 1e-12


def resolve_domain(domain, n: int = 2) -> DomainSpec:
    if isinstance(domain, DomainSpec):
        return domain
    if isinstance(domain, dict):
        return domain_from_record(domain)
    if domain == "cube":
        return Box(lo=(0.0,) * n, hi=(1.0,) * n, n=n)
    if domain in PRESET_DOMAINS:
        return PRESET_DOMAINS[domain]()
    raise ParameterError(f"unknown domain {domain!r}")


def make_factory(family: str, seed: int = 0):
    if family not in FAMILIES:
        raise ParameterError(f"unknown function family {family!r}")
    build = FAMILIES[family]

    def factory(**pt):
        pt = dict(pt)
        if "seed" in pt:
            pt["seed"] = int(seed) + int(pt["seed"])
        try:
            return build(**pt)
        except TypeError as exc:
            raise ParameterError(f"bad parameter for family {family!r}: {exc}") from None
    return factory


@dataclass
class CaseResult:
    label: str
    kind: str
    rows: list                       # CSV lines
    records: list                    # JSON-ready dicts
    series: list                     # [(title, [(x, y), ...]), ...]
    summary: dict
    passed: bool
    failures: list = field(default_factory=list)


def validate_case(case: Case, n: int = 2) -> None:
    spec = resolve_domain(case.domain, n)
    params = {k: v for k, v in case.params.items() if k not in ("radii_h",)}
    if case.kind in (ADAMS, HEDBERG, OUTER):
        return
    validate_params(case.kind, spec.n, params, spec)
    if not case.sweep:
        raise ParameterError("case sweep must not be empty")


def _bracket_ok(rep) -> bool:
    ub, inf = rep.extra.get("lhs_ub"), rep.extra.get("lhs_inf")
    if ub is None or inf is None:
        return True
    ub, inf = np.atleast_1d(ub), np.atleast_1d(inf)
    return bool(np.all(inf <= ub * (1 + BRACKET_TOL) + 1e-300))


def _run_inequality(case: Case, L: int, refine: bool, seed: int, golden_steps: int) -> CaseResult:
    spec = resolve_domain(case.domain)
    sw = estimate_constant(TheoremId(case.kind), spec, make_factory(case.family, seed), case.sweep,
                           dict(case.params), L, refine=refine, golden_steps=golden_steps)
    all_reps = sw.reports + sw.refined
    failures = []
    if not sw.finite:
        failures.append("non-finite ratio")
    if refine and not sw.stable:
        failures.append(f"growth {sw.growth:.3g} >= {GROWTH_LIMIT}")
    if not all(_bracket_ok(r) for r in all_reps):
        failures.append("inf-over-b value exceeds the u_B value")
    rows, records = [], []
    for r in all_reps:
        r.family = case.family
        rows.append(r.csv_row())
        records.append(r.to_json())
    series = [(f"{case.label} L={L}", [(float(i), r.ratio) for i, r in enumerate(sw.reports)])]
    if sw.refined:
        series.append((f"{case.label} L={L + 1}", [(float(i), r.ratio) for i, r in enumerate(sw.refined)]))
    best = sw.reports[int(np.argmax([r.ratio for r in sw.reports]))]
    if best.curve:
        series.append((f"{case.label} c(t) at argmax", best.curve))
    summary = {"sup": sw.sup, "sup_refined": sw.sup_refined if refine else None,
               "growth": sw.growth if refine else None, "argmax": sw.argmax, "stable": sw.stable if refine else None}
    if "q" in best.params:
        summary["q"] = best.to_json()["params"]["q"]
    return CaseResult(case.label, case.kind, rows, records, series, summary, not failures, failures)


def _sample_family(case: Case, spec, L: int, seed: int):
    dom = rasterize(spec, L)
    factory = make_factory(case.family, seed)
    keys = list(case.sweep)
    pts = [dict(zip(keys, v)) for v in itertools.product(*(case.sweep[k] for k in keys))]
    return [sample_function(factory(**pt), dom) for pt in pts], pts


def _run_adams(case: Case, L: int, refine: bool, seed: int) -> CaseResult:
    spec = resolve_domain(case.domain)
    P = case.params
    levels = [L, L + case.refine_step] if refine else [L]
    reports = []
    for lv in levels:
        fam, pts = _sample_family(case, spec, lv, seed)
        reports.append(check_adams_bound(fam, P["delta"], P["kappa"], P["p"]))
    sups = [float(r.sup) for r in reports]
    finite = all(r.finite for r in reports)
    growth = growth_factor(sups[0], sups[-1]) if refine else None
    stable = bool(finite and growth < GROWTH_LIMIT) if refine else None
    rows, records = [], []
    for lv, rep in zip(levels, reports):
        for lhs, rhs, rat in zip(rep.lhs, rep.rhs, rep.ratios):
            params = {"delta": P["delta"], "kappa": P["kappa"], "p": P["p"]}
            rows.append(csv_row(ADAMS, "Box", case.family, params, None, lv, lhs, rhs, rat, stable))
            records.append({"level": lv, "lhs": lhs, "rhs": rhs, "ratio": rat})
    failures = [] if finite else ["non-finite ratio"]
    if refine and not stable:
        failures.append(f"growth {growth:.3g} >= {GROWTH_LIMIT}")
    series = [(f"{case.label} L={lv}", [(float(i), x) for i, x in enumerate(r.ratios)])
              for lv, r in zip(levels, reports)]
    return CaseResult(case.label, case.kind, rows, records, series,
                      {"sup": sups[0], "sup_refined": sups[-1] if refine else None, "growth": growth,
                       "stable": stable}, not failures, failures)


def _run_hedberg(case: Case, L: int, refine: bool, seed: int) -> CaseResult:
    spec = resolve_domain(case.domain)
    P = case.params
    levels = [L, L + 1] if refine else [L]
    per_level = []
    for lv in levels:
        fam, _ = _sample_family(case, spec, lv, seed)
        per_level.append([check_hedberg_split(f, P["delta"], P["s"], P["p"], P["kappa"]) for f in fam])
    sups = [float(max(r.sup for r in reps)) for reps in per_level]
    finite = all(r.finite for reps in per_level for r in reps)
    growth = growth_factor(sups[0], sups[-1]) if refine else None
    stable = bool(finite and growth < GROWTH_LIMIT) if refine else None
    rows, records = [], []
    for lv, reps in zip(levels, per_level):
        for rep in reps:
            j = rep.argmax
            params = {"delta": P["delta"], "kappa": P["kappa"], "p": P["p"], "s": P["s"]}
            lhs, rhs, rat = (rep.lhs[j], rep.rhs[j], rep.ratios[j]) if j >= 0 else (0.0, 0.0, 0.0)
            rows.append(csv_row(HEDBERG, "Box", case.family, params, None, lv, lhs, rhs, rat, stable))
            records.append({"level": lv, "lhs": lhs, "rhs": rhs, "ratio": rat, **rep.extra})
    failures = [] if finite else ["non-finite ratio"]
    if refine and not stable:
        failures.append(f"growth {growth:.3g} >= {GROWTH_LIMIT}")
    series = [(f"{case.label} L={lv}", [(float(i), r.sup) for i, r in enumerate(reps)])
              for lv, reps in zip(levels, per_level)]
    return CaseResult(case.label, case.kind, rows, records, series,
                      {"sup": sups[0], "sup_refined": sups[-1] if refine else None, "growth": growth,
                       "stable": stable}, not failures, failures)


def _run_outer(case: Case, L: int, refine: bool) -> CaseResult:
    spec = resolve_domain(case.domain)
    levels = [L, L + 1] if refine else [L]
    rows, records, series, failures = [], [], [], []
    bs = []
    for lv in levels:
        dom = rasterize(spec, lv)
        h = dom.geometry.h
        radii = [k * h for k in case.params.get("radii_h", [4, 8, 16])]
        est = outer_regularity_estimate(dom, radii)
        bs.append(est.b)
        for r, b in zip(est.radii, est.per_radius):
            rows.append(csv_row(OUTER, type(spec).__name__, "", {"r": float(r)}, None, lv, b, 1.0, float(b), None))
            records.append({"level": lv, "r": float(r), "b": float(b)})
        series.append((f"{case.label} L={lv}", [(float(r), float(b)) for r, b in zip(est.radii, est.per_radius)]))
        if spec.outer_regular and est.b < 0.1:
            failures.append(f"b={est.b:.3g} < 0.1 at L={lv}")
        if spec.outer_regular is False and est.per_radius[0] >= 0.05:
            failures.append(f"b={est.per_radius[0]:.3g} >= 0.05 at smallest radius, L={lv}")
    return CaseResult(case.label, case.kind, rows, records, series,
                      {"b": bs[0], "b_refined": bs[-1] if refine else None,
                       "outer_regular": spec.outer_regular}, not failures, failures)


def run_case(case: Case, L: int, refine: bool = True, seed: int = 0, golden_steps: int = 0) -> CaseResult:
    if case.kind == ADAMS:
        return _run_adams(case, L, refine, seed)
    if case.kind == HEDBERG:
        return _run_hedberg(case, L, refine, seed)
    if case.kind == OUTER:
        return _run_outer(case, L, refine)
    return _run_inequality(case, L, refine, seed, golden_steps)


@dataclass
class RunResult:
    name: str
    statement: str
    level: int
    seed: int
    refine: bool
    cases: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def csv_text(self) -> str:
        lines = [CSV_HEADER] + [r for c in self.cases for r in c.rows]
        return "\n".join(lines) + "\n"

    def json_text(self) -> str:
        doc = {"preset": self.name, "statement": self.statement, "level": self.level, "seed": self.seed,
               "refine": self.refine, "passed": self.passed,
               "cases": [{"label": c.label, "kind": c.kind, "passed": c.passed, "failures": c.failures,
                          "summary": c.summary, "reports": c.records} for c in self.cases]}
        return json.dumps(_jsonable(doc), indent=1, allow_nan=False) + "\n"

    def dat_text(self) -> str:
        out = []
        for c in self.cases:
            for title, pts in c.series:
                out.append(f"# {title}")
                out.extend(f"{x!r} {y!r}" for x, y in ((float(a), float(b)) for a, b in pts))
                out.append("")
        return "\n".join(out) + "\n"


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def run_preset(preset: Preset, level: int | None = None, refine: bool = True, seed: int = 0,
               golden_steps: int = 0, progress=None) -> RunResult:
    L = preset.level if level is None else int(level)
    for case in preset.cases:
        validate_case(case)
    results = []
    for case in preset.cases:
        res = run_case(case, L, refine, seed, golden_steps)
        if progress:
            progress(res)
        results.append(res)
    return RunResult(preset.name, preset.statement, L, seed, refine, results)


def write_outputs(result: RunResult, prefix: str) -> list[str]:
    paths = []
    for ext, text in (("csv", result.csv_text()), ("json", result.json_text()), ("dat", result.dat_text())):
        path = f"{prefix}.{ext}"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        paths.append(path)
    return paths
