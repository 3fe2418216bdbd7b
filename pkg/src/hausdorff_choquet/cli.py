"""Command-line experiment runner.

Exit status: 0 all checks pass, 2 an invariant failed, 3 a parameter lies
outside its admissible range, 1 the configuration could not be read.
"""
from __future__ import annotations

import argparse
import inspect
import json
import sys

import numpy as np

from .choquet import check_choquet_axioms, choquet_integral, choquet_integral_power
from .content import AxiomReport, ParameterError, check_content_axioms, check_delta, dyadic_content
from .domains import rasterize
from .functions import sample_function
from .grid import GridFunction, GridGeometry, GridSet
from .inequalities import TheoremId
from .operators import OperatorParams, fractional_maximal
from .presets import FAMILIES, PRESETS, Case, Preset
from .runner import RunResult, make_factory, resolve_domain, run_preset, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_FAILED, EXIT_PARAM = 0, 1, 2, 3


class ConfigError(Exception):
    def __init__(self, fld: str, message: str):
        super().__init__(f"config field '{fld}': {message}")
        self.field = fld


def _scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    return t


def _value(text: str):
    if "," in text:
        return [_scalar(x) for x in text.split(",") if x.strip()]
    return _scalar(text)


def parse_config(text: str) -> dict:
    """JSON object, or ``key = value`` lines with dotted keys for nesting."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<json>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return doc
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"<line {lineno}>", f"expected key = value, got {line!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        if not key:
            raise ConfigError(f"<line {lineno}>", "empty key")
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(key, "conflicts with a scalar entry")
        node[parts[-1]] = _value(val)
    return out


def _num(cfg, key, kind=float, default=None):
    if key not in cfg or cfg[key] is None:
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if kind is int and not float(v).is_integer():
        raise ConfigError(key, f"expected an integer, got {v!r}")
    return kind(v)


def _numlist(cfg, key, default=None):
    if key not in cfg:
        return default
    v = cfg[key]
    v = v if isinstance(v, list) else [v]
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ConfigError(key, f"expected numbers, got {cfg[key]!r}")
    return [float(x) for x in v]


KNOWN = {"command", "preset", "theorem", "domain", "function", "sweep", "delta", "kappa", "p", "s",
         "epsilon", "k", "t_grid", "b_mode", "level", "refine", "seed", "output", "quantized",
         "radii_h", "sets", "golden_steps", "label", "set", "field"}
PARAM_KEYS = ("delta", "kappa", "p", "s", "epsilon", "k", "b_mode")


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    cfg = parse_config(text)
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "expected a mapping")
    for key in cfg:
        if key not in KNOWN:
            raise ConfigError(key, "unknown field")
    return cfg


def _merge_flags(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    for key in ("level", "seed", "delta", "kappa", "p", "s", "epsilon", "sets", "preset"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "refine", False):
        cfg["refine"] = True
    return cfg


def _function_record(cfg: dict):
    rec = cfg.get("function")
    if rec is None:
        raise ConfigError("function", "missing (needs at least function.family)")
    if isinstance(rec, str):
        rec = {"family": rec}
    if not isinstance(rec, dict) or "family" not in rec:
        raise ConfigError("function.family", "missing")
    fam = rec["family"]
    if fam not in FAMILIES:
        raise ConfigError("function.family", f"unknown family {fam!r}; choose from {sorted(FAMILIES)}")
    return fam, {k: v for k, v in rec.items() if k != "family"}


def _domain(cfg: dict, default="cube"):
    d = cfg.get("domain", default)
    try:
        return resolve_domain(d)
    except ParameterError as exc:
        raise ConfigError("domain", str(exc)) from None


def _custom_case(cfg: dict) -> Preset:
    theorem = cfg.get("theorem")
    if theorem is None:
        raise ConfigError("theorem", "missing (or give preset)")
    try:
        TheoremId(theorem)
    except ValueError:
        raise ConfigError("theorem", f"unknown theorem {theorem!r}; choose from "
                                     f"{[t.value for t in TheoremId]}") from None
    fam, fixed = _function_record(cfg)
    sweep = {k: [v] for k, v in fixed.items()}
    extra = cfg.get("sweep", {})
    if not isinstance(extra, dict):
        raise ConfigError("sweep", "expected sweep.<parameter> = v1, v2, ...")
    for k, v in extra.items():
        sweep[k] = v if isinstance(v, list) else [v]
    if not sweep:
        # a single function: pin the family's first parameter at its default
        first = next(iter(inspect.signature(FAMILIES[fam]).parameters.values()))
        sweep = {first.name: [first.default]}
    params = {}
    for k in PARAM_KEYS:
        if k in cfg:
            params[k] = cfg[k] if k == "b_mode" else _num(cfg, k)
    if "t_grid" in cfg:
        params["t_grid"] = tuple(_numlist(cfg, "t_grid"))
    _domain(cfg)
    domain = cfg.get("domain", "cube")
    case = Case(theorem, domain, fam, sweep, params, cfg.get("label", theorem))
    return Preset("custom", f"custom {theorem} check", (case,), level=_num(cfg, "level", int, 6))


def _say(args, msg):
    if not args.quiet:
        print(msg)


def _write(prefix, csv_text, json_doc, dat_text):
    for ext, text in (("csv", csv_text), ("json", json.dumps(json_doc, indent=1, allow_nan=False) + "\n"),
                      ("dat", dat_text)):
        with open(f"{prefix}.{ext}", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- commands -------------------------------------------------------------------

def cmd_check(args, cfg, golden_default=0) -> int:
    if "preset" in cfg and cfg["preset"] is not None:
        name = cfg["preset"]
        if name not in PRESETS:
            raise ConfigError("preset", f"unknown preset {name!r}; see 'presets'")
        preset = PRESETS[name]
    else:
        preset = _custom_case(cfg)
    golden = _num(cfg, "golden_steps", int, golden_default)
    level = _num(cfg, "level", int, None)
    seed = _num(cfg, "seed", int, 0)
    refine = bool(cfg.get("refine", False))
    _say(args, f"[{preset.name}] {preset.statement}")

    def progress(res):
        status = "pass" if res.passed else "FAIL " + "; ".join(res.failures)
        keys = ("sup", "sup_refined", "growth", "b", "q")
        s = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                     for k, v in res.summary.items() if k in keys and v is not None)
        _say(args, f"  {res.label}: {status} {s}")

    result: RunResult = run_preset(preset, level, refine, seed, golden, progress)
    prefix = args.out or preset.name
    for path in write_outputs(result, prefix):
        _say(args, f"  wrote {path}")
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_sweep(args, cfg) -> int:
    return cmd_check(args, cfg, golden_default=6)


def _random_sets(geo: GridGeometry, count: int, rng) -> list[GridSet]:
    out = []
    for _ in range(count):
        dens = rng.uniform(0.02, 0.7)
        out.append(GridSet(geo, rng.random(geo.shape) < dens))
    return out


def _random_function(geo: GridGeometry, rng) -> GridFunction:
    levels = rng.integers(1, 9)
    vals = rng.integers(0, levels + 1, size=geo.shape) * rng.uniform(0.1, 2.0)
    vals = np.where(rng.random(geo.shape) < 0.3, 0.0, vals)
    return GridFunction.on(GridSet.full(geo), vals)


def cmd_axioms(args, cfg) -> int:
    sets_spec = str(cfg.get("sets", "random:100"))
    kind, _, num = sets_spec.partition(":")
    if kind != "random" or not num.isdigit() or int(num) < 2:
        raise ConfigError("sets", f"expected random:N with N >= 2, got {sets_spec!r}")
    count = int(num)
    level = _num(cfg, "level", int, 5)
    n = 2
    deltas = _numlist(cfg, "delta", [0.5, 1.0, 1.5, 2.0])
    seed = _num(cfg, "seed", int, 0)
    geo = GridGeometry(n, level)
    rows, doc = ["suite,delta,axiom,status,cases,worst"], {"level": level, "seed": seed, "sets": count, "suites": []}
    dat = []
    ok = True
    for delta in deltas:
        check_delta(delta, n)
        rng = np.random.default_rng([seed, int(round(delta * 1000))])
        content_rep = check_content_axioms(_random_sets(geo, count, rng), delta)
        choq = AxiomReport()
        for _ in range(count):
            choq.merge(check_choquet_axioms(_random_function(geo, rng), _random_function(geo, rng), delta))
        for suite, rep in (("content", content_rep), ("choquet", choq)):
            ok &= rep.passed
            for name, v in rep.results.items():
                status = "n/a" if v is None else ("pass" if v else "fail")
                worst = rep.worst.get(name)
                rows.append(f"{suite},{delta!r},{name},{status},{rep.cases.get(name, 0)},"
                            f"{'' if worst is None else repr(float(worst))}")
                if worst is not None:
                    dat.append(f"{delta!r} {float(worst)!r}")
            doc["suites"].append({"suite": suite, "delta": delta, "passed": rep.passed,
                                  "results": {k: v for k, v in rep.results.items()},
                                  "worst": {k: float(v) for k, v in rep.worst.items()},
                                  "cases": dict(rep.cases)})
            _say(args, f"[{suite} delta={delta:g}] " + ("pass" if rep.passed else "FAIL"))
            for line in rep.lines():
                _say(args, "    " + line)
    doc["passed"] = bool(ok)
    _write(args.out or "axioms", "\n".join(rows) + "\n", doc, "\n".join(dat) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


def _sampled(cfg):
    spec = _domain(cfg)
    level = _num(cfg, "level", int, 6)
    dom = rasterize(spec, level)
    fam, fixed = _function_record(cfg)
    if "seed" in cfg and fam == "fourier":
        fixed = {**fixed, "seed": fixed.get("seed", 0)}
    fn = make_factory(fam, _num(cfg, "seed", int, 0))(**fixed)
    return spec, dom, fam, sample_function(fn, dom)


def cmd_integrate(args, cfg) -> int:
    spec, dom, fam, f = _sampled(cfg)
    deltas = _numlist(cfg, "delta", [float(dom.geometry.n)])
    ps = _numlist(cfg, "p", [1.0])
    quant = _num(cfg, "quantized", int, None)
    rows = ["domain,family,level,delta,p,value,residual,error_bound"]
    recs, dat = [], []
    for d in deltas:
        for p in ps:
            if quant is not None:
                iv = choquet_integral(f.power(p), d, quantized=quant)
            else:
                iv = choquet_integral_power(f, p, d)
            rec = {"delta": d, "p": p, "value": iv.value, "residual": iv.residual, "error_bound": iv.error_bound}
            recs.append(rec)
            rows.append(f"{type(spec).__name__},{fam},{dom.level},{d!r},{p!r},{iv.value!r},"
                        f"{'' if iv.residual is None else repr(iv.residual)},"
                        f"{'' if iv.error_bound is None else repr(iv.error_bound)}")
            dat.append(f"{d!r} {iv.value!r}")
            _say(args, f"delta={d:g} p={p:g}: {iv.value:.10g}")
    _write(args.out or "integrate", "\n".join(rows) + "\n",
           {"domain": spec.describe(), "family": fam, "level": dom.level, "integrals": recs}, "\n".join(dat) + "\n")
    return EXIT_OK


def cmd_content(args, cfg) -> int:
    if "set" in cfg:
        path = str(cfg["set"])
        try:
            with open(path, encoding="utf-8") as fh:
                e = GridSet.from_text(fh.read())
        except OSError as exc:
            raise ConfigError("set", f"cannot read {path}: {exc.strerror}") from None
        except ValueError as exc:
            raise ConfigError("set", f"malformed grid file: {exc}") from None
        source = path
    else:
        spec = _domain(cfg, None) if cfg.get("domain") else None
        if spec is None:
            raise ConfigError("domain", "content needs a domain or a set file")
        e = rasterize(spec, _num(cfg, "level", int, 6)).set
        source = type(spec).__name__
    deltas = _numlist(cfg, "delta", [float(e.geometry.n)])
    rows = ["source,level,delta,value,cover_size,cells"]
    recs, dat = [], []
    for d in deltas:
        res = dyadic_content(e, d)
        rows.append(f"{source},{e.geometry.L},{d!r},{res.value!r},{len(res.cover)},{e.count}")
        recs.append({"delta": d, "value": res.value, "cover": [[lv, list(map(int, c))] for lv, c in res.cover]})
        dat.append(f"{d!r} {res.value!r}")
        _say(args, f"delta={d:g}: content {res.value:.12g} with {len(res.cover)} cubes")
    _write(args.out or "content", "\n".join(rows) + "\n",
           {"source": source, "level": e.geometry.L, "cells": e.count, "contents": recs}, "\n".join(dat) + "\n")
    return EXIT_OK


def cmd_maximal(args, cfg) -> int:
    spec, dom, fam, f = _sampled(cfg)
    kappa = _num(cfg, "kappa", float, 0.0)
    which = cfg.get("field", "value")
    if which not in ("value", "gradient"):
        raise ConfigError("field", "expected value or gradient")
    src = f.gradient_field() if which == "gradient" else f
    m = fractional_maximal(src, OperatorParams(kappa=kappa), cells=dom.set)
    idx = dom.set.indices()
    vals = m.flat[idx]
    g = dom.geometry
    rows = ["domain,family,field,level,kappa,max,mean",
            f"{type(spec).__name__},{fam},{which},{g.L},{kappa!r},{float(vals.max(initial=0.0))!r},"
            f"{float(vals.mean()) if len(vals) else 0.0!r}"]
    dat = [" ".join(repr(float(x)) for x in (*g.centers[i], v)) for i, v in zip(idx, vals)]
    _write(args.out or "maximal", "\n".join(rows) + "\n",
           {"domain": spec.describe(), "family": fam, "field": which, "level": g.L, "kappa": kappa,
            "max": float(vals.max(initial=0.0)), "cells": int(len(idx))}, "\n".join(dat) + "\n")
    _say(args, f"max M_kappa = {float(vals.max(initial=0.0)):.10g} over {len(idx)} cells")
    return EXIT_OK


def cmd_presets(args, cfg) -> int:
    for p in PRESETS.values():
        print(f"{p.name:26s} L={p.level}  {p.statement}")
    return EXIT_OK


COMMANDS = {"check": cmd_check, "sweep": cmd_sweep, "axioms": cmd_axioms, "integrate": cmd_integrate,
            "content": cmd_content, "maximal": cmd_maximal, "presets": cmd_presets}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="choquet", description="Hausdorff content and Choquet integral experiments")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="named preset (see the 'presets' command)")
    common.add_argument("--config", help="key = value or JSON config file")
    common.add_argument("--level", type=int, help="grid level L (2^L cells per side)")
    common.add_argument("--refine", action="store_true", help="also run at the next level and log stability")
    common.add_argument("--seed", type=int, help="base seed for random families")
    common.add_argument("--out", help="output path prefix for .csv/.json/.dat")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--delta", type=float)
    common.add_argument("--kappa", type=float)
    common.add_argument("--p", type=float)
    common.add_argument("--s", type=float)
    common.add_argument("--epsilon", type=float)
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {"check": "run a preset or a configured inequality check",
             "sweep": "estimate a constant over a family sweep (golden-section refined)",
             "axioms": "run the content and Choquet axiom suites on random inputs",
             "integrate": "Choquet integral of a sampled function",
             "content": "dyadic Hausdorff content of a set",
             "maximal": "fractional maximal function of a sampled function",
             "presets": "list the preset catalog"}
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        if name == "axioms":
            p.add_argument("--sets", help="random:N")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        cfg = _merge_flags(cfg, args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
