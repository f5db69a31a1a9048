"""Experiment grids: spec parsing, per-cell suites, deterministic CSV/JSON reports."""

from __future__ import annotations

import copy
import csv
import io
import json
import os
import platform
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .groups import FiniteGroup, GroupFunction, characters, constant, delta, group_from_spec
from .lp import DEFAULT_SEED, as_pnorm
from .normbench import (ap_norm_primal, bp_dual_norm, fourier_oracle_p2, inclusion_check,
                        multiplier_norm)
from .repspace import (SubquotientSpace, all_characters, make_regular, make_trivial,
                       random_monomial_rep)
from .tensor import TensorElement, injective_norm, product_decomposition, tensor_norm, verify_fell

CSV_COLUMNS = ["group", "p", "function", "suite", "lower", "upper", "oracle", "margin", "pass",
               "seconds"]
SUITES = ("bracket", "oracle", "fell", "tensor", "inclusion", "multiplier", "submultiplicativity")
# suites evaluated once per (group, p) rather than per function
GROUP_SUITES = ("fell", "tensor")
OUT_ENV = "BPALG_OUT"

DEFAULT_SOLVER = {
    "restarts": 2,            # random primal starts besides the SVD start
    "k": None,                # primal term budget, None means |G|
    "dual_restarts": 4,
    "final_restarts": 32,
    "dual_tol": 1e-4,
    "bracket_tol": 1e-6,
    "oracle_slack": 1e-3,
    "inclusion_tol": 1e-4,
    "multiplier_samples": 2,
    "monomial_reps": 2,
}

SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "groups": {"type": "array", "items": {"type": ["string", "object"]}},
        "group": {"type": ["string", "object"]},
        "p": {"type": "array", "items": {"type": ["number", "string"]}},
        "functions": {"type": "array", "items": {"type": ["string", "object"]}},
        "suites": {"type": "array", "items": {"enum": list(SUITES)}},
        "solver": {"type": "object"},
        "inclusion_q": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "output": {"type": "object", "properties": {
            "dir": {"type": "string"}, "record_timings": {"type": "boolean"}}},
    },
    "additionalProperties": False,
    "anyOf": [{"required": ["groups"]}, {"required": ["group"]}],
}


class SpecError(ValueError):
    """Invalid experiment spec file or override."""


@dataclass
class ExperimentSpec:
    groups: list
    p_grid: list[str]
    functions: list
    suites: list[str]
    solver: dict
    inclusion_q: dict
    seed: int
    out_dir: str | None
    record_timings: bool
    raw: dict

    def resolved(self) -> dict:
        return {"groups": self.groups, "p": self.p_grid, "functions": self.functions,
                "suites": self.suites, "solver": self.solver, "inclusion_q": self.inclusion_q,
                "seed": self.seed,
                "output": {"dir": self.out_dir, "record_timings": self.record_timings}}


def _p_label(p) -> str:
    return as_pnorm(p).label()


def parse_override(text: str) -> tuple[list[str], object]:
    if "=" not in text:
        raise SpecError(f"override must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return key.strip().split("."), parsed


def apply_overrides(raw: dict, overrides) -> dict:
    raw = copy.deepcopy(raw)
    for item in overrides or ():
        path, value = parse_override(item) if isinstance(item, str) else item
        node = raw
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise SpecError(f"override path {'.'.join(path)} crosses a non-object")
        node[path[-1]] = value
    return raw


def load_spec(source, seed: int | None = None, overrides=None, out_dir: str | None = None) -> ExperimentSpec:
    """Validate and resolve a spec given as a dict, JSON text or a path."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as exc:
            raise SpecError(f"cannot read spec {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from exc
    elif isinstance(source, str):
        raw = json.loads(source)
    else:
        raw = copy.deepcopy(source)
    raw = apply_overrides(raw, overrides)
    if seed is not None:
        raw["seed"] = int(seed)
    try:
        jsonschema.validate(raw, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SpecError(f"invalid spec: {exc.message}") from exc
    groups = raw.get("groups") or [raw["group"]]
    for g in groups:
        try:
            group_from_spec(g)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    p_grid = []
    for p in raw.get("p", [2]):
        try:
            p_grid.append(_p_label(p))
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad exponent {p!r}: {exc}") from exc
    solver = dict(DEFAULT_SOLVER)
    unknown = set(raw.get("solver", {})) - set(DEFAULT_SOLVER)
    if unknown:
        raise SpecError(f"unknown solver options {sorted(unknown)}")
    solver.update(raw.get("solver", {}))
    out = raw.get("output", {})
    spec = ExperimentSpec(groups=groups, p_grid=p_grid, functions=list(raw.get("functions", [])),
                          suites=list(raw.get("suites", ["bracket"])), solver=solver,
                          inclusion_q={str(k): _p_label(v) for k, v in raw.get("inclusion_q", {}).items()},
                          seed=int(raw.get("seed", DEFAULT_SEED)),
                          out_dir=out_dir or out.get("dir"),
                          record_timings=bool(out.get("record_timings", False)), raw=raw)
    for G in spec.groups:
        try:
            expand_functions(group_from_spec(G), spec.functions, spec.seed)
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError(f"bad function list: {exc}") from exc
    return spec


def group_label(G) -> str:
    return group_from_spec(G).label


def expand_functions(G: FiniteGroup, items, seed: int) -> list[tuple[str, GroupFunction]]:
    """Turn builtin function names into ``(id, function)`` pairs.

    Builtins: ``delta_e``, ``deltas``, ``constant``, ``characters``,
    ``random:N`` or ``{"name": "random", "count": N, "seed": s, "real": bool}``,
    and ``{"name": id, "values": [[re, im], ...]}`` for explicit values.
    """
    out = []
    for item in items:
        if isinstance(item, str) and item.startswith("random"):
            count = int(item.split(":", 1)[1]) if ":" in item else 1
            item = {"name": "random", "count": count}
        if isinstance(item, dict):
            name = item.get("name")
            if name == "random":
                rng = np.random.default_rng([int(item.get("seed", seed)), G.order])
                for j in range(int(item.get("count", 1))):
                    v = rng.standard_normal(G.order)
                    if not item.get("real", False):
                        v = v + 1j * rng.standard_normal(G.order)
                    out.append((f"rand{j}", GroupFunction(G, v)))
            elif "values" in item:
                out.append((str(name), GroupFunction.from_json(G, item["values"])))
            else:
                raise SpecError(f"unknown function item {item!r}")
        elif item == "delta_e":
            out.append(("delta_e", delta(G)))
        elif item == "deltas":
            out.extend((f"delta_{a}", delta(G, a)) for a in range(G.order))
        elif item in ("constant", "const1"):
            out.append(("const1", constant(G)))
        elif item == "characters":
            out.extend((f"chi{k}", GroupFunction(G, chi)) for k, chi in enumerate(characters(G)))
        else:
            raise SpecError(f"unknown function {item!r}")
    return out


def job_seed(seed: int, key: tuple) -> int:
    """Seed for one grid cell from the global seed and a stable hash of its key."""
    digest = zlib.crc32("|".join(map(str, key)).encode())
    return int(np.random.SeedSequence([seed % 2 ** 64, digest]).generate_state(1, np.uint64)[0])


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return format(float(x), ".12g")


# ---------------------------------------------------------------- suites

def _row(group, p, fid, suite, lower, upper, oracle, margin, passed):
    return {"group": group, "p": p, "function": fid, "suite": suite, "lower": lower,
            "upper": upper, "oracle": oracle, "margin": margin, "pass": bool(passed)}


def _suite_cell(G, p, fid, f, suite, seed, solver, inclusion_q):
    """Run one suite on one function; returns (row or None, record extra, witness)."""
    pn = as_pnorm(p)
    dual_kw = {"restarts": solver["dual_restarts"], "final_restarts": solver["final_restarts"],
               "tol": solver["dual_tol"]}
    primal_kw = {"restarts": solver["restarts"], "k": solver["k"]}
    if suite in ("bracket", "oracle"):
        if suite == "oracle" and not (pn.is_two and G.is_abelian):
            return None, None, None
        dual = bp_dual_norm(f, pn, seed=seed, **dual_kw)
        primal = ap_norm_primal(f, pn, seed=seed, **primal_kw)
        oracle = fourier_oracle_p2(f) if (pn.is_two and G.is_abelian) else None
        lo, up = dual.lower, primal.upper
        if suite == "bracket":
            ok = lo <= up + solver["bracket_tol"]
            margin = up - lo
        else:
            slack = solver["oracle_slack"]
            ok = lo - slack <= oracle <= up + slack
            margin = min(oracle - lo, up - oracle)
        witness = {"dual_h": _cjson(dual.witness), "dual_vector": _cjson(dual.operator_estimate.witness),
                   "primal": primal.decomposition.to_json()}
        return _row(G.label, p, fid, suite, lo, up, oracle, margin, ok), None, witness
    if suite == "inclusion":
        if p in inclusion_q:
            q = inclusion_q[p]
        elif pn.is_two:
            return None, None, None
        else:
            q = "2"
        rep = inclusion_check(f, q, pn, tol=solver["inclusion_tol"], seed=seed,
                              primal_kw=primal_kw, dual_kw=dual_kw)
        return (_row(G.label, p, fid, f"inclusion(q={q})", rep.lower_p, rep.upper_q, None,
                     rep.margin, rep.passed), None, None)
    if suite == "multiplier":
        est = multiplier_norm(f, pn, samples=solver["multiplier_samples"],
                              restarts=solver["restarts"], seed=seed)
        up = ap_norm_primal(f, pn, seed=seed, **primal_kw).upper
        ok = est.lower <= up + solver["bracket_tol"]
        return _row(G.label, p, fid, suite, est.lower, up, None, up - est.lower, ok), None, None
    if suite == "submultiplicativity":
        rng = np.random.default_rng(seed)
        g = GroupFunction(G, rng.standard_normal(G.order) + 1j * rng.standard_normal(G.order))
        df = ap_norm_primal(f, pn, seed=seed, **primal_kw).decomposition
        dg = ap_norm_primal(g, pn, seed=seed + 1, **primal_kw).decomposition
        prod = product_decomposition(df, dg)
        err = float(np.abs(prod.evaluate().values - f.values * g.values).max(initial=0.0))
        exact_ok = prod.exact_cost() <= df.exact_cost() * dg.exact_cost()
        bound = float(df.exact_cost() * dg.exact_cost())
        return (_row(G.label, p, fid, suite, float(prod.exact_cost()), bound, err,
                     bound - float(prod.exact_cost()), exact_ok and err <= 1e-10), None, None)
    raise SpecError(f"unknown suite {suite!r}")


def _group_suite(G, p, suite, seed, solver):
    """Suites that do not depend on a function; returns a list of rows."""
    pn = as_pnorm(p)
    rows = []
    if suite == "fell":
        rng = np.random.default_rng(seed)
        reps = [make_regular(G, pn), make_trivial(SubquotientSpace.full(2, pn), G)]
        reps += all_characters(G, pn)
        for j in range(solver["monomial_reps"]):
            rep = random_monomial_rep(G, rng, pn)
            rep.label = f"{G.label}:monomial{j}"
            reps.append(rep)
        for rep in reps:
            rep_id = rep.label.split(":", 1)[1]
            rep_report = verify_fell(rep)
            rows.append(_row(G.label, p, rep_id, suite, 0.0, rep_report.intertwining_error, None,
                             1e-12 - rep_report.intertwining_error, rep_report.ok))
    elif suite == "tensor":
        rng = np.random.default_rng(seed)
        E = SubquotientSpace.full(G.order, pn)
        F = SubquotientSpace.full(3, pn)
        a, b = E.random_vector(rng), F.random_vector(rng)
        val = tensor_norm(TensorElement.elementary(E, F, a, b))
        prod = E.norm(a) * F.norm(b)
        rows.append(_row(G.label, p, "elementary", suite, val, val, prod, abs(val - prod),
                         abs(val - prod) <= 1e-8))
        u = TensorElement(E, F, rng.standard_normal((G.order, 3)) + 1j * rng.standard_normal((G.order, 3)))
        tn = tensor_norm(u)
        inj = injective_norm(u, seed=rng)
        rows.append(_row(G.label, p, "random", suite, inj, tn, None, tn - inj, inj <= tn + 1e-6))
    return rows


def _cjson(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


def _run_job(job):
    """Worker entry point; ``job`` is a plain tuple so it pickles cleanly."""
    order_key, gspec, p, fid, fvals, suite, seed, solver, inclusion_q = job
    G = group_from_spec(gspec)
    t0 = time.perf_counter()
    if fid is None:
        rows = _group_suite(G, p, suite, seed, solver)
        witness = None
    else:
        row, _, witness = _suite_cell(G, p, fid, GroupFunction(G, fvals), suite, seed, solver, inclusion_q)
        rows = [row] if row is not None else []
    return order_key, rows, witness, time.perf_counter() - t0, seed


def build_jobs(spec: ExperimentSpec) -> list[tuple]:
    jobs = []
    for gi, gspec in enumerate(spec.groups):
        G = group_from_spec(gspec)
        funcs = expand_functions(G, spec.functions, spec.seed)
        for pi, p in enumerate(spec.p_grid):
            for si, suite in enumerate(spec.suites):
                if suite in GROUP_SUITES:
                    key = (G.label, p, "", suite)
                    jobs.append(((gi, pi, si, -1), gspec, p, None, None, suite,
                                 job_seed(spec.seed, key), spec.solver, spec.inclusion_q))
                    continue
                for fi, (fid, f) in enumerate(funcs):
                    key = (G.label, p, fid, suite)
                    jobs.append(((gi, pi, si, fi), gspec, p, fid, np.asarray(f.values), suite,
                                 job_seed(spec.seed, key), spec.solver, spec.inclusion_q))
    return jobs


@dataclass
class RunResult:
    rows: list[dict]
    csv_text: str
    manifest: dict
    records: list[dict]
    out_dir: Path | None

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.rows if not r["pass"]]

    @property
    def exit_code(self) -> int:
        return 0 if not self.failures else 1


def render_csv(rows, timings=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for i, r in enumerate(rows):
        secs = "" if timings is None else format(timings[i], ".3f")
        w.writerow([r["group"], r["p"], r["function"], r["suite"], _fmt(r["lower"]),
                    _fmt(r["upper"]), _fmt(r["oracle"]), _fmt(r["margin"]), _fmt(r["pass"]), secs])
    return buf.getvalue()


def run(spec: ExperimentSpec, jobs: int = 1, write: bool = True) -> RunResult:
    """Run every suite of an experiment and (optionally) write the report files.

    Files: ``results.csv`` (deterministic body), ``brackets.json`` (norm
    records), ``witnesses.json`` and ``manifest.json`` (provenance and timings).
    """
    started = datetime.now(timezone.utc).isoformat()
    job_list = build_jobs(spec)
    if jobs > 1 and len(job_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, job_list))
    else:
        results = [_run_job(j) for j in job_list]
    results.sort(key=lambda r: r[0])
    rows, timings, records, witnesses = [], [], [], {}
    for order_key, job_rows, witness, secs, seed in results:
        for r in job_rows:
            rows.append(r)
            timings.append(secs / max(len(job_rows), 1))
            ref = None
            if witness is not None:
                ref = "|".join([r["group"], r["p"], r["function"], r["suite"]])
                witnesses[ref] = witness
            if r["suite"] in ("bracket", "oracle"):
                records.append({"group": r["group"], "p": r["p"], "function_id": r["function"],
                                "lower": r["lower"], "upper": r["upper"], "oracle": r["oracle"],
                                "witnesses_ref": ref, "seed": int(seed)})
    csv_text = render_csv(rows, timings if spec.record_timings else None)
    manifest = {
        "tool": "bpalg", "version": __version__, "python": sys.version.split()[0],
        "platform": platform.platform(), "numpy": np.__version__,
        "scipy": __import__("scipy").__version__,
        "started": started, "finished": datetime.now(timezone.utc).isoformat(),
        "seed": spec.seed, "spec": spec.resolved(), "jobs": jobs,
        "rows": len(rows), "failures": sum(not r["pass"] for r in rows),
        "timings": [{"group": r["group"], "p": r["p"], "function": r["function"],
                     "suite": r["suite"], "seconds": t} for r, t in zip(rows, timings)],
    }
    out_dir = None
    if write:
        out_dir = Path(spec.out_dir or os.environ.get(OUT_ENV, "bpalg-out"))
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.csv").write_text(csv_text)
        (out_dir / "brackets.json").write_text(json.dumps(records, indent=1))
        (out_dir / "witnesses.json").write_text(json.dumps(witnesses))
        (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1, default=_json_default))
    return RunResult(rows, csv_text, manifest, records, out_dir)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


# ---------------------------------------------------------------- describe

def describe(obj_id: str, p=2) -> dict:
    """JSON-ready dump for ``"Z3"``, ``"Z3:regular"``, ``"Z3:trivial"``, ``"Z3:chi1"``,
    ``"Z3:delta_e"``, ``"Z3:delta_2"`` or ``"Z3:const1"``."""
    gpart, _, item = obj_id.partition(":")
    try:
        G = group_from_spec(gpart)
    except ValueError as exc:
        raise KeyError(f"unknown group {gpart!r}") from exc
    if not item:
        return {"kind": "group", **G.to_json(), "abelian": G.is_abelian,
                "element_orders": [G.element_order(a) for a in range(G.order)]}
    if item in ("regular", "trivial") or item.startswith("chi"):
        if item == "regular":
            rep = make_regular(G, p)
        elif item == "trivial":
            rep = make_trivial(SubquotientSpace.full(1, p), G)
        else:
            reps = all_characters(G, p)
            k = int(item[3:]) if item[3:].isdigit() else -1
            if not 0 <= k < len(reps):
                raise KeyError(f"unknown character {item!r}")
            rep = reps[k]
        return {"kind": "representation", "group": G.label, "label": rep.label,
                "dim": rep.space.dim, "p": rep.pnorm.label(),
                "matrices": [[[_cnum(z) for z in row] for row in M] for M in rep.ops]}
    funcs = dict(expand_functions(G, ["delta_e", "deltas", "constant", "characters"], DEFAULT_SEED))
    if item not in funcs:
        raise KeyError(f"unknown object {obj_id!r}")
    return {"kind": "function", "group": G.label, "id": item, "values": funcs[item].to_json()}


def _cnum(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]
