"""End-to-end drivers behind the ``meancover`` command line.

Each ``cmd_*`` function consumes a :class:`RunConfig` and returns a
:class:`RunReport` whose records are plain JSON-safe dictionaries.  Every
pass/fail entry names the invariant being checked together with the
measured slack, so a report is auditable without rerunning anything.
Reports are bit-for-bit reproducible for a fixed config: quadrature and
counting are deterministic, and the Monte Carlo oracle is a pure function
of its sample count and seed.  Per-spec work may fan out over processes;
the reduction always reassembles records in corpus order.
"""

from __future__ import annotations

import cmath
import configparser
import csv
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from io import StringIO
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import svg
from .coverage import (
    COUNT_DEFAULTS,
    QUAD_DEFAULTS,
    area_by_counting,
    find_omitted_point,
    growth_function,
    inner_radius,
    monte_carlo_area,
    sublevel_area,
)
from .errors import ConfigError, MeancoverError
from .funcmodel import (
    FunctionSpec,
    Scale,
    evaluate,
    make_family,
    max_modulus_on_circle,
    parse_spec,
)
from .kvconfig import parse_kv
from .lifting import (
    LIFT_DEFAULTS,
    beta_length,
    classify_case,
    coarea_check,
    lift_family,
    monotone_intervals,
    reference_curve,
)
from .modulus import build_report

# universal containment floor exp(-24 pi^2); any certified radius may be
# compared against it but never falls below it
UNIVERSAL_RADIUS = math.exp(-24.0 * math.pi * math.pi)
UNIVERSAL_RADIUS_SYMBOLIC = "exp(-24*pi^2)"

TOL_DEFAULTS = {
    "pair_rel": 0.01,
    "coarea_abs": 1e-3,
    "sandwich_slack": 1e-3,
    # quadrature noise floor; a curve sitting exactly at mean coverage one
    # must not be highlighted as dipping
    "below_one_tol": 1e-6,
}

MC_DEFAULTS = {"n": 160000, "seed": 1234}

AREA_DEFAULTS = {"m_source": "circle", "m_radius": 0.5, "m_values": ""}

GROWTH_DEFAULTS = {"r_values": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"}

VERIFY_DEFAULTS = {
    "n_u": 64,
    "curve_samples": 512,
    "m_big": 1.02,
    "m_shrink": 0.95,
    "r_probe": 0.01,
}

SEARCH_DEFAULTS = {"r_lo": 0.06, "r_hi": 0.95, "coarse": 10, "iters": 14}

CX_DEFAULTS = {
    "eps": "0.1,0.01",
    "quads": "depth=16,budget=2000000,target=2e-5;depth=22,budget=2000000,target=4e-6",
    "value_tol": 1e-12,
}

_KNOWN_SECTIONS = {
    "corpus",
    "tolerances",
    "quadrature",
    "counting",
    "montecarlo",
    "area",
    "growth",
    "verify",
    "search",
    "counterexample",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: corpus, oracle settings, tolerances."""

    corpus: tuple[str, ...]
    tol: dict
    quad: dict
    count: dict
    mc: dict
    area: dict
    growth_r: tuple[float, ...]
    verify: dict
    search: dict
    cx: dict
    out_dir: Path
    jobs: int = 1


@dataclass(frozen=True)
class RunReport:
    """Ordered per-spec records plus a global summary and violation list."""

    command: str
    records: tuple
    summary: dict
    violations: tuple
    passed: bool
    artifacts: dict = field(repr=False, compare=False, default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "records": list(self.records),
            "summary": self.summary,
            "violations": list(self.violations),
            "passed": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _check(invariant: str, passed: bool, slack: float) -> dict:
    return {"invariant": invariant, "passed": bool(passed), "slack": float(slack)}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _floats(raw: str) -> tuple[float, ...]:
    parts = [p for p in raw.replace(",", " ").split() if p]
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"expected a list of numbers, got {raw!r}") from exc


def load_config(
    path,
    *,
    out_dir=None,
    jobs: Optional[int] = None,
    seed: Optional[int] = None,
) -> RunConfig:
    """Read an INI run configuration and validate every numeric range."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(str(path)):
        raise ConfigError(f"cannot read config file {path}")
    unknown = set(cp.sections()) - _KNOWN_SECTIONS
    _require(not unknown, f"unknown config sections: {sorted(unknown)}")

    def section(name: str) -> dict:
        return dict(cp.items(name)) if cp.has_section(name) else {}

    members_raw = section("corpus").get("members", "")
    corpus = tuple(line.strip() for line in members_raw.splitlines() if line.strip())
    for i, text in enumerate(corpus):
        try:
            parse_spec(text)
        except MeancoverError as exc:
            raise ConfigError(f"corpus member {i} ({text!r}): {exc}") from exc

    tol = parse_kv(section("tolerances"), TOL_DEFAULTS)
    quad = parse_kv(section("quadrature"), QUAD_DEFAULTS)
    count = parse_kv(section("counting"), COUNT_DEFAULTS)
    mc = parse_kv(section("montecarlo"), MC_DEFAULTS)
    area = parse_kv(section("area"), AREA_DEFAULTS)
    growth = parse_kv(section("growth"), GROWTH_DEFAULTS)
    verify = parse_kv(section("verify"), VERIFY_DEFAULTS)
    search = parse_kv(section("search"), SEARCH_DEFAULTS)
    cx = parse_kv(section("counterexample"), CX_DEFAULTS)

    if seed is not None:
        mc["seed"] = int(seed)
    njobs = int(jobs) if jobs is not None else 1

    _require(njobs >= 1, f"jobs must be at least 1, got {njobs}")
    _require(all(t > 0 for t in tol.values()), "tolerances must be positive")
    _require(mc["n"] >= 10_000, f"montecarlo n must be at least 1e4, got {mc['n']}")
    _require(area["m_source"] in ("circle", "explicit"),
             f"area m_source must be circle or explicit, got {area['m_source']!r}")
    _require(0.0 < area["m_radius"] < 1.0, "area m_radius must lie in (0, 1)")
    m_values = _floats(area["m_values"]) if area["m_values"] else ()
    _require(all(m > 0 for m in m_values), "area m_values must be positive")
    _require(
        not m_values or len(m_values) in (1, len(corpus)),
        "area m_values must give one level or one per corpus member",
    )
    growth_r = _floats(growth["r_values"])
    _require(bool(growth_r), "growth r_values must be nonempty")
    _require(all(0.0 < r < 1.0 for r in growth_r), "growth radii must lie in (0, 1)")
    _require(list(growth_r) == sorted(growth_r), "growth radii must be ascending")
    _require(verify["n_u"] >= 4, "verify n_u must be at least 4")
    _require(verify["curve_samples"] >= 64, "verify curve_samples must be at least 64")
    _require(verify["m_big"] > 1.0, "verify m_big must exceed 1")
    _require(0.0 < verify["m_shrink"] < 1.0, "verify m_shrink must lie in (0, 1)")
    _require(0.0 < verify["r_probe"] <= 0.5, "verify r_probe must lie in (0, 0.5]")
    _require(0.0 < search["r_lo"] < search["r_hi"] < 1.0,
             "search radii must satisfy 0 < r_lo < r_hi < 1")
    _require(search["coarse"] >= 2, "search coarse grid needs at least 2 points")
    _require(search["iters"] >= 1, "search needs at least 1 bisection step")
    eps_list = [p.strip() for p in cx["eps"].split(",") if p.strip()]
    _require(bool(eps_list), "counterexample eps list must be nonempty")
    for p in eps_list:
        try:
            val = Fraction(p)
        except ValueError as exc:
            raise ConfigError(f"counterexample eps {p!r} is not rational") from exc
        _require(0 < val < 1, f"counterexample eps must lie in (0, 1), got {p}")
    for chunk in cx["quads"].split(";"):
        parse_kv(chunk, QUAD_DEFAULTS)

    return RunConfig(
        corpus=corpus,
        tol=tol,
        quad=quad,
        count=count,
        mc=mc,
        area=dict(area, m_values=m_values),
        growth_r=growth_r,
        verify=verify,
        search=search,
        cx=cx,
        out_dir=Path(out_dir) if out_dir is not None else Path("meancover-out"),
        jobs=njobs,
    )


def _slug(text: str, idx: int) -> str:
    s = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")[:40]
    return f"{idx:02d}-{s or 'spec'}"


def _pmap(fn, args: Sequence[tuple], jobs: int) -> list:
    if jobs <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, args))


def _collect(records, extra_checks=()) -> tuple[tuple, bool]:
    violations = []
    for rec in records:
        name = rec.get("spec", rec.get("eps", "?"))
        err = rec.get("error")
        if err is not None:
            violations.append(f"{name}: {err['type']}: {err['message']}")
        for chk in rec.get("checks", ()):
            if not chk["passed"]:
                violations.append(
                    f"{name}: {chk['invariant']} (slack {chk['slack']:.6g})"
                )
    for chk in extra_checks:
        if not chk["passed"]:
            violations.append(f"summary: {chk['invariant']} (slack {chk['slack']:.6g})")
    return tuple(violations), not violations


def _csv_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# area sweep
# ---------------------------------------------------------------------------


def _est_dict(est) -> dict:
    return {
        "value": float(est.value),
        "error_bound": float(est.error_bound),
        "samples": int(est.sample_count),
    }


def _area_worker(arg: tuple) -> dict:
    idx, text, level, quad, count, mc_n, mc_seed, tol = arg
    rec: dict = {"index": idx, "spec": text, "checks": [], "flags": []}
    try:
        spec = parse_spec(text)
        M = level if level is not None else max_modulus_on_circle(spec, 0.5)
        rec["M"] = float(M)
        ests = {
            "quadrature": sublevel_area(spec, M, quad),
            "counting": area_by_counting(spec, M, count),
            "monte-carlo": monte_carlo_area(spec, M, mc_n, mc_seed),
        }
        rec["estimates"] = {k: _est_dict(v) for k, v in ests.items()}
        names = list(ests)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a, b = ests[names[i]], ests[names[j]]
                diff = abs(a.value - b.value)
                thr = max(
                    tol["pair_rel"] * max(abs(a.value), abs(b.value)),
                    a.error_bound + b.error_bound,
                )
                rec["checks"].append(
                    _check(
                        f"area oracles agree pairwise ({names[i]} vs {names[j]})",
                        diff <= thr,
                        thr - diff,
                    )
                )
        q = ests["quadrature"]
        if not spec.analyticity_flag and q.value + q.error_bound < math.pi * M * M:
            rec["flags"].append("counterexample-regime")
    except MeancoverError as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return rec


def cmd_area(config: RunConfig) -> RunReport:
    """Run all three area oracles on every corpus member and compare them."""
    m_values = config.area["m_values"]
    levels: list[Optional[float]]
    if config.area["m_source"] == "explicit":
        _require(bool(m_values), "area m_source=explicit needs m_values")
    if m_values:
        levels = (
            [m_values[0]] * len(config.corpus)
            if len(m_values) == 1
            else list(m_values)
        )
    else:
        levels = [None] * len(config.corpus)
    args = [
        (
            i,
            text,
            levels[i],
            dict(config.quad),
            dict(config.count),
            config.mc["n"],
            config.mc["seed"],
            dict(config.tol),
        )
        for i, text in enumerate(config.corpus)
    ]
    records = _pmap(_area_worker, args, config.jobs)
    rows = []
    for rec in records:
        for method, est in rec.get("estimates", {}).items():
            rows.append(
                [
                    rec["spec"],
                    repr(rec["M"]),
                    method,
                    repr(est["value"]),
                    repr(est["error_bound"]),
                    est["samples"],
                    ";".join(rec["flags"]),
                ]
            )
    violations, passed = _collect(records)
    failed = sorted(
        {
            rec["spec"]
            for rec in records
            if rec.get("error") or any(not c["passed"] for c in rec["checks"])
        }
    )
    summary = {
        "n_specs": len(config.corpus),
        "failed_specs": failed,
        "mc_seed": config.mc["seed"],
        "m_rule": (
            "explicit" if m_values else f"max modulus on |z| = {config.area['m_radius']}"
        ),
    }
    artifacts = {
        "area.csv": _csv_table(
            ["spec", "M", "method", "value", "error_bound", "samples", "flags"], rows
        )
    }
    return RunReport("area", tuple(records), summary, violations, passed, artifacts)


# ---------------------------------------------------------------------------
# growth curves
# ---------------------------------------------------------------------------


def _growth_worker(arg: tuple) -> dict:
    idx, text, r_values, quad, dip_tol = arg
    rec: dict = {"index": idx, "spec": text, "checks": [], "rows": []}
    try:
        spec = parse_spec(text)
        for r in r_values:
            try:
                v = float(growth_function(spec, r, quad))
                rec["rows"].append({"r": r, "growth": v, "below_one": v < 1.0 - dip_tol})
            except MeancoverError as exc:
                rec["rows"].append(
                    {"r": r, "growth": None, "below_one": None, "note": str(exc)}
                )
    except MeancoverError as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return rec


def cmd_growth(config: RunConfig) -> RunReport:
    """Sample the mean coverage on an r-grid and plot one curve per spec."""
    args = [
        (i, text, tuple(config.growth_r), dict(config.quad), config.tol["below_one_tol"])
        for i, text in enumerate(config.corpus)
    ]
    records = _pmap(_growth_worker, args, config.jobs)
    rows = []
    artifacts = {}
    for rec in records:
        pts = [
            (row["r"], row["growth"], row["below_one"])
            for row in rec["rows"]
            if row["growth"] is not None
        ]
        for row in rec["rows"]:
            rows.append(
                [
                    rec["spec"],
                    repr(row["r"]),
                    "" if row["growth"] is None else repr(row["growth"]),
                    "" if row["below_one"] is None else int(row["below_one"]),
                ]
            )
        if len(pts) >= 2:
            name = f"growth-{_slug(rec['spec'], rec['index'])}.svg"
            artifacts[name] = svg.growth_curve(
                [p[0] for p in pts],
                [p[1] for p in pts],
                below=[p[2] for p in pts],
                title=rec["spec"],
            )
    violations, passed = _collect(records)
    below = sorted(
        {
            rec["spec"]
            for rec in records
            for row in rec["rows"]
            if row.get("below_one")
        }
    )
    summary = {"n_specs": len(config.corpus), "specs_dipping_below_one": below}
    artifacts["growth.csv"] = _csv_table(["spec", "r", "growth", "below_one"], rows)
    return RunReport("growth", tuple(records), summary, violations, passed, artifacts)


# ---------------------------------------------------------------------------
# theorem verification
# ---------------------------------------------------------------------------


def _containment(rec: dict, spec: FunctionSpec, M: float, cert: float, r_probe: float) -> None:
    r_check = min(r_probe, cert if cert > 0.0 else UNIVERSAL_RADIUS)
    mv = float(max_modulus_on_circle(spec, r_check))
    rec["containment"] = {"r_check": r_check, "max_modulus": mv, "M": float(M)}
    rec["checks"].append(
        _check(
            "image of the certified circle stays inside D(0, M)",
            mv < M,
            float(M - mv),
        )
    )


def _overlay(paths, contact) -> str:
    shown = paths[:: max(1, len(paths) // 10)]
    lines = []
    for p in shown:
        step = max(1, len(p.alpha) // 400)
        pts = list(p.alpha[::step])
        if pts[-1] != p.alpha[-1]:
            pts.append(p.alpha[-1])
        lines.append(pts)
    return svg.disk_overlay(lines, contact=complex(contact))


def _verify_worker(arg: tuple) -> dict:
    idx, text, tol, quad, vcfg = arg
    rec: dict = {"index": idx, "spec": text, "checks": [], "skip": None}
    try:
        spec = parse_spec(text)
        if not spec.analyticity_flag:
            rec["skip"] = "not analytic on the closed unit disk"
            return rec
        M1 = float(max_modulus_on_circle(spec, 1.0))
        M = 1.0 if M1 >= vcfg["m_big"] else vcfg["m_shrink"] * M1
        rec["M"] = M
        rec["M1"] = M1

        est = sublevel_area(spec, M, quad)
        rec["area"] = _est_dict(est)
        hyp_slack = math.pi * M * M - (est.value + est.error_bound)
        rec["hypothesis"] = {"passed": hyp_slack > 0.0, "slack": float(hyp_slack)}
        if hyp_slack <= 0.0:
            rec["skip"] = (
                "mean coverage at least one: "
                f"A(M)+err = {est.value + est.error_bound:.9g} >= "
                f"pi M^2 = {math.pi * M * M:.9g}"
            )
            return rec

        om = find_omitted_point(spec, M)
        if om.zeta is None:
            rec["checks"].append(
                _check(
                    "omitted point exists under the area hypothesis",
                    False,
                    float(hyp_slack),
                )
            )
            return rec
        rec["omitted"] = {
            "zeta": [om.zeta.real, om.zeta.imag],
            "normalized": float(om.normalized_zeta),
            "scan_resolution": float(om.scan_resolution),
        }

        factor = cmath.exp(1j * om.rotation) * om.scale
        g = FunctionSpec.of(Scale(factor, spec.root))
        zn = float(om.normalized_zeta)
        inner = inner_radius(g, 1.0)
        rec["inner"] = {"r": float(inner.r), "a": [inner.a.real, inner.a.imag]}
        curve = reference_curve(g, inner, zn, n_samples=vcfg["curve_samples"])
        label = classify_case(zn, curve)
        rec["case"] = {
            "label": label.case,
            "m": float(label.m),
            "Mx": float(label.Mx),
            "u_range": [float(label.u_range[0]), float(label.u_range[1])],
            "comparability_C": (
                None if label.comparability_C is None else float(label.comparability_C)
            ),
        }
        if label.case == "rectangle":
            rec["case"]["rectangle_params"] = {
                "u_range": list(label.rectangle_params["u_range"]),
                "center": label.rectangle_params["center"],
            }
            rec["skip"] = "rectangle case: circle-family lifting out of scope"
            _containment(rec, spec, M, UNIVERSAL_RADIUS, vcfg["r_probe"])
            return rec

        intervals = monotone_intervals(curve, label.u_range)
        rec["n_intervals"] = len(intervals)
        families = [
            lift_family(g, zn, curve, iv, n_u=vcfg["n_u"]) for iv in intervals
        ]
        paths = [p for fam in families for p in fam]
        fmax = max(p.fidelity for p in paths)
        reached = sum(p.termination == "reached-boundary" for p in paths)
        rec["lift"] = {
            "n_paths": len(paths),
            "max_fidelity": float(fmax),
            "reached_boundary": int(reached),
        }
        rec["checks"].append(
            _check(
                "every lifted path reaches the unit circle",
                reached == len(paths),
                float(reached - len(paths)),
            )
        )
        rec["checks"].append(
            _check(
                "lift fidelity within the projection tolerance",
                fmax <= LIFT_DEFAULTS["lift_tol"],
                float(LIFT_DEFAULTS["lift_tol"] - fmax),
            )
        )

        co = coarea_check(
            g, zn, intervals, u_grid=vcfg["n_u"], curve=curve,
            families=families, quad_cfg=quad,
        )
        diff = abs(co.lhs - co.rhs_direct)
        rec["coarea"] = {
            "lhs": float(co.lhs),
            "rhs_direct": float(co.rhs_direct),
            "diff": float(diff),
            "A1": float(co.A1.value),
            "A1_error": float(co.A1.error_bound),
        }
        rec["checks"].append(
            _check(
                "coarea identity holds within tolerance",
                diff <= tol["coarea_abs"],
                float(tol["coarea_abs"] - diff),
            )
        )
        energy_slack = co.A1.value + co.A1.error_bound + tol["coarea_abs"] - co.lhs
        rec["checks"].append(
            _check(
                "swept length integral stays below the disk energy",
                energy_slack >= 0.0,
                float(energy_slack),
            )
        )

        us = [float(p.u) for p in paths]
        lengths = [float(beta_length(p)) for p in paths]
        report = build_report(
            float(inner.r),
            us,
            lengths,
            u_range=label.u_range,
            comparability_C=label.comparability_C,
            provenance={"spec": text, "case": label.case},
        )
        rec["modulus"] = report.to_json()
        rec["checks"].append(
            _check(
                "annulus modulus dominates the boundary-mass lower bound",
                report.upper >= report.lower_s3 - tol["sandwich_slack"],
                float(report.upper - report.lower_s3),
            )
        )
        rec["checks"].append(
            _check(
                "annulus modulus dominates the symmetrized chain bound",
                report.upper >= report.lower_s2 - tol["sandwich_slack"],
                float(report.upper - report.lower_s2),
            )
        )

        cert = max(report.certified_r_s2, report.certified_r_s3)
        _containment(rec, spec, M, cert, vcfg["r_probe"])
        rec["_svg"] = _overlay(paths, inner.a)
    except (MeancoverError, AssertionError) as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return rec


def cmd_verify(config: RunConfig) -> RunReport:
    """Drive the full pipeline on every corpus member meeting the hypothesis."""
    args = [
        (i, text, dict(config.tol), dict(config.quad), dict(config.verify))
        for i, text in enumerate(config.corpus)
    ]
    records = _pmap(_verify_worker, args, config.jobs)
    artifacts = {}
    rows = []
    cases: dict = {}
    min_cert = None
    for rec in records:
        overlay = rec.pop("_svg", None)
        if overlay is not None:
            artifacts[f"lifts-{_slug(rec['spec'], rec['index'])}.svg"] = overlay
        mod = rec.get("modulus")
        if mod is not None:
            cert = max(mod["certified_r_s2"], mod["certified_r_s3"])
            min_cert = cert if min_cert is None else min(min_cert, cert)
        case = rec.get("case", {}).get("label")
        if case is not None:
            cases[case] = cases.get(case, 0) + 1
        co = rec.get("coarea", {})
        rows.append(
            [
                rec["spec"],
                "" if rec.get("M") is None else repr(rec["M"]),
                case or "",
                rec.get("skip") or "",
                repr(mod["inner_r"]) if mod else "",
                repr(mod["upper"]) if mod else "",
                repr(mod["lower_s2"]) if mod else "",
                repr(mod["lower_s3"]) if mod else "",
                repr(mod["certified_r_s2"]) if mod else "",
                repr(mod["certified_r_s3"]) if mod else "",
                repr(co["lhs"]) if co else "",
                repr(co["rhs_direct"]) if co else "",
            ]
        )
    violations, passed = _collect(records)
    completed = [r for r in records if r.get("modulus") is not None]
    summary = {
        "n_specs": len(config.corpus),
        "n_completed": len(completed),
        "n_skipped": sum(1 for r in records if r.get("skip")),
        "case_counts": dict(sorted(cases.items())),
        "min_certified_radius": min_cert,
        "universal_radius": UNIVERSAL_RADIUS,
        "universal_radius_symbolic": UNIVERSAL_RADIUS_SYMBOLIC,
    }
    artifacts["verify.csv"] = _csv_table(
        [
            "spec",
            "M",
            "case",
            "skip",
            "inner_r",
            "upper",
            "lower_s2",
            "lower_s3",
            "certified_r_s2",
            "certified_r_s3",
            "coarea_lhs",
            "coarea_rhs_direct",
        ],
        rows,
    )
    return RunReport("verify", tuple(records), summary, violations, passed, artifacts)


# ---------------------------------------------------------------------------
# sharp-constant search
# ---------------------------------------------------------------------------


def _search_worker(arg: tuple) -> dict:
    idx, text, scfg, quad, dip_tol = arg
    rec: dict = {"index": idx, "spec": text, "checks": [], "skip": None}
    try:
        spec = parse_spec(text)
        if not spec.analyticity_flag:
            rec["skip"] = "excluded from the bracket: not analytic on the closed unit disk"
            return rec

        def dips(r: float) -> tuple[float, bool]:
            v = float(growth_function(spec, r, quad))
            return v, v < 1.0 - dip_tol

        rs = np.linspace(scfg["r_lo"], scfg["r_hi"], int(scfg["coarse"]))
        coarse = []
        first_bad = None
        for i, r in enumerate(rs):
            v, bad = dips(float(r))
            coarse.append({"r": float(r), "growth": v})
            if bad:
                first_bad = i
                break
        rec["coarse"] = coarse
        if first_bad is None:
            # no dip found anywhere on the sampled range; the curve keeps
            # mean coverage up to the rim as far as this run can see
            rec["r_hat"] = 1.0
            rec["censored"] = True
        else:
            lo = float(rs[first_bad - 1]) if first_bad > 0 else 0.0
            hi = float(rs[first_bad])
            for _ in range(int(scfg["iters"])):
                mid = 0.5 * (lo + hi)
                if dips(mid)[1]:
                    hi = mid
                else:
                    lo = mid
            rec["r_hat"] = lo
            rec["censored"] = False
    except MeancoverError as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return rec


def cmd_search_constant(config: RunConfig) -> RunReport:
    """Bracket the universal radius between the certified floor and the
    smallest radius at which any corpus member drops below mean coverage one."""
    args = [
        (i, text, dict(config.search), dict(config.quad), config.tol["below_one_tol"])
        for i, text in enumerate(config.corpus)
    ]
    records = _pmap(_search_worker, args, config.jobs)
    usable = [r for r in records if r.get("r_hat") is not None]
    upper = min((r["r_hat"] for r in usable), default=None)
    witness = None
    if upper is not None:
        witness = min(r["spec"] for r in usable if r["r_hat"] == upper)
    extra = []
    if upper is not None:
        extra.append(
            _check(
                "bracket ordered: exp(-24*pi^2) below the empirical dip radius",
                UNIVERSAL_RADIUS <= upper,
                float(upper - UNIVERSAL_RADIUS),
            )
        )
    violations, passed = _collect(records, extra)
    summary = {
        "n_specs": len(config.corpus),
        "lower_bracket_symbolic": UNIVERSAL_RADIUS_SYMBOLIC,
        "lower_bracket_value": UNIVERSAL_RADIUS,
        "lower_bracket_magnitude": f"{UNIVERSAL_RADIUS:.3e}",
        "upper_bracket": upper,
        "upper_bracket_witness": witness,
        "checks": extra,
    }
    rows = [
        [
            rec["spec"],
            "" if rec.get("r_hat") is None else repr(rec["r_hat"]),
            "" if rec.get("censored") is None else int(rec["censored"]),
            rec.get("skip") or "",
        ]
        for rec in records
    ]
    artifacts = {
        "search_constant.csv": _csv_table(["spec", "r_hat", "censored", "skip"], rows)
    }
    return RunReport(
        "search-constant", tuple(records), summary, violations, passed, artifacts
    )


# ---------------------------------------------------------------------------
# counterexample reproduction
# ---------------------------------------------------------------------------


def cmd_counterexample(config: RunConfig) -> RunReport:
    """Reproduce the meromorphic family violating the containment conclusion.

    The pinned value f(-eps/3) = -1 is established twice: once in exact
    rational arithmetic on the Moebius map itself, once in floating point
    through the evaluator.  The disk energy stays below pi, so the area
    hypothesis holds while the image of every small circle escapes D(0, 1).
    """
    eps_list = [p.strip() for p in config.cx["eps"].split(",") if p.strip()]
    quads = [q for q in config.cx["quads"].split(";") if q.strip()]
    records = []
    rows = []
    for i, eps_str in enumerate(eps_list):
        rec: dict = {"index": i, "eps": eps_str, "checks": []}
        try:
            e = Fraction(eps_str)
            z = -e / 3
            exact = z / (e + 2 * z)
            rec["exact_value"] = f"{exact.numerator}/{exact.denominator}"
            rec["checks"].append(
                _check(
                    "rational evaluation lands exactly on -1",
                    exact == -1,
                    0.0 if exact == -1 else float(abs(exact + 1)),
                )
            )
            spec = make_family("mobius", eps=float(e))
            fv = complex(evaluate(spec, complex(-float(e) / 3.0)))
            dev = abs(fv + 1.0)
            rec["float_deviation"] = float(dev)
            rec["checks"].append(
                _check(
                    "floating evaluation within tolerance of -1",
                    dev <= config.cx["value_tol"],
                    float(config.cx["value_tol"] - dev),
                )
            )
            qcfg = parse_kv(quads[min(i, len(quads) - 1)] if quads else None, config.quad)
            est = sublevel_area(spec, 1.0, qcfg)
            rec["area"] = _est_dict(est)
            pi_slack = math.pi - (est.value + est.error_bound)
            rec["checks"].append(
                _check(
                    "disk energy stays below pi",
                    pi_slack > 0.0,
                    float(pi_slack),
                )
            )
            rows.append(
                [
                    eps_str,
                    rec["exact_value"],
                    repr(float(dev)),
                    repr(est.value),
                    repr(est.error_bound),
                    repr(float(pi_slack)),
                ]
            )
        except MeancoverError as exc:
            rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
        records.append(rec)
    violations, passed = _collect(records)
    summary = {"n_eps": len(eps_list)}
    artifacts = {
        "counterexample.csv": _csv_table(
            ["eps", "exact_value", "float_deviation", "area", "area_error", "pi_slack"],
            rows,
        )
    }
    return RunReport(
        "counterexample", tuple(records), summary, violations, passed, artifacts
    )


COMMANDS = {
    "area": cmd_area,
    "growth": cmd_growth,
    "verify": cmd_verify,
    "search-constant": cmd_search_constant,
    "counterexample": cmd_counterexample,
}


def write_report(report: RunReport, out_dir) -> Path:
    """Write report.json plus all CSV/SVG artifacts; returns the directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    for name, content in report.artifacts.items():
        (out / name).write_text(content)
    return out
