"""Acceptance gate: one test per shipped guarantee, one printed line each.

Run with ``pytest -s tests/test_acceptance.py`` to see every verdict line;
without ``-s`` the lines surface only for failing criteria.
"""

import cmath
import math
import time
from importlib.resources import files

import numpy as np
import pytest
import sympy as sp

from meancover import (
    FunctionSpec,
    NotUnivalent,
    annulus_domain,
    beurling_criterion_check,
    certified_radius,
    certified_radius_symbolic,
    classify_case,
    discrete_modulus,
    extremal_metric,
    find_omitted_point,
    growth_function,
    inner_radius,
    koebe_univalent_check,
    lift_family,
    max_modulus_on_circle,
    monotone_intervals,
    parse_spec,
    rectangle_domain,
    reference_curve,
    standard_test_suite,
)
from meancover.funcmodel import Scale
from meancover.harness import (
    UNIVERSAL_RADIUS,
    cmd_area,
    cmd_counterexample,
    cmd_verify,
    load_config,
)
from meancover.modulus import AdmissibleMetric

UNIVALENT_MEMBERS = [
    "mono(1)",
    "poly[0,1,0.2]",
    "omit(zeta=0.125,k=3)",
    "omit(zeta=0.35,k=1.2)",
    "dilate(prod(poly[0,1],comp(mono(2),mobiusg[(0,0),(1,0),(-1,0),(1,0)])),0.9)",
]


def _verdict(num, label, ok):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {label}")
    return ok


@pytest.fixture(scope="module")
def default_cfg_path():
    return str(files("meancover") / "data" / "default_corpus.cfg")


@pytest.fixture(scope="module")
def area_run(default_cfg_path):
    t0 = time.monotonic()
    rep = cmd_area(load_config(default_cfg_path, jobs=4))
    return rep, time.monotonic() - t0


@pytest.fixture(scope="module")
def verify_run(default_cfg_path):
    t0 = time.monotonic()
    rep = cmd_verify(load_config(default_cfg_path, jobs=4))
    return rep, time.monotonic() - t0


def _pipeline(text):
    spec = parse_spec(text)
    M1 = max_modulus_on_circle(spec, 1.0)
    M = 1.0 if M1 >= 1.02 else 0.95 * M1
    om = find_omitted_point(spec, M)
    g = FunctionSpec.of(Scale(cmath.exp(1j * om.rotation) * om.scale, spec.root))
    inner = inner_radius(g, 1.0)
    curve = reference_curve(g, inner, om.normalized_zeta, 512)
    label = classify_case(curve.zeta, curve)
    intervals = monotone_intervals(curve, label.u_range)
    fams = [lift_family(g, curve.zeta, curve, iv, n_u=64) for iv in intervals]
    return g, curve, label, fams


@pytest.fixture(scope="module")
def lift_pipelines(verify_run):
    rep, _ = verify_run
    completed = [r["spec"] for r in rep.records if not r.get("skip")]
    return {text: _pipeline(text) for text in completed}


def test_criterion_01_power_degree_law():
    t0 = time.monotonic()
    worst = 0.0
    for n in range(1, 7):
        spec = parse_spec(f"mono({n})")
        for r in (0.2, 0.5, 0.8):
            worst = max(worst, abs(growth_function(spec, r) - float(n)))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-4 and elapsed < 30.0
    assert _verdict(
        1, f"mean coverage of z^n equals n (max dev {worst:.2e}, {elapsed:.1f}s)", ok
    )


def test_criterion_02_area_oracles_triangle(area_run):
    rep, elapsed = area_run
    n = len(rep.records)
    all_ok = (
        n == 12
        and rep.passed
        and all(c["passed"] for r in rep.records for c in r["checks"])
    )
    ok = all_ok and elapsed < 300.0
    assert _verdict(
        2, f"three area oracles agree pairwise on {n} specs ({elapsed:.1f}s)", ok
    )


def test_criterion_03_boundary_counterexample(default_cfg_path):
    rep = cmd_counterexample(load_config(default_cfg_path))
    eps_seen = [r["eps"] for r in rep.records]
    ok = (
        rep.passed
        and eps_seen == ["0.1", "0.01"]
        and all(r["exact_value"] == "-1/1" for r in rep.records)
        and all(c["passed"] for r in rep.records for c in r["checks"])
    )
    assert _verdict(
        3, "pole family pins -1 on the boundary with disk energy below pi", ok
    )


def test_criterion_04_lift_oracle():
    t0 = time.monotonic()
    g, curve, label, fams = _pipeline("omit(zeta=0.125,k=3)")
    (fam,) = fams
    zeta, k = 0.125, 3.0
    worst_pt = worst_T = 0.0
    for path in fam:
        exact = (np.log(path.u / zeta) + 1j * (path.t - math.pi)) / k
        worst_pt = max(worst_pt, float(np.abs(path.alpha - exact).max()))
        T_exact = math.pi + math.sqrt(k * k - math.log(path.u / zeta) ** 2)
        worst_T = max(worst_T, abs(path.T - T_exact))
    elapsed = time.monotonic() - t0
    ok = (
        len(fam) == 64
        and worst_pt <= 1e-6
        and worst_T <= 1e-4
        and elapsed < 60.0
    )
    assert _verdict(
        4,
        "64 lifted circles match the explicit inverse "
        f"(pointwise {worst_pt:.1e}, exit {worst_T:.1e}, {elapsed:.1f}s)",
        ok,
    )


def test_criterion_05_coarea_identity(verify_run):
    rep, _ = verify_run
    completed = [r for r in rep.records if not r.get("skip")]
    ok = len(completed) >= 1
    for r in completed:
        c = r["coarea"]
        ok = ok and c["diff"] <= 1e-3
        ok = ok and c["lhs"] <= c["A1"] + c["A1_error"] + 1e-3
    assert _verdict(
        5,
        f"swept-length integral matches and stays below the disk energy "
        f"on {len(completed)} instances",
        ok,
    )


def test_criterion_06_modulus_sandwich(verify_run):
    rep, _ = verify_run
    completed = [r for r in rep.records if not r.get("skip")]
    ok = len(completed) >= 1
    for r in completed:
        m = r["modulus"]
        ok = ok and m["upper"] >= m["lower_s3"] - 1e-3
        ok = ok and m["upper"] >= m["lower_s2"] - 1e-3
    assert _verdict(
        6,
        f"annulus modulus dominates both lower bounds on {len(completed)} instances",
        ok,
    )


def test_criterion_07_universal_radius():
    v = certified_radius(1.0 / (12.0 * math.pi))
    expr = certified_radius_symbolic(sp.Rational(1, 12) / sp.pi)
    ok = (
        v == math.exp(-24.0 * math.pi**2)
        and v == UNIVERSAL_RADIUS
        and sp.simplify(expr - sp.exp(-24 * sp.pi**2)) == 0
        and f"{v:.3e}" == "1.344e-103"
    )
    assert _verdict(7, "certified radius floor reproduces exp(-24 pi^2) exactly", ok)


def test_criterion_08_discrete_modulus_oracle():
    dom = rectangle_domain(2.0, 1.0, 1 / 160)
    cells = int(np.count_nonzero(dom.inside))
    rect = discrete_modulus(dom)
    dual = rect * discrete_modulus(
        rectangle_domain(2.0, 1.0, 1 / 160, marked="horizontal")
    )
    ok = cells >= 200 * 200 and abs(rect - 0.5) <= 1e-2 and abs(dual - 1.0) <= 2e-2
    for r, closed in ((0.2, 3.903962531662343), (0.5, 9.064720283654388)):
        got = discrete_modulus(annulus_domain(r, 1 / 200))
        ok = ok and abs(got - closed) / closed <= 2e-2
    assert _verdict(
        8, "grid modulus reproduces rectangle and annulus closed forms", ok
    )


def test_criterion_09_beurling_extremality(lift_pipelines):
    ok = len(lift_pipelines) >= 1
    worst = 0.0
    for text, (g, curve, label, fams) in lift_pipelines.items():
        metric = extremal_metric(g, curve.zeta, fams)
        for fam in fams:
            verdict = beurling_criterion_check(
                metric, [p.alpha for p in fam], standard_test_suite(metric)
            )
            worst = max(worst, verdict.condition1_max_dev)
            ok = ok and verdict.condition1_max_dev <= 1e-3 and verdict.condition2_ok

    # constant-density control: on a 2 x 1 rectangle the extremal metric is
    # flat, and its mass must land on the discrete oracle
    xs, ys = np.linspace(0.0, 2.0, 161), np.linspace(0.0, 1.0, 81)
    flat = AdmissibleMetric(
        xs=xs, ys=ys, rho=np.full((81, 161), 0.5), tag="flat", line_fn=None
    )
    family = [
        np.linspace(0.0, 2.0, 401) + 1j * y for y in np.linspace(0.05, 0.95, 9)
    ]
    verdict = beurling_criterion_check(flat, family, standard_test_suite(flat))
    grid = discrete_modulus(rectangle_domain(2.0, 1.0, 1 / 64))
    ok = (
        ok
        and verdict.condition1_ok
        and verdict.condition2_ok
        and abs(flat.mass() - grid) <= 1e-2
    )
    assert _verdict(
        9,
        f"extremal metrics pass both variational conditions (worst dev {worst:.1e})",
        ok,
    )


def test_criterion_10_growth_monotone(default_cfg_path):
    corpus = load_config(default_cfg_path).corpus
    analytic = [t for t in corpus if parse_spec(t).analyticity_flag]
    rs = np.linspace(0.05, 0.95, 10)
    ok = len(analytic) == 11
    for text in analytic:
        spec = parse_spec(text)
        ms = np.array([max_modulus_on_circle(spec, float(r)) for r in rs])
        ok = ok and bool(np.all(np.diff(ms) > 0))
    assert _verdict(
        10, f"max modulus grows strictly in r on {len(analytic)} analytic specs", ok
    )


def test_criterion_11_univalent_containment():
    ok = True
    for text in UNIVALENT_MEMBERS:
        ok = ok and koebe_univalent_check(parse_spec(text), 1.0) is True
    try:
        koebe_univalent_check(parse_spec("mobius(eps=0.1)"), 1.0)
        ok = False
    except NotUnivalent:
        pass
    assert _verdict(
        11,
        f"{len(UNIVALENT_MEMBERS)} univalent specs keep the 1/16 circle inside "
        "the target disk",
        ok,
    )
