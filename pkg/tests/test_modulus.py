import cmath
import json
import math

import numpy as np
import pytest
import sympy as sp

from meancover import (
    DomainError,
    FunctionSpec,
    MeancoverError,
    SandwichViolation,
    ZeroLength,
    annulus_domain,
    annulus_upper,
    beurling_criterion_check,
    beurling_mass,
    build_report,
    certified_radius,
    certified_radius_symbolic,
    chain_lower_s2,
    classify_case,
    discrete_modulus,
    extremal_metric,
    find_omitted_point,
    generic_lower_s3,
    inner_radius,
    lift_family,
    monotone_intervals,
    parse_spec,
    poletskii_instance_check,
    rectangle_domain,
    reference_curve,
    standard_test_suite,
    sup_metric,
)
from meancover.funcmodel import Scale
from meancover.lifting import LiftedPath
from meancover.modulus import SHARP_LOWER_S3, AdmissibleMetric


def test_annulus_upper_frozen():
    assert annulus_upper(0.2) == pytest.approx(3.903962531662343, abs=1e-12)
    assert annulus_upper(0.5) == pytest.approx(9.064720283654388, abs=1e-12)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.5])
def test_annulus_upper_domain(bad):
    with pytest.raises(DomainError):
        annulus_upper(bad)


def test_chain_lower_s2_sharp_instance():
    # coarea value pi over the band (1/4, 3/4) gives exactly 1/(12 pi)
    assert chain_lower_s2(math.pi, 0.25, 0.75) == 1.0 / (12.0 * math.pi)


def test_generic_lower_s3():
    assert generic_lower_s3(0.6546448450778604) == pytest.approx(
        0.3818864562666283, abs=1e-15
    )
    assert SHARP_LOWER_S3 == pytest.approx(16.0 / (9.0 * math.pi), abs=1e-15)
    # the sharp constant is a reference value, never what the generic bound returns
    assert generic_lower_s3(0.6546448450778604) < SHARP_LOWER_S3


def test_certified_radius():
    assert certified_radius(1.0 / (12.0 * math.pi)) == math.exp(-24.0 * math.pi**2)
    assert certified_radius(1.0) == pytest.approx(math.exp(-2.0 * math.pi), rel=1e-15)
    assert certified_radius(2.0) > certified_radius(1.0)
    with pytest.raises(DomainError):
        certified_radius(0.0)
    with pytest.raises(DomainError):
        certified_radius(-1.0)


def test_certified_radius_symbolic():
    expr = certified_radius_symbolic(sp.Rational(1, 12) / sp.pi)
    assert sp.simplify(expr - sp.exp(-24 * sp.pi**2)) == 0
    assert float(expr) == pytest.approx(1.3441461143716265e-103, rel=1e-12)


def _band_samples(k, n=257):
    us = np.linspace(0.25, 0.75, n)
    return us, np.sqrt(k * k - np.log(us / 0.125) ** 2)


def test_beurling_mass_closed_forms():
    us, ls = _band_samples(3.0)
    closed3 = math.asin(math.log(6.0) / 3.0) - math.asin(math.log(2.0) / 3.0)
    assert closed3 == pytest.approx(0.40691617721189427, abs=1e-15)
    assert beurling_mass((us, ls), 0.25, 0.75) == pytest.approx(closed3, abs=5e-6)
    # stacked pairs are accepted too
    assert beurling_mass(np.stack([us, ls], axis=1), 0.25, 0.75) == pytest.approx(
        closed3, abs=5e-6
    )
    us4, ls4 = _band_samples(4.0)
    closed4 = math.asin(math.log(6.0) / 4.0) - math.asin(math.log(2.0) / 4.0)
    assert closed4 == pytest.approx(0.2902937909296401, abs=1e-15)
    assert beurling_mass((us4, ls4), 0.25, 0.75) == pytest.approx(closed4, abs=5e-6)


def test_beurling_mass_constant_length():
    us = np.linspace(0.25, 0.75, 513)
    got = beurling_mass((us, np.full_like(us, 2.0)), 0.25, 0.75)
    assert got == pytest.approx(math.log(3.0) / 2.0, abs=1e-5)


def test_beurling_mass_zero_length():
    us = np.linspace(0.25, 0.75, 64)
    with pytest.raises(ZeroLength):
        beurling_mass((us, np.zeros_like(us)), 0.25, 0.75)


def test_beurling_mass_band_domain():
    us = np.linspace(0.25, 0.75, 64)
    ls = np.ones_like(us)
    with pytest.raises(DomainError):
        beurling_mass((us, ls), -0.1, 0.5)
    with pytest.raises(MeancoverError):
        beurling_mass((us, ls), 0.8, 0.9)


def test_rectangle_modulus_exact():
    assert discrete_modulus(rectangle_domain(2.0, 1.0, 1 / 64)) == pytest.approx(
        0.5, abs=1e-12
    )
    assert discrete_modulus(
        rectangle_domain(2.0, 1.0, 1 / 64, marked="horizontal")
    ) == pytest.approx(2.0, abs=1e-12)
    assert discrete_modulus(rectangle_domain(1.0, 1.0, 1 / 64)) == pytest.approx(
        1.0, abs=1e-12
    )


def test_rectangle_modulus_duality_and_invariance():
    v = discrete_modulus(rectangle_domain(1.6, 1.0, 1 / 80))
    h = discrete_modulus(rectangle_domain(1.6, 1.0, 1 / 80, marked="horizontal"))
    assert v * h == pytest.approx(1.0, abs=1e-10)
    coarse = discrete_modulus(rectangle_domain(2.0, 1.0, 1 / 32))
    fine = discrete_modulus(rectangle_domain(2.0, 1.0, 1 / 64))
    assert coarse == pytest.approx(fine, abs=1e-12)
    scaled = discrete_modulus(rectangle_domain(4.0, 2.0, 1 / 32))
    assert scaled == pytest.approx(coarse, abs=1e-12)


@pytest.mark.parametrize(
    "r,frozen,closed",
    [
        (0.2, 3.9225394231843436, 3.903962531662343),
        (0.5, 9.11981284993615, 9.064720283654388),
    ],
)
def test_annulus_modulus_discrete(r, frozen, closed):
    got = discrete_modulus(annulus_domain(r, 1 / 200))
    assert got == pytest.approx(frozen, rel=1e-12)
    assert abs(got - closed) / closed < 2e-2


@pytest.fixture(scope="module")
def omit_metric():
    spec = parse_spec("omit(zeta=0.125,k=3)")
    om = find_omitted_point(spec, 1.0)
    g = FunctionSpec.of(Scale(cmath.exp(1j * om.rotation) * om.scale, spec.root))
    inner = inner_radius(g, 1.0)
    curve = reference_curve(g, inner, om.normalized_zeta, 512)
    label = classify_case(curve.zeta, curve)
    intervals = monotone_intervals(curve, label.u_range)
    fams = [lift_family(g, curve.zeta, curve, iv, n_u=32) for iv in intervals]
    metric = extremal_metric(g, curve.zeta, fams)
    return g, curve, fams, metric


def test_extremal_metric_admissible(omit_metric):
    g, curve, fams, metric = omit_metric
    assert metric.tag == "extremal"
    family = [p.alpha for p in fams[0]]
    assert metric.is_admissible(family) is True
    closed = math.asin(math.log(6.0) / 3.0) - math.asin(math.log(2.0) / 3.0)
    assert metric.mass() == pytest.approx(closed, abs=0.02)
    for path in family[::8]:
        assert metric.line_integral(path) == pytest.approx(1.0, abs=1e-9)


def test_beurling_criterion_positive(omit_metric):
    g, curve, fams, metric = omit_metric
    family = [p.alpha for p in fams[0]]
    verdict = beurling_criterion_check(metric, family, standard_test_suite(metric))
    assert verdict.condition1_ok and verdict.condition1_max_dev < 1e-9
    ints = np.asarray(verdict.path_integrals)
    assert np.abs(ints - 1.0).max() < 1e-9
    assert verdict.condition2_ok
    tags = [t["tag"] for t in verdict.test_results]
    assert tags == ["const-1", "coord-x", "coord-y"]
    assert all(t["ok"] for t in verdict.test_results)
    assert verdict.mass == pytest.approx(metric.mass(), rel=1e-12)


def test_beurling_criterion_negative_control(omit_metric):
    g, curve, fams, metric = omit_metric
    family = [p.alpha for p in fams[0]]
    doubled = AdmissibleMetric(
        xs=metric.xs,
        ys=metric.ys,
        rho=2.0 * metric.rho,
        tag="doubled",
        line_fn=(lambda w: 2.0 * metric.line_fn(w)) if metric.line_fn else None,
    )
    verdict = beurling_criterion_check(
        doubled, family, standard_test_suite(doubled)
    )
    # the doubled metric is still admissible but no longer extremal: its
    # path integrals sit at 2, and that failure is recorded, not raised
    assert verdict.condition1_ok is False
    assert verdict.condition1_max_dev == pytest.approx(1.0, abs=1e-9)
    assert np.mean(verdict.path_integrals) == pytest.approx(2.0, abs=1e-9)


def test_sup_metric(omit_metric):
    g, curve, fams, metric = omit_metric
    family = [p.alpha for p in fams[0]]
    other = AdmissibleMetric(
        xs=metric.xs, ys=metric.ys, rho=0.5 * metric.rho, tag="half", line_fn=None
    )
    combined = sup_metric(metric, other)
    assert combined.is_admissible(family) is True
    assert combined.mass() >= metric.mass() - 1e-12


def test_poletskii_instance(omit_metric):
    g, curve, fams, metric = omit_metric
    fam = fams[0]
    assert poletskii_instance_check(g, curve.zeta, fam) is True
    p = fam[3]
    stub = LiftedPath(
        u=p.u,
        theta=p.theta,
        T=p.theta + 1e-7,
        branch_index=p.branch_index,
        t=p.t[:2],
        alpha=np.array([p.alpha[0], p.alpha[0] + 1e-9]),
        termination="reached-boundary",
        fidelity=p.fidelity,
    )
    broken = list(fam)
    broken[3] = stub
    assert poletskii_instance_check(g, curve.zeta, broken) is False


def test_build_report_consistency():
    us, ls = _band_samples(3.0)
    rep = build_report(0.7324081924454064, us, ls, (0.25, 0.75))
    assert rep.upper == pytest.approx(annulus_upper(0.7324081924454064), rel=1e-12)
    assert rep.lower_s2 == pytest.approx(
        chain_lower_s2(rep.coarea_value, 0.25, 0.75), rel=1e-12
    )
    assert rep.lower_s3 == pytest.approx(beurling_mass((us, ls), 0.25, 0.75), rel=1e-12)
    # with the measured coarea under pi, the s2 radius falls back to the
    # hypothesis ceiling and reproduces the universal constant
    assert rep.certified_r_s2 == math.exp(-24.0 * math.pi**2)
    assert rep.certified_r_s3 == certified_radius(rep.lower_s3)
    assert rep.provenance["sharp_lower_s3"] == SHARP_LOWER_S3
    assert rep.provenance["generic_lower_s3"] == pytest.approx(
        generic_lower_s3(rep.coarea_value), rel=1e-12
    )
    payload = rep.to_json()
    assert isinstance(payload, dict)
    json.dumps(payload)


def test_sandwich_violation():
    us = np.linspace(0.25, 0.75, 257)
    with pytest.raises(SandwichViolation, match="exceeds upper"):
        build_report(0.05, us, np.full_like(us, 1e-3), (0.25, 0.75))
    assert issubclass(SandwichViolation, MeancoverError)
    assert issubclass(SandwichViolation, AssertionError)
