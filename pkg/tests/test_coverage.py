import cmath
import math

import pytest

from meancover import (
    BudgetExceeded,
    FunctionSpec,
    NotUnivalent,
    area_by_counting,
    find_omitted_point,
    growth_function,
    inner_radius,
    koebe_univalent_check,
    monte_carlo_area,
    parse_spec,
    preimage_count,
    sublevel_area,
)
from meancover.coverage import NonIntegerResult, ValueOnContour
from meancover.funcmodel import Scale

KOEBE = "dilate(prod(poly[0,1],comp(mono(2),mobiusg[(0,0),(1,0),(-1,0),(1,0)])),0.9)"


@pytest.mark.parametrize(
    "n,M",
    [(1, 0.5), (2, 0.25), (3, 0.6), (5, 0.4)],
)
def test_power_sublevel_energy(n, M):
    # z^n spreads energy n*pi*M^2 over the disk of radius M
    est = sublevel_area(parse_spec(f"mono({n})"), M)
    assert abs(est.value - n * math.pi * M * M) <= est.error_bound + 1e-9


def test_sublevel_area_frozen():
    est = sublevel_area(parse_spec("omit(zeta=0.125,k=3)"), 1.0)
    assert est.method == "quadrature"
    assert est.value == pytest.approx(2.6844337115084786, abs=1e-9)
    assert 0.0 < est.error_bound < 1e-6
    assert est.sample_count > 0


def test_counting_agrees_with_quadrature():
    spec = parse_spec("omit(zeta=0.125,k=3)")
    q = sublevel_area(spec, 1.0)
    c = area_by_counting(spec, 1.0)
    assert c.method == "counting"
    assert abs(c.value - q.value) <= 0.01 * q.value
    assert abs(c.value - q.value) <= c.error_bound + q.error_bound


def test_counting_with_pole():
    # the pole of z/(eps+2z) punches a hole in the level-set picture; the
    # corrected count must still land within its own error bar of quadrature
    spec = parse_spec("mobius(eps=0.1)")
    q = sublevel_area(spec, 1.0, {"depth": 16, "budget": 2000000, "target": 2e-5})
    c = area_by_counting(spec, 1.0)
    assert abs(c.value - q.value) <= c.error_bound + q.error_bound


def test_monte_carlo_deterministic():
    spec = parse_spec("omit(zeta=0.125,k=3)")
    a = monte_carlo_area(spec, 1.0, n=40000, seed=99)
    b = monte_carlo_area(spec, 1.0, n=40000, seed=99)
    assert a.value == b.value and a.error_bound == b.error_bound
    assert a.value == pytest.approx(2.7005350583230694, abs=1e-12)
    c = monte_carlo_area(spec, 1.0, n=40000, seed=100)
    assert c.value != a.value


def test_monte_carlo_within_error_bound():
    spec = parse_spec("omit(zeta=0.125,k=3)")
    q = sublevel_area(spec, 1.0)
    for seed in (1, 7, 1234):
        m = monte_carlo_area(spec, 1.0, n=160000, seed=seed)
        assert abs(m.value - q.value) <= m.error_bound + q.error_bound


def test_preimage_counts():
    m3 = parse_spec("mono(3)")
    assert preimage_count(m3, 0.001 + 0j) == 3
    assert preimage_count(m3, 5.0 + 0j) == 0
    # the omitted value of the exponential family is never attained
    assert preimage_count(parse_spec("omit(zeta=0.125,k=3)"), 0.125 + 0j) == 0
    count, residual = preimage_count(m3, 0.001 + 0j, return_residual=True)
    assert count == 3 and residual < 1e-10


def test_preimage_value_on_contour():
    with pytest.raises(ValueOnContour):
        preimage_count(parse_spec("mono(3)"), 1.0 + 0j)


def test_preimage_non_integer_residual():
    # just outside the circle where |B| = 1: the winding integral cannot settle
    with pytest.raises(NonIntegerResult):
        preimage_count(
            parse_spec("blaschke[(0,0),(0.5,0)]"), 1.0000001 + 0j, contour_tol=1e-300
        )


def test_find_omitted_point_exponential():
    res = find_omitted_point(parse_spec("omit(zeta=0.125,k=3)"), 1.0)
    assert res.zeta == pytest.approx(0.125 + 0j, abs=1e-12)
    assert res.rotation == pytest.approx(0.0, abs=1e-12)
    assert res.scale == 1.0
    assert res.normalized_zeta == pytest.approx(0.125, abs=1e-12)


def test_find_omitted_point_identity_at_large_level():
    res = find_omitted_point(parse_spec("mono(1)"), 2.0)
    assert res.zeta == pytest.approx(1.0 + 0.03125j, abs=1e-12)
    assert res.normalized_zeta == pytest.approx(0.5002440810494413, abs=1e-12)
    assert res.rotation == pytest.approx(-cmath.phase(1.0 + 0.03125j), abs=1e-12)
    assert res.scale == 0.5


def test_find_omitted_point_none_when_covered():
    res = find_omitted_point(parse_spec("mono(1)"), 0.5)
    assert res.zeta is None
    assert res.normalized_zeta is None
    assert res.scan_resolution > 0


def _normalized_omit():
    spec = parse_spec("omit(zeta=0.125,k=3)")
    om = find_omitted_point(spec, 1.0)
    return FunctionSpec.of(Scale(cmath.exp(1j * om.rotation) * om.scale, spec.root))


def test_inner_radius_closed_form():
    # the nearest log-singularity of the inverse sits at |z| = ln(9)/3
    g = _normalized_omit()
    res = inner_radius(g, 1.0)
    assert res.r == pytest.approx(math.log(9.0) / 3.0, abs=1e-9)
    assert abs(res.a) == pytest.approx(res.r, abs=1e-12)


def test_inner_radius_resolution_stable():
    g = _normalized_omit()
    lo = inner_radius(g, 1.0)
    hi = inner_radius(g, 1.0, {"grid": 768})
    assert abs(lo.r - hi.r) < 1e-9


def test_growth_function_spot():
    assert growth_function(parse_spec("mono(2)"), 0.5) == pytest.approx(2.0, abs=1e-6)
    assert growth_function(parse_spec("mono(1)"), 0.3) == pytest.approx(1.0, abs=1e-6)


def test_univalent_check_accepts_slit_map():
    assert koebe_univalent_check(parse_spec(KOEBE), 1.0) is True


def test_univalent_check_rejects_multiple_cover():
    with pytest.raises(NotUnivalent, match="attained 2 times"):
        koebe_univalent_check(parse_spec("mono(2)"), 0.9)


def test_univalent_check_rejects_meromorphic():
    with pytest.raises(NotUnivalent, match="pole-free"):
        koebe_univalent_check(parse_spec("mobius(eps=0.1)"), 1.0)


def test_counterexample_energy_below_pi():
    spec = parse_spec("mobius(eps=0.1)")
    est = sublevel_area(spec, 1.0, {"depth": 16, "budget": 2000000, "target": 2e-5})
    assert est.value == pytest.approx(3.1396176025603384, abs=1e-9)
    assert est.value + est.error_bound < math.pi


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        sublevel_area(
            parse_spec("omit(zeta=0.125,k=3)"),
            1.0,
            {"depth": 30, "budget": 50, "target": 1e-12},
        )
