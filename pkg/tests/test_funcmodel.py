import cmath
import math

import numpy as np
import pytest

from meancover import (
    ParseError,
    PoleAtPoint,
    derivative,
    evaluate,
    make_family,
    max_modulus_on_circle,
    parse_spec,
    serialize_spec,
)
from meancover.funcmodel import eval_with_derivative, poles_inside

CORPUS = [
    "mono(1)",
    "mono(2)",
    "mono(3)",
    "poly[0,1,0.2]",
    "poly[0,1,0,0.35]",
    "blaschke[(0,0),(0.5,0)]",
    "blaschke[(0,0),(0.3,-0.2)]",
    "omit(zeta=0.125,k=3)",
    "omit(zeta=0.125,k=4)",
    "omit(zeta=0.35,k=1.2)",
    "dilate(prod(poly[0,1],comp(mono(2),mobiusg[(0,0),(1,0),(-1,0),(1,0)])),0.9)",
    "mobius(eps=0.1)",
]


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip(text):
    spec = parse_spec(text)
    again = parse_spec(serialize_spec(spec))
    assert again.root == spec.root
    assert again.analyticity_flag == spec.analyticity_flag


def test_whitespace_tolerated():
    a = parse_spec("sum( mono(2) , scale( (0.5,0.5) , mono(1) ) )")
    b = parse_spec("sum(mono(2),scale((0.5,0.5),mono(1)))")
    assert a.root == b.root


@pytest.mark.parametrize(
    "bad",
    [
        "mono(0)",
        "poly[1,2]",
        "poly[0]",
        "blaschke[]",
        "omit(zeta=0,k=3)",
        "mobiusg[(0,0),(1,0),(0,0),(1,0)]",
        "dilate(mono(1),1.5)",
        "mono(2",
        "frob(1)",
        "",
    ],
)
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_spec(bad)


def test_closed_form_values():
    zs = [0.3 + 0.1j, -0.55j, 0.2 - 0.6j]
    mono3 = parse_spec("mono(3)")
    omit = parse_spec("omit(zeta=0.125,k=3)")
    mob = parse_spec("mobius(eps=0.1)")
    for z in zs:
        assert evaluate(mono3, z) == pytest.approx(z**3, rel=1e-14)
        assert evaluate(omit, z) == pytest.approx(0.125 * (1 - cmath.exp(3 * z)), rel=1e-14)
        assert evaluate(mob, z) == pytest.approx(z / (0.1 + 2 * z), rel=1e-13)


def test_blaschke_unimodular_on_circle():
    spec = parse_spec("blaschke[(0,0),(0.3,-0.2)]")
    z = np.exp(1j * np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False))
    w = evaluate(spec, z)
    assert np.abs(np.abs(w) - 1.0).max() < 1e-12


@pytest.mark.parametrize("text", [t for t in CORPUS if t != "mobius(eps=0.1)"])
def test_derivative_matches_finite_difference(text):
    spec = parse_spec(text)
    rng = np.random.default_rng(7)
    z = 0.7 * np.sqrt(rng.random(8)) * np.exp(2j * math.pi * rng.random(8))
    h = 1e-6
    fd = (evaluate(spec, z + h) - evaluate(spec, z - h)) / (2 * h)
    assert np.abs(derivative(spec, z) - fd).max() < 2e-7 * max(1.0, np.abs(fd).max())


def test_vector_scalar_agreement():
    spec = parse_spec("poly[0,1,0.2]")
    z = np.array([0.1 + 0.2j, -0.3j, 0.44])
    w, dw = eval_with_derivative(spec, z)
    for i, zi in enumerate(z):
        wi, dwi = eval_with_derivative(spec, complex(zi))
        assert wi == w[i] and dwi == dw[i]
        assert isinstance(wi, complex)


def test_max_modulus_closed_forms():
    omit = parse_spec("omit(zeta=0.125,k=3)")
    assert max_modulus_on_circle(omit, 1.0) == pytest.approx(
        0.125 * (math.e**3 - 1), abs=1e-9
    )
    mono5 = parse_spec("mono(5)")
    assert max_modulus_on_circle(mono5, 0.7) == pytest.approx(0.7**5, abs=1e-12)


def test_max_modulus_pole_on_circle():
    mob = parse_spec("mobius(eps=0.1)")
    assert poles_inside(mob, 1.0) == [pytest.approx(-0.05)]
    with pytest.raises(PoleAtPoint):
        max_modulus_on_circle(mob, 0.05)
    # poles strictly inside the circle are fine
    assert max_modulus_on_circle(mob, 0.5) == pytest.approx(0.5 / 0.9, rel=1e-9)


def test_make_family_matches_parser():
    assert make_family("omit", zeta=0.35, k=1.2).root == parse_spec("omit(zeta=0.35,k=1.2)").root
    assert make_family("mobius", eps=0.01).root == parse_spec("mobius(eps=0.01)").root
    assert make_family("mono", n=4).root == parse_spec("mono(4)").root


def test_analyticity_flag():
    assert parse_spec("omit(zeta=0.125,k=3)").analyticity_flag
    assert not parse_spec("mobius(eps=0.1)").analyticity_flag
    # pole at z = -5 sits outside the closed disk
    assert parse_spec("mobiusg[(1,0),(0,0),(1,0),(5,0)]").analyticity_flag
