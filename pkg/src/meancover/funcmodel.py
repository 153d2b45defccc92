"""Expression trees for analytic functions on the closed unit disk.

A function is represented as an immutable tree of primitive nodes (monomials,
polynomials, Moebius maps, exponential-affine maps, Blaschke products) closed
under sum, product, composition, scalar multiple and dilation ``z -> f(t z)``.
Trees compile once into flat kernel programs; evaluation returns both the
value and the exact derivative (forward-mode on the tree, no finite
differences anywhere).

Complex scalars are plain Python ``complex`` throughout.  Every public
operation either returns finite numbers or raises; non-finite values never
escape silently.

The text form of a tree is a small exact grammar (see ``parse_spec``).  The
serializer emits floats with ``repr`` so that parse/serialize round-trips are
structurally exact.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ._kernels import ProgramBuilder, execute
from ._kernels.programs import (
    OP_ADD,
    OP_BLASCHKE,
    OP_EXPAFF,
    OP_MOBIUS,
    OP_MUL,
    OP_POLY,
    OP_POW,
    OP_SCALE,
    OP_Z,
    Program,
)
from .errors import BadParameter, MeancoverError, ParseError, PoleAtPoint, ToleranceNotMet

ComplexValue = complex


# ---------------------------------------------------------------------------
# node types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """z -> z**n, n >= 1."""

    n: int


@dataclass(frozen=True)
class Polynomial:
    """Real coefficients listed from degree 0 upward; degree-0 term must be 0."""

    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex


@dataclass(frozen=True)
class ExpAffine:
    """z -> c * (1 - exp(k z)); omits the value c."""

    c: float
    k: float


@dataclass(frozen=True)
class Blaschke:
    """Product of disk automorphism factors (z - alpha)/(1 - conj(alpha) z)."""

    zeros: tuple[complex, ...]


@dataclass(frozen=True)
class Sum:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Product:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Compose:
    """outer(inner(z))."""

    outer: "Node"
    inner: "Node"


@dataclass(frozen=True)
class Scale:
    """z -> factor * inner(z)."""

    factor: complex
    inner: "Node"


@dataclass(frozen=True)
class Dilate:
    """z -> inner(t z) with 0 < t <= 1; pulls boundary behaviour inside."""

    inner: "Node"
    t: float


Node = Union[
    Monomial, Polynomial, Mobius, ExpAffine, Blaschke, Sum, Product, Compose, Scale, Dilate
]


@dataclass(frozen=True)
class FunctionSpec:
    """Immutable tree plus a precomputed pole-freeness flag for the closed disk."""

    root: Node
    analyticity_flag: bool

    @classmethod
    def of(cls, root: Node) -> "FunctionSpec":
        _validate(root)
        return cls(root=root, analyticity_flag=_polefree(root, 1.0))


def _validate(node: Node) -> None:
    if isinstance(node, Monomial):
        if not isinstance(node.n, int) or node.n < 1:
            raise BadParameter(f"monomial power must be a positive integer, got {node.n!r}")
    elif isinstance(node, Polynomial):
        if len(node.coeffs) == 0:
            raise BadParameter("polynomial needs at least one coefficient")
        if node.coeffs[0] != 0:
            raise BadParameter("degree-0 polynomial coefficient must be 0")
        if not any(c != 0 for c in node.coeffs):
            raise BadParameter("zero polynomial is not a usable spec")
    elif isinstance(node, Mobius):
        if node.c == 0 and node.d == 0:
            raise BadParameter("Moebius denominator is identically zero")
        if node.a * node.d - node.b * node.c == 0:
            raise BadParameter("degenerate Moebius map (ad - bc = 0)")
    elif isinstance(node, ExpAffine):
        if not (node.c != 0 and math.isfinite(node.c)):
            raise BadParameter("exponential-affine scale must be finite and nonzero")
        if not (node.k != 0 and math.isfinite(node.k)):
            raise BadParameter("exponential-affine rate must be finite and nonzero")
    elif isinstance(node, Blaschke):
        if len(node.zeros) == 0:
            raise BadParameter("Blaschke product needs at least one zero")
        for z0 in node.zeros:
            if abs(z0) >= 1:
                raise BadParameter(f"Blaschke zero {z0} must lie strictly inside the disk")
    elif isinstance(node, (Sum, Product)):
        _validate(node.left)
        _validate(node.right)
    elif isinstance(node, Compose):
        _validate(node.outer)
        _validate(node.inner)
    elif isinstance(node, Scale):
        if node.factor == 0:
            raise BadParameter("scalar multiple must be nonzero")
        _validate(node.inner)
    elif isinstance(node, Dilate):
        if not (0 < node.t <= 1):
            raise BadParameter(f"dilation factor must satisfy 0 < t <= 1, got {node.t}")
        _validate(node.inner)
    else:
        raise BadParameter(f"unknown node type {type(node).__name__}")


# ---------------------------------------------------------------------------
# compilation and pole analysis
# ---------------------------------------------------------------------------


def _emit(node: Node, b: ProgramBuilder, var: Callable[[], None]) -> None:
    if isinstance(node, Monomial):
        var()
        if node.n != 1:
            b.emit(OP_POW, node.n)
    elif isinstance(node, Polynomial):
        var()
        off = b.const(*node.coeffs)
        b.emit(OP_POLY, off, len(node.coeffs))
    elif isinstance(node, Mobius):
        var()
        b.emit(OP_MOBIUS, b.const(node.a, node.b, node.c, node.d))
    elif isinstance(node, ExpAffine):
        var()
        b.emit(OP_EXPAFF, b.const(node.c, node.k))
    elif isinstance(node, Blaschke):
        for i, z0 in enumerate(node.zeros):
            var()
            b.emit(OP_BLASCHKE, b.const(z0))
            if i:
                b.emit(OP_MUL)
    elif isinstance(node, Sum):
        _emit(node.left, b, var)
        _emit(node.right, b, var)
        b.emit(OP_ADD)
    elif isinstance(node, Product):
        _emit(node.left, b, var)
        _emit(node.right, b, var)
        b.emit(OP_MUL)
    elif isinstance(node, Compose):
        _emit(node.outer, b, lambda: _emit(node.inner, b, var))
    elif isinstance(node, Scale):
        _emit(node.inner, b, var)
        b.emit(OP_SCALE, b.const(node.factor))
    elif isinstance(node, Dilate):
        off = b.const(node.t)

        def dilated() -> None:
            var()
            b.emit(OP_SCALE, off)

        _emit(node.inner, b, dilated)
    else:  # pragma: no cover - _validate rejects these first
        raise AssertionError(type(node))


@functools.lru_cache(maxsize=512)
def _program(root: Node) -> Program:
    b = ProgramBuilder()
    _emit(root, b, lambda: b.emit(OP_Z))
    return b.build()


def _has_finite_pole(node: Node) -> bool:
    if isinstance(node, Mobius):
        return node.c != 0
    if isinstance(node, Blaschke):
        return any(z0 != 0 for z0 in node.zeros)
    if isinstance(node, (Sum, Product)):
        return _has_finite_pole(node.left) or _has_finite_pole(node.right)
    if isinstance(node, Compose):
        return _has_finite_pole(node.outer) or _has_finite_pole(node.inner)
    if isinstance(node, Scale):
        return _has_finite_pole(node.inner)
    if isinstance(node, Dilate):
        return _has_finite_pole(node.inner)
    return False


def _sup_on_circle(node: Node, radius: float) -> float:
    theta = np.linspace(0.0, 2 * math.pi, 8192, endpoint=False)
    w, _, bad = execute(_program(node), radius * np.exp(1j * theta))
    if bad.any() or not np.all(np.isfinite(w)):
        return math.inf
    return float(np.max(np.abs(w)))


def _polefree(node: Node, radius: float) -> bool:
    """True when ``node`` has no pole on the closed disk of the given radius."""
    if isinstance(node, (Monomial, Polynomial, ExpAffine)):
        return True
    if isinstance(node, Mobius):
        return node.c == 0 or abs(node.d / node.c) > radius
    if isinstance(node, Blaschke):
        return all(z0 == 0 or 1.0 / abs(z0) > radius for z0 in node.zeros)
    if isinstance(node, (Sum, Product)):
        return _polefree(node.left, radius) and _polefree(node.right, radius)
    if isinstance(node, Scale):
        return _polefree(node.inner, radius)
    if isinstance(node, Dilate):
        return _polefree(node.inner, node.t * radius)
    if isinstance(node, Compose):
        if not _polefree(node.inner, radius):
            return False
        if not _has_finite_pole(node.outer):
            return True
        reach = _sup_on_circle(node.inner, radius)
        return math.isfinite(reach) and _polefree(node.outer, reach * (1 + 1e-9) + 1e-12)
    raise AssertionError(type(node))


def poles_inside(spec: FunctionSpec, radius: float) -> list[complex]:
    """Pole locations of the top-level variable with modulus <= radius.

    Only direct (non-composed) Moebius and Blaschke nodes contribute; composed
    poles are rejected earlier by the analyticity analysis for every spec the
    package constructs.  Used by the counting machinery to correct winding
    numbers for meromorphic specs.
    """

    out: list[complex] = []

    def walk(node: Node, scale: float) -> None:
        if isinstance(node, Mobius) and node.c != 0:
            p = -node.d / node.c
            if abs(p) <= radius * scale:
                out.append(p / scale)
        elif isinstance(node, Blaschke):
            for z0 in node.zeros:
                if z0 != 0 and 1.0 / abs(z0) <= radius * scale:
                    out.append((1.0 / np.conj(z0)) / scale)
        elif isinstance(node, (Sum, Product)):
            walk(node.left, scale)
            walk(node.right, scale)
        elif isinstance(node, Scale):
            walk(node.inner, scale)
        elif isinstance(node, Dilate):
            walk(node.inner, scale * node.t)
        elif isinstance(node, Compose):
            # inner poles only; outer poles through composition are excluded
            # by construction for analyticity-checked trees
            walk(node.inner, scale)

    walk(spec.root, 1.0)
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_with_derivative(spec: FunctionSpec, z, pole: str = "raise"):
    """Evaluate f and f' jointly at ``z`` (scalar or array).

    ``pole="raise"`` raises :class:`PoleAtPoint` on any flagged point;
    ``pole="mask"`` returns the bad-point mask as a third output instead, for
    integrators that clip pole neighbourhoods themselves.
    """
    w, dw, bad = execute(_program(spec.root), z, pole_tol=1e-12 if pole == "raise" else 1e-6)
    if pole == "mask":
        return w, dw, bad
    if np.ndim(bad) == 0:
        if bad:
            raise PoleAtPoint(complex(np.asarray(z).item()))
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise MeancoverError(f"non-finite evaluation at z = {z}")
        return w, dw
    if bad.any():
        idx = int(np.argmax(bad))
        raise PoleAtPoint(complex(np.asarray(z).reshape(-1)[idx]))
    if not np.all(np.isfinite(w)) or not np.all(np.isfinite(dw)):
        raise MeancoverError("non-finite evaluation")
    return w, dw


def evaluate(spec: FunctionSpec, z):
    """Value of the function at ``z`` (scalar complex or ndarray)."""
    return eval_with_derivative(spec, z)[0]


def derivative(spec: FunctionSpec, z):
    """Exact derivative at ``z``, differentiated on the tree."""
    return eval_with_derivative(spec, z)[1]


def max_modulus_on_circle(
    spec: FunctionSpec, r: float, tol: float = 1e-10, n_samples: int = 1024
) -> float:
    """max |f| on the circle of radius ``r``.

    Dense angular sampling locates candidate maxima; the three best brackets
    are then refined by golden-section search until the bracket collapses
    below the tolerance scale.

    Poles strictly off the circle are tolerated; for a meromorphic spec the
    returned circle maximum no longer bounds |f| inside the disk (no maximum
    principle).  A pole on the circle raises.
    """
    if not (0 < r):
        raise BadParameter(f"radius must be positive, got {r}")
    for p in poles_inside(spec, 64.0):
        if abs(abs(p) - r) < 1e-9:
            raise PoleAtPoint(p, f"pole on the circle of radius {r}")
    prog = _program(spec.root)

    def mod(theta: np.ndarray) -> np.ndarray:
        w, _, _ = execute(prog, r * np.exp(1j * theta))
        return np.abs(w)

    theta = np.linspace(0.0, 2 * math.pi, n_samples, endpoint=False)
    vals = mod(theta)
    if not np.all(np.isfinite(vals)):
        raise ToleranceNotMet("non-finite samples on the circle")
    # local maxima in the circular sense
    peaks = np.nonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))[0]
    order = peaks[np.argsort(vals[peaks])[::-1][:3]]
    step = 2 * math.pi / n_samples
    invphi = (math.sqrt(5.0) - 1) / 2
    best = float(np.max(vals))
    for i in order:
        lo = theta[i] - step
        hi = theta[i] + step
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc = float(mod(np.array([c]))[0])
        fd = float(mod(np.array([d]))[0])
        for _ in range(200):
            if hi - lo < tol * 1e-2:
                break
            if fc > fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = float(mod(np.array([c]))[0])
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = float(mod(np.array([d]))[0])
        else:
            raise ToleranceNotMet("golden-section bracket failed to collapse")
        best = max(best, fc, fd)
    return best


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def make_family(kind: str, **params) -> FunctionSpec:
    """Construct a normalized spec (f(0) = 0) from a named family.

    Kinds: ``mono`` (n), ``poly`` (coeffs), ``blaschke`` (zeros; a zero at the
    origin is prepended when missing so that f(0) = 0), ``omit`` (zeta, k) for
    zeta*(1 - exp(k z)), ``mobius`` (eps) for the meromorphic map
    z/(eps + 2 z), and ``koebe-slit`` (scale, t) for the dilated slit map
    scale * tz/(1 - tz)^2.
    """
    kind = kind.lower()
    if kind in ("mono", "monomial"):
        return FunctionSpec.of(Monomial(int(params["n"])))
    if kind in ("poly", "polynomial"):
        return FunctionSpec.of(Polynomial(tuple(float(c) for c in params["coeffs"])))
    if kind == "blaschke":
        zeros = [complex(z0) for z0 in params["zeros"]]
        if not any(z0 == 0 for z0 in zeros):
            zeros.insert(0, 0j)
        return FunctionSpec.of(Blaschke(tuple(zeros)))
    if kind in ("omit", "omit-point"):
        zeta = float(params["zeta"])
        k = float(params["k"])
        if not (0 < zeta < 1):
            raise BadParameter(f"omitted value must lie in (0, 1), got {zeta}")
        return FunctionSpec.of(ExpAffine(c=zeta, k=k))
    if kind in ("mobius", "mobius-counterexample"):
        eps = float(params["eps"])
        if not (0 < eps < 2):
            raise BadParameter(f"eps must lie in (0, 2), got {eps}")
        return FunctionSpec.of(Mobius(a=1, b=0, c=2, d=eps))
    if kind == "koebe-slit":
        scale = float(params.get("scale", 1.0))
        t = float(params.get("t", 1.0))
        if not (0 < t < 1):
            # t = 1 puts the denominator zero on the boundary circle
            raise BadParameter("slit family needs a strict dilation 0 < t < 1")
        core = Product(
            Polynomial((0.0, 1.0)),
            Compose(Monomial(2), Mobius(a=0, b=1, c=-1, d=1)),
        )
        node: Node = Dilate(core, t)
        if scale != 1.0:
            node = Scale(scale, node)
        return FunctionSpec.of(node)
    raise BadParameter(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# grammar
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, expected: str):
        raise ParseError(self.text, self.pos, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def literal(self, s: str) -> None:
        self.skip_ws()
        if not self.text.startswith(s, self.pos):
            self.error(f"'{s}'")
        self.pos += len(s)

    def real(self) -> float:
        self.skip_ws()
        i = self.pos
        n = len(self.text)
        j = i
        if j < n and self.text[j] in "+-":
            j += 1
        digits = j
        while j < n and (self.text[j].isdigit() or self.text[j] == "."):
            j += 1
        if j == digits:
            self.error("a number")
        if j < n and self.text[j] in "eE":
            j += 1
            if j < n and self.text[j] in "+-":
                j += 1
            while j < n and self.text[j].isdigit():
                j += 1
        try:
            val = float(self.text[i:j])
        except ValueError:
            self.error("a number")
        self.pos = j
        return val

    def integer(self) -> int:
        self.skip_ws()
        i = self.pos
        val = self.real()
        if val != int(val):
            self.pos = i
            self.error("an integer")
        return int(val)

    def cplx(self) -> complex:
        self.literal("(")
        re = self.real()
        self.literal(",")
        im = self.real()
        self.literal(")")
        return complex(re, im)

    def real_or_cplx(self) -> complex:
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            return self.cplx()
        return complex(self.real())

    def csv(self, item, close: str) -> list:
        out = [item()]
        while True:
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1
                out.append(item())
            else:
                self.literal(close)
                return out

    def spec(self) -> Node:
        self.skip_ws()
        for head in (
            "poly[",
            "mono(",
            "blaschke[",
            "omit(",
            "mobiusg[",
            "mobius(",
            "dilate(",
            "sum(",
            "prod(",
            "scale(",
            "comp(",
        ):
            if self.text.startswith(head, self.pos):
                self.pos += len(head)
                return getattr(self, "_" + head.rstrip("[(").replace("-", "_"))()
        self.error("a spec head (poly/mono/blaschke/omit/mobius/mobiusg/dilate/sum/prod/scale/comp)")

    def _poly(self) -> Node:
        coeffs = self.csv(self.real, "]")
        if coeffs[0] != 0:
            self.error("degree-0 coefficient equal to 0")
        return Polynomial(tuple(coeffs))

    def _mono(self) -> Node:
        n = self.integer()
        self.literal(")")
        if n < 1:
            self.error("a positive power")
        return Monomial(n)

    def _blaschke(self) -> Node:
        zeros = self.csv(self.cplx, "]")
        return Blaschke(tuple(zeros))

    def _omit(self) -> Node:
        self.literal("zeta=")
        zeta = self.real()
        self.literal(",")
        self.literal("k=")
        k = self.real()
        self.literal(")")
        return ExpAffine(c=zeta, k=k)

    def _mobius(self) -> Node:
        self.literal("eps=")
        eps = self.real()
        self.literal(")")
        return Mobius(a=1, b=0, c=2, d=eps)

    def _mobiusg(self) -> Node:
        co = self.csv(self.cplx, "]")
        if len(co) != 4:
            self.error("exactly four complex coefficients")
        return Mobius(a=co[0], b=co[1], c=co[2], d=co[3])

    def _dilate(self) -> Node:
        inner = self.spec()
        self.literal(",")
        t = self.real()
        self.literal(")")
        return Dilate(inner, t)

    def _sum(self) -> Node:
        left = self.spec()
        self.literal(",")
        right = self.spec()
        self.literal(")")
        return Sum(left, right)

    def _prod(self) -> Node:
        left = self.spec()
        self.literal(",")
        right = self.spec()
        self.literal(")")
        return Product(left, right)

    def _scale(self) -> Node:
        factor = self.real_or_cplx()
        self.literal(",")
        inner = self.spec()
        self.literal(")")
        return Scale(factor, inner)

    def _comp(self) -> Node:
        outer = self.spec()
        self.literal(",")
        inner = self.spec()
        self.literal(")")
        return Compose(outer, inner)


def parse_spec(text: str) -> FunctionSpec:
    """Parse the exact text grammar into a spec tree.

    Raises :class:`ParseError` with the character position and the expected
    token on malformed input.  Whitespace between tokens is tolerated.
    """
    p = _Parser(text)
    root = p.spec()
    p.skip_ws()
    if p.pos != len(text):
        p.error("end of input")
    try:
        return FunctionSpec.of(root)
    except BadParameter as exc:
        raise ParseError(text, 0, f"a valid spec ({exc})") from exc


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_cplx(z: complex) -> str:
    z = complex(z)
    return f"({_fmt_real(z.real)},{_fmt_real(z.imag)})"


def serialize_spec(spec: FunctionSpec | Node) -> str:
    """Canonical text for a tree; parse(serialize(s)) is structurally s."""
    node = spec.root if isinstance(spec, FunctionSpec) else spec
    if isinstance(node, Monomial):
        return f"mono({node.n})"
    if isinstance(node, Polynomial):
        return "poly[" + ",".join(_fmt_real(c) for c in node.coeffs) + "]"
    if isinstance(node, Blaschke):
        return "blaschke[" + ",".join(_fmt_cplx(z0) for z0 in node.zeros) + "]"
    if isinstance(node, ExpAffine):
        return f"omit(zeta={_fmt_real(node.c)},k={_fmt_real(node.k)})"
    if isinstance(node, Mobius):
        if node.a == 1 and node.b == 0 and node.c == 2 and node.d.imag == 0:
            return f"mobius(eps={_fmt_real(node.d.real)})"
        return "mobiusg[" + ",".join(_fmt_cplx(v) for v in (node.a, node.b, node.c, node.d)) + "]"
    if isinstance(node, Dilate):
        return f"dilate({serialize_spec(node.inner)},{_fmt_real(node.t)})"
    if isinstance(node, Sum):
        return f"sum({serialize_spec(node.left)},{serialize_spec(node.right)})"
    if isinstance(node, Product):
        return f"prod({serialize_spec(node.left)},{serialize_spec(node.right)})"
    if isinstance(node, Scale):
        factor = complex(node.factor)
        ftxt = _fmt_real(factor.real) if factor.imag == 0 else _fmt_cplx(factor)
        return f"scale({ftxt},{serialize_spec(node.inner)})"
    if isinstance(node, Compose):
        return f"comp({serialize_spec(node.outer)},{serialize_spec(node.inner)})"
    raise BadParameter(f"cannot serialize {type(node).__name__}")
