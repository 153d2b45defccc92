"""Reference curves, monotone radius intervals, and circle lifts.

Everything in this module works in normalized coordinates: the omitted
point ``zeta`` is real and positive, the target level is 1, and the map
is analytic on the closed unit disk.  The harness applies the rotation
and rescaling before calling in here.

The central object is the lift of the circle ``|w - zeta| = u`` through
the map: an arc in the domain disk starting on the reference curve and
integrated until it exits through the unit circle.  The vertical extent
``T_u - theta_u`` of that arc in the angular coordinate is what the
coarea and modulus bounds consume.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .coverage import InnerRadiusResult, sublevel_area
from .errors import (
    CoverageGap,
    IncompleteLift,
    MeancoverError,
    SolverFailure,
    StartOffCurve,
)
from .funcmodel import FunctionSpec, eval_with_derivative
from .kvconfig import parse_kv

__all__ = [
    "ReferenceCurve",
    "CaseLabel",
    "MonotoneInterval",
    "LiftedPath",
    "LIFT_DEFAULTS",
    "reference_curve",
    "classify_case",
    "monotone_intervals",
    "lift_circle",
    "lift_family",
    "start_parameter",
    "schlicht_start_check",
    "sheet_contains",
    "simplicity_check",
    "beta_length",
    "coarea_check",
]


LIFT_DEFAULTS = {
    "rtol": 1e-10,
    "atol": 1e-12,
    # keeps chordal sag small enough that downstream line integrals of the
    # lifted polylines hold to ~1e-4
    "max_step": 0.02,
    "lift_tol": 1e-8,
    "boundary_tol": 1e-4,
    "terminal_tol": 1e-9,
    "crit_tol": 1e-6,
    "step_budget": 20000,
}


class _DerivativeVanished(Exception):
    """Internal signal: the lift ran into a critical point of f."""


def _fd(spec: FunctionSpec, z: complex) -> tuple[complex, complex]:
    w, dw = eval_with_derivative(spec, z)
    return complex(w), complex(dw)


# ---------------------------------------------------------------------------
# reference curve


@dataclass(frozen=True)
class ReferenceCurve:
    """The image ``E(s) = f(s*a)`` of the contact ray, with its distance
    profile ``h(s) = |E(s) - zeta|`` sampled densely enough that adjacent
    ``h`` values differ by less than 0.01."""

    contact: complex
    zeta: float
    s: np.ndarray
    E: np.ndarray
    h: np.ndarray

    def __post_init__(self) -> None:
        if abs(self.E[0]) > 1e-12:
            raise MeancoverError("reference curve must start at the origin")
        if abs(abs(self.E[-1]) - 1.0) > 1e-3:
            raise MeancoverError(
                "reference curve must end on the unit target circle, got "
                f"|E(1)| = {abs(self.E[-1]):.6f}"
            )


def reference_curve(
    spec: FunctionSpec,
    inner: InnerRadiusResult,
    zeta: float,
    n_samples: int = 512,
) -> ReferenceCurve:
    """Trace f along the contact ray [0, a] and record the distance to zeta.

    Starts from a uniform grid and bisects every gap where either the
    distance profile or the curve itself jumps by 0.01 or more, so the
    sweep in :func:`monotone_intervals` cannot step over a local extremum.
    """
    if not (0.0 < zeta < 1.0):
        raise MeancoverError(f"normalized zeta must lie in (0, 1), got {zeta}")
    a = complex(inner.a)
    s = list(np.linspace(0.0, 1.0, max(int(n_samples), 16)))
    E = [_fd(spec, si * a)[0] for si in s]

    for _ in range(24):
        h = [abs(w - zeta) for w in E]
        splits = [
            i
            for i in range(len(s) - 1)
            if abs(h[i + 1] - h[i]) >= 0.01 or abs(E[i + 1] - E[i]) >= 0.02
        ]
        if not splits:
            break
        for i in reversed(splits):
            mid = 0.5 * (s[i] + s[i + 1])
            s.insert(i + 1, mid)
            E.insert(i + 1, _fd(spec, mid * a)[0])
    else:
        raise MeancoverError("reference curve refinement did not settle")

    s_arr = np.asarray(s, dtype=np.float64)
    E_arr = np.asarray(E, dtype=np.complex128)
    return ReferenceCurve(
        contact=a, zeta=float(zeta), s=s_arr, E=E_arr,
        h=np.abs(E_arr - zeta),
    )


# ---------------------------------------------------------------------------
# case classification


@dataclass(frozen=True)
class CaseLabel:
    """Which lifting regime applies, and the quantities that regime needs."""

    case: str
    m: float
    Mx: float
    u_range: tuple[float, float]
    comparability_C: Optional[float] = None
    rectangle_params: Optional[dict] = None


def _angular_measure_in_disk(zeta: float, u: float) -> float:
    # measure of {t : |zeta + u e^{it}| < 1}, circle center on the real axis
    q = (1.0 - zeta * zeta - u * u) / (2.0 * zeta * u)
    if q >= 1.0:
        return 2.0 * math.pi
    if q <= -1.0:
        return 0.0
    return 2.0 * (math.pi - math.acos(q))


def classify_case(zeta: float, curve: ReferenceCurve) -> CaseLabel:
    """Pick the radius band to lift over, based on where the reference
    curve sits relative to zeta.

    The bands are mutually exclusive and tried in order: a small omitted
    point always uses (1/4, 3/4); otherwise a curve that travels at least
    1/8 beyond zeta uses the outer annulus, one that dips 1/8 below uses
    the inner annulus, and the remaining pinched case falls back to a
    rectangle around the contact point.
    """
    m = float(np.min(curve.h))
    Mx = float(np.max(curve.h))
    if not (m <= zeta <= Mx + 1e-12):
        raise MeancoverError(
            f"distance profile must straddle zeta: m={m}, zeta={zeta}, Mx={Mx}"
        )

    if zeta < 0.25:
        return CaseLabel(case="zeta-small", m=m, Mx=Mx, u_range=(0.25, 0.75))

    if Mx - zeta > 0.125:
        lo, hi = zeta, zeta + 0.125
        us = np.linspace(lo * (1 + 1e-9), hi, 257)
        ang = np.array([_angular_measure_in_disk(zeta, float(u)) for u in us])
        ang_min = float(ang.min())
        if ang_min <= 0.0:
            raise MeancoverError("outer annulus circles leave the unit disk")
        return CaseLabel(
            case="outer-annulus", m=m, Mx=Mx, u_range=(lo, hi),
            comparability_C=2.0 * math.pi / ang_min,
        )

    if zeta - m > 0.125:
        return CaseLabel(
            case="inner-annulus", m=m, Mx=Mx, u_range=(zeta - 0.125, zeta)
        )

    # pinched case: the curve stays within 1/8 of zeta on both sides, which
    # forces the contact point far out along the ray
    if not (curve.contact.real > 47.0 / 128.0):
        raise AssertionError(
            "rectangle case requires Re(contact) > 47/128, got "
            f"{curve.contact.real!r}"
        )
    return CaseLabel(
        case="rectangle", m=m, Mx=Mx, u_range=(0.0, 0.125),
        rectangle_params={"u_range": (0.0, 0.125), "center": zeta},
    )


# ---------------------------------------------------------------------------
# monotone intervals


@dataclass(frozen=True)
class MonotoneInterval:
    """An s-interval J on which h is strictly increasing, claiming the
    radius band I = h(J).  Bands of distinct intervals are disjoint."""

    J: tuple[float, float]
    I: tuple[float, float]
    index: int


def _interp_s(curve: ReferenceCurve, i: int, target: float) -> float:
    # inverse-interpolate h between samples i and i+1 (h increasing there)
    h0, h1 = curve.h[i], curve.h[i + 1]
    s0, s1 = curve.s[i], curve.s[i + 1]
    if h1 == h0:
        return float(s0)
    lam = (target - h0) / (h1 - h0)
    return float(s0 + np.clip(lam, 0.0, 1.0) * (s1 - s0))


def monotone_intervals(
    curve: ReferenceCurve, u_range: tuple[float, float]
) -> list[MonotoneInterval]:
    """Greedy left-to-right sweep of the distance profile.

    Each uncovered radius is claimed by the earliest s-interval whose
    profile rises through it; later rises through already-claimed radii
    are trimmed away.  Raises CoverageGap if more than 1e-3 of the band
    (relative to its width) is attained by no increasing stretch.
    """
    u_lo, u_hi = float(u_range[0]), float(u_range[1])
    if not (u_lo < u_hi):
        raise MeancoverError(f"empty radius band {u_range}")
    h = curve.h
    n = len(h)
    eps = 1e-12

    intervals: list[MonotoneInterval] = []
    cursor = u_lo
    gap = 0.0
    idx = 0
    while cursor < u_hi - eps:
        best_i = None
        for i in range(n - 1):
            if h[i] <= cursor + eps and h[i + 1] > cursor + eps:
                best_i = i
                break
        if best_i is None:
            # nothing rises through the cursor: jump to the next radius the
            # profile attains from below, booking an uncovered gap
            above = h[(h > cursor + eps)]
            nxt = float(above.min()) if above.size else u_hi
            gap += min(nxt, u_hi) - cursor
            cursor = min(nxt, u_hi)
            if cursor >= u_hi - eps:
                break
            # re-enter the sweep just below the attained radius
            cursor = cursor - eps
            hit = False
            for i in range(n - 1):
                if h[i] <= cursor + eps and h[i + 1] > cursor + eps:
                    hit = True
                    break
            if not hit:
                break
            continue
        j = best_i
        while j + 1 < n - 1 and h[j + 2] > h[j + 1] + eps:
            j += 1
        top = min(float(h[j + 1]), u_hi)
        if top <= cursor + eps:
            break
        s_lo = _interp_s(curve, best_i, cursor)
        # locate the sample pair containing the top of the run
        k = j
        while k > best_i and h[k] > top:
            k -= 1
        s_hi = _interp_s(curve, k, top)
        intervals.append(
            MonotoneInterval(J=(s_lo, s_hi), I=(cursor, top), index=idx)
        )
        idx += 1
        cursor = top

    if cursor < u_hi - eps:
        gap += u_hi - cursor
    if gap > 1e-3 * (u_hi - u_lo):
        raise CoverageGap(
            f"distance profile misses {gap:.6f} of the radius band {u_range}"
        )
    return intervals


# ---------------------------------------------------------------------------
# circle lifting


@dataclass(frozen=True)
class LiftedPath:
    """A lift of the circle |w - zeta| = u, recorded as angular samples
    t with domain points alpha(t), integrated from the reference curve
    until the domain boundary (or a stop condition) is hit."""

    u: float
    theta: float
    T: float
    branch_index: int
    t: np.ndarray
    alpha: np.ndarray
    termination: str = "reached-boundary"
    fidelity: float = 0.0

    def to_csv(self) -> str:
        lines = ["t,re_alpha,im_alpha"]
        for ti, ai in zip(self.t, self.alpha):
            lines.append(f"{ti!r},{ai.real!r},{ai.imag!r}")
        return "\n".join(lines) + "\n"


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
    -92097 / 339200, 187 / 2100, 1 / 40,
)


def _newton_project(
    spec: FunctionSpec, alpha: complex, w_target: complex
) -> tuple[complex, float]:
    w, dw = _fd(spec, alpha)
    if dw == 0:
        return alpha, abs(w - w_target)
    alpha2 = alpha - (w - w_target) / dw
    w2, _ = _fd(spec, alpha2)
    return alpha2, abs(w2 - w_target)


def _newton_solve(
    spec: FunctionSpec, seed: complex, w_target: complex, iters: int = 12
) -> tuple[complex, float]:
    alpha = seed
    best = (seed, float("inf"))
    for _ in range(iters):
        w, dw = _fd(spec, alpha)
        res = abs(w - w_target)
        if res < best[1]:
            best = (alpha, res)
        if res <= 1e-14 or dw == 0:
            break
        alpha = alpha - (w - w_target) / dw
    else:
        w, _ = _fd(spec, alpha)
        if abs(w - w_target) < best[1]:
            best = (alpha, abs(w - w_target))
    return best


def lift_circle(
    spec: FunctionSpec,
    zeta: float,
    u: float,
    s_start: float,
    ode_cfg=None,
    *,
    contact: complex,
    branch_k: int = 0,
) -> LiftedPath:
    """Integrate d(alpha)/dt = i u e^{it} / f'(alpha) from the reference ray.

    The start point is s_start * contact, which must map onto the circle
    |w - zeta| = u to within lift_tol (else StartOffCurve).  Steps are
    Dormand-Prince 5(4); a step is rejected when the pre-projection lift
    fidelity |f(alpha) - gamma(t)| exceeds lift_tol, and every accepted
    point is polished with one Newton correction.  Integration stops at
    the unit circle (the terminal point is then refined until
    1 - |alpha| <= terminal_tol), near a critical point of f, or when the
    step budget runs out.
    """
    cfg = parse_kv(ode_cfg, LIFT_DEFAULTS)
    rtol, atol = cfg["rtol"], cfg["atol"]
    max_step = cfg["max_step"]
    lift_tol = cfg["lift_tol"]
    boundary_tol = cfg["boundary_tol"]
    terminal_tol = cfg["terminal_tol"]
    crit_tol = cfg["crit_tol"]
    budget = int(cfg["step_budget"])

    z0 = s_start * contact
    w0, dw0 = _fd(spec, z0)
    g0 = w0 - zeta
    if abs(abs(g0) - u) > lift_tol:
        raise StartOffCurve(
            f"start point maps to radius {abs(g0)!r}, wanted {u!r}"
        )
    theta = math.atan2(g0.imag, g0.real) + 2.0 * math.pi * branch_k

    def gamma(t: float) -> complex:
        return zeta + u * cmath.exp(1j * t)

    def rhs(t: float, alpha: complex) -> complex:
        _, dw = _fd(spec, alpha)
        if abs(dw) < crit_tol * 1e-3:
            raise _DerivativeVanished(alpha, t)
        return 1j * u * cmath.exp(1j * t) / dw

    ts = [theta]
    alphas = [z0]
    worst_fid = abs(w0 - gamma(theta))

    t = theta
    alpha = z0
    h = min(1e-3, max_step)
    termination = None
    T = theta
    k_cache = rhs(t, alpha)
    steps = 0
    rejects = 0

    while steps < budget:
        steps += 1
        h = min(h, max_step)
        ks = [k_cache]
        try:
            for i in range(1, 7):
                acc = 0j
                for j, aij in enumerate(_DP_A[i]):
                    acc += aij * ks[j]
                ks.append(rhs(t + _DP_C[i] * h, alpha + h * acc))
        except _DerivativeVanished:
            termination = "critical-point-proximity"
            T = t
            break
        y5 = alpha + h * sum(b * k for b, k in zip(_DP_B5, ks))
        y4 = alpha + h * sum(b * k for b, k in zip(_DP_B4, ks))
        err = abs(y5 - y4)
        tol = atol + rtol * max(abs(alpha), abs(y5))
        if err > tol:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            rejects += 1
            if rejects > 4 * budget:
                termination = "step-limit"
                T = t
                break
            continue
        t_new = t + h
        w_new, _ = _fd(spec, y5)
        fid_raw = abs(w_new - gamma(t_new))
        if fid_raw > lift_tol:
            h *= 0.5
            rejects += 1
            if h < 1e-15:
                termination = "step-limit"
                T = t
                break
            continue
        alpha_new, fid = _newton_project(spec, y5, gamma(t_new))
        if fid > lift_tol:
            raise SolverFailure(
                f"Newton projection failed at t={t_new!r}: fidelity {fid!r}"
            )
        worst_fid = max(worst_fid, fid)

        _, dw_new = _fd(spec, alpha_new)
        if abs(dw_new) < crit_tol:
            ts.append(t_new)
            alphas.append(alpha_new)
            termination = "critical-point-proximity"
            T = t_new
            break

        if abs(alpha_new) >= 1.0 - boundary_tol:
            # crossed into the boundary layer: refine the exit time so the
            # recorded endpoint sits within terminal_tol of the circle
            t_ref, a_ref = _refine_exit(
                spec, gamma, rhs, t, alpha, t_new, alpha_new,
                terminal_tol, lift_tol,
            )
            ts.append(t_ref)
            alphas.append(a_ref)
            termination = (
                "reached-boundary"
                if abs(a_ref) >= 1.0 - boundary_tol
                else "step-limit"
            )
            T = t_ref
            break

        ts.append(t_new)
        alphas.append(alpha_new)
        t, alpha = t_new, alpha_new
        k_cache = ks[6] if _DP_C[6] == 1.0 else rhs(t, alpha)
        if err > 0:
            h *= min(5.0, 0.9 * (tol / err) ** 0.2)
        else:
            h *= 5.0
    else:
        termination = "step-limit"
        T = t

    path = LiftedPath(
        u=float(u), theta=float(theta), T=float(T),
        branch_index=branch_k,
        t=np.asarray(ts), alpha=np.asarray(alphas),
        termination=termination, fidelity=float(worst_fid),
    )
    if np.any(np.abs(path.alpha[:-1]) >= 1.0):
        raise SolverFailure("lift escaped the unit disk before its endpoint")
    return path


def _refine_exit(spec, gamma, rhs, t0, a0, t1, a1, terminal_tol, lift_tol):
    """Pin the exit point onto the ring 1 - terminal_tol <= |alpha| < 1.

    First brackets the crossing of the target circle (marching outward in
    projected Euler steps when the recorded step stopped short of it),
    then bisects the exit time, re-solving the lift equation at every
    probe so fidelity never degrades."""
    target = 1.0 - terminal_tol
    if abs(a1) >= target:
        lo_t, lo_a, hi_t, hi_a = t0, a0, t1, a1
    else:
        t, alpha = t1, a1
        h = max(0.5 * (t1 - t0), 1e-9)
        hi_t = None
        for _ in range(400):
            k1 = rhs(t, alpha)
            cand, fid = _newton_solve(spec, alpha + h * k1, gamma(t + h))
            if fid > lift_tol:
                h *= 0.5
                if h < 1e-15:
                    return t, alpha
                continue
            if abs(cand) >= target:
                lo_t, lo_a, hi_t, hi_a = t, alpha, t + h, cand
                break
            t, alpha = t + h, cand
            h *= 1.5
        if hi_t is None:
            return t, alpha
    for _ in range(120):
        if abs(hi_a) < 1.0 and abs(hi_a) - target <= 0.5 * terminal_tol:
            break
        if hi_t - lo_t < 1e-15:
            break
        tm = 0.5 * (lo_t + hi_t)
        lam = (tm - lo_t) / (hi_t - lo_t)
        am, fm = _newton_solve(spec, lo_a + lam * (hi_a - lo_a), gamma(tm))
        if fm > lift_tol:
            break
        if abs(am) >= target:
            hi_t, hi_a = tm, am
        else:
            lo_t, lo_a = tm, am
    if abs(hi_a) < 1.0:
        return hi_t, hi_a
    return lo_t, lo_a


def start_parameter(
    spec: FunctionSpec,
    zeta: float,
    contact: complex,
    interval: MonotoneInterval,
    u: float,
) -> float:
    """Invert the distance profile on a monotone interval: the s in J with
    |f(s * contact) - zeta| = u, found by bisection (h is increasing on J)."""
    lo, hi = interval.J
    if not (interval.I[0] - 1e-9 <= u <= interval.I[1] + 1e-9):
        raise MeancoverError(
            f"radius {u} outside the interval band {interval.I}"
        )

    def prof(s: float) -> float:
        return abs(_fd(spec, s * contact)[0] - zeta) - u

    # the interval endpoints are interpolated off curve samples, so the
    # exact crossing can sit just outside J: widen the bracket as needed
    span = hi - lo
    flo, fhi = prof(lo), prof(hi)
    tries = 0
    while flo > 0.0 and tries < 60:
        lo = max(0.0, lo - 0.02 * span)
        flo = prof(lo)
        tries += 1
    tries = 0
    while fhi < 0.0 and tries < 60:
        hi = min(1.0, hi + 0.02 * span)
        fhi = prof(hi)
        tries += 1
    if flo > 0.0 or fhi < 0.0:
        raise StartOffCurve(
            f"distance profile does not attain radius {u} near interval "
            f"{interval.index}"
        )
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        fm = prof(mid)
        if fm == 0.0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lift_family(
    spec: FunctionSpec,
    zeta: float,
    curve: ReferenceCurve,
    interval: MonotoneInterval,
    n_u: int = 64,
    ode_cfg=None,
) -> list[LiftedPath]:
    """Lift a log-uniform grid of n_u radii across the interval band.

    The branch index is anchored to 0 at the left endpoint and adjusted
    along the grid so theta_u varies continuously (no 2*pi jumps).
    """
    lo, hi = interval.I
    us = np.geomspace(lo, hi, int(n_u))
    paths: list[LiftedPath] = []
    branch_k = 0
    prev_theta: Optional[float] = None
    for u in us:
        s0 = start_parameter(spec, zeta, curve.contact, interval, float(u))
        path = lift_circle(
            spec, zeta, float(u), s0, ode_cfg,
            contact=curve.contact, branch_k=branch_k,
        )
        if prev_theta is not None:
            while path.theta - prev_theta > math.pi:
                branch_k -= 1
                path = lift_circle(
                    spec, zeta, float(u), s0, ode_cfg,
                    contact=curve.contact, branch_k=branch_k,
                )
            while path.theta - prev_theta < -math.pi:
                branch_k += 1
                path = lift_circle(
                    spec, zeta, float(u), s0, ode_cfg,
                    contact=curve.contact, branch_k=branch_k,
                )
        prev_theta = path.theta
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# diagnostics on lifted paths


def schlicht_start_check(
    spec: FunctionSpec, z0: complex, rho: float = 1e-3, n: int = 2048
) -> bool:
    """True when f takes the value f(z0) exactly once in the disk of radius
    rho around z0 (winding of the image of the small circle about f(z0))."""
    w0, _ = _fd(spec, z0)
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    zs = z0 + rho * np.exp(1j * th)
    w, dw = eval_with_derivative(spec, zs)
    dz = 1j * rho * np.exp(1j * th)
    integrand = dw * dz / (w - w0)
    count = (integrand.mean() * 2.0 * math.pi).imag / (2.0 * math.pi)
    return bool(abs(count - 1.0) < 0.05)


def sheet_contains(
    spec: FunctionSpec,
    zeta: float,
    interval: MonotoneInterval,
    paths: Sequence[LiftedPath],
    z: complex,
) -> bool:
    """Probe membership of z in the union of the interval's lifts: its image
    radius must fall inside the band and its angular coordinate inside the
    lifted range of the neighbouring grid radii."""
    w, _ = _fd(spec, z)
    u = abs(w - zeta)
    lo, hi = interval.I
    if not (lo < u < hi):
        return False
    if abs(z) >= 1.0:
        return False
    us = np.array([p.u for p in paths])
    i = int(np.searchsorted(us, u))
    i = min(max(i, 1), len(paths) - 1)
    p0, p1 = paths[i - 1], paths[i]
    t_raw = math.atan2((w - zeta).imag, (w - zeta).real)
    # unwrap onto the branch the family uses
    base = 0.5 * (p0.theta + p1.theta)
    t = t_raw + 2.0 * math.pi * round((base - t_raw) / (2.0 * math.pi))
    lam = (u - p0.u) / (p1.u - p0.u) if p1.u != p0.u else 0.5
    th_u = (1 - lam) * p0.theta + lam * p1.theta
    T_u = (1 - lam) * p0.T + lam * p1.T
    return th_u - 1e-9 <= t <= T_u + 1e-9


def simplicity_check(
    path: LiftedPath, self_tol: float = 1e-6, return_pair: bool = False
):
    """Verify the lift does not revisit a domain point: no two samples
    whose parameters differ by at least two typical steps may coincide to
    within self_tol."""
    pts = np.column_stack([path.alpha.real, path.alpha.imag])
    if len(pts) < 3:
        return (True, None) if return_pair else True
    dt = np.diff(path.t)
    step = float(np.median(dt)) if dt.size else 0.0
    tree = cKDTree(pts)
    pairs = tree.query_pairs(self_tol, output_type="ndarray")
    for i, j in pairs:
        if abs(path.t[j] - path.t[i]) >= 2.0 * step:
            return (False, (float(path.t[i]), float(path.t[j]))) if return_pair else False
    return (True, None) if return_pair else True


def beta_length(path: LiftedPath) -> float:
    """Angular extent T_u - theta_u of a completed lift."""
    if path.termination != "reached-boundary":
        raise IncompleteLift(
            f"lift at u={path.u!r} terminated by {path.termination}"
        )
    return path.T - path.theta


# ---------------------------------------------------------------------------
# coarea cross-check


@dataclass(frozen=True)
class CoareaRecord:
    lhs: float
    rhs_direct: float
    A1: object
    per_interval: tuple = field(default_factory=tuple)


def _sheet_integral(
    spec: FunctionSpec, paths: Sequence[LiftedPath], n_t: int = 200
) -> float:
    """Integrate |f'|^2 over the union of lifts, using the lift samples as
    a curvilinear mesh in (u, tau) coordinates with tau the normalized
    angular position.  This route never uses the angular extents directly,
    so it cross-checks the coarea identity rather than restating it."""
    m = len(paths)
    taus = np.linspace(0.0, 1.0, n_t)
    grid = np.empty((m, n_t), dtype=np.complex128)
    for i, p in enumerate(paths):
        t_line = p.theta + taus * (p.T - p.theta)
        grid[i] = np.interp(t_line, p.t, p.alpha.real) + 1j * np.interp(
            t_line, p.t, p.alpha.imag
        )
    us = np.array([p.u for p in paths])

    total = 0.0
    centers = 0.25 * (grid[:-1, :-1] + grid[:-1, 1:] + grid[1:, :-1] + grid[1:, 1:])
    _, dwc = eval_with_derivative(spec, centers.ravel())
    dwc = np.abs(np.asarray(dwc).reshape(centers.shape)) ** 2
    du = (us[1:] - us[:-1])[:, None]
    d_tau = taus[1] - taus[0]
    a_u = (grid[1:, :-1] + grid[1:, 1:] - grid[:-1, :-1] - grid[:-1, 1:]) / (2.0 * du)
    a_t = (grid[:-1, 1:] + grid[1:, 1:] - grid[:-1, :-1] - grid[1:, :-1]) / (2.0 * d_tau)
    jac = np.abs((np.conj(a_u) * a_t).imag)
    total = float(np.sum(dwc * jac * du * d_tau))
    return total


def coarea_check(
    spec: FunctionSpec,
    zeta: float,
    intervals: Sequence[MonotoneInterval],
    u_grid: int = 64,
    *,
    curve: ReferenceCurve,
    families: Optional[Sequence[Sequence[LiftedPath]]] = None,
    ode_cfg=None,
    quad_cfg=None,
) -> CoareaRecord:
    """Compare two routes to the area swept by the lifted circles.

    lhs integrates u * (T_u - theta_u) over each radius band by trapezoid;
    rhs_direct integrates |f'|^2 over the lifted sheets through a finite
    difference Jacobian on the (u, angle) mesh.  Both are dominated by the
    full sublevel area at level 1, which is returned alongside.
    """
    if families is None:
        families = [
            lift_family(spec, zeta, curve, iv, u_grid, ode_cfg)
            for iv in intervals
        ]
    lhs = 0.0
    rhs = 0.0
    per = []
    for iv, fam in zip(intervals, families):
        us = np.array([p.u for p in fam])
        lens = np.array([beta_length(p) for p in fam])
        part_lhs = float(np.trapezoid(lens * us, us))
        part_rhs = _sheet_integral(spec, fam)
        lhs += part_lhs
        rhs += part_rhs
        per.append((iv.index, part_lhs, part_rhs))
    A1 = sublevel_area(spec, 1.0, quad_cfg)
    return CoareaRecord(lhs=lhs, rhs_direct=rhs, A1=A1, per_interval=tuple(per))
