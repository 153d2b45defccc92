"""Covering areas, growth ratios, winding counts, omitted points, and the
inner radius of the origin component of a sublevel set.

The central quantity is the multiplicity-counted covering area

    A(M) = integral of |f'|^2 over {z in the unit disk : |f(z)| < M},

computed three independent ways so each estimate cross-checks the others:
adaptive quadtree quadrature on the domain, winding-number counting on an
image grid (argument principle), and weighted Monte Carlo.  The growth ratio
A(M(r)) / (pi M(r)^2) measures mean covering at scale r.

All estimators return an AreaEstimate carrying a heuristic (not certified)
error bound; agreement of the three methods is the intended validation, and
the harness runs that comparison across the whole corpus.

For meromorphic specs (analyticity_flag false) the quadrature integrand is
dropped inside a 1e-6 neighbourhood of each pole; the sublevel set itself
stays clear of poles, so this only suppresses overflow, not area.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from io import StringIO
from typing import Optional

import csv

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import ndimage

from .errors import (
    BadParameter,
    BudgetExceeded,
    NonIntegerResult,
    NotUnivalent,
    ResolutionTooCoarse,
    ValueOnContour,
)
from .funcmodel import (
    FunctionSpec,
    eval_with_derivative,
    max_modulus_on_circle,
    poles_inside,
)
from .kvconfig import parse_kv

QUAD_DEFAULTS = {"depth": 12, "budget": 2_000_000, "target": 0.0}
COUNT_DEFAULTS = {"grid": 96, "levels": 3, "contour_tol": 1e-8}
SCAN_DEFAULTS = {"grid": 128, "contour_tol": 1e-8}
INNER_DEFAULTS = {"grid": 512, "tol": 1e-12}


# ---------------------------------------------------------------------------
# result records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AreaEstimate:
    value: float
    error_bound: float
    method: str
    sample_count: int

    def csv_row(self, spec_text: str, M: float) -> str:
        buf = StringIO()
        csv.writer(buf, lineterminator="").writerow(
            [spec_text, repr(float(M)), self.method, repr(self.value), repr(self.error_bound), self.sample_count]
        )
        return buf.getvalue()


@dataclass(frozen=True)
class OmittedPointResult:
    zeta: Optional[complex]
    scan_resolution: float
    witnesses: list = field(repr=False)
    # normalization transform making the omitted point real positive at M = 1
    normalized_zeta: Optional[float] = None
    rotation: Optional[float] = None
    scale: Optional[float] = None


@dataclass(frozen=True)
class InnerRadiusResult:
    r: float
    a: complex
    component_grid: np.ndarray = field(repr=False)
    grid_step: float = 0.0
    M: float = 0.0


# ---------------------------------------------------------------------------
# adaptive quadrature of |f'|^2 over {|f| < M}
# ---------------------------------------------------------------------------

_GL4_X, _GL4_W = leggauss(4)
_GL6_X, _GL6_W = leggauss(6)
_GL4_WW = np.outer(_GL4_W, _GL4_W)
_GL6_WW = np.outer(_GL6_W, _GL6_W)
_OFF3 = np.array([-0.5, 0.0, 0.5])
_VERT9 = np.arange(9) / 8.0 - 0.5
_CENT8 = (np.arange(8) + 0.5) / 8.0 - 0.5


def _tri_frac(v0, v1, v2):
    """Area fraction of {linear interpolant < 0} on a triangle, vectorized."""
    tiny = 1e-300
    f0 = np.clip(v0 * v0 / ((v0 - v1) * (v0 - v2) + tiny), 0.0, 1.0)
    f1 = np.clip(v1 * v1 / ((v1 - v0) * (v1 - v2) + tiny), 0.0, 1.0)
    f2 = np.clip(v2 * v2 / ((v2 - v0) * (v2 - v1) + tiny), 0.0, 1.0)
    pattern = (
        (v0 < 0).astype(np.int8)
        + 2 * (v1 < 0).astype(np.int8)
        + 4 * (v2 < 0).astype(np.int8)
    )
    stack = np.stack(
        [np.zeros_like(f0), f0, f1, 1.0 - f2, f2, 1.0 - f1, 1.0 - f0, np.ones_like(f0)],
        axis=-1,
    )
    return np.take_along_axis(stack, pattern[..., None].astype(np.intp), axis=-1)[..., 0]


def _frac_inside(chi):
    """Per-subcell fraction of {chi < 0} from vertex samples (k, m+1, m+1)."""
    a = chi[:, :-1, :-1]
    b = chi[:, 1:, :-1]
    c = chi[:, 1:, 1:]
    e = chi[:, :-1, 1:]
    return 0.5 * (_tri_frac(a, b, c) + _tri_frac(a, c, e))


def _cell_points(cx, cy, side, offx, offy):
    zx = cx[:, None, None] + offx[None, :, None] * side[:, None, None]
    zy = cy[:, None, None] + offy[None, None, :] * side[:, None, None]
    return zx + 1j * zy


def _march_cells(spec, M, cx, cy, side):
    """Finalize straddling cells: sub-grid level-set area with an error from
    a coarse-versus-fine comparison of the same estimator."""
    zv = _cell_points(cx, cy, side, _VERT9, _VERT9)
    wv, dwv, badv = eval_with_derivative(spec, zv, pole="mask")
    chi_f = np.abs(wv) - M
    chi_f[badv | ~np.isfinite(chi_f)] = 1e30
    chi_d = np.abs(zv) - 1.0

    zc = _cell_points(cx, cy, side, _CENT8, _CENT8)
    wc, dwc, badc = eval_with_derivative(spec, zc, pole="mask")
    weight = np.abs(dwc) ** 2
    weight[badc | ~np.isfinite(weight)] = 0.0

    frac_f = _frac_inside(chi_f)
    frac_d = _frac_inside(chi_d)
    both_cut = (frac_f > 0) & (frac_f < 1) & (frac_d > 0) & (frac_d < 1)
    frac = np.minimum(frac_f, frac_d)
    sub8 = side * side / 64.0
    val8 = (weight * frac).sum(axis=(1, 2)) * sub8

    # coarse pass reuses every other vertex; its subcell centers coincide
    # with the odd fine vertices, so no extra evaluations are needed
    wq = np.abs(dwv[:, 1::2, 1::2]) ** 2
    wq[badv[:, 1::2, 1::2] | ~np.isfinite(wq)] = 0.0
    frac4 = np.minimum(_frac_inside(chi_f[:, ::2, ::2]), _frac_inside(chi_d[:, ::2, ::2]))
    val4 = (wq * frac4).sum(axis=(1, 2)) * side * side / 16.0

    err = np.abs(val8 - val4) + 0.5 * (weight * both_cut).sum(axis=(1, 2)) * sub8
    return val8, err, zv.size + zc.size


def _gl_cells(spec, cx, cy, side, nodes, ww):
    half = side / 2.0
    z = _cell_points(cx, cy, half, nodes, nodes)
    _, dw, bad = eval_with_derivative(spec, z, pole="mask")
    w2 = np.abs(dw) ** 2
    w2[bad | ~np.isfinite(w2)] = 0.0
    return (w2 * ww[None, :, :]).sum(axis=(1, 2)) * half * half, z.size


def sublevel_area(spec: FunctionSpec, M: float, quad_cfg=None) -> AreaEstimate:
    """A(M) by quadtree quadrature of |f'|^2 over the sublevel set.

    Cells whose sampled |f| range (padded by a Lipschitz bound from |f'|)
    straddles the level M, or which cross the unit circle, are refined; at
    the depth limit the level set is localized inside the cell by linear
    interpolation on a sub-grid.  Interior cells use Gauss-Legendre 6x6 with
    the 4x4 rule as an error estimate, refining while the difference exceeds
    the per-cell share of the target.

    ``quad_cfg``: "depth=12,budget=2e6,target=0" (target 0 means refine to
    the depth limit unconditionally).
    """
    if not (M > 0 and math.isfinite(M)):
        raise BadParameter(f"level M must be positive and finite, got {M}")
    cfg = parse_kv(quad_cfg, QUAD_DEFAULTS)
    depth_max = cfg["depth"]
    budget = cfg["budget"]
    target = cfg["target"]
    if depth_max < 4 or depth_max > 40:
        raise BadParameter(f"depth must be in [4, 40], got {depth_max}")

    d = np.full(64, 3, dtype=np.int64)
    ij = np.arange(64)
    ix = ij // 8
    iy = ij % 8
    processed = 0
    evals = 0
    vals: list[float] = []
    errs: list[float] = []

    while d.size:
        processed += d.size
        if processed > budget:
            raise BudgetExceeded(
                f"quadrature cell budget {budget} exhausted with "
                f"{math.fsum(errs):.3g} unresolved error (target {target:g})"
            )
        side = 2.0 / (1 << d).astype(float)
        cx = -1.0 + (ix + 0.5) * side
        cy = -1.0 + (iy + 0.5) * side

        z = _cell_points(cx, cy, side, _OFF3, _OFF3)
        w, dw, bad = eval_with_derivative(spec, z, pole="mask")
        evals += z.size
        aw = np.abs(w)
        adw = np.abs(dw)
        aw[bad | ~np.isfinite(aw)] = np.inf
        adw[bad | ~np.isfinite(adw)] = np.inf
        wmin = aw.min(axis=(1, 2))
        wmax = aw.max(axis=(1, 2))
        lip = adw.max(axis=(1, 2))
        pad = 0.75 * lip * side

        dx = np.maximum(np.abs(cx) - side / 2, 0.0)
        dy = np.maximum(np.abs(cy) - side / 2, 0.0)
        dmin = np.hypot(dx, dy)
        dmax = np.hypot(np.abs(cx) + side / 2, np.abs(cy) + side / 2)

        drop = (dmin >= 1.0) | (wmin - pad > M) | np.isinf(wmin)
        interior = (~drop) & (dmax <= 1.0) & np.isfinite(pad) & (wmax + pad < M)
        straddle = (~drop) & (~interior)
        tau = np.maximum(target * side * side / 4.0, 0.0)

        split_ix: list[np.ndarray] = []
        split_iy: list[np.ndarray] = []
        split_d: list[np.ndarray] = []

        def _schedule_split(mask_idx):
            for ox, oy in ((0, 0), (0, 1), (1, 0), (1, 1)):
                split_d.append(d[mask_idx] + 1)
                split_ix.append(ix[mask_idx] * 2 + ox)
                split_iy.append(iy[mask_idx] * 2 + oy)

        at_cap = d >= depth_max
        cand_idx: list[np.ndarray] = []
        cand_val: list[np.ndarray] = []
        cand_err: list[np.ndarray] = []

        ii = np.nonzero(interior)[0]
        if ii.size:
            v6, n6 = _gl_cells(spec, cx[ii], cy[ii], side[ii], _GL6_X, _GL6_WW)
            v4, n4 = _gl_cells(spec, cx[ii], cy[ii], side[ii], _GL4_X, _GL4_WW)
            evals += n6 + n4
            cand_idx.append(ii)
            cand_val.append(v6)
            cand_err.append(np.abs(v6 - v4))

        ss = np.nonzero(straddle)[0]
        if ss.size:
            # with no error target, pre-cap straddle cells always split, so
            # marching them mid-refinement would be wasted work
            need_march = ss[at_cap[ss]] if target == 0.0 else ss
            _schedule_split(ss[~at_cap[ss]] if target == 0.0 else np.array([], dtype=np.intp))
            if need_march.size:
                mv, me, n = _march_cells(
                    spec, M, cx[need_march], cy[need_march], side[need_march]
                )
                evals += n
                cand_idx.append(need_march)
                cand_val.append(mv)
                cand_err.append(me)

        if cand_idx:
            cidx = np.concatenate(cand_idx)
            cval = np.concatenate(cand_val)
            cerr = np.concatenate(cand_err)
            floor = 1e-14 * (np.abs(cval) + 1.0)
            if target == 0.0:
                finalize = at_cap[cidx] | straddle[cidx] | (cerr <= np.maximum(tau[cidx], floor))
            else:
                finalize = at_cap[cidx] | (cerr <= floor)
                may = ~finalize
                avail = max(target - math.fsum(errs) - float(cerr[finalize].sum()), 0.0)
                if may.any():
                    if float(cerr[may].sum()) <= avail:
                        finalize |= may
                    else:
                        # keep the cheapest cells, splitting the error-heavy
                        # tail; half the remaining budget is locked in now
                        order = np.nonzero(may)[0][np.argsort(cerr[may], kind="stable")]
                        keep = np.cumsum(cerr[order]) <= 0.5 * avail
                        finalize[order[keep]] = True
            for k in np.nonzero(finalize)[0]:
                vals.append(float(cval[k]))
                errs.append(float(cerr[k]))
            _schedule_split(cidx[~finalize])

        if split_d:
            d = np.concatenate(split_d)
            ix = np.concatenate(split_ix)
            iy = np.concatenate(split_iy)
        else:
            break

    return AreaEstimate(
        value=math.fsum(vals),
        error_bound=math.fsum(errs),
        method="quadrature",
        sample_count=evals,
    )


def growth_function(spec: FunctionSpec, r: float, quad_cfg=None) -> float:
    """Mean covering ratio A(M(r)) / (pi M(r)^2)."""
    if not (0 < r < 1):
        raise BadParameter(f"radius must lie in (0, 1), got {r}")
    probe = np.exp(1j * np.linspace(0.3, 5.9, 16)) * 0.7
    _, dws = eval_with_derivative(spec, probe)
    if np.max(np.abs(dws)) < 1e-15:
        raise BadParameter("spec is constant; the growth ratio is undefined")
    m_r = max_modulus_on_circle(spec, r)
    est = sublevel_area(spec, m_r, quad_cfg)
    return est.value / (math.pi * m_r * m_r)


# ---------------------------------------------------------------------------
# argument-principle counting
# ---------------------------------------------------------------------------


def _winding_batch(spec, ws, r, contour_tol, n0=4096, cap=65536):
    """Winding numbers of f(circle of radius r) around each w in ws.

    Returns (counts, residuals, contour_flags, nonint_flags).  The node
    count doubles until each residual drops below 0.05 or the cap is hit;
    residuals in (0.05, 0.1] are accepted, larger ones flagged non-integer.
    """
    ws = np.asarray(ws, dtype=np.complex128).reshape(-1)
    m = ws.size
    counts = np.zeros(m, dtype=np.int64)
    residuals = np.full(m, np.inf)
    contour_bad = np.zeros(m, dtype=bool)
    todo = np.ones(m, dtype=bool)
    n = n0
    while n <= cap and todo.any():
        theta = np.arange(n) * (2.0 * math.pi / n)
        z = r * np.exp(1j * theta)
        w, dw, bad = eval_with_derivative(spec, z, pole="mask")
        if bad.any():
            raise ValueOnContour(f"pole within tolerance of the contour |z| = {r}")
        core = dw * z
        idx = np.nonzero(todo)[0]
        for lo in range(0, idx.size, 256):
            sel = idx[lo : lo + 256]
            den = w[None, :] - ws[sel, None]
            mind = np.abs(den).min(axis=1)
            near = mind < contour_tol
            with np.errstate(all="ignore"):
                integ = (core[None, :] / den).mean(axis=1)
            integ = np.where(np.isfinite(integ), integ, 0.0)
            k = np.round(integ.real)
            res = np.abs(integ - k)
            counts[sel] = k.astype(np.int64)
            residuals[sel] = res
            contour_bad[sel] |= near
            todo[sel] = (res >= 0.05) & ~near
        n *= 2
    nonint = todo & (residuals > 0.1)
    return counts, residuals, contour_bad, nonint


def preimage_count(
    spec: FunctionSpec,
    w: complex,
    r: float = 1.0,
    contour_tol: float = 1e-8,
    return_residual: bool = False,
):
    """Winding number of the image of |z| = r around w (argument principle).

    For analytic specs this is the number of preimages of w inside the
    circle, with multiplicity.  For meromorphic specs it is the zero count
    minus the pole count of f - w; callers needing the raw preimage count
    add back the pole census (see area_by_counting).
    """
    if not (0 < r <= 1):
        raise BadParameter(f"contour radius must lie in (0, 1], got {r}")
    counts, residuals, near, nonint = _winding_batch(
        spec, [complex(w)], r, contour_tol
    )
    if near[0]:
        raise ValueOnContour(
            f"|f - w| dips below {contour_tol:g} on the contour; w = {complex(w)}"
        )
    if nonint[0]:
        raise NonIntegerResult(
            f"contour integral residual {residuals[0]:.3g} exceeds 0.1 at w = {complex(w)}"
        )
    if return_residual:
        return int(counts[0]), float(residuals[0])
    return int(counts[0])


def area_by_counting(spec: FunctionSpec, M: float, w_grid=None) -> AreaEstimate:
    """A(M) as the image-side integral of the preimage multiplicity n(w).

    Cell-centered Riemann sum over D(0, M); cells whose neighbours disagree
    on n(w) are refined.  Winding numbers are corrected by the pole count of
    the tree so the summand is the actual preimage multiplicity even for
    meromorphic specs.  Nodes hugging the contour value are jittered once
    and then skipped into the error bound.
    """
    if not (M > 0 and math.isfinite(M)):
        raise BadParameter(f"level M must be positive and finite, got {M}")
    cfg = parse_kv(w_grid, COUNT_DEFAULTS)
    g0 = cfg["grid"]
    levels = cfg["levels"]
    ctol = cfg["contour_tol"]
    if g0 < 8:
        raise BadParameter(f"grid must be at least 8, got {g0}")
    pole_corr = len(poles_inside(spec, 1.0))

    evals = 0
    skipped_err = 0.0

    def solve(ws_flat, step):
        nonlocal evals, skipped_err
        counts, _, near, nonint = _winding_batch(spec, ws_flat, 1.0, ctol)
        evals += ws_flat.size * 4096
        sick = near | nonint
        if sick.any():
            jit = ws_flat[sick] + step * (0.171 + 0.293j)
            c2, _, near2, nonint2 = _winding_batch(spec, jit, 1.0, ctol)
            counts[np.nonzero(sick)[0]] = c2
            still = near2 | nonint2
            if still.any():
                bad_idx = np.nonzero(sick)[0][still]
                counts[bad_idx] = 0
                skipped_err += still.sum() * step * step * max(1, pole_corr + 1)
        return counts + pole_corr

    # level 0: dense cell-centered grid on [-M, M]^2
    g = g0
    step = 2.0 * M / g
    ax = -M + (np.arange(g) + 0.5) * step
    wx, wy = np.meshgrid(ax, ax, indexing="ij")
    wc = wx + 1j * wy
    inside = np.abs(wc) < M + step
    n_arr = np.zeros((g, g), dtype=np.int64)
    n_arr[inside] = solve(wc[inside].ravel(), step)

    for _ in range(levels):
        # refine cells adjacent to a count disagreement
        diff = np.zeros_like(n_arr, dtype=bool)
        diff[:-1, :] |= n_arr[:-1, :] != n_arr[1:, :]
        diff[1:, :] |= n_arr[:-1, :] != n_arr[1:, :]
        diff[:, :-1] |= n_arr[:, :-1] != n_arr[:, 1:]
        diff[:, 1:] |= n_arr[:, :-1] != n_arr[:, 1:]
        g *= 2
        step /= 2.0
        n_arr = np.repeat(np.repeat(n_arr, 2, axis=0), 2, axis=1)
        flag = np.repeat(np.repeat(diff, 2, axis=0), 2, axis=1)
        ax = -M + (np.arange(g) + 0.5) * step
        wx, wy = np.meshgrid(ax, ax, indexing="ij")
        wc = wx + 1j * wy
        todo = flag & (np.abs(wc) < M + step)
        if not todo.any():
            break
        n_arr[todo] = solve(wc[todo].ravel(), step)

    # disk-coverage fraction per cell from the exact |w| geometry
    vx = -M + np.arange(g + 1) * step
    gx, gy = np.meshgrid(vx, vx, indexing="ij")
    chi = np.hypot(gx, gy) - M
    frac = _frac_inside(chi[None, :, :])[0]

    value = float(np.sum(n_arr * frac)) * step * step
    diff = np.zeros_like(n_arr, dtype=bool)
    diff[:-1, :] |= n_arr[:-1, :] != n_arr[1:, :]
    diff[:, :-1] |= n_arr[:, :-1] != n_arr[:, 1:]
    jump = np.zeros_like(n_arr)
    jump[:-1, :] = np.abs(n_arr[:-1, :] - n_arr[1:, :])
    jump[:, :-1] = np.maximum(jump[:, :-1], np.abs(n_arr[:, :-1] - n_arr[:, 1:]))
    band_err = float(np.sum(jump[diff] * frac[diff])) * step * step * 0.5
    edge_err = float(np.sum((frac > 0) & (frac < 1))) * step * step * 0.25

    return AreaEstimate(
        value=value,
        error_bound=band_err + edge_err * 0.05 + skipped_err,
        method="counting",
        sample_count=evals,
    )


def monte_carlo_area(spec: FunctionSpec, M: float, n: int, seed: int) -> AreaEstimate:
    """A(M) as a |f'|^2-weighted hit fraction over uniform samples in the disk.

    The estimator pi * mean(|f'|^2 * [|f| < M]) is unbiased for the
    quadrature integral; error_bound is three standard errors.  Results are
    deterministic in (n, seed) and independent of batching.
    """
    if n < 10_000:
        raise BadParameter(f"need at least 1e4 samples, got {n}")
    if not (M > 0 and math.isfinite(M)):
        raise BadParameter(f"level M must be positive and finite, got {M}")
    batch = 65536
    total = 0.0
    total_sq = 0.0
    done = 0
    b = 0
    while done < n:
        take = min(batch, n - done)
        rng = np.random.default_rng([seed, b])
        u1 = rng.random(take)
        u2 = rng.random(take)
        z = np.sqrt(u1) * np.exp(2j * math.pi * u2)
        w, dw, bad = eval_with_derivative(spec, z, pole="mask")
        vals = np.abs(dw) ** 2
        hit = (np.abs(w) < M) & ~bad & np.isfinite(vals)
        vals = np.where(hit, vals, 0.0)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += take
        b += 1
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    se = math.pi * math.sqrt(var / n)
    return AreaEstimate(
        value=math.pi * mean,
        error_bound=3.0 * se,
        method="monte-carlo",
        sample_count=n,
    )


# ---------------------------------------------------------------------------
# omitted points and the inner radius
# ---------------------------------------------------------------------------


def find_omitted_point(spec: FunctionSpec, M: float, scan_cfg=None) -> OmittedPointResult:
    """Scan a lattice on D(0, M) for values with zero preimages.

    Returns the omitted point of smallest modulus (ties broken by smallest
    argument in [0, 2pi)), together with the rotation/scale making it real
    positive at level 1.  Absence at the scanned resolution is a value, not
    an error.
    """
    if not spec.analyticity_flag:
        raise BadParameter("omitted-point scan requires a pole-free spec")
    cfg = parse_kv(scan_cfg, SCAN_DEFAULTS)
    g = cfg["grid"]
    step = 2.0 * M / g
    k = np.arange(-(g // 2), g // 2 + 1)
    wx, wy = np.meshgrid(k * step, k * step, indexing="ij")
    wc = (wx + 1j * wy).ravel()
    wc = wc[np.abs(wc) < M * (1 - 1e-12)]
    counts, _, near, nonint = _winding_batch(spec, wc, 1.0, cfg["contour_tol"])
    valid = ~(near | nonint)
    witnesses = [(complex(wc[i]), int(counts[i])) for i in np.nonzero(valid)[0]]
    omitted = valid & (counts == 0)
    if not omitted.any():
        return OmittedPointResult(zeta=None, scan_resolution=step, witnesses=witnesses)
    cand = wc[omitted]
    args = np.angle(cand) % (2.0 * math.pi)
    order = np.lexsort((args, np.abs(cand)))
    zeta = complex(cand[order[0]])
    return OmittedPointResult(
        zeta=zeta,
        scan_resolution=step,
        witnesses=witnesses,
        normalized_zeta=abs(zeta) / M,
        rotation=-cmath.phase(zeta),
        scale=1.0 / M,
    )


def inner_radius(spec: FunctionSpec, M: float, grid_cfg=None) -> InnerRadiusResult:
    """Inner radius of the origin component G of {|f| < M}.

    Flood fill on a node lattice identifies G; the nearest non-G node gives
    a candidate contact direction, and bisection along that ray locates the
    exit point from G (level-set crossing or unit circle, whichever first).
    """
    cfg = parse_kv(grid_cfg, INNER_DEFAULTS)
    g = cfg["grid"]
    if g % 2 or g < 16:
        raise BadParameter(f"grid must be even and at least 16, got {g}")
    step = 2.0 / g
    ax = -1.0 + np.arange(g + 1) * step
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    z = gx + 1j * gy
    w, _, bad = eval_with_derivative(spec, z, pole="mask")
    inside = (np.abs(z) < 1.0) & (np.abs(w) < M) & ~bad & np.isfinite(w)
    labels, _ = ndimage.label(inside, structure=[[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    origin = g // 2
    comp = labels[origin, origin]
    if comp == 0:
        raise BadParameter("the origin is not in the sublevel set; is M positive?")
    G = labels == comp
    if int(G.sum()) < 16:
        raise ResolutionTooCoarse(
            f"origin component occupies {int(G.sum())} nodes at grid {g}; refine the grid"
        )

    dist = np.abs(z)
    dist_nonG = np.where(G, np.inf, dist)
    flat = np.argsort(dist_nonG, axis=None, kind="stable")[:8]
    cand_dirs = []
    for fi in flat:
        i, j = divmod(int(fi), g + 1)
        zc = z[i, j]
        if zc == 0:
            continue
        cand_dirs.append((abs(zc), cmath.phase(zc)))

    def in_G_point(pt: complex) -> bool:
        if abs(pt) >= 1.0:
            return False
        wv, _, bv = eval_with_derivative(spec, np.array([pt]), pole="mask")
        return bool((np.abs(wv[0]) < M) and not bv[0])

    best_r = math.inf
    best_a = 0j
    for rho_c, phi in cand_dirs:
        lo = 0.0
        hi = min(rho_c + 1.5 * step, 1.0)
        e = cmath.exp(1j * phi)
        while in_G_point(hi * e):
            hi = min(hi + step, 1.0 - 1e-12)
            if hi >= 1.0 - 1e-12:
                break
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if in_G_point(mid * e):
                lo = mid
            else:
                hi = mid
        rho = 0.5 * (lo + hi)
        if rho < best_r:
            best_r = rho
            best_a = rho * e
    return InnerRadiusResult(r=best_r, a=best_a, component_grid=G, grid_step=step, M=M)


def koebe_univalent_check(spec: FunctionSpec, M: float, quad_cfg=None) -> bool:
    """Covering-to-containment check for univalent specs.

    Verifies univalence by winding numbers on an image grid, then tests the
    implication: A(M) < pi M^2 (with the error bound on the favorable side)
    implies max |f| on |z| = 1/16 stays at or below M.  A false hypothesis
    makes the implication vacuously true.
    """
    if not spec.analyticity_flag:
        raise NotUnivalent("univalence in the analytic sense requires a pole-free spec")
    m_full = max_modulus_on_circle(spec, 1.0)
    gg = 48
    step = 2.0 * m_full / gg
    ax = -m_full + (np.arange(gg) + 0.5) * step
    wx, wy = np.meshgrid(ax, ax, indexing="ij")
    wc = (wx + 1j * wy).ravel()
    wc = wc[np.abs(wc) < m_full * 0.98]
    counts, _, near, nonint = _winding_batch(spec, wc, 1.0, 1e-8)
    ok = ~(near | nonint)
    if (counts[ok] > 1).any():
        bad_w = wc[ok][np.argmax(counts[ok] > 1)]
        raise NotUnivalent(
            f"value {complex(bad_w)} is attained {int(counts[ok].max())} times"
        )
    est = sublevel_area(spec, M, quad_cfg)
    if est.value + est.error_bound >= math.pi * M * M:
        return True
    return max_modulus_on_circle(spec, 1.0 / 16.0) <= M * (1 + 1e-12)
