"""Stochastic heat equation solvers and KPZ scaling scenarios.

Two SPDEs on a space-time window [0, T] x [x0, x1]:

- additive:        d_t z = nu d_xx z + xi        (Crank-Nicolson, banded)
- multiplicative:  d_t z = nu d_xx z + z xi      (explicit Euler, Ito form)

xi is space-time white noise sampled on cells; its value enters a time step
at the left endpoint, which keeps the discrete scheme adapted (Ito). The
multiplicative solution feeds the Cole-Hopf map h = log z, whose rescalings
eps^{-1/2} h(eps^2 t, eps x) are the KPZ-window fields studied by the
limit-set scenarios. Positivity of z is enforced by flooring at 1e-300 with
incident counting; runs where flooring touches more than 0.1% of the grid
are refused as unreliable rather than silently continued.

Membership diagnostics: ``membership_functional`` measures the squared
residual norm int (d_t h - nu d_xx h)^2, the Cameron-Martin norm of the
additive equation, and ``parabolic_holder_norm`` measures regularity in the
parabolic distance |x - y| + |t - s|^{1/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .errors import (DomainError, InputError, PreconditionError,
                     ReliabilityError, StructuralError)
from .gaussian_sim import Field, SpaceTimeGrid, _as_seedspec, sample_white_noise

__all__ = [
    "heat_kernel",
    "solve_she_additive",
    "solve_she_multiplicative",
    "SheReport",
    "cole_hopf_kpz",
    "membership_functional",
    "kpz_membership",
    "parabolic_holder_norm",
]

Z_FLOOR = 1e-300


def heat_kernel(t, x, nu: float = 0.5):
    """Fundamental solution of d_t - nu d_xx, zero for t <= 0.

    K(t, x) = (4 pi nu t)^{-1/2} exp(-x^2 / (4 nu t)). At nu = 1/2 this is
    the standard Gaussian density (2 pi t)^{-1/2} exp(-x^2 / (2t)). The
    parabolic scaling identity K(t, x) = lam K(lam^2 t, lam x) holds exactly.
    """
    if nu <= 0:
        raise DomainError(f"diffusivity must be positive, got {nu}")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    pos = t > 0
    safe_t = np.where(pos, t, 1.0)
    out = np.where(pos, np.exp(-(x**2) / (4.0 * nu * safe_t))
                   / np.sqrt(4.0 * math.pi * nu * safe_t), 0.0)
    return out if out.shape else float(out)


def _forcing_rows(noise: Field) -> np.ndarray:
    """Node forcing from cell noise: node j reads its right cell (left-point in t)."""
    vals = noise.values
    nx1 = vals.shape[1]
    idx = np.minimum(np.arange(nx1 + 1), nx1 - 1)
    return vals[:, idx]


@dataclass
class SheReport:
    field: Field
    floored: int = 0
    floored_fraction: float = 0.0


def solve_she_additive(noise: Field, nu: float = 1.0, ic: np.ndarray = None) -> Field:
    """Crank-Nicolson solve of d_t z = nu d_xx z + xi, Dirichlet walls.

    ``noise`` may be sampled white noise or any deterministic cell forcing;
    with deterministic forcing the output approximates the mild solution
    int K(t-s, x-y) f(s, y) dy ds away from the walls (second-order scheme).
    The window must be wide enough that the walls stay irrelevant over the
    horizon; that is the caller's modeling choice, not checked here.
    """
    if noise.kind != "cells":
        raise StructuralError("forcing must live on cells")
    g = noise.stgrid
    z = np.zeros(g.nx) if ic is None else np.asarray(ic, dtype=float).copy()
    if z.shape != (g.nx,):
        raise StructuralError("initial condition does not match the space grid")
    a = nu * g.dt / g.dx**2
    # symmetric banded form of I - (a/2) L on interior nodes
    m = g.nx - 2
    ab = np.zeros((2, m))
    ab[0, 1:] = -0.5 * a
    ab[1, :] = 1.0 + a
    forcing = _forcing_rows(noise)
    out = np.empty((g.nt, g.nx))
    out[0] = z
    for n in range(g.nt - 1):
        zn = out[n]
        lap = zn[:-2] - 2.0 * zn[1:-1] + zn[2:]
        rhs = zn[1:-1] + 0.5 * a * lap + g.dt * forcing[n, 1:-1]
        nxt = np.zeros(g.nx)
        nxt[1:-1] = solveh_banded(ab, rhs)
        out[n + 1] = nxt
    return Field(stgrid=g, values=out, kind="nodes")


def solve_she_multiplicative(noise: Field, nu: float = 0.5,
                             ic: np.ndarray = None) -> SheReport:
    """Explicit Euler (Ito) solve of d_t z = nu d_xx z + z xi, z(0) = 1.

    Left-point coupling z^n xi^n keeps the scheme adapted. Stability needs
    the parabolic CFL number nu dt / dx^2 <= 1/2. Values that fall below
    1e-300 are floored and counted; more than 0.1% floored entries make the
    run unreliable and raise instead of returning garbage.
    """
    if noise.kind != "cells":
        raise StructuralError("noise must live on cells")
    g = noise.stgrid
    cfl = nu * g.dt / g.dx**2
    if cfl > 0.5 + 1e-12:
        raise PreconditionError(
            f"explicit scheme unstable: nu dt/dx^2 = {cfl:.3f} > 0.5")
    z = np.ones(g.nx) if ic is None else np.asarray(ic, dtype=float).copy()
    if z.shape != (g.nx,):
        raise StructuralError("initial condition does not match the space grid")
    forcing = _forcing_rows(noise)
    out = np.empty((g.nt, g.nx))
    out[0] = z
    floored = 0
    for n in range(g.nt - 1):
        zn = out[n]
        lap = np.zeros(g.nx)
        lap[1:-1] = zn[:-2] - 2.0 * zn[1:-1] + zn[2:]
        # Neumann walls: mirror ghost nodes so mass does not leak at the edge
        lap[0] = 2.0 * (zn[1] - zn[0])
        lap[-1] = 2.0 * (zn[-2] - zn[-1])
        nxt = zn + cfl * lap + g.dt * zn * forcing[n]
        low = nxt < Z_FLOOR
        floored += int(low.sum())
        nxt[low] = Z_FLOOR
        out[n + 1] = nxt
    frac = floored / out.size
    if frac > 1e-3:
        raise ReliabilityError(
            f"positivity floor touched {frac:.2%} of the grid (> 0.1%); "
            "refine the grid or shrink the noise amplitude")
    return SheReport(field=Field(stgrid=g, values=out, kind="nodes"),
                     floored=floored, floored_fraction=frac)


def cole_hopf_kpz(eps: float, obs_grid: SpaceTimeGrid, seed=0, nu: float = 0.5,
                  refine_t: int = 4, refine_x: int = 4):
    """KPZ-window field at scale eps through the Cole-Hopf map.

    Solves the multiplicative equation on the fine microscopic window
    [0, eps^2 T] x [-eps X, eps X] with noise amplitude
    C_eps = sqrt(log log(1/eps)), takes h = C_eps^{-1} log z, and emits

        (C_eps sqrt(eps))^{-1} h(eps^2 t, eps x)

    on the observation grid. The fine grid is an exact refinement
    (refine_t, refine_x per observation cell), so the rescaling is stride
    subsampling of the one solved field; nothing is re-solved or
    interpolated. eps must satisfy the log log guard eps < 1/e.
    """
    if not 0.0 < eps < 1.0 / math.e:
        raise DomainError(
            f"eps must lie in (0, 1/e) for the log log amplitude, got {eps}")
    if obs_grid.t0 != 0.0 or obs_grid.x0 != -obs_grid.x1:
        raise StructuralError("observation window must be [0, T] x [-X, X]")
    if refine_t < 1 or refine_x < 1:
        raise InputError("refinement factors must be at least 1")
    c_eps = math.sqrt(math.log(math.log(1.0 / eps)))
    fine = SpaceTimeGrid(0.0, eps**2 * obs_grid.t1,
                         (obs_grid.nt - 1) * refine_t + 1,
                         -eps * obs_grid.x1, eps * obs_grid.x1,
                         (obs_grid.nx - 1) * refine_x + 1)
    noise = sample_white_noise(fine, seed=_as_seedspec(seed).child("kpz-noise"))
    amplified = Field(stgrid=fine, values=c_eps * noise.values, kind="cells")
    rep = solve_she_multiplicative(amplified, nu=nu)
    h = np.log(rep.field.values) / c_eps
    sub = h[::refine_t, ::refine_x] / (c_eps * math.sqrt(eps))
    field = Field(stgrid=obs_grid, values=sub, kind="nodes")
    info = {"eps": eps, "c_eps": c_eps, "floored": rep.floored,
            "floored_fraction": rep.floored_fraction,
            "fine_shape": (fine.nt, fine.nx)}
    return field, info


def membership_functional(values: np.ndarray, stgrid: SpaceTimeGrid,
                          nu: float = 1.0, presmooth: bool = False) -> float:
    """Squared residual norm int (d_t h - nu d_xx h)^2 dx dt of a field.

    This is the squared Cameron-Martin norm of the additive heat equation;
    finite values certify membership, blowup under grid refinement certifies
    escape. ``presmooth`` averages over a 2 dx window first, which separates
    genuine roughness from single-node discretization noise.
    """
    h = np.asarray(values, dtype=float)
    if h.shape != (stgrid.nt, stgrid.nx):
        raise StructuralError("field samples do not match the grid")
    if presmooth:
        sm = h.copy()
        sm[:, 1:-1] = 0.25 * h[:, :-2] + 0.5 * h[:, 1:-1] + 0.25 * h[:, 2:]
        h = sm
    ht = np.gradient(h, stgrid.dt, axis=0, edge_order=2)
    hxx = np.empty_like(h)
    hxx[:, 1:-1] = (h[:, 2:] - 2.0 * h[:, 1:-1] + h[:, :-2]) / stgrid.dx**2
    hxx[:, 0] = (2.0 * h[:, 0] - 5.0 * h[:, 1] + 4.0 * h[:, 2] - h[:, 3]) / stgrid.dx**2
    hxx[:, -1] = (2.0 * h[:, -1] - 5.0 * h[:, -2] + 4.0 * h[:, -3] - h[:, -4]) / stgrid.dx**2
    resid = ht - nu * hxx
    inner = np.trapezoid(np.trapezoid(resid**2, dx=stgrid.dx, axis=1), dx=stgrid.dt)
    return float(inner)


def kpz_membership(values: np.ndarray, stgrid: SpaceTimeGrid, variant: str,
                   nu: float = 1.0, presmooth: bool = False,
                   box: tuple = None) -> float:
    """Residual L2 norm certifying membership in a KPZ-window limit set.

    variant "zero":   || d_t h - nu (d_xx h + (d_x h)^2) ||_{L2(box)}
    variant "linear": || d_t h - nu d_xx h ||_{L2(box)}
    variant "brownian_init":
        sqrt( || d_x h(0,.) ||^2_{L2} + (zero-variant residual)^2 )

    With h = nu^{-1}-free Cole-Hopf log of z solving d_t z = nu d_xx z + f z,
    the "zero" residual is exactly f, so the functional recovers
    ||f||_{L2(box)}; for h the heat convolution of f, "linear" does the
    same. box = (s, y) restricts to [0, s] x [-y, y] and must lie inside
    the field's extent.
    """
    h = np.asarray(values, dtype=float)
    if h.shape != (stgrid.nt, stgrid.nx):
        raise StructuralError("field samples do not match the grid")
    if variant not in ("zero", "linear", "brownian_init"):
        raise InputError(
            f"variant must be 'zero', 'linear' or 'brownian_init', got {variant!r}")
    times, xs = stgrid.times(), stgrid.xs()
    if box is not None:
        s, y = float(box[0]), float(box[1])
        if s > times[-1] + 1e-12 or y > max(abs(xs[0]), abs(xs[-1])) + 1e-12:
            raise StructuralError(
                f"box [0, {s}] x [-{y}, {y}] exceeds the field extent "
                f"[{times[0]}, {times[-1]}] x [{xs[0]}, {xs[-1]}]")
        tsel = times <= s + 1e-12
        xsel = np.abs(xs) <= y + 1e-12
        if tsel.sum() < 4 or xsel.sum() < 4:
            raise InputError("box leaves fewer than 4 nodes per axis")
        h = h[np.ix_(tsel, xsel)]
    if presmooth:
        sm = h.copy()
        sm[:, 1:-1] = 0.25 * h[:, :-2] + 0.5 * h[:, 1:-1] + 0.25 * h[:, 2:]
        h = sm
    ht = np.gradient(h, stgrid.dt, axis=0, edge_order=2)
    hx = np.gradient(h, stgrid.dx, axis=1, edge_order=2)
    hxx = np.empty_like(h)
    hxx[:, 1:-1] = (h[:, 2:] - 2.0 * h[:, 1:-1] + h[:, :-2]) / stgrid.dx**2
    hxx[:, 0] = (2.0 * h[:, 0] - 5.0 * h[:, 1] + 4.0 * h[:, 2] - h[:, 3]) / stgrid.dx**2
    hxx[:, -1] = (2.0 * h[:, -1] - 5.0 * h[:, -2] + 4.0 * h[:, -3] - h[:, -4]) / stgrid.dx**2
    if variant == "linear":
        resid = ht - nu * hxx
    else:
        resid = ht - nu * (hxx + hx**2)
    sq = float(np.trapezoid(np.trapezoid(resid**2, dx=stgrid.dx, axis=1),
                            dx=stgrid.dt))
    if variant == "brownian_init":
        slope0 = float(np.trapezoid(hx[0] ** 2, dx=stgrid.dx))
        return math.sqrt(slope0 + sq)
    return math.sqrt(sq)


def parabolic_holder_norm(values: np.ndarray, stgrid: SpaceTimeGrid,
                          alpha: float, mode: str = "dyadic") -> dict:
    """sup |h| plus the parabolic alpha-Hoelder seminorm of a field.

    seminorm = sup over pairs of |h(t,x) - h(s,y)| / d((t,x),(s,y))^alpha
    with the parabolic distance d = |x - y| + |t - s|^{1/2}. ``full``
    evaluates every node pair and is quadratic in the grid size; ``dyadic``
    restricts to power-of-two index separations along each axis, a lower
    bound that captures the scaling behaviour.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    h = np.asarray(values, dtype=float)
    if h.shape != (stgrid.nt, stgrid.nx):
        raise StructuralError("field samples do not match the grid")
    if mode not in ("dyadic", "full"):
        raise InputError(f"mode must be 'dyadic' or 'full', got {mode!r}")

    sup = float(np.abs(h).max())
    semi = 0.0
    if mode == "full":
        if h.size > 4096:
            raise InputError("full mode is quadratic; grid limited to 4096 nodes")
        ts, xs = stgrid.times(), stgrid.xs()
        tt, xx = np.meshgrid(ts, xs, indexing="ij")
        flat = h.ravel()
        ft, fx = tt.ravel(), xx.ravel()
        for i in range(len(flat)):
            d = np.abs(fx - fx[i]) + np.sqrt(np.abs(ft - ft[i]))
            d[i] = np.inf
            semi = max(semi, float(np.max(np.abs(flat - flat[i]) / d**alpha)))
        return {"sup": sup, "seminorm": semi, "norm": sup + semi, "mode": mode}

    shifts = [0] + [2**j for j in range(0, 32)]
    tshifts = [s for s in shifts if s < stgrid.nt]
    xshifts = [s for s in shifts if s < stgrid.nx]
    for st in tshifts:
        for sx in xshifts:
            if st == 0 and sx == 0:
                continue
            diff = np.abs(h[st:, sx:] - h[: h.shape[0] - st, : h.shape[1] - sx])
            d = sx * stgrid.dx + math.sqrt(st * stgrid.dt)
            semi = max(semi, float(diff.max()) / d**alpha)
    return {"sup": sup, "seminorm": semi, "norm": sup + semi, "mode": mode}
