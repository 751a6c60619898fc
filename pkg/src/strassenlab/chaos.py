"""Wiener chaos functionals and their verification statistics.

Order-k chaos functionals are k-fold iterated Ito integrals. Their defining
identities, each of which has a checker here:

- shift identity: E[T(x + h)] = hom_T(h), the deterministic k-linear form
  evaluated at the Cameron-Martin shift (every term keeping a stochastic
  factor has mean zero);
- moment identity: E[T(x) <x, h>^k] / k! = hom_T(h) as well, because the
  k-th power of the first-order pairing overlaps T only through its top
  chaos layer;
- hypercontractivity: E|T|^{2p} <= (2p-1)^{pk} (E T^2)^p;
- Gaussian-type tails: log P(|T| > u) decays like -c (u / ||T||_2)^{2/k}.

Conventions. ``hermite`` evaluates probabilists' polynomials He_k
(He_2(x) = x^2 - 1). Iterated integrals are taken over the ordered simplex
s_1 < ... < s_k without a k! factor. Ito sums are left-point sums, which is
what makes the adaptedness (and the mean-zero property) exact at the
discrete level rather than only in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cm_space import H01Interval, HVector, orthonormal_basis
from .errors import (CapabilityError, InputError, StatisticalPowerError,
                     StructuralError)
from .gaussian_sim import (Field, Path, SeedSpec, SpaceTimeGrid, TimeGrid,
                           _as_seedspec, rng_from_seed, sample_bm)
from .spde_kpz import heat_kernel

__all__ = [
    "ChaosFunctional",
    "ChaosMoments",
    "hermite",
    "ito_integral",
    "levy_area_chaos",
    "kfold_heat_chaos",
    "kfold_heat_variance",
    "chaos_moments",
    "t_hom_shift",
    "t_hom_moment",
    "paley_wiener_pairing",
    "finite_rank_projection",
    "projection_mse",
    "hypercontractivity_report",
    "HypercontractivityReport",
    "HypercontractivityEntry",
    "tail_fit",
    "TailReport",
]


def hermite(k: int, x, normalized: bool = False):
    """Probabilists' Hermite polynomial He_k, vectorized in x.

    He_0 = 1, He_1 = x, He_{k+1} = x He_k - k He_{k-1}. With ``normalized``
    the value is divided by sqrt(k!), the L2(gaussian) norm. Degrees above
    170 overflow the float range of the norm constant and are refused.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise InputError(f"degree must be a nonnegative integer, got {k!r}")
    if k > 170:
        raise CapabilityError("degree > 170 overflows float64 normalization")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        out = prev
    else:
        cur = x.copy()
        for j in range(1, k):
            prev, cur = cur, x * cur - j * prev
        out = cur
    if normalized:
        out = out / math.sqrt(math.factorial(k))
    return out if out.shape else float(out)


def ito_integral(integrand: np.ndarray, p: Path, component: int = 0) -> np.ndarray:
    """Cumulative left-point Ito sum int_0^t f dB along one component.

    integrand holds f at the grid nodes; entry j of the output is
    sum_{i<j} f(t_i) (B_{t_{i+1}} - B_{t_i}), so the last node carries the
    full integral and node 0 is 0.
    """
    f = np.asarray(integrand, dtype=float)
    b = p.component(component)
    if f.shape != b.shape:
        raise StructuralError("integrand samples do not match the path grid")
    out = np.zeros_like(f)
    np.cumsum(f[:-1] * np.diff(b), out=out[1:])
    return out


@dataclass(frozen=True)
class ChaosFunctional:
    """Order-k functional of a Gaussian sample with its homogeneous form.

    ``evaluate`` maps one sample (a two-component Path for the path domain,
    a cell Field or raw cell array for the field domain) to a float.
    ``hom`` maps a deterministic representative of a Cameron-Martin element
    (function values / cell density of the same shape) to the same kind of
    scalar; for these iterated integrals it is the identical quadrature run
    on deterministic data. ``evaluate_batch``, when present, maps a stacked
    array of replica values (replica axis first) to a vector of outputs in
    one vectorized pass; the Monte Carlo drivers use it to amortize 1e5+
    replica sweeps.
    """

    order: int
    label: str
    domain: str            # "path" | "field"
    components: int
    evaluate: Callable[..., float]
    hom: Callable[..., float]
    evaluate_batch: Optional[Callable[..., np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def descriptor(self) -> dict:
        return {"label": self.label, "order": self.order,
                "domain": self.domain, "components": self.components,
                **self.meta}


def _pair_values(values) -> np.ndarray:
    v = np.asarray(values.values if isinstance(values, Path) else values, dtype=float)
    v = np.atleast_2d(v)
    if v.shape[0] != 2:
        raise StructuralError("levy area needs a two-component path")
    return v


def levy_area_chaos() -> ChaosFunctional:
    """Second-order chaos int_0^T B_1 dB_2 on two-component paths.

    Fed a deterministic pair (h_1, h_2) instead of Brownian data, the same
    left-point sum is the Riemann-Stieltjes integral int h_1 h_2' dt, which
    is the homogeneous form of this functional; hom is therefore the same
    code run on deterministic values.
    """
    def _value(values) -> float:
        v = _pair_values(values)
        return float(np.sum(v[0, :-1] * np.diff(v[1])))

    def _batch(values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        if v.ndim != 3 or v.shape[1] != 2:
            raise StructuralError("batch expects shape (replicas, 2, nodes)")
        return np.einsum("ri,ri->r", v[:, 0, :-1], np.diff(v[:, 1], axis=1))

    return ChaosFunctional(order=2, label="levy-area", domain="path",
                           components=2, evaluate=_value, hom=_value,
                           evaluate_batch=_batch)


def _cell_kernel_weights(stgrid: SpaceTimeGrid, t: float, x: float, nu: float) -> np.ndarray:
    """K(t - s_mid, x - y_mid) on the cell-midpoint grid, zero for s_mid >= t."""
    smid = stgrid.times()[:-1] + 0.5 * stgrid.dt
    ymid = stgrid.xs()[:-1] + 0.5 * stgrid.dx
    return heat_kernel(t - smid[:, None], x - ymid[None, :], nu=nu)


def _k1_field_left_edges(values: np.ndarray, stgrid: SpaceTimeGrid, nu: float) -> np.ndarray:
    """First-order field J(s_i, y_mid_j) at the left time edge of every cell.

    J(s_i, y) = sum over strictly earlier cells of K(s_i - s_mid, y - y_mid)
    times the cell value times dt dx, so row i only sees rows < i: the time
    lag kernel K((L - 1/2) dt, .) for L >= 1 is causal and the whole field is
    one zero-padded FFT convolution in (time index, space).
    """
    nt1, nx1 = values.shape
    dt, dx = stgrid.dt, stgrid.dx
    # spatial offsets between midpoints, wrapped on the doubled grid
    offs = dx * np.concatenate([np.arange(nx1), np.arange(-nx1, 0)])
    lags = dt * (np.arange(nt1) + 0.5)
    kern = np.zeros((2 * nt1, 2 * nx1))
    kern[1:nt1 + 1, :] = heat_kernel(lags[:, None], offs[None, :], nu=nu)
    pad = np.zeros((2 * nt1, 2 * nx1))
    pad[:nt1, :nx1] = values
    conv = np.fft.irfft2(np.fft.rfft2(kern) * np.fft.rfft2(pad), s=(2 * nt1, 2 * nx1))
    return conv[:nt1, :nx1] * (dt * dx)


def _cell_array(obj, stgrid: SpaceTimeGrid) -> np.ndarray:
    if isinstance(obj, Field):
        if obj.kind != "cells":
            raise StructuralError("expected a cell field")
        if obj.stgrid.nt != stgrid.nt or obj.stgrid.nx != stgrid.nx:
            raise StructuralError("field grid does not match the functional grid")
        return obj.values
    vals = np.asarray(obj, dtype=float)
    if vals.shape != (stgrid.nt - 1, stgrid.nx - 1):
        raise StructuralError(
            f"cell array shape {vals.shape} does not match the grid "
            f"({stgrid.nt - 1}, {stgrid.nx - 1})")
    return vals


def kfold_heat_chaos(k: int, stgrid: SpaceTimeGrid, t: float, x: float,
                     nu: float = 0.5) -> ChaosFunctional:
    """k-fold iterated heat-kernel chaos evaluated at the point (t, x).

    k = 1: int K(t - s, x - y) xi(ds, dy);
    k = 2: the ordered iterated integral, realized as an Ito sum of
    K(t - s2, x - y2) J(s2, y2) against the outer noise with the first-order
    field J evaluated at left time edges (strict adaptedness). Orders
    k >= 3 cost O(n^4) per sample and are not wired. The kernel mass on the
    window at time t must be within 1% of 1 or the window is too small for
    this (t, x). hom replaces the noise by an L2 cell density; it is the
    same quadrature.
    """
    if k not in (1, 2):
        raise CapabilityError(f"only chaos orders 1 and 2 are implemented, got {k}")
    if not stgrid.t0 <= t <= stgrid.t1:
        raise InputError(f"t={t} outside the window [{stgrid.t0}, {stgrid.t1}]")
    ys = stgrid.xs()
    if t > stgrid.t0:
        mass = float(np.trapezoid(heat_kernel(t - stgrid.t0, x - ys, nu=nu), dx=stgrid.dx))
        if abs(mass - 1.0) > 0.01:
            raise InputError(
                f"kernel mass {mass:.4f} on the window deviates from 1 by more "
                "than 1%; enlarge the spatial window for this (t, x)")
    w = _cell_kernel_weights(stgrid, t, x, nu)
    cell = stgrid.dt * stgrid.dx

    def _value(obj) -> float:
        vals = _cell_array(obj, stgrid)
        if k == 1:
            return float(np.sum(w * vals)) * cell
        inner = _k1_field_left_edges(vals, stgrid, nu)
        return float(np.sum(w * inner * vals)) * cell

    batch = None
    if k == 1:
        wflat = w.ravel() * cell

        def batch(values: np.ndarray) -> np.ndarray:
            v = np.asarray(values, dtype=float)
            return v.reshape(v.shape[0], -1) @ wflat

    return ChaosFunctional(order=k, label=f"heat-chaos-k{k}", domain="field",
                           components=1, evaluate=_value, hom=_value,
                           evaluate_batch=batch,
                           meta={"t": t, "x": x, "nu": nu,
                                 "nt": stgrid.nt, "nx": stgrid.nx})


def kfold_heat_variance(k: int, stgrid: SpaceTimeGrid, t: float, x: float,
                        nu: float = 0.5) -> float:
    """Exact variance of the discrete k-fold chaos, no Monte Carlo.

    Independence of the cell variables across the Ito sums gives
    E[I_1^2] = sum w^2 dt dx and
    E[I_2^2] = sum_ij w_ij^2 (sum over strictly earlier cells of K_lag^2)
    (dt dx)^2, the second factor being the k = 1 identity on the squared
    kernel. Continuum limits: sqrt(t / (2 pi nu)) for k = 1 and t / 4 at
    nu = 1/2 for k = 2.
    """
    if k not in (1, 2):
        raise CapabilityError(f"only chaos orders 1 and 2 are implemented, got {k}")
    g = stgrid
    w = _cell_kernel_weights(g, t, x, nu)
    if k == 1:
        return float(np.sum(w**2)) * g.dt * g.dx
    # variance of J at left edges: causal convolution of K^2 with the
    # constant cell variance, E J^2(s_i, y_j) = sum_{i'<i, j'} K(lag, dy)^2 dt dx
    nt1, nx1 = w.shape
    dt, dx = g.dt, g.dx
    offs = dx * np.concatenate([np.arange(nx1), np.arange(-nx1, 0)])
    lags = dt * (np.arange(nt1) + 0.5)
    kern = np.zeros((2 * nt1, 2 * nx1))
    kern[1:nt1 + 1, :] = heat_kernel(lags[:, None], offs[None, :], nu=nu) ** 2
    pad = np.zeros((2 * nt1, 2 * nx1))
    pad[:nt1, :nx1] = 1.0
    conv = np.fft.irfft2(np.fft.rfft2(kern) * np.fft.rfft2(pad), s=(2 * nt1, 2 * nx1))
    ej2 = conv[:nt1, :nx1] * (dt * dx)
    return float(np.sum(w**2 * ej2)) * (g.dt * g.dx)


def paley_wiener_pairing(h: HVector, p: Path, component: int = 0) -> float:
    """<x, h> = int h' dB, the first-order chaos indexed by h in H01."""
    model = h.model
    if not isinstance(model, H01Interval):
        raise StructuralError("pairing is wired for H01Interval elements")
    b = p.component(component)
    if b.shape != (model.resolution,):
        raise StructuralError("path grid does not match the model grid")
    return float(np.sum(h.data[:-1] * np.diff(b)))


def _check_shift_stack(chaos: ChaosFunctional, grid, shift) -> tuple:
    """Normalize ``shift`` to a stack with a leading batch axis.

    Returns (stack, single) where ``single`` records that the caller passed
    one shift and wants scalars back.
    """
    arr = np.asarray(shift, dtype=float)
    if arr.ndim == 3:
        if chaos.domain == "path":
            want = (chaos.components, grid.n)
        else:
            want = (grid.nt - 1, grid.nx - 1)
        if arr.shape[1:] != want:
            raise StructuralError(
                f"shift stack rows of shape {arr.shape[1:]} do not match "
                f"{want}")
        if not np.all(np.isfinite(arr)):
            raise InputError("shift contains non-finite entries")
        return arr, False
    return _check_shift(chaos, grid, shift)[None], True


def _check_shift(chaos: ChaosFunctional, grid, shift) -> np.ndarray:
    shift = np.asarray(shift, dtype=float)
    if chaos.domain == "path":
        if not isinstance(grid, TimeGrid):
            raise StructuralError("path functionals take a TimeGrid")
        shift = np.atleast_2d(shift)
        if shift.shape != (chaos.components, grid.n):
            raise StructuralError(
                f"shift shape {shift.shape} does not match "
                f"({chaos.components}, {grid.n})")
    else:
        if not isinstance(grid, SpaceTimeGrid):
            raise StructuralError("field functionals take a SpaceTimeGrid")
        if shift.shape != (grid.nt - 1, grid.nx - 1):
            raise StructuralError(
                f"shift shape {shift.shape} does not match the cell grid "
                f"({grid.nt - 1}, {grid.nx - 1})")
    if not np.all(np.isfinite(shift)):
        raise InputError("shift contains non-finite entries")
    return shift


def _replica_blocks(chaos: ChaosFunctional, grid, budget: int, seed):
    """Yield (raw sample block, rng block index) with blockwise substreams.

    Replicas are drawn in blocks, one derived stream per block, so a run is
    deterministic at fixed budget and blocks could be farmed out in
    parallel without changing the result.
    """
    base = _as_seedspec(seed)
    if chaos.domain == "path":
        cells = chaos.components * (grid.n - 1)
        step = math.sqrt(grid.dt)
    else:
        cells = (grid.nt - 1) * (grid.nx - 1)
        step = 1.0 / math.sqrt(grid.dt * grid.dx)
    block_size = max(1, min(budget, (1 << 24) // max(cells, 1)))
    pos = 0
    block = 0
    while pos < budget:
        m = min(block_size, budget - pos)
        rng = rng_from_seed(base.replica(block).child("mc-block"))
        if chaos.domain == "path":
            dz = rng.standard_normal((m, chaos.components, grid.n - 1)) * step
            raw = np.concatenate(
                [np.zeros((m, chaos.components, 1)), np.cumsum(dz, axis=2)], axis=2)
        else:
            raw = rng.standard_normal((m, grid.nt - 1, grid.nx - 1)) * step
        yield raw, pos, m
        pos += m
        block += 1


def _eval_block(chaos: ChaosFunctional, grid, raw: np.ndarray) -> np.ndarray:
    if chaos.evaluate_batch is not None:
        return np.asarray(chaos.evaluate_batch(raw), dtype=float)
    out = np.empty(raw.shape[0])
    for i in range(raw.shape[0]):
        if chaos.domain == "path":
            out[i] = chaos.evaluate(Path(grid=grid, values=raw[i]))
        else:
            out[i] = chaos.evaluate(Field(stgrid=grid, values=raw[i], kind="cells"))
    return out


def t_hom_shift(chaos: ChaosFunctional, grid, shift, budget: int = 1000,
                seed=0) -> tuple:
    """Monte Carlo of E[T(x + h)], the shift side of the two hom formulas.

    ``shift`` holds the Cameron-Martin representative as function values on
    the grid (one row per component) for path functionals, or as a cell
    density for field functionals. A stack of shifts (one extra leading
    axis) is evaluated against a single shared sample bank and comes back
    as arrays. Returns (mean, standard error). Budgets below 100 replicas
    cannot separate the identity from noise and are refused.
    """
    if budget < 100:
        raise InputError("shift checks need a budget of at least 100 replicas")
    stack, single = _check_shift_stack(chaos, grid, shift)
    vals = np.empty((stack.shape[0], budget))
    for raw, pos, m in _replica_blocks(chaos, grid, budget, seed):
        for i in range(stack.shape[0]):
            vals[i, pos:pos + m] = _eval_block(chaos, grid, raw + stack[i][None])
    means = vals.mean(axis=1)
    ses = vals.std(axis=1, ddof=1) / math.sqrt(budget)
    if single:
        return float(means[0]), float(ses[0])
    return means, ses


def t_hom_moment(chaos: ChaosFunctional, grid, shift, budget: int = 1000,
                 seed=0) -> tuple:
    """Monte Carlo of E[T(x) <x, h>^k] / k!, the moment side of the hom pair.

    The pairing <x, h> is the Paley-Wiener sum: sum of h'(t_i) dB(t_i) over
    components for paths (h' read off the shifted function values by
    forward differences), and the L2 cell pairing sum(xi h) dt dx for
    fields. For a centered order-k functional the expectation equals
    hom(h): lower-order terms of <x, h>^k are orthogonal to the top layer.
    Returns (mean, standard error).
    """
    if budget < 100:
        raise InputError("moment checks need a budget of at least 100 replicas")
    stack, single = _check_shift_stack(chaos, grid, shift)
    k = chaos.order
    vals = np.empty((stack.shape[0], budget))
    for raw, pos, m in _replica_blocks(chaos, grid, budget, seed):
        tvals = _eval_block(chaos, grid, raw)
        if chaos.domain == "path":
            draw = np.diff(raw, axis=2)
            for i in range(stack.shape[0]):
                dcoef = np.diff(stack[i], axis=1) / grid.dt
                pair = np.einsum("ci,rci->r", dcoef, draw)
                vals[i, pos:pos + m] = tvals * pair**k / math.factorial(k)
        else:
            flat = raw.reshape(m, -1) * (grid.dt * grid.dx)
            for i in range(stack.shape[0]):
                pair = flat @ stack[i].ravel()
                vals[i, pos:pos + m] = tvals * pair**k / math.factorial(k)
    means = vals.mean(axis=1)
    ses = vals.std(axis=1, ddof=1) / math.sqrt(budget)
    if single:
        return float(means[0]), float(ses[0])
    return means, ses


def finite_rank_projection(chaos: ChaosFunctional, model: H01Interval,
                           rank: int, inner_budget: int = 64,
                           seed=0) -> ChaosFunctional:
    """Conditional-expectation compression of T onto a finite rank.

    T_N(x) averages T(P_N x + (y - P_N y)) over a frozen bank of tail
    samples y, with P_N the projection onto the first N basis vectors
    (coefficients read off by Paley-Wiener pairings). The frozen bank makes
    T_N a pure function of x. Its homogeneous form is hom(P_N h): shifting
    x by h moves only the projected coordinates through T_N. Rank 0 is the
    plain average of T.
    """
    if chaos.domain != "path":
        raise StructuralError("finite-rank projections are wired for path functionals")
    if rank < 0:
        raise InputError("rank must be nonnegative")
    if inner_budget < 1:
        raise InputError("inner budget must be positive")
    grid = TimeGrid(model.a, model.b, model.resolution)
    if rank:
        basis = orthonormal_basis(model, rank)
        eder = np.stack([e.data for e in basis])
        efun = np.stack([model.function_values(e) for e in basis])
    else:
        eder = np.zeros((0, model.resolution))
        efun = np.zeros((0, model.resolution))

    def project(values: np.ndarray) -> np.ndarray:
        # rows are components; <x, e_i> via the pairing on increments
        coef = np.diff(values, axis=-1) @ eder[:, :-1].T
        return coef @ efun

    base = _as_seedspec(seed).child("tail-bank")
    tails = np.stack([
        sample_bm(grid, components=chaos.components, seed=base.replica(j)).values
        for j in range(inner_budget)])
    tails -= project(tails)

    def _value(p) -> float:
        values = np.atleast_2d(np.asarray(p.values if isinstance(p, Path) else p,
                                          dtype=float))
        px = project(values)
        if chaos.evaluate_batch is not None:
            return float(np.mean(chaos.evaluate_batch(px[None] + tails)))
        acc = 0.0
        for j in range(inner_budget):
            acc += chaos.evaluate(Path(grid=grid, values=px + tails[j]))
        return acc / inner_budget

    def _hom(values) -> float:
        v = np.atleast_2d(np.asarray(values, dtype=float))
        return chaos.hom(project(v))

    return ChaosFunctional(order=chaos.order,
                           label=f"{chaos.label}-rank{rank}",
                           domain="path", components=chaos.components,
                           evaluate=_value, hom=_hom,
                           meta={**chaos.meta, "rank": rank,
                                 "inner_budget": inner_budget})


def projection_mse(chaos: ChaosFunctional, projected: ChaosFunctional,
                   grid: TimeGrid, budget: int = 400, seed=0) -> dict:
    """Estimate E[(T_N - T)^2] by a paired sweep over fresh inputs.

    The projections are nested conditional expectations of T, so this
    distance is nonincreasing in rank (up to the reported standard error).
    """
    if budget < 16:
        raise InputError("need at least 16 replicas")
    sq = np.empty(budget)
    for raw, pos, m in _replica_blocks(chaos, grid, budget, seed):
        for i in range(m):
            p = Path(grid=grid, values=raw[i])
            sq[pos + i] = (projected.evaluate(p) - chaos.evaluate(p)) ** 2
    return {"rank": projected.meta.get("rank"), "mse": float(sq.mean()),
            "se": float(sq.std(ddof=1) / math.sqrt(budget)), "budget": budget}


@dataclass(frozen=True)
class ChaosMoments:
    """Empirical even moments of |T| with standard errors."""
    count: int
    m2: float
    m2_se: float
    higher: dict          # p -> E|T|^{2p}
    higher_se: dict


def chaos_moments(samples: np.ndarray, p_list=(2,)) -> ChaosMoments:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) < 16:
        raise InputError("need a flat array of at least 16 samples")
    n = len(samples)
    sq = samples**2
    higher = {}
    higher_se = {}
    for p in p_list:
        if p < 1:
            raise InputError("moment orders must satisfy p >= 1")
        vals = np.abs(samples) ** (2 * p)
        higher[p] = float(vals.mean())
        higher_se[p] = float(vals.std(ddof=1) / math.sqrt(n))
    return ChaosMoments(count=n, m2=float(sq.mean()),
                        m2_se=float(sq.std(ddof=1) / math.sqrt(n)),
                        higher=higher, higher_se=higher_se)


@dataclass(frozen=True)
class HypercontractivityEntry:
    p: float
    moment: float          # E|T|^{2p}
    bound: float           # (2p-1)^{pk} (E T^2)^p
    ratio: float
    ratio_ci: tuple
    verdict: str


@dataclass(frozen=True)
class HypercontractivityReport:
    order: int
    m2: float
    entries: tuple
    verdict: str


def hypercontractivity_report(samples: np.ndarray, order: int, p_list=(2,),
                              bootstrap: int = 500,
                              seed=0) -> HypercontractivityReport:
    """Moment-ratio check E|T|^{2p} <= (2p-1)^{pk} (E T^2)^p per p.

    Each ratio must sit below 1; bootstrap percentile intervals quantify
    the sampling noise (one shared resampling across the p values).
    Identically zero samples get the exact-zero verdict, the bound being
    trivially tight.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) < 16:
        raise InputError("need a flat array of at least 16 samples")
    if order < 1:
        raise InputError("order must be positive")
    p_list = tuple(float(p) for p in p_list)
    if any(p < 1 for p in p_list):
        raise InputError("hypercontractivity needs p >= 1")
    m2 = float(np.mean(samples**2))
    if m2 == 0.0:
        entries = tuple(HypercontractivityEntry(p=p, moment=0.0, bound=0.0,
                                                ratio=0.0, ratio_ci=(0.0, 0.0),
                                                verdict="exact-zero")
                        for p in p_list)
        return HypercontractivityReport(order=order, m2=0.0, entries=entries,
                                        verdict="exact-zero")
    n = len(samples)
    abs_s = np.abs(samples)

    def ratios_of(values: np.ndarray) -> np.ndarray:
        b2 = np.mean(values**2)
        return np.array([np.mean(values ** (2 * p))
                         / ((2 * p - 1) ** (p * order) * b2**p)
                         for p in p_list])

    point = ratios_of(abs_s)
    rng = rng_from_seed(_as_seedspec(seed).child("hyper-boot"))
    boot = np.empty((bootstrap, len(p_list)))
    for b in range(bootstrap):
        boot[b] = ratios_of(abs_s[rng.integers(0, n, size=n)])
    lo, hi = np.percentile(boot, [2.5, 97.5], axis=0)
    entries = []
    for i, p in enumerate(p_list):
        verdict = "within-bound" if point[i] <= 1.0 else "violated"
        entries.append(HypercontractivityEntry(
            p=p, moment=float(np.mean(abs_s ** (2 * p))),
            bound=float((2 * p - 1) ** (p * order) * m2**p),
            ratio=float(point[i]), ratio_ci=(float(lo[i]), float(hi[i])),
            verdict=verdict))
    overall = ("within-bound"
               if all(e.verdict == "within-bound" for e in entries)
               else "violated")
    return HypercontractivityReport(order=order, m2=m2,
                                    entries=tuple(entries), verdict=overall)


@dataclass
class TailReport:
    order: int
    slope: float
    intercept: float
    r_squared: float
    n_tail: int
    l2_scale: float
    levels: np.ndarray
    log_survival: np.ndarray


def tail_fit(samples: np.ndarray, order: int) -> TailReport:
    """Tail decay fit: log P(|T| > u) against (u / ||T||_2)^{2/k}.

    Order-k chaos has log-survival asymptotics -c (u/sigma)^{2/k}; for a
    standard Gaussian (k = 1) the fitted slope is -1/2. The fit runs on the
    top decile of |T|; fewer than 50 tail exceedances cannot pin the slope
    and raise a statistical power error.
    """
    samples = np.abs(np.asarray(samples, dtype=float))
    if order < 1:
        raise InputError("order must be positive")
    n = len(samples)
    scale = math.sqrt(float(np.mean(samples**2)))
    srt = np.sort(samples)
    k_tail = max(int(0.1 * n), 1)
    if k_tail < 50 or scale == 0.0 or srt[-50 if n >= 50 else -1] == 0.0:
        raise StatisticalPowerError(
            "fewer than 50 nonzero tail exceedances in the top decile")
    # survival at the j-th largest value is j/n
    levels = srt[-k_tail:]
    ranks = np.arange(k_tail, 0, -1)
    surv = ranks / n
    keep = levels > 0
    xs = (levels[keep] / scale) ** (2.0 / order)
    ys = np.log(surv[keep])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return TailReport(order=order, slope=float(slope), intercept=float(intercept),
                      r_squared=r2, n_tail=int(keep.sum()), l2_scale=scale,
                      levels=levels[keep], log_survival=ys)
