"""Fixed verification battery: fourteen checks with frozen thresholds.

Each criterion pins one family of computable consequences of the theory
(quadrature identities, co-isometry defects, decay exponents, ensemble
rates, manufactured-solution recoveries) to explicit numbers. Asymptotic
statements are checked as finite-scale trends: the bands and rates below
were calibrated on documented high-budget pilot ensembles and then frozen;
they are not tunable knobs.

``run_criterion(cid, budget)`` executes one check and returns the verdict
rows plus wall-clock; ``budget`` is "full" (the frozen acceptance budgets,
with runtime caps enforced) or "quick" (reduced ensembles for a < 10 min
sweep, same statistics). The CLI ``verify`` subcommand and the acceptance
test suite are both thin wrappers over this module, so there is exactly
one source of truth for what counts as passing.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .chaos import (finite_rank_projection, hermite, hypercontractivity_report,
                    kfold_heat_chaos, levy_area_chaos, projection_mse,
                    t_hom_moment, t_hom_shift, tail_fit)
from .cm_space import (FbmFourier, H01Interval, HeatCM, HVector, cm_norm,
                       orthonormal_basis, q_sqrt_inv_norm)
from .errors import DomainError
from .gaussian_sim import (Field, SeedSpec, SpaceTimeGrid, TimeGrid,
                           rng_from_seed, sample_bm)
from .limit_set import (BURDZY_CONSTANT, brownian_lil_headline,
                        brownian_lil_series, concentration_check,
                        coverage_stat, h01_sup_sigma, iterated_scenario,
                        lil_ratio_stats, mollified_scenario, shift_scenario,
                        sphere_closure_demo, unit_sphere_targets)
from .operators import (BrownianScale, FbmScale, RotationShiftBlock,
                        SequenceShift, adjoint_defect, mixing_slope,
                        scaling_operator_matrix, spectral_wiener_average,
                        unitary_part_projection)
from .spde_kpz import (kpz_membership, parabolic_holder_norm,
                       solve_she_additive, solve_she_multiplicative)

__all__ = ["Verdict", "CriterionResult", "CRITERIA", "RUNTIME_CAPS",
           "criterion_ids", "run_criterion", "run_all"]


@dataclass(frozen=True)
class Verdict:
    statistic: str
    value: float
    threshold: str
    passed: bool

    def row(self) -> dict:
        return {"statistic": self.statistic, "value": self.value,
                "threshold": self.threshold, "passed": self.passed}


@dataclass(frozen=True)
class CriterionResult:
    cid: str
    title: str
    verdicts: tuple
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _band(name: str, value: float, lo: float, hi: float) -> Verdict:
    return Verdict(name, float(value), f"in [{lo}, {hi}]", bool(lo <= value <= hi))


def _at_most(name: str, value: float, cap: float) -> Verdict:
    return Verdict(name, float(value), f"<= {cap}", bool(value <= cap))


def _at_least(name: str, value: float, floor: float) -> Verdict:
    return Verdict(name, float(value), f">= {floor}", bool(value >= floor))


def _seed(cid: str) -> SeedSpec:
    return SeedSpec(0).child("criteria").child(cid)


# ---------------------------------------------------------------------------
# C01: Hermite orthogonality under Gauss-Hermite quadrature


def _c01_hermite(budget: str):
    nodes, weights = np.polynomial.hermite_e.hermegauss(64)
    w = weights / math.sqrt(2.0 * math.pi)
    vals = [hermite(k, nodes) for k in range(7)]
    worst = 0.0
    for j in range(7):
        for k in range(7):
            inner = float(np.sum(w * vals[j] * vals[k]))
            target = math.factorial(k) if j == k else 0.0
            scale = math.sqrt(math.factorial(j) * math.factorial(k))
            worst = max(worst, abs(inner - target) / scale)
    return [_at_most("worst relative He_j He_k orthogonality defect, j,k <= 6",
                     worst, 1e-8)]


# ---------------------------------------------------------------------------
# C02: Cameron-Martin model consistency


def _bump_family(rng, count: int):
    """Random smooth bumps supported well inside (0, 1), with derivatives."""
    out = []
    for _ in range(count):
        amp = rng.uniform(0.5, 1.5, 3) * rng.choice([-1.0, 1.0], 3)
        cen = rng.uniform(0.3, 0.7, 3)
        wid = rng.uniform(0.05, 0.1, 3)

        def f(t, amp=amp, cen=cen, wid=wid):
            t = np.asarray(t)[..., None]
            return np.sum(amp * np.exp(-((t - cen) / wid) ** 2), axis=-1)

        def fprime(t, amp=amp, cen=cen, wid=wid):
            t = np.asarray(t)[..., None]
            arg = (t - cen) / wid
            return np.sum(-2.0 * amp * arg / wid * np.exp(-(arg**2)), axis=-1)

        out.append((f, fprime))
    return out


def _c02_cm_consistency(budget: str):
    rng = rng_from_seed(_seed("C02"))
    h01 = H01Interval(0.0, 1.0, 8193)
    fbm = FbmFourier(hurst=0.5, a=-2.0, b=3.0, resolution=8192)
    pairs = 20 if budget == "full" else 6
    funcs = _bump_family(rng, 2 * pairs)
    worst = 0.0
    for i in range(pairs):
        (f, fp), (g, gp) = funcs[2 * i], funcs[2 * i + 1]
        uh = h01.vector_from_derivative(fp)
        vh = h01.vector_from_derivative(gp)
        uf = fbm.vector_from_function(f)
        vf = fbm.vector_from_function(g)
        scale = cm_norm(uh) * cm_norm(vh)
        worst = max(worst, abs(fbm.inner(uf, vf) - h01.inner(uh, vh)) / scale)
    verdicts = [_at_most(
        "worst |<f,g>_spectral(H=1/2) - <f,g>_H01| / (|f|_H |g|_H), "
        f"{pairs} random smooth pairs", worst, 0.01)]

    g = SpaceTimeGrid(0.0, 0.5, 201, -3.0, 3.0, 241)
    tc = g.times()[:-1]
    xc = 0.5 * (g.xs()[:-1] + g.xs()[1:])
    fvals = (np.exp(-((xc[None, :]) / 0.25) ** 2)
             * (1.0 + 0.5 * np.sin(2.0 * math.pi * tc[:, None])))
    h = solve_she_additive(Field(stgrid=g, values=fvals, kind="cells"), nu=1.0)
    model = HeatCM(t0=0.0, t1=0.5, x0=-3.0, x1=3.0, nt=201, nx=241)
    heat_norm = cm_norm(model.vector_from_function(h.values))
    tn, xn = g.times(), g.xs()
    fnodes = (np.exp(-((xn[None, :]) / 0.25) ** 2)
              * (1.0 + 0.5 * np.sin(2.0 * math.pi * tn[:, None])))
    f_l2 = math.sqrt(float(np.trapezoid(np.trapezoid(fnodes**2, dx=g.dx, axis=1),
                                        dx=g.dt)))
    verdicts.append(_at_most(
        "relative error of ||K*f||_heat-CM against ||f||_L2",
        abs(heat_norm - f_l2) / f_l2, 0.02))

    n = 512
    s = np.arange(1, n + 1) / n
    Q = np.minimum.outer(s, s)
    for label, phi_fn, dphi_fn in (
            ("sin(pi s/2)", lambda t: np.sin(0.5 * math.pi * t),
             lambda t: 0.5 * math.pi * np.cos(0.5 * math.pi * t)),
            ("s(1 - s/2)", lambda t: t * (1.0 - 0.5 * t), lambda t: 1.0 - t)):
        phi = phi_fn(s)
        tgrid = np.linspace(0.0, 1.0, 4097)
        target = math.sqrt(float(np.trapezoid(dphi_fn(tgrid) ** 2,
                                              dx=tgrid[1] - tgrid[0])))
        got = q_sqrt_inv_norm(Q, phi, weight=1.0)
        verdicts.append(_at_most(
            f"relative error of covariance norm vs Dirichlet norm, phi={label}",
            abs(got - target) / target, 0.02))
    return verdicts


# ---------------------------------------------------------------------------
# C03: co-isometry of the scaling truncations at dyadic eps


def _c03_adjoint(budget: str):
    k = 16 if budget == "full" else 10
    h01 = H01Interval(0.0, 1.0, 2049)
    fbm = FbmFourier(hurst=0.75, a=0.0, b=1.0, resolution=2048)
    worst = 0.0
    for eps in (0.5, 0.25, 0.125):
        worst = max(worst, adjoint_defect(
            scaling_operator_matrix(BrownianScale(), h01, k, eps)))
        worst = max(worst, adjoint_defect(
            scaling_operator_matrix(FbmScale(hurst=0.75), fbm, k, eps)))
    return [_at_most("worst Gram-corrected adjoint defect at dyadic eps",
                     worst, 1e-6)]


# ---------------------------------------------------------------------------
# C04: mixing decay exponent 1 + H


def _c04_mixing(budget: str):
    eps_list = np.geomspace(1e-1, 1e-4, 13)
    res = 4096 if budget == "full" else 2048
    verdicts = []
    for hurst in (0.25, 0.5, 0.75):
        # the window must contain the origin: the decay constant reads off a
        # fractional derivative of f at 0, which vanishes for test functions
        # supported away from the dilation center
        model = FbmFourier(hurst=hurst, a=-1.0, b=1.0, resolution=res)
        f = model.vector_from_function(lambda t: np.exp(-((t / 0.2) ** 2)))
        g = model.vector_from_function(
            lambda t: np.exp(-(((t - 0.3) / 0.12) ** 2)))
        rep = mixing_slope(FbmScale(hurst=hurst), model, f, g, eps_list)
        verdicts.append(_at_most(
            f"|mixing-decay slope - (1 + H)| at H={hurst}",
            abs(rep.slope - 1.0 - hurst), 0.1))
    return verdicts


# ---------------------------------------------------------------------------
# C05: shift-sequence Strassen ensemble


def _c05_shift(budget: str):
    seeds = 50 if budget == "full" else 12
    n_max = 1_000_000 if budget == "full" else 200_000
    targets = unit_sphere_targets(3, 20, seed=_seed("C05").child("targets"))
    base = _seed("C05")
    cont = np.empty(seeds)
    cov = np.empty(seeds)
    lil = np.empty(seeds)
    for s in range(seeds):
        fam = shift_scenario(basis_count=3, n_max=n_max,
                             seed=base.child(f"seed-{s}"))
        norms = np.linalg.norm(fam.entries, axis=1)
        cont[s] = norms[len(norms) // 2:].max()
        cov[s] = coverage_stat(fam, targets).distances.max()
        # the first decade of n sits far above the doubly-logarithmic
        # envelope at these scales; the LIL statistic reads the rest
        sel = fam.params >= n_max // 1000
        lil[s] = fam.entries[sel, 0].max()
    # the quick smoke keeps the full-scale bands but recalibrated floors:
    # 12 seeds at n_max 2e5 sit further from the asymptotic regime
    floors = (0.95, 0.80, 0.90) if budget == "full" else (0.90, 0.75, 0.60)
    return [
        _at_least("fraction of seeds with tail containment max-norm <= 1.3",
                  float(np.mean(cont <= 1.3)), floors[0]),
        _at_least("fraction of seeds covering a 20-point sphere net within 0.35",
                  float(np.mean(cov <= 0.35)), floors[1]),
        _at_least("fraction of seeds with first-coordinate LIL max in [0.9, 1.1]",
                  float(np.mean((lil >= 0.9) & (lil <= 1.1))), floors[2]),
    ]


# ---------------------------------------------------------------------------
# C06: homogeneous-form identity, shift vs moment vs closed form


def _hom_verdicts(label, chaos, grid, shifts, homs, mc, seed) -> list:
    # one shared sample bank per estimator; per-h z-scores stay valid and
    # the runtime stops scaling with the number of shifts
    sh, se_s = t_hom_shift(chaos, grid, shifts, budget=mc,
                           seed=seed.child("shift"))
    mo, se_m = t_hom_moment(chaos, grid, shifts, budget=mc,
                            seed=seed.child("moment"))
    worst = {
        "shift": float(np.max(np.abs(sh - homs) / se_s)),
        "moment": float(np.max(np.abs(mo - homs) / se_m)),
        "pair": float(np.max(np.abs(sh - mo) / np.hypot(se_s, se_m))),
    }
    return [_at_most(
        f"{label}: worst {key}-estimator deviation over {len(homs)} random h "
        "(SE units)", worst[key], 3.0) for key in ("shift", "moment", "pair")]


def _c06_hom(budget: str):
    mc = 100_000 if budget == "full" else 10_000
    grid = TimeGrid(0.0, 1.0, 513)
    levy = levy_area_chaos()
    rng = rng_from_seed(_seed("C06").child("levy-h"))
    t = grid.times()
    shifts = np.stack([
        np.stack([np.sin(np.outer(t, np.arange(1, 5) * math.pi))
                  @ (rng.standard_normal(4) / np.arange(1, 5))
                  for _ in range(2)])
        for _ in range(5)])
    homs = np.array([levy.hom(h) for h in shifts])
    verdicts = _hom_verdicts("Levy area", levy, grid, shifts, homs, mc,
                             _seed("C06").child("levy"))

    g = SpaceTimeGrid(0.0, 0.6, 61, -3.0, 3.0, 61)
    chaos = kfold_heat_chaos(1, g, 0.5, 0.0, nu=0.5)
    tc = g.times()[:-1]
    xc = g.xs()[:-1]
    hrng = rng_from_seed(_seed("C06").child("heat-h"))
    dens = []
    for _ in range(5):
        c0, w0, a0 = hrng.uniform(-1, 1), hrng.uniform(0.3, 0.8), hrng.uniform(0.5, 2)
        dens.append(a0 * np.exp(-((xc[None, :] - c0) / w0) ** 2
                                - ((tc[:, None] - 0.3) / 0.4) ** 2))
    dens = np.stack(dens)
    homs = np.array([chaos.hom(d) for d in dens])
    verdicts += _hom_verdicts("heat chaos k=1", chaos, g, dens, homs, mc,
                              _seed("C06").child("heat"))
    return verdicts


# ---------------------------------------------------------------------------
# C07: finite-rank compression error strictly decreasing


def _c07_finite_rank(budget: str):
    mc = 600 if budget == "full" else 200
    inner = 96 if budget == "full" else 48
    model = H01Interval(0.0, 1.0, 257)
    grid = TimeGrid(0.0, 1.0, 257)
    levy = levy_area_chaos()
    reports = []
    for rank in (2, 8, 32):
        proj = finite_rank_projection(levy, model, rank, inner_budget=inner,
                                      seed=_seed("C07").child(f"bank-{rank}"))
        reports.append(projection_mse(levy, proj, grid, budget=mc,
                                      seed=_seed("C07").child("sweep")))
    verdicts = []
    for lo, hi in ((0, 1), (1, 2)):
        drop = reports[lo]["mse"] - reports[hi]["mse"]
        margin = 2.0 * math.hypot(reports[lo]["se"], reports[hi]["se"])
        verdicts.append(_at_least(
            f"compression error drop rank {(2, 8, 32)[lo]} -> "
            f"{(2, 8, 32)[hi]} minus 2 SE", drop - margin, 0.0))
    return verdicts


# ---------------------------------------------------------------------------
# C08: hypercontractive moment ratios and tail decay


def _levy_sup_samples(budget: int, grid: TimeGrid, seed) -> np.ndarray:
    rng = rng_from_seed(seed)
    out = np.empty(budget)
    block = max(1, (1 << 22) // grid.n)
    done = 0
    while done < budget:
        b = min(block, budget - done)
        incs = rng.standard_normal((b, 2, grid.n - 1)) * math.sqrt(grid.dt)
        paths = np.cumsum(incs, axis=2)
        area = np.cumsum(paths[:, 0, :-1] * incs[:, 1, 1:], axis=1)
        out[done:done + b] = np.abs(area).max(axis=1)
        done += b
    return out


def _c08_tails(budget: str):
    mc = 100_000 if budget == "full" else 20_000
    grid = TimeGrid(0.0, 1.0, 257)
    sups = _levy_sup_samples(mc, grid, _seed("C08").child("levy-sup"))
    hyper = hypercontractivity_report(sups, order=2, p_list=(2, 3),
                                      seed=_seed("C08").child("boot"))
    verdicts = [
        _at_most(f"Levy-area sup-norm moment ratio at p={int(e.p)}",
                 e.ratio, 1.0)
        for e in hyper.entries
    ]
    rng = rng_from_seed(_seed("C08").child("scalar"))
    z = rng.standard_normal(mc)
    for order, samples in ((1, z), (2, z**2 - 1.0)):
        fit = tail_fit(samples, order)
        verdicts.append(_at_most(
            f"tail log-survival slope, scalar order-{order} chaos",
            fit.slope, -0.1))
    return verdicts


# ---------------------------------------------------------------------------
# C09: Gaussian concentration of the Brownian sup-norm


def _c09_concentration(budget: str):
    mc = 100_000 if budget == "full" else 20_000
    n = 1025
    dt = 1.0 / (n - 1)
    rng = rng_from_seed(_seed("C09").child("sups"))
    sups = np.empty(mc)
    block = max(1, (1 << 24) // n)
    done = 0
    while done < mc:
        b = min(block, mc - done)
        paths = np.cumsum(rng.standard_normal((b, n - 1)) * math.sqrt(dt), axis=1)
        sups[done:done + b] = np.abs(paths).max(axis=1)
        done += b
    rep = concentration_check(sups, h01_sup_sigma(), (1.0, 1.5, 2.0))
    return [
        Verdict(f"P(sup|B| > mean + {a}) - exp(-{a}^2/2) - 4 SE",
                float(rep.empirical[i] - rep.bounds[i] - 4.0 * rep.std_errors[i]),
                "<= 0", bool(rep.satisfied[i]))
        for i, a in enumerate(rep.a_grid)
    ]


# ---------------------------------------------------------------------------
# C10: sphere closure along basis axes


def _c10_sphere(budget: str):
    model = H01Interval(0.0, 1.0, 4096)
    basis = orthonormal_basis(model, 6)
    h = HVector(model=model, data=0.6 * basis[0].data - 0.3 * basis[4].data)
    ns = np.arange(1, 257)
    rep = sphere_closure_demo(model, h, ns)
    bound = 2.0 * math.sqrt(2.0) / ((ns - 0.5) * math.pi) * 1.01
    return [
        _at_most("max |c_n| over n <= 256", float(np.abs(rep.coefficients).max()),
                 2.0),
        _at_most("worst ambient distance / closed-form cap",
                 float((rep.distances / bound).max()), 1.0),
        _at_most("worst |renormalized norm - 1|",
                 float(np.abs(rep.renormalized - 1.0).max()), 1e-9),
    ]


# ---------------------------------------------------------------------------
# C11: ergodicity diagnostics


def _c11_ergodicity(budget: str):
    n = 10_000 if budget == "full" else 2_000
    e1 = np.zeros(16)
    e1[0] = 1.0
    shift_avg = spectral_wiener_average(SequenceShift(), e1, n)
    theta = math.pi / 4.0
    rot = np.array([[math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)]])
    avg = spectral_wiener_average(rot, np.array([1.0, 0.0]), n)
    closed = (1.0 + math.sqrt(2.0)) / 4.0
    v = np.array([0.8, -0.6, 0.7, -0.3, 0.2, 0.1])
    split = unitary_part_projection(RotationShiftBlock(theta), v, 8)
    expected = np.concatenate([v[:2], np.zeros(4)])
    return [
        Verdict("shift-operator Wiener average for x = e1", shift_avg,
                "== 0 exactly", shift_avg == 0.0),
        _at_most("|rotation Wiener average - (1 + sqrt 2)/4| at theta=pi/4",
                 abs(avg - closed), 1e-3),
        _at_most("rotation-shift block: unitary-component recovery error",
                 float(np.linalg.norm(split.unitary_component - expected)),
                 1e-10),
    ]


# ---------------------------------------------------------------------------
# C12: deterministic KPZ membership core


def _manufactured_forcing(g: SpaceTimeGrid, target: float, box) -> np.ndarray:
    tc = g.times()[:-1]
    xc = 0.5 * (g.xs()[:-1] + g.xs()[1:])
    shape = (np.exp(-(xc[None, :]) ** 2)
             * (1.0 + 0.5 * np.sin(2.0 * math.pi * tc[:, None])))
    tsel = tc <= box[0] + 1e-12
    xsel = np.abs(xc) <= box[1] + 1e-12
    sub = shape[np.ix_(tsel, xsel)]
    norm = math.sqrt(float(np.trapezoid(np.trapezoid(sub**2, dx=g.dx, axis=1),
                                        dx=g.dt)))
    return shape * (target / norm)


def _c12_kpz(budget: str):
    # nt is pinned by the explicit-Euler stability bound nu dt/dx^2 <= 1/2
    g = SpaceTimeGrid(0.0, 1.0, 801, -3.0, 3.0, 121)
    box = (1.0, 2.5)
    verdicts = []
    targets = (0.3, 0.5, 0.9) if budget == "full" else (0.5,)
    for target in targets:
        f = _manufactured_forcing(g, target, box)
        rep = solve_she_multiplicative(Field(stgrid=g, values=f, kind="cells"),
                                       nu=1.0)
        jz = kpz_membership(np.log(rep.field.values), g, "zero", nu=1.0, box=box)
        verdicts.append(_at_most(
            f"|J_zero/target - 1| for manufactured Cole-Hopf, target {target}",
            abs(jz / target - 1.0), 0.02))

    ga = SpaceTimeGrid(0.0, 0.5, 201, -3.0, 3.0, 241)
    fa = _manufactured_forcing(ga, 0.5, (0.5, 2.5))
    h = solve_she_additive(Field(stgrid=ga, values=fa, kind="cells"), nu=1.0)
    jl = kpz_membership(h.values, ga, "linear", nu=1.0, box=(0.5, 2.5))
    verdicts.append(_at_most(
        "|J_linear/target - 1| for forced additive heat flow, target 0.5",
        abs(jl / 0.5 - 1.0), 0.02))

    alpha = 0.4
    g1 = SpaceTimeGrid(0.0, 1.0, 33, -1.0, 1.0, 65)
    vals1 = np.broadcast_to(g1.xs()[None, :], (33, 65))
    got1 = parabolic_holder_norm(np.array(vals1), g1, alpha, mode="full")["norm"]
    oracle1 = 1.0 + 2.0 ** (1.0 - alpha)
    s = 0.7
    g2 = SpaceTimeGrid(0.0, s, 29, -1.0, 1.0, 33)
    vals2 = np.broadcast_to(g2.times()[:, None], (29, 33))
    got2 = parabolic_holder_norm(np.array(vals2), g2, alpha, mode="full")["norm"]
    oracle2 = s + s ** (1.0 - 0.5 * alpha)
    verdicts.append(_at_most(
        "parabolic Hoelder norm vs closed form, h = x (full pairwise)",
        abs(got1 - oracle1), 1e-10))
    verdicts.append(_at_most(
        "parabolic Hoelder norm vs closed form, h = t (full pairwise)",
        abs(got2 - oracle2), 1e-10))
    return verdicts


# ---------------------------------------------------------------------------
# C13: small-time LIL trends, plain and iterated


def _c13_lil_trends(budget: str):
    seeds = 50 if budget == "full" else 12
    base = _seed("C13")
    eps_grid = np.geomspace(1e-1, 1e-3, 9)
    bgrid = TimeGrid(-2.0, 2.0, 16385)
    wgrid = TimeGrid(0.0, 1.0, 16385)
    b_head = np.empty(seeds)
    i_head = np.empty(seeds)
    b_rec = np.zeros(seeds, dtype=bool)
    i_rec = np.zeros(seeds, dtype=bool)
    for s in range(seeds):
        spec = base.child(f"seed-{s}")
        bseed = spec.child("bm-lil-trend")
        b_head[s] = brownian_lil_headline(seed=bseed)
        ts, vals, norms = brownian_lil_series(seed=bseed.replica(0))
        run = lil_ratio_stats(ts, np.abs(vals), norms).running_max
        b_rec[s] = run[-1] > run[ts >= 1e-4][-1]

        ispec = spec.child("iterated")
        B = sample_bm(bgrid, seed=ispec.child("outer"), two_sided=True)
        W = sample_bm(wgrid, seed=ispec.child("inner"))
        rep = iterated_scenario(B, W, eps_grid, seed=ispec)
        i_head[s] = rep.headline_ratio
        run = np.maximum.accumulate(np.abs(rep.ratios))
        i_rec[s] = run[-1] > run[rep.ratio_params >= 1e-4][-1]
    lo, hi = 0.5 * BURDZY_CONSTANT, 1.2 * BURDZY_CONSTANT
    # record events near the time horizon are roughly coin flips per seed,
    # so the floor drops with the quick ensemble size
    rec_floor = 0.40 if budget == "full" else 0.25
    return [
        _at_least("fraction of seeds with Brownian LIL level in [0.7, 1.15]",
                  float(np.mean((b_head >= 0.7) & (b_head <= 1.15))), 0.80),
        _at_least("fraction of seeds with iterated LIL level in "
                  "[0.5, 1.2] x 2^(5/4) 3^(-3/4)",
                  float(np.mean((i_head >= lo) & (i_head <= hi))), 0.70),
        _at_least("fraction of seeds with new Brownian ratio records below "
                  "t = 1e-4", float(b_rec.mean()), rec_floor),
        _at_least("fraction of seeds with new iterated ratio records below "
                  "t = 1e-4", float(i_rec.mean()), rec_floor),
    ]


# ---------------------------------------------------------------------------
# C14: mollified scenario slope and degenerate-regime refusals


def _c14_mollified(budget: str):
    if budget == "full":
        eps = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
        res, reps = 65537, 24
    else:
        eps = [1e-1, 3e-2, 1e-2, 3e-3]
        res, reps = 16385, 8
    rep = mollified_scenario(0.5, eps, seed=_seed("C14"), resolution=res,
                             slope_replicas=reps)
    verdicts = [_band("mollification-error decay slope at u = 0.5",
                      rep.slope, 0.375 - 0.05, 0.375 + 0.05)]
    for u in (1.0, 1.5):
        try:
            mollified_scenario(u, eps, seed=_seed("C14"), resolution=2049,
                               slope_replicas=2, comparison_nodes=257)
        except DomainError as exc:
            ok = "degenerate" in str(exc)
            verdicts.append(Verdict(
                f"u = {u} refused with degenerate-regime diagnosis", float(u),
                "DomainError naming the degeneracy", ok))
        else:
            verdicts.append(Verdict(
                f"u = {u} refused with degenerate-regime diagnosis", float(u),
                "DomainError naming the degeneracy", False))
    return verdicts


# ---------------------------------------------------------------------------
# registry


CRITERIA = {
    "C01": ("Hermite orthogonality under Gauss-Hermite quadrature",
            _c01_hermite),
    "C02": ("Cameron-Martin inner products agree across models",
            _c02_cm_consistency),
    "C03": ("scaling truncations are co-isometries after Gram correction",
            _c03_adjoint),
    "C04": ("mixing inner products decay like eps^(1+H)", _c04_mixing),
    "C05": ("shift-sequence Strassen ensemble rates", _c05_shift),
    "C06": ("homogeneous-form identity: shift = moment = closed form",
            _c06_hom),
    "C07": ("finite-rank compression error decreases in rank",
            _c07_finite_rank),
    "C08": ("hypercontractive moment ratios and chaos tail decay",
            _c08_tails),
    "C09": ("Gaussian concentration of the Brownian sup-norm",
            _c09_concentration),
    "C10": ("unit-sphere points accumulate at interior ball points",
            _c10_sphere),
    "C11": ("Wiener averages and unitary/vanishing decomposition",
            _c11_ergodicity),
    "C12": ("deterministic KPZ membership and Hoelder oracles", _c12_kpz),
    "C13": ("small-time LIL trends, plain and iterated", _c13_lil_trends),
    "C14": ("mollified-scaling slope and degenerate refusals", _c14_mollified),
}

RUNTIME_CAPS = {
    "C01": 1.0, "C02": 30.0, "C03": 10.0, "C04": 30.0, "C05": 300.0,
    "C06": 120.0, "C07": 180.0, "C08": 180.0, "C09": 60.0, "C10": 1.0,
    "C11": 5.0, "C12": 120.0, "C13": 600.0, "C14": 120.0,
}


def criterion_ids() -> list:
    return sorted(CRITERIA)


def run_criterion(cid: str, budget: str = "full") -> CriterionResult:
    """Execute one criterion; at full budget the runtime cap is a verdict."""
    if cid not in CRITERIA:
        raise KeyError(f"unknown criterion id {cid!r}")
    if budget not in ("full", "quick"):
        raise ValueError(f"budget must be 'full' or 'quick', got {budget!r}")
    title, fn = CRITERIA[cid]
    start = time.time()
    verdicts = list(fn(budget))
    elapsed = time.time() - start
    if budget == "full":
        verdicts.append(_at_most(f"{cid} wall-clock seconds", elapsed,
                                 RUNTIME_CAPS[cid]))
    return CriterionResult(cid=cid, title=title, verdicts=tuple(verdicts),
                           elapsed=elapsed)


def run_all(budget: str = "full"):
    return [run_criterion(cid, budget) for cid in criterion_ids()]
