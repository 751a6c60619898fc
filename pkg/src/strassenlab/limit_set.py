"""Compact-limit-set verification harness for iterated-logarithm scaling.

A scenario fixes one random sample and watches its rescaled family: the
sample pushed through a measure-preserving scaling at parameters marching
toward the limit (eps down to 0, or shift count n up to infinity), divided
by the iterated-logarithm normalizer (2 log log(1/eps))^{k/2} or
(2 log n)^{k/2}. The cluster-set prediction splits into two one-sided
statistics computed here:

- containment: every family entry eventually sits within a small ambient
  distance of the candidate compact set, discretized as a net of unit-ball
  images (``containment_stat``);
- coverage: every net point on the unit sphere is approached by some
  family entry (``coverage_stat``).

Scalar limsup statistics (``lil_ratio_stats``) track running maxima of
value/normalizer traces. Deep parameter ranges (t down to 1e-8) are out of
reach of any fixed uniform grid, so the small-time helpers sample the
processes exactly on geometric grids through independent Gaussian
increments instead of rescaling a stored path.

All probabilistic verdict thresholds (containment caps, coverage radii,
ratio bands) are calibrated offline by high-budget pilot sweeps and frozen
in scenario configs; the statistics here only report raw numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import polygamma

from .cm_space import (H01Interval, HVector, ball_net, cm_inner, cm_norm,
                       orthonormal_basis)
from .errors import (DomainError, InputError, PreconditionError,
                     ResolutionError, StatisticalPowerError, StructuralError)
from .gaussian_sim import (Path, SeedSpec, TimeGrid, _as_seedspec,
                           mollify_path, rng_from_seed, sample_bm, sample_fbm)
from .operators import BrownianScale, SequenceShift, apply_scaling

__all__ = [
    "BURDZY_CONSTANT",
    "ITERATED_AREA_CONSTANT",
    "RescaledFamily",
    "LimitSetNet",
    "LimitSetReport",
    "ContainmentReport",
    "CoverageReport",
    "LilRatioReport",
    "SphereClosureReport",
    "ConcentrationReport",
    "ModulusReport",
    "IteratedReport",
    "MollifiedReport",
    "loglog_normalizer",
    "logn_normalizer",
    "rescaled_trajectory",
    "h01_ball_net_ambient",
    "h01_sup_sigma",
    "unit_sphere_targets",
    "containment_stat",
    "coverage_stat",
    "shift_scenario",
    "lil_ratio_stats",
    "brownian_smalltime_family",
    "brownian_lil_series",
    "sphere_closure_demo",
    "concentration_check",
    "modulus_estimate",
    "iterated_scenario",
    "mollified_scenario",
]

# limsup_{t->0} B(W(t)) / (t^{1/4} (log log(1/t))^{3/4}) for independent
# two-sided B and W: closed form 2^{5/4} 3^{-3/4}
BURDZY_CONSTANT = 2.0 ** 1.25 * 3.0 ** (-0.75)
# same limsup with the Levy-area functional in place of B: (2/3)^{-3/2} / pi
ITERATED_AREA_CONSTANT = (2.0 / 3.0) ** (-1.5) / math.pi


def loglog_normalizer(eps: float, order: int = 1) -> float:
    """(2 log log(1/eps))^{-order/2}; defined only for eps < 1/e."""
    if not 0.0 < eps < 1.0 / math.e:
        raise DomainError(
            f"log log guard: eps must lie in (0, 1/e), got {eps}")
    return (2.0 * math.log(math.log(1.0 / eps))) ** (-0.5 * order)


def logn_normalizer(n: int, order: int = 1) -> float:
    """(2 log n)^{-order/2} for integer shift counts n >= 2."""
    if n < 2:
        raise DomainError(f"shift count must be >= 2 for a positive log, got {n}")
    return (2.0 * math.log(n)) ** (-0.5 * order)


@dataclass(frozen=True)
class RescaledFamily:
    """One scenario's normalized rescalings of a fixed sample.

    entries[i] is the flattened ambient representative at params[i], already
    divided by the scenario normalizer; params run toward the limit (eps
    decreasing, n increasing), so the tail half of the sequence is the
    asymptotic regime the statistics care about.
    """

    scenario: str
    params: np.ndarray
    order: int
    entries: np.ndarray          # (n_params, ambient_dim)
    kind: str                    # "path" | "vector"
    metric: str = "sup"          # "sup" | "euclidean"
    grid: Optional[TimeGrid] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.entries.ndim != 2 or self.entries.shape[0] != len(self.params):
            raise StructuralError("entries must be (n_params, ambient_dim)")
        if not np.all(np.isfinite(self.entries)):
            raise InputError("family entries contain non-finite values")

    @property
    def n_params(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class LimitSetNet:
    """Finite ambient discretization of a candidate compact limit set.

    points are images of unit-ball elements; mesh is an upper bound on the
    ambient covering radius of the net inside the set, i.e. the amount by
    which a distance-to-net overestimates a distance-to-set.
    """

    points: np.ndarray           # (n_points, ambient_dim)
    metric: str
    mesh: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise InputError("a limit-set net needs at least one point")


@dataclass(frozen=True)
class ContainmentReport:
    params: np.ndarray
    distances: np.ndarray
    tail_max: float
    mesh: float
    metric: str


@dataclass(frozen=True)
class CoverageReport:
    distances: np.ndarray        # per target
    closest_params: np.ndarray   # param attaining each minimum
    metric: str


@dataclass(frozen=True)
class LilRatioReport:
    params: np.ndarray
    running_max: np.ndarray
    final: float
    argmax_param: float
    count: int


@dataclass(frozen=True)
class SphereClosureReport:
    indices: np.ndarray
    coefficients: np.ndarray     # c_n
    distances: np.ndarray        # ambient |c_n| sup|e_n|
    renormalized: np.ndarray     # ||h + c_n e_n||_H, should be 1


@dataclass(frozen=True)
class ConcentrationReport:
    a_grid: np.ndarray
    empirical: np.ndarray
    bounds: np.ndarray
    std_errors: np.ndarray
    satisfied: np.ndarray
    mean_norm: float
    sigma: float
    count: int


@dataclass(frozen=True)
class ModulusReport:
    rho_grid: np.ndarray
    estimates: np.ndarray
    replicas: int
    monotone: bool


@dataclass(frozen=True)
class IteratedReport:
    family: RescaledFamily
    ratio_params: np.ndarray
    ratios: np.ndarray
    running_max: np.ndarray
    final_running_max: float
    headline_ratio: float
    ratio_replicas: int
    block_decades: int
    order: int
    reference_constant: float
    constants: dict


@dataclass(frozen=True)
class MollifiedReport:
    u: float
    containment: ContainmentReport
    slope: float
    slope_eps: np.ndarray
    slope_means: np.ndarray
    expected_slope: float
    meta: dict


@dataclass(frozen=True)
class LimitSetReport:
    """Per-scenario record tying the statistics to their thresholds."""

    scenario: str
    containment: Optional[ContainmentReport]
    coverage: Optional[CoverageReport]
    lil: Optional[LilRatioReport]
    verdicts: dict
    config: dict


def rescaled_trajectory(family, sample, params, order: int = 1,
                        scenario: Optional[str] = None,
                        window: Optional[int] = None) -> RescaledFamily:
    """Push one fixed sample through a scaling family at every parameter.

    For scaling families on paths, params are eps values in (0, 1/e) (the
    normalizer needs log log(1/eps) > 0); entries are
    loglog_normalizer(eps, order) * (R_eps sample) on the sample's own grid.
    For SequenceShift, sample is a coefficient stream, params are shift
    counts, and entries are windows of ``window`` leading coefficients of
    the shifted stream scaled by (2 log n)^{-order/2}.
    """
    if isinstance(family, SequenceShift):
        stream = np.asarray(sample, dtype=float)
        if stream.ndim != 1:
            raise StructuralError("sequence scenarios take a flat coefficient stream")
        ns = np.asarray(sorted(int(n) for n in params), dtype=int)
        if len(ns) == 0:
            raise InputError("empty parameter grid")
        if window is None:
            window = len(stream) - int(ns[-1])
        if window < 1 or ns[-1] + window > len(stream):
            raise InputError("stream too short for the requested shifts and window")
        entries = np.empty((len(ns), window))
        for i, n in enumerate(ns):
            entries[i] = logn_normalizer(n, order) * stream[n:n + window]
        return RescaledFamily(scenario=scenario or "sequence-shift",
                              params=ns, order=order, entries=entries,
                              kind="vector", metric="euclidean",
                              meta={"window": window})
    if not isinstance(sample, Path):
        raise StructuralError("scaling-family scenarios take a Path sample")
    eps = np.asarray(sorted((float(e) for e in params), reverse=True), dtype=float)
    if len(eps) == 0:
        raise InputError("empty parameter grid")
    rows = []
    for e in eps:
        norm = loglog_normalizer(e, order)
        rows.append(norm * apply_scaling(family, e, sample).values.ravel())
    return RescaledFamily(scenario=scenario or type(family).__name__,
                          params=eps, order=order,
                          entries=np.asarray(rows), kind="path", metric="sup",
                          grid=sample.grid,
                          meta={"components": sample.values.shape[0]})


def h01_ball_net_ambient(model: H01Interval, span_dim: int = 3,
                         per_axis: int = 5) -> LimitSetNet:
    """Sup-norm net for the Brownian limit set: unit-ball images of H01.

    Points are the function values of a coefficient-lattice ball net over
    the first span_dim basis vectors. The reported mesh bounds the ambient
    covering radius: sup-norm is dominated by the H-norm on [0,1] (a unit
    H-ball element is 1/2-Hoelder with constant 1), so it is the lattice
    covering radius delta sqrt(d)/2 in H plus the worst unspanned tail
    sqrt(sum_{n>d} sup|e_n|^2) = sqrt((2/pi^2) psi'(d + 1/2)).
    """
    vectors = ball_net(model, span_dim, per_axis)
    points = np.asarray([model.function_values(v) for v in vectors])
    delta = 2.0 / (per_axis - 1)
    lattice = 0.5 * delta * math.sqrt(span_dim)
    tail = math.sqrt(float(polygamma(1, span_dim + 0.5)) * 2.0 / math.pi**2)
    return LimitSetNet(points=points, metric="sup", mesh=lattice + tail,
                       meta={"span_dim": span_dim, "per_axis": per_axis,
                             "count": len(vectors)})


def h01_sup_sigma(model: Optional[H01Interval] = None, span_dim: int = 4,
                  per_axis: int = 7) -> float:
    """Sup-norm radius of the H01(0,1) unit ball: exactly 1.

    sup_{||h||_H <= 1} |h(t)| = sqrt(t) by Cauchy-Schwarz on h(t) = int h',
    attained at t = 1 by h(t) = t, so the ambient sup over the ball is 1.
    When a model is supplied, a ball-net maximization certifies the value
    from below and must come out <= 1.
    """
    if model is not None:
        best = max(float(np.max(np.abs(model.function_values(v))))
                   for v in ball_net(model, span_dim, per_axis))
        if best > 1.0 + 1e-8:
            raise StructuralError(
                f"ball-net maximization {best} exceeds the closed-form radius 1")
    return 1.0


def unit_sphere_targets(dim: int, count: int, seed=0) -> np.ndarray:
    """Deterministic pseudo-uniform points on the unit sphere of R^dim."""
    if dim < 1 or count < 1:
        raise InputError("need dim >= 1 and count >= 1")
    rng = rng_from_seed(_as_seedspec(seed).child("sphere-net"))
    pts = rng.standard_normal((count, dim))
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    # a zero draw has probability 0; regenerate defensively if degenerate
    while np.any(norms == 0):
        pts = rng.standard_normal((count, dim))
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
    return pts / norms


def _pairwise_min_dist(entries: np.ndarray, points: np.ndarray,
                       metric: str) -> tuple:
    """Per-entry min distance to the point set, chunked to bound memory."""
    n, m = entries.shape
    best = np.full(n, np.inf)
    argbest = np.zeros(n, dtype=int)
    row_chunk = max(1, (1 << 23) // max(8 * m, 1))
    for r0 in range(0, n, row_chunk):
        block = entries[r0:r0 + row_chunk]
        for q0 in range(0, len(points), 8):
            pts = points[q0:q0 + 8]
            diff = block[:, None, :] - pts[None, :, :]
            if metric == "sup":
                d = np.max(np.abs(diff), axis=2)
            elif metric == "euclidean":
                d = np.sqrt(np.sum(diff**2, axis=2))
            else:
                raise StructuralError(f"unknown ambient metric {metric!r}")
            qmin = d.min(axis=1)
            qarg = d.argmin(axis=1) + q0
            sel = qmin < best[r0:r0 + row_chunk]
            best[r0:r0 + row_chunk][sel] = qmin[sel]
            argbest[r0:r0 + row_chunk][sel] = qarg[sel]
    return best, argbest


def containment_stat(fam: RescaledFamily, net: LimitSetNet) -> ContainmentReport:
    """Distance from each family entry to the net, plus the tail maximum.

    The statistic overestimates the distance to the underlying compact set
    by at most net.mesh (reported). The headline number is the max over the
    tail half of the parameter sequence: the half nearest the limit.
    """
    if net.points.shape[0] == 0:
        raise InputError("containment needs a nonempty net")
    if net.points.shape[1] != fam.entries.shape[1]:
        raise StructuralError(
            f"net ambient dim {net.points.shape[1]} does not match the "
            f"family ambient dim {fam.entries.shape[1]}")
    if net.metric != fam.metric:
        raise StructuralError(
            f"metric mismatch: family {fam.metric!r} vs net {net.metric!r}")
    dists, _ = _pairwise_min_dist(fam.entries, net.points, fam.metric)
    tail = dists[len(dists) // 2:]
    return ContainmentReport(params=fam.params, distances=dists,
                             tail_max=float(tail.max()), mesh=net.mesh,
                             metric=fam.metric)


def coverage_stat(fam: RescaledFamily, targets) -> CoverageReport:
    """Min over parameters of the distance from each target to the family.

    Extending the parameter grid can only shrink these minima (more
    entries, same targets).
    """
    if fam.n_params == 0:
        raise InputError("coverage over an empty parameter grid is vacuous")
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if targets.shape[1] != fam.entries.shape[1]:
        raise StructuralError(
            f"target ambient dim {targets.shape[1]} does not match the "
            f"family ambient dim {fam.entries.shape[1]}")
    dists, argmin = _pairwise_min_dist(targets, fam.entries, fam.metric)
    return CoverageReport(distances=dists,
                          closest_params=fam.params[argmin],
                          metric=fam.metric)


def shift_scenario(basis_count: int, n_max: int, seed=0,
                   n_min: int = 100) -> RescaledFamily:
    """Coefficient-shift Strassen family on an i.i.d. Gaussian stream.

    Entry at n is (2 log n)^{-1/2} (Z_{1+n}, ..., Z_{basis_count+n}): the
    shift is exactly measure-preserving and windows at lags >= basis_count
    share no coordinates, so the mixing is exact. Every n in
    [n_min, n_max] is kept: the containment statistic is a max over all of
    them, not a subsample. The candidate limit set is the Euclidean unit
    ball of R^basis_count.
    """
    if basis_count < 1:
        raise InputError("need at least one coordinate")
    if n_max < 100:
        raise InputError("n_max below 100 leaves no asymptotic regime")
    if not 2 <= n_min < n_max:
        raise InputError("need 2 <= n_min < n_max")
    rng = rng_from_seed(_as_seedspec(seed).child("shift-stream"))
    stream = rng.standard_normal(n_max + basis_count)
    windows = np.lib.stride_tricks.sliding_window_view(stream, basis_count)
    ns = np.arange(n_min, n_max + 1)
    norms = 1.0 / np.sqrt(2.0 * np.log(ns))
    entries = windows[n_min:n_max + 1] * norms[:, None]
    return RescaledFamily(scenario="shift-sequence", params=ns, order=1,
                          entries=entries, kind="vector", metric="euclidean",
                          meta={"basis_count": basis_count, "n_min": n_min,
                                "n_max": n_max})


def lil_ratio_stats(params, values, normalizers) -> LilRatioReport:
    """Running maximum of value/normalizer with the attaining parameter."""
    params = np.asarray(params, dtype=float)
    values = np.asarray(values, dtype=float)
    normalizers = np.asarray(normalizers, dtype=float)
    if not (params.shape == values.shape == normalizers.shape):
        raise StructuralError("params, values, normalizers must align")
    if len(params) == 0:
        raise InputError("empty series")
    if np.any(normalizers <= 0):
        raise InputError("normalizers must be positive")
    ratios = values / normalizers
    running = np.maximum.accumulate(ratios)
    top = int(np.argmax(ratios))
    return LilRatioReport(params=params, running_max=running,
                          final=float(running[-1]),
                          argmax_param=float(params[top]), count=len(params))


def _bm_one_sided(points: np.ndarray, rng) -> np.ndarray:
    """Exact Brownian values at sorted positive points via increments."""
    if len(points) == 0:
        return np.zeros(0)
    gaps = np.diff(np.concatenate([[0.0], points]))
    return np.cumsum(rng.standard_normal(len(points)) * np.sqrt(gaps))


def _bm_at_points(points, rng) -> np.ndarray:
    """Exact two-sided Brownian motion evaluated at arbitrary reals.

    Positive and negative half-lines get independent one-sided samples;
    duplicate query points share one value. B(0) = 0.
    """
    pts = np.asarray(points, dtype=float)
    uniq, inverse = np.unique(pts, return_inverse=True)
    vals = np.zeros_like(uniq)
    pos = uniq > 0
    neg = uniq < 0
    vals[pos] = _bm_one_sided(uniq[pos], rng)
    vals[neg] = _bm_one_sided(-uniq[neg][::-1], rng)[::-1]
    return vals[inverse].reshape(pts.shape)


def brownian_smalltime_family(eps_grid, seed=0, comparison_nodes: int = 33,
                              order: int = 1) -> RescaledFamily:
    """Small-time Brownian Strassen family, sampled exactly per query.

    Entry at eps is (2 log log(1/eps))^{-1/2} eps^{-1/2} B(eps t) on a fixed
    comparison grid t in [0, 1]. The queries eps * t reach arbitrarily
    small times, so B is sampled exactly at the sorted query set by
    independent Gaussian increments instead of interpolating a stored path;
    one eps grid therefore has no lower resolution limit.
    """
    eps = np.asarray(sorted((float(e) for e in eps_grid), reverse=True), dtype=float)
    if len(eps) == 0:
        raise InputError("empty parameter grid")
    norms = np.array([loglog_normalizer(e, order) for e in eps])
    tnodes = np.linspace(0.0, 1.0, comparison_nodes)
    queries = np.outer(eps, tnodes)
    rng = rng_from_seed(_as_seedspec(seed).child("bm-small-time"))
    flat = queries.ravel()
    order_idx = np.argsort(flat)
    sorted_vals = _bm_one_sided(flat[order_idx][flat[order_idx] > 0], rng)
    values = np.zeros_like(flat)
    values[order_idx[flat[order_idx] > 0]] = sorted_vals
    bvals = values.reshape(queries.shape)
    entries = bvals * (norms / np.sqrt(eps))[:, None]
    grid = TimeGrid(0.0, 1.0, comparison_nodes)
    return RescaledFamily(scenario="brownian-small-time", params=eps,
                          order=order, entries=entries, kind="path",
                          metric="sup", grid=grid,
                          meta={"comparison_nodes": comparison_nodes})


def brownian_lil_series(t_min: float = 1e-8, t_max: float = 1e-2,
                        points_per_decade: int = 32, seed=0) -> tuple:
    """Exact small-time Brownian LIL trace (t, B(t), sqrt(2 t log log(1/t))).

    t runs geometrically from t_max down to t_min; B is sampled exactly on
    that grid. Feed the triple to ``lil_ratio_stats``; the running maximum
    of the signed ratio tends to 1 (doubly logarithmically slowly).
    """
    if not 0 < t_min < t_max < 1.0 / math.e:
        raise DomainError(
            f"log log guard: need 0 < t_min < t_max < 1/e, got [{t_min}, {t_max}]")
    decades = math.log10(t_max / t_min)
    count = max(2, int(round(decades * points_per_decade)) + 1)
    ts = np.geomspace(t_max, t_min, count)
    rng = rng_from_seed(_as_seedspec(seed).child("bm-lil"))
    asc = ts[::-1]
    vals_asc = _bm_one_sided(asc, rng)
    values = vals_asc[::-1]
    normalizers = np.sqrt(2.0 * ts * np.log(np.log(1.0 / ts)))
    return ts, values, normalizers


def _block_max_mean(abs_ratios: np.ndarray, points_per_decade: int,
                    block_decades: int) -> float:
    """Mean of per-block running maxima of a geometric-grid ratio trace.

    Blocks are consecutive spans of block_decades decades (consecutive
    blocks share one endpoint). A single windowed maximum of the LIL ratio
    scatters over roughly a factor of three between seed quantiles, far
    wider than any useful acceptance band; the per-block maxima are nearly
    independent draws of the same level, so their mean keeps the location
    and shrinks the spread. Trailing points short of a full block fold into
    the last block.
    """
    size = block_decades * points_per_decade
    if size <= 0:
        raise InputError("block size must be positive")
    n_blocks = max(1, len(abs_ratios) // size)
    tops = [abs_ratios[b * size:(b + 1) * size + 1].max() for b in range(n_blocks - 1)]
    tops.append(abs_ratios[(n_blocks - 1) * size:].max())
    return float(np.mean(tops))


def brownian_lil_headline(seed=0, t_min: float = 1e-8, t_max: float = 1e-2,
                          points_per_decade: int = 64, block_decades: int = 2,
                          replicas: int = 4) -> float:
    """Stabilized small-time LIL level: mean block-max of |B(t)| ratios.

    Averages the two-decade running maxima of |B(t)| / sqrt(2 t loglog(1/t))
    over independent exact traces. The limsup constant is 1; at these
    depths the statistic concentrates near 0.9 with seed quantiles
    (0.78, 1.05), against which a one-shot windowed maximum scatters
    over (0.73, 1.50). Calibration numbers are from a 500-seed pilot at
    the default window.
    """
    if replicas < 1:
        raise InputError("need at least one replica")
    vals = []
    for rep in range(replicas):
        ts, values, normalizers = brownian_lil_series(
            t_min=t_min, t_max=t_max, points_per_decade=points_per_decade,
            seed=_as_seedspec(seed).replica(rep))
        vals.append(_block_max_mean(np.abs(values / normalizers),
                                    points_per_decade, block_decades))
    return float(np.mean(vals))


def sphere_closure_demo(model, h: HVector, n_list) -> SphereClosureReport:
    """Complete an interior ball point to the unit sphere along basis axes.

    For each n, c_n = sqrt(1 - ||h||^2 + <h, e_n>^2) - <h, e_n> makes
    ||h + c_n e_n||_H = 1 exactly, and |c_n| <= 2. The ambient sup-norm
    distance |c_n| sup|e_n| decays like 1/n for the H01 sine basis: sphere
    points accumulate at every interior point of the ball.
    """
    norm_h = cm_norm(h)
    if norm_h >= 1.0:
        raise PreconditionError(
            f"need an interior point ||h||_H < 1, got {norm_h}")
    indices = np.asarray(sorted(int(n) for n in n_list), dtype=int)
    if len(indices) == 0 or indices[0] < 1:
        raise InputError("basis indices must be positive")
    basis = orthonormal_basis(model, int(indices[-1]))
    coeffs = np.empty(len(indices))
    dists = np.empty(len(indices))
    renorm = np.empty(len(indices))
    for i, n in enumerate(indices):
        e = basis[n - 1]
        a = cm_inner(h, e)
        c = math.sqrt(1.0 - norm_h**2 + a * a) - a
        coeffs[i] = c
        bumped = HVector(model=model, data=h.data + c * e.data)
        renorm[i] = cm_norm(bumped)
        if isinstance(model, H01Interval):
            ambient = np.max(np.abs(model.function_values(e)))
        else:
            ambient = np.max(np.abs(e.data))
        dists[i] = abs(c) * float(ambient)
    return SphereClosureReport(indices=indices, coefficients=coeffs,
                               distances=dists, renormalized=renorm)


def concentration_check(norm_samples, sigma: float, a_grid) -> ConcentrationReport:
    """Gaussian concentration of the ambient norm around its mean.

    Per level a: empirical P(||x|| > a + mean) against exp(-a^2/(2 sigma^2))
    where sigma is the ambient-norm radius of the unit Cameron-Martin ball.
    The bound must hold up to 4 binomial standard errors. Fewer than 1e4
    samples cannot resolve the interesting levels.
    """
    samples = np.asarray(norm_samples, dtype=float)
    if samples.ndim != 1:
        raise InputError("need a flat array of norm samples")
    if len(samples) < 10_000:
        raise StatisticalPowerError(
            f"need at least 1e4 norm samples, got {len(samples)}")
    if sigma <= 0:
        raise InputError("sigma must be positive (the unit-ball ambient radius)")
    a_grid = np.asarray(a_grid, dtype=float)
    if np.any(a_grid < 0):
        raise InputError("levels must be nonnegative")
    mean = float(samples.mean())
    n = len(samples)
    emp = np.array([float(np.mean(samples > mean + a)) for a in a_grid])
    ses = np.sqrt(emp * (1.0 - emp) / n)
    bounds = np.exp(-a_grid**2 / (2.0 * sigma**2))
    ok = emp <= bounds + 4.0 * ses
    return ConcentrationReport(a_grid=a_grid, empirical=emp, bounds=bounds,
                               std_errors=ses, satisfied=ok, mean_norm=mean,
                               sigma=sigma, count=n)


def modulus_estimate(family, rho_grid, grid: TimeGrid, mc: int = 64,
                     seed=0, t_points: int = 12, sampler=None) -> ModulusReport:
    """Monte Carlo modulus C(rho) = E sup_{t in [0, rho]} ||S_t xi - xi||^2.

    S_t is the scaling family at eps = exp(-t) (the additive semigroup
    clock). All rho values share one master t-grid and common samples, so
    the per-replica suprema are nested maxima and the estimates are
    monotone in rho exactly, not just in expectation. rho = 0 gives an
    empty supremum, hence exactly 0; a fixed point of the family (the zero
    path) gives 0 at every rho.
    """
    rho = np.asarray(sorted(float(r) for r in rho_grid), dtype=float)
    if len(rho) == 0:
        raise InputError("empty rho grid")
    if rho[0] < 0 or rho[-1] > 1:
        raise DomainError("rho values must lie in [0, 1]")
    positive = rho[rho > 0]
    if len(positive):
        base = np.geomspace(0.01, 1.0, t_points)
        master = np.unique(np.outer(positive, base).ravel())
    else:
        master = np.zeros(0)
    sup_sq = np.zeros((mc, len(master)))
    root = _as_seedspec(seed).child("modulus")
    for r in range(mc):
        if sampler is None:
            xi = sample_bm(grid, components=1, seed=root.replica(r))
        else:
            xi = sampler(root.replica(r))
        for j, t in enumerate(master):
            moved = apply_scaling(family, math.exp(-t), xi)
            sup_sq[r, j] = np.max(np.abs(moved.values - xi.values)) ** 2
    estimates = np.empty(len(rho))
    for i, r_val in enumerate(rho):
        cols = master <= r_val
        estimates[i] = float(np.mean(np.max(sup_sq[:, cols], axis=1))) if cols.any() else 0.0
    monotone = bool(np.all(np.diff(estimates) >= 0))
    return ModulusReport(rho_grid=rho, estimates=estimates, replicas=mc,
                         monotone=monotone)


def _iterated_normalizer(eps: np.ndarray, order: int) -> np.ndarray:
    """eps^{-k/4} (log log(1/eps))^{-3k/4}, the composed-process scaling."""
    if np.any(eps >= 1.0 / math.e) or np.any(eps <= 0):
        bad = eps[(eps >= 1.0 / math.e) | (eps <= 0)][0]
        raise DomainError(f"log log guard: eps must lie in (0, 1/e), got {bad}")
    return eps ** (-0.25 * order) * np.log(np.log(1.0 / eps)) ** (-0.75 * order)


def iterated_scenario(B: Path, W: Path, eps_grid, seed=0, order: int = 1,
                      comparison_nodes: int = 65, ratio_t_min: float = 1e-8,
                      ratio_t_max: float = 1e-2, points_per_decade: int = 64,
                      ratio_source: Optional[str] = None,
                      block_decades: int = 1,
                      ratio_replicas: int = 4) -> IteratedReport:
    """Iterated-process family Z^eps(t) = n(eps) B(W(eps t)) and its limsup.

    n(eps) = eps^{-k/4} (log log(1/eps))^{-3k/4} with k = order: k = 1 for
    B a path sample (Brownian-of-Brownian), k = 2 when B holds an order-2
    functional path such as a running Levy area. The family composes the
    two supplied samples by interpolation; if a rescaled inner excursion
    W(eps t) leaves B's domain, that eps is refused (range guard).

    The report also carries the scalar limsup trace of
    B(W(t)) / (t^{k/4} (log log(1/t))^{3k/4}). With ratio_source="exact"
    (default for order 1) the trace resamples the pair exactly on a
    geometric grid down to ratio_t_min, which no stored uniform grid could
    reach; "paths" reads the supplied samples and caps the depth at their
    resolution. Reference constants: 2^{5/4} 3^{-3/4} for order 1,
    (2/3)^{-3/2}/pi for the area variant (recorded, not simulated deeply).

    headline_ratio stabilizes the windowed running max: mean over
    ratio_replicas independent exact traces of the per-decade maxima of
    |ratio| (see _block_max_mean). At the default window the headline
    concentrates near 0.86 of the order-1 reference constant with seed
    quantiles (0.70, 1.06), where a single windowed maximum scatters over
    (0.36, 1.83); numbers from a 500-seed pilot. For ratio_source="paths"
    no resampling is possible, so the headline averages blocks of the one
    supplied trace.
    """
    eps = np.asarray(sorted((float(e) for e in eps_grid), reverse=True), dtype=float)
    if len(eps) == 0:
        raise InputError("empty parameter grid")
    norms = _iterated_normalizer(eps, order)
    tcmp = np.linspace(0.0, 1.0, comparison_nodes)
    wt = W.grid.times()
    bt = B.grid.times()
    entries = np.empty((len(eps), comparison_nodes))
    for i, e in enumerate(eps):
        inner_span = e * (tcmp[-1] - tcmp[0])
        if inner_span < 4.0 * W.grid.dt:
            raise ResolutionError(
                f"eps={e:g} squeezes the inner path below the grid step; "
                f"smallest usable eps is {4.0 * W.grid.dt / (tcmp[-1] - tcmp[0]):g}")
        w = np.interp(e * tcmp, wt, W.component(0))
        if w.min() < bt[0] or w.max() > bt[-1]:
            raise DomainError(
                f"inner excursion [{w.min():.4g}, {w.max():.4g}] leaves the outer "
                f"domain [{bt[0]:g}, {bt[-1]:g}] at eps={e:g}")
        entries[i] = norms[i] * np.interp(w, bt, B.component(0))
    family = RescaledFamily(scenario="iterated", params=eps, order=order,
                            entries=entries, kind="path", metric="sup",
                            grid=TimeGrid(0.0, 1.0, comparison_nodes),
                            meta={"order": order})
    if ratio_source is None:
        ratio_source = "exact" if order == 1 else "paths"
    if ratio_replicas < 1:
        raise InputError("need at least one ratio replica")
    if ratio_source == "exact":
        if order != 1:
            raise InputError("the exact deep-scale trace is wired for order 1 only")
        decades = math.log10(ratio_t_max / ratio_t_min)
        count = max(2, int(round(decades * points_per_decade)) + 1)
        ts = np.geomspace(ratio_t_max, ratio_t_min, count)
        normalizers = ts ** (0.25 * order) * np.log(np.log(1.0 / ts)) ** (0.75 * order)
        heads = []
        values = None
        for rep in range(ratio_replicas):
            rng = rng_from_seed(_as_seedspec(seed).child("iterated-deep").replica(rep))
            w_asc = _bm_one_sided(ts[::-1], rng)
            rep_values = _bm_at_points(w_asc[::-1], rng)
            if values is None:
                values = rep_values
            heads.append(_block_max_mean(np.abs(rep_values / normalizers),
                                         points_per_decade, block_decades))
        headline = float(np.mean(heads))
    elif ratio_source == "paths":
        t_floor = max(ratio_t_min, 4.0 * W.grid.dt)
        decades = math.log10(ratio_t_max / t_floor)
        count = max(2, int(round(decades * points_per_decade)) + 1)
        ts = np.geomspace(ratio_t_max, t_floor, count)
        w_vals = np.interp(ts, wt, W.component(0))
        if w_vals.min() < bt[0] or w_vals.max() > bt[-1]:
            raise DomainError("inner excursion leaves the outer domain on the trace")
        values = np.interp(w_vals, bt, B.component(0))
        normalizers = ts ** (0.25 * order) * np.log(np.log(1.0 / ts)) ** (0.75 * order)
        ratio_replicas = 1
        headline = _block_max_mean(np.abs(values / normalizers),
                                   points_per_decade, block_decades)
    else:
        raise InputError(f"unknown ratio source {ratio_source!r}")
    lil = lil_ratio_stats(ts, values, normalizers)
    constants = {1: BURDZY_CONSTANT, 2: ITERATED_AREA_CONSTANT}
    return IteratedReport(family=family, ratio_params=ts, ratios=values / normalizers,
                          running_max=lil.running_max,
                          final_running_max=lil.final,
                          headline_ratio=headline,
                          ratio_replicas=ratio_replicas,
                          block_decades=block_decades, order=order,
                          reference_constant=constants[order],
                          constants=constants)


def mollified_scenario(u: float, eps_grid, seed=0, resolution: int = 2**16 + 1,
                       net: Optional[LimitSetNet] = None,
                       comparison_nodes: int = 257, span_dim: int = 3,
                       per_axis: int = 5, slope_replicas: int = 24,
                       base_path: Optional[Path] = None) -> MollifiedReport:
    """Mollified-path Strassen scenario with sub-unit scaling exponent.

    Per eps: the base Brownian sample is mollified at scale eps, then
    rescaled through the exponent-u window map f -> eps^{-u/2} f(eps^u t)
    and normalized; mollification at scale eps is asymptotically invisible
    inside the window eps^u when u < 1, so the family obeys the plain
    Brownian Strassen law and is tested for containment against the H01
    ball net. u >= 1 is refused: at u = 1 the mollifier survives the
    window (the limit set becomes the mollifier-dependent set of smoothed
    ball elements) and for u > 1 the family degenerates toward constants.

    The second statistic fits the decay of E sup|A_eps f - f| over eps for
    a representative f of the matching regularity class (a fractional
    sample with Hurst index (u+1)/4, the class the scenario's paths live
    in). The pointwise error scales exactly like eps^{(u+1)/4}; the
    supremum adds an extreme-value factor that is nearly flat over the
    working range eps in [1e-3, 1e-1] (the effective block count
    saturates), so the raw log-log fit estimates (u+1)/4 directly. That
    flatness is a pilot observation for this range and kernel; pushing eps
    much deeper would need the factor divided out.
    """
    if not 0.0 < u < 1.0:
        raise DomainError(
            f"scaling exponent u={u} outside (0, 1): at u = 1 the limit set "
            "becomes mollifier-dependent (the window commutes with the "
            "mollifier) and for u > 1 it degenerates to constants")
    eps = np.asarray(sorted((float(e) for e in eps_grid), reverse=True), dtype=float)
    if len(eps) == 0:
        raise InputError("empty parameter grid")
    root = _as_seedspec(seed)
    grid = TimeGrid(0.0, 1.0, resolution)
    if base_path is None:
        base = sample_bm(grid, components=1, seed=root.child("mollified-base"))
    else:
        base = base_path
        grid = base.grid
        resolution = grid.n
    stride = (resolution - 1) // (comparison_nodes - 1)
    if stride * (comparison_nodes - 1) != resolution - 1:
        raise InputError("comparison grid must subsample the base grid exactly")
    scaler = BrownianScale()
    entries = np.empty((len(eps), comparison_nodes))
    for i, e in enumerate(eps):
        norm = loglog_normalizer(e)
        smoothed = mollify_path(base, e)
        moved = apply_scaling(scaler, e**u, smoothed)
        entries[i] = norm * moved.values[0, ::stride]
    family = RescaledFamily(scenario=f"mollified-u{u:g}", params=eps, order=1,
                            entries=entries, kind="path", metric="sup",
                            grid=TimeGrid(0.0, 1.0, comparison_nodes),
                            meta={"u": u})
    if net is None:
        net = h01_ball_net_ambient(H01Interval(0.0, 1.0, comparison_nodes),
                                   span_dim=span_dim, per_axis=per_axis)
    containment = containment_stat(family, net)

    hurst = 0.25 * (u + 1.0)
    slope_grid = TimeGrid(0.0, 1.0, resolution)
    sups = np.zeros((slope_replicas, len(eps)))
    for r in range(slope_replicas):
        f = sample_fbm(hurst, slope_grid, seed=root.child("mollified-slope").replica(r))
        for i, e in enumerate(eps):
            sm = mollify_path(f, e)
            sups[r, i] = np.max(np.abs(sm.values - f.values))
    means = sups.mean(axis=0)
    slope = float(np.polyfit(np.log(eps), np.log(means), 1)[0])
    return MollifiedReport(u=u, containment=containment, slope=slope,
                           slope_eps=eps, slope_means=means,
                           expected_slope=hurst,
                           meta={"resolution": resolution,
                                 "slope_replicas": slope_replicas,
                                 "hurst": hurst})
