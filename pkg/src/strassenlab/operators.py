"""Measure-preserving scaling families and their diagnostics.

The limit-set machinery needs operators S with S S* = I on the
Cameron-Martin space (measure preserving) that are strongly mixing,
<S_n f, g>_H -> 0. This module implements the concrete families:

- ``BrownianScale``:  R_eps f(t) = eps^{-1/2} f(eps t)
- ``FbmScale``:       R_eps f(t) = eps^{-H} f(eps t)
- ``NoiseScale``:     (R_eps xi)(t, x) = eps^{3/2} xi(eps^2 t, eps x)
- ``SheScale``:       (R_eps h)(t, x) = eps^{d/2 - 1} h(eps^2 t, eps x), d = 1
- ``SequenceShift``:  (S^n a)_j = a_{j+n} on coefficient sequences
- ``RotationShiftBlock``: rotation(theta) on the first two coordinates
  direct-summed with the sequence shift on the rest

and the diagnostics: co-isometry defect ||S S* - I||, mixing inner products
and their log-log decay slopes, the unitary/vanishing decomposition through
the projections S_n* S_n, Wiener-style spectral averages
(1/n) sum_k |<U^k x, x>|, and strong-continuity defects of the associated
multiplicative semigroup.

Grid caveats are structural, not swept under the rug: a time stretch can
leave a finite window, so truncated matrices of these families are never
co-isometries on the nose. ``scaling_operator_matrix`` therefore carries a
Gram-corrected adjoint block assembled from closed-form adjoint
representatives (sqrt(eps) g(./eps) held constant past eps L for the
Brownian family on a Dirichlet window; eps^H g(./eps), the unitary inverse,
for the fBM family), and ``adjoint_defect`` measures that block against the
identity when present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cm_space import FbmFourier, H01Interval, HVector, cm_inner, fbm_spectral_constant
from .errors import (DomainError, InputError, PreconditionError,
                     ResolutionError, StructuralError)
from .gaussian_sim import Field, Path

__all__ = [
    "BrownianScale",
    "FbmScale",
    "NoiseScale",
    "SheScale",
    "SequenceShift",
    "RotationShiftBlock",
    "apply_scaling",
    "OperatorMatrix",
    "scaling_operator_matrix",
    "adjoint_defect",
    "mixing_inner",
    "mixing_slope",
    "fit_decay_slope",
    "MixingReport",
    "DecompositionResult",
    "unitary_part_projection",
    "spectral_wiener_average",
    "strong_continuity_defect",
]


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"scaling parameter must lie in (0, 1], got {eps}")


def _rescale_path(p: Path, time_factor: float, amplitude: float) -> Path:
    """amplitude * f(time_factor * t) with linear interpolation off nodes."""
    grid = p.grid
    span = grid.t1 - grid.t0
    if time_factor * span < 4.0 * grid.dt:
        raise ResolutionError(
            f"rescaled window {time_factor * span:.3e} falls below the grid "
            f"resolution; minimum representable factor is {4.0 * grid.dt / span:.3e}")
    t = grid.times()
    query = time_factor * t
    if query.min() < grid.t0 - 1e-12 * span or query.max() > grid.t1 + 1e-12 * span:
        raise StructuralError(
            "rescaled arguments leave the window; the grid must contain the "
            "contracted time range (start a one-sided grid at 0)")
    out = np.empty_like(p.values)
    for c in range(p.values.shape[0]):
        out[c] = amplitude * np.interp(query, t, p.values[c])
    return Path(grid=grid, values=out)


@dataclass(frozen=True)
class BrownianScale:
    """Brownian scaling, beta = 1/2."""

    name = "brownian_scale"
    exponent = 0.5

    def apply(self, eps: float, p: Path) -> Path:
        _check_eps(eps)
        return _rescale_path(p, eps, eps ** (-self.exponent))


@dataclass(frozen=True)
class FbmScale:
    """Fractional Brownian scaling with Hurst exponent."""

    hurst: float = 0.5

    name = "fbm_scale"

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise DomainError(f"hurst must lie in (0, 1), got {self.hurst}")

    @property
    def exponent(self) -> float:
        return self.hurst

    def apply(self, eps: float, p: Path) -> Path:
        _check_eps(eps)
        return _rescale_path(p, eps, eps ** (-self.hurst))


@dataclass(frozen=True)
class SheScale:
    """Additive-heat scaling in d = 1: eps^{-1/2} h(eps^2 t, eps x)."""

    name = "she_scale"

    def apply(self, eps: float, f: Field) -> Field:
        _check_eps(eps)
        if f.kind != "nodes":
            raise StructuralError("SheScale acts on node fields")
        g = f.stgrid
        if g.t0 > 1e-12 or g.x0 > -0.0 or g.x1 < 0.0:
            raise StructuralError("field window must start at t=0 and contain x=0")
        ts, xs = g.times(), g.xs()
        qt = np.clip(eps**2 * ts, g.t0, g.t1)
        qx = np.clip(eps * xs, g.x0, g.x1)
        if eps**2 * (g.t1 - g.t0) < 4.0 * g.dt or eps * (g.x1 - g.x0) < 4.0 * g.dx:
            raise ResolutionError("rescaled field window below grid resolution")
        it = np.clip(np.searchsorted(ts, qt) - 1, 0, g.nt - 2)
        ix = np.clip(np.searchsorted(xs, qx) - 1, 0, g.nx - 2)
        wt = ((qt - ts[it]) / g.dt)[:, None]
        wx = ((qx - xs[ix]) / g.dx)[None, :]
        v = f.values
        interp = ((1 - wt) * (1 - wx) * v[np.ix_(it, ix)]
                  + (1 - wt) * wx * v[np.ix_(it, ix + 1)]
                  + wt * (1 - wx) * v[np.ix_(it + 1, ix)]
                  + wt * wx * v[np.ix_(it + 1, ix + 1)])
        return Field(stgrid=g, values=eps ** (-0.5) * interp, kind="nodes")


@dataclass(frozen=True)
class NoiseScale:
    """White-noise scaling in d = 1: eps^{3/2} xi(eps^2 t, eps x).

    Cell fields are piecewise constant, so the distributional pull-back is
    realized by a cell lookup at the rescaled cell midpoints.
    """

    name = "noise_scale"

    def apply(self, eps: float, f: Field) -> Field:
        _check_eps(eps)
        if f.kind != "cells":
            raise StructuralError("NoiseScale acts on cell fields")
        g = f.stgrid
        if g.t0 > 1e-12 or g.x0 > -0.0 or g.x1 < 0.0:
            raise StructuralError("noise window must start at t=0 and contain x=0")
        if eps**2 * (g.t1 - g.t0) < 4.0 * g.dt or eps * (g.x1 - g.x0) < 4.0 * g.dx:
            raise ResolutionError("rescaled noise window below grid resolution")
        tm = g.times()[:-1] + 0.5 * g.dt
        xm = g.xs()[:-1] + 0.5 * g.dx
        it = np.clip(((eps**2 * tm - g.t0) / g.dt).astype(int), 0, g.nt - 2)
        ix = np.clip(((eps * xm - g.x0) / g.dx).astype(int), 0, g.nx - 2)
        vals = eps**1.5 * f.values[np.ix_(it, ix)]
        return Field(stgrid=g, values=vals, kind="cells")


@dataclass(frozen=True)
class SequenceShift:
    """Left shift on finitely supported coefficient sequences.

    (S a)_j = a_{j+1}; the adjoint prepends a zero. Everything is symbolic
    index bookkeeping, so shift identities hold exactly.
    """

    name = "sequence_shift"

    @staticmethod
    def _check_n(n) -> int:
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise DomainError(f"shift count must be a nonnegative integer, got {n!r}")
        return int(n)

    def apply(self, n, a: np.ndarray) -> np.ndarray:
        n = self._check_n(n)
        a = np.asarray(a, dtype=float)
        return a[n:].copy() if n < len(a) else np.zeros(1)

    def adjoint(self, n, a: np.ndarray) -> np.ndarray:
        n = self._check_n(n)
        a = np.asarray(a, dtype=float)
        return np.concatenate([np.zeros(n), a])

    @staticmethod
    def inner(a: np.ndarray, b: np.ndarray) -> float:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        m = min(len(a), len(b))
        return float(np.dot(a[:m], b[:m]))


@dataclass(frozen=True)
class RotationShiftBlock:
    """rotation(theta) on coordinates (0, 1) direct-summed with the shift.

    A co-isometry whose unitary part is exactly the rotation plane and
    whose completely-nonunitary part is the left shift on the remaining
    coordinates. Kept symbolic like ``SequenceShift``: a finite square
    matrix with S S* = I is automatically unitary, which would erase the
    vanishing part this operator exists to exhibit.
    """

    theta: float

    name = "rotation_shift_block"

    def _rotation(self, power: int) -> np.ndarray:
        a = self.theta * power
        return np.array([[math.cos(a), -math.sin(a)],
                         [math.sin(a), math.cos(a)]])

    def apply(self, n, a: np.ndarray) -> np.ndarray:
        n = SequenceShift._check_n(n)
        a = np.asarray(a, dtype=float)
        if len(a) < 2:
            raise StructuralError("block vectors need at least the rotation plane")
        head = self._rotation(n) @ a[:2]
        tail = SequenceShift().apply(n, a[2:]) if len(a) > 2 else np.zeros(0)
        return np.concatenate([head, tail])

    def project(self, n, a: np.ndarray) -> np.ndarray:
        """S_n* S_n a: identity on the plane, zero the first n tail coords."""
        n = SequenceShift._check_n(n)
        a = np.asarray(a, dtype=float)
        if len(a) < 2:
            raise StructuralError("block vectors need at least the rotation plane")
        out = a.copy()
        out[2:2 + min(n, len(a) - 2)] = 0.0
        return out


def apply_scaling(family, eps, obj):
    """R_eps applied to a path, field, or sequence.

    The semigroup law R_eps1 R_eps2 = R_{eps1 eps2} holds to rounding when
    the composed arguments land on grid nodes (dyadic eps on dyadic grids).
    """
    return family.apply(eps, obj)


@dataclass
class OperatorMatrix:
    """Truncated operator on the first k orthonormal basis vectors.

    ``matrix`` is the raw truncation M_ij = <S e_j, e_i>. When the builder
    can represent the adjoint in closed form it also stores
    ``adjoint_gram``[i, l] = <S* e_i, S* e_l>_H, the Gram-corrected block
    whose distance to the identity is the honest S S* = I defect.
    """

    matrix: np.ndarray
    adjoint_gram: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise StructuralError("operator matrix must be 2-dimensional")
        if self.adjoint_gram is not None:
            self.adjoint_gram = np.asarray(self.adjoint_gram, dtype=float)
            k = self.matrix.shape[0]
            if self.adjoint_gram.shape != (k, k):
                raise StructuralError("adjoint gram must be k x k")


def adjoint_defect(m: OperatorMatrix) -> float:
    """Operator norm of S S* - I on the truncated space.

    Uses the Gram-corrected adjoint block when present, otherwise the raw
    co-isometry defect ||M M^T - I||_2.
    """
    if isinstance(m, np.ndarray):
        m = OperatorMatrix(matrix=m)
    k = m.matrix.shape[0]
    if m.adjoint_gram is not None:
        return float(np.linalg.norm(m.adjoint_gram - np.eye(k), 2))
    return float(np.linalg.norm(m.matrix @ m.matrix.T - np.eye(k), 2))


def _h01_operator_matrix(model: H01Interval, k: int, eps: float,
                         quad_points: int) -> OperatorMatrix:
    # basis derivatives sqrt(2/L) cos((i-1/2) pi s), s = (t-a)/L; both the
    # raw entries and the adjoint Gram reduce to cosine quadratures on [0,1].
    s = np.linspace(0.0, 1.0, quad_points)
    ds = s[1] - s[0]
    freqs = (np.arange(1, k + 1) - 0.5) * math.pi
    rows = np.cos(np.outer(freqs, s))                   # e_i' up to sqrt(2/L)
    cols = np.cos(np.outer(freqs * eps, s))             # (R_eps e_j)' shape
    weights = np.full(quad_points, ds)
    weights[[0, -1]] = 0.5 * ds
    M = 2.0 * math.sqrt(eps) * (rows * weights) @ cols.T
    # adjoint representatives: derivative eps^{-1/2} e_i'(u / eps) cut at
    # u = eps; on the cosine family the cutoff value is 0, so the trapezoid
    # rule stays exact when eps lands on a node
    cut = s <= eps + 1e-12
    su = s[cut] / eps
    rows_adj = np.cos(np.outer(freqs, su))
    w_adj = np.full(cut.sum(), ds / eps)
    w_adj[[0, -1]] = 0.5 * ds / eps
    G = 2.0 * (rows_adj * w_adj) @ rows_adj.T
    meta = {"family": "brownian_scale", "model": "h01", "eps": eps, "k": k}
    return OperatorMatrix(matrix=M, adjoint_gram=G, meta=meta)


def _gaussian_mother_family(model: FbmFourier, k: int):
    """Closed-form Gaussian bumps, well inside the window, spaced 2 sigma.

    sigma = span/48 keeps the outermost bump of a 16-member family 13 sigma
    away from the window edge, so periodization is below rounding.
    """
    span = model.b - model.a
    center = 0.0 if model.a <= 0.0 <= model.b else 0.5 * (model.a + model.b)
    sigma = span / 48.0
    offsets = (np.arange(k) - (k - 1) / 2.0) * (2.0 * sigma)
    mus = center + offsets

    def make(mu):
        return lambda t, mu=mu: np.exp(-0.5 * ((t - mu) / sigma) ** 2)

    return [make(mu) for mu in mus], mus, sigma


def gaussian_pair_cm_gram(hurst: float, mus: np.ndarray, sigma: float) -> np.ndarray:
    """Line-model Gram of Gaussian bumps, in closed form.

    <phi_j, phi_m>_H
      = (2/c_H) int |xi|^{2H+1} phihat_j conj(phihat_m) dxi
      = (8 pi sigma^2 / c_H) int_0^inf xi^{2H+1} e^{-sigma^2 xi^2} cos(xi d) dxi
      = (4 pi sigma^2 / c_H) Gamma(H+1) sigma^{-2H-2} 1F1(H+1; 1/2; -d^2/(4 sigma^2))

    with d = mu_j - mu_m. The discrete window approximation carries an
    O(dxi^{2H+2}) error from the spectral kink at 0, so Gram assembly on the
    line must go through this form instead of the windowed transform.
    """
    from scipy.special import gamma as _gamma, hyp1f1

    mus = np.asarray(mus, dtype=float)
    d2 = (mus[:, None] - mus[None, :]) ** 2
    pref = (4.0 * math.pi * sigma**2 / fbm_spectral_constant(hurst)
            * _gamma(hurst + 1.0) * sigma ** (-2.0 * hurst - 2.0))
    return pref * hyp1f1(hurst + 1.0, 0.5, -d2 / (4.0 * sigma**2))


def _fbm_operator_matrix(model: FbmFourier, k: int, eps: float) -> OperatorMatrix:
    funcs, mus, sigma = _gaussian_mother_family(model, k)
    H = model.hurst
    gram = gaussian_pair_cm_gram(H, mus, sigma)
    # orthonormalize on the line: e = combinations of phi with coefficients
    # from inv(L), gram = L L^T
    L = np.linalg.cholesky(gram)
    C = np.linalg.inv(L)

    # adjoint images: S* phi = eps^H phi(./eps), again Gaussian bumps with
    # centers eps mu and width eps sigma, so their Gram is the same closed
    # form; the isometry is the scaling covariance of the formula
    gram_adj = eps ** (2.0 * H) * gaussian_pair_cm_gram(H, eps * mus, eps * sigma)
    G = C @ gram_adj @ C.T

    # raw truncation through the window model: S phi = eps^{-H} phi(eps .);
    # representable only while the stretched bumps stay inside the window
    t = model.grid()
    mothers = [model.vector_from_function(f(t)) for f in funcs]
    raw = [model.vector_from_function(eps ** (-H) * f(eps * t)) for f in funcs]
    cross = np.array([[cm_inner(u, v) for v in raw] for u in mothers])
    M = C @ cross @ C.T
    meta = {"family": "fbm_scale", "model": "fbm_fourier", "eps": eps,
            "k": k, "hurst": model.hurst, "sigma": sigma}
    return OperatorMatrix(matrix=M, adjoint_gram=G, meta=meta)


def scaling_operator_matrix(family, model, k: int, eps: float,
                            quad_points: int = 16385) -> OperatorMatrix:
    """Assemble the truncated matrix of R_eps together with its adjoint Gram."""
    _check_eps(eps)
    if k < 1:
        raise InputError("k must be positive")
    if isinstance(family, BrownianScale) and isinstance(model, H01Interval):
        return _h01_operator_matrix(model, k, eps, quad_points)
    if isinstance(family, FbmScale) and isinstance(model, FbmFourier):
        if abs(family.hurst - model.hurst) > 1e-12:
            raise StructuralError("family and model Hurst parameters differ")
        return _fbm_operator_matrix(model, k, eps)
    raise StructuralError(
        f"no matrix assembly wired for {type(family).__name__} on {type(model).__name__}")


def mixing_inner(family, model, f, g, eps) -> float:
    """<R_eps f, g>_H on the model, exact in the shift case.

    Brownian/H01: int sqrt(eps) f'(eps t) g'(t) dt; the compressed argument
    stays inside the window for every eps, so no adjoint trick is needed.
    Fbm/Fourier: evaluated in spectral form
    (2/c_H) eps^{1+H} sum |u|^{2H+1} fhat(u) conj(ghat(eps u)) du
    with ghat at off-grid frequencies from the exact grid transform; the
    time-domain stretch would leave any finite window for small eps.
    """
    if isinstance(family, SequenceShift):
        n = family._check_n(eps)
        return family.inner(family.apply(n, f), g)
    _check_eps(eps)
    if isinstance(family, BrownianScale) and isinstance(model, H01Interval):
        if not (isinstance(f, HVector) and isinstance(g, HVector)):
            raise StructuralError("expected HVector representatives")
        t = model.grid()
        fq = np.interp(eps * (t - model.a) + model.a, t, f.data)
        return float(math.sqrt(eps) * np.trapezoid(fq * g.data, dx=model.dt))
    if isinstance(family, FbmScale) and isinstance(model, FbmFourier):
        if abs(family.hurst - model.hurst) > 1e-12:
            raise StructuralError("family and model Hurst parameters differ")
        if eps == 1.0:
            return cm_inner(f, g)
        H = model.hurst
        xi, dxi = model.spectral_weights()
        # rfft phases are relative to the first grid node; restore the window
        # offset so both transforms share the true time origin, otherwise the
        # cross terms pick up a spurious (-1)^k on origin-centered windows
        fhat = model.dt * np.fft.rfft(f.data) * np.exp(-1j * xi * model.a)
        t = model.grid()
        # exact transform of the grid representative at compressed frequencies
        ghat_eps = model.dt * np.exp(-1j * np.outer(eps * xi, t)) @ g.data
        w = np.abs(xi) ** (2.0 * H + 1.0)
        scale = np.full_like(w, 2.0)
        scale[0] = 1.0
        if model.resolution % 2 == 0:
            scale[-1] = 1.0
        total = float(np.sum(scale * w * (fhat * np.conj(ghat_eps)).real)) * dxi
        return 2.0 / fbm_spectral_constant(H) * eps ** (1.0 + H) * total
    if eps == 1.0:
        return cm_inner(f, g)
    raise StructuralError(
        f"no mixing inner product wired for {type(family).__name__} on {type(model).__name__}")


@dataclass
class MixingReport:
    eps: np.ndarray
    values: np.ndarray
    verdict: str             # "decay-fit" or "exact-zero"
    slope: float = None
    intercept: float = None
    r_squared: float = None


def fit_decay_slope(eps, values) -> MixingReport:
    """Least-squares slope of log|value| against log eps.

    Needs at least 4 points spanning at least 2 decades. A series that is
    zero to rounding gets the exact-zero verdict instead of a garbage fit.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps.shape != values.shape or eps.ndim != 1:
        raise StructuralError("eps and values must be matching 1d arrays")
    if len(eps) < 4:
        raise InputError("need at least 4 points for a slope fit")
    if np.log10(eps.max() / eps.min()) < 2.0 - 1e-9:
        raise InputError("need at least 2 decades of eps for a slope fit")
    scale = np.abs(values).max()
    if scale == 0.0 or scale < 1e-14:
        return MixingReport(eps=eps, values=values, verdict="exact-zero")
    keep = np.abs(values) > 1e-14 * scale
    if keep.sum() < 4:
        return MixingReport(eps=eps, values=values, verdict="exact-zero")
    x = np.log(eps[keep])
    y = np.log(np.abs(values[keep]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return MixingReport(eps=eps, values=values, verdict="decay-fit",
                        slope=float(slope), intercept=float(intercept), r_squared=r2)


def mixing_slope(family, model, f, g, eps_list) -> MixingReport:
    vals = np.array([mixing_inner(family, model, f, g, e) for e in eps_list])
    return fit_decay_slope(np.asarray(eps_list, dtype=float), vals)


@dataclass(frozen=True)
class DecompositionResult:
    """Unitary/vanishing split of a vector under the projections S_n* S_n."""

    unitary_component: np.ndarray
    vanishing_component: np.ndarray
    residual: float


def unitary_part_projection(S, v, n: int, tol: float = 1e-6) -> DecompositionResult:
    """Split v through S_n* S_n with S_n = S^n.

    S_n* S_n is the orthogonal projection onto Im(S_n*) when S S* = I, so
    the iterates converge to the unitary-part component of v; the
    vanishing component is the remainder. The residual
    ||S_{n+1}* S_{n+1} v - S_n* S_n v|| monitors convergence. Matrices
    must pass the co-isometry check at ``tol`` first; the sequence shift
    and the rotation-shift block are handled by exact index bookkeeping.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    if isinstance(S, SequenceShift):
        v = np.asarray(v, dtype=float)
        out = v.copy()
        out[: min(n, len(out))] = 0.0
        nxt = v.copy()
        nxt[: min(n + 1, len(nxt))] = 0.0
    elif isinstance(S, RotationShiftBlock):
        v = np.asarray(v, dtype=float)
        out = S.project(n, v)
        nxt = S.project(n + 1, v)
    else:
        S = np.asarray(S, dtype=float)
        defect = float(np.linalg.norm(S @ S.T - np.eye(S.shape[0]), 2))
        if defect > tol:
            raise PreconditionError(
                f"operator is not a co-isometry at tolerance {tol:g} "
                f"(defect {defect:.3e})")
        v = np.asarray(v, dtype=float)
        Sn = np.linalg.matrix_power(S, n)
        out = Sn.T @ (Sn @ v)
        Snn = S @ Sn
        nxt = Snn.T @ (Snn @ v)
    return DecompositionResult(unitary_component=out,
                               vanishing_component=v - out,
                               residual=float(np.linalg.norm(nxt - out)))


def spectral_wiener_average(U, x, n: int) -> float:
    """(1/n) sum_{k=1..n} |<U^k x, x>|, the Wiener ergodicity average.

    Vanishing averages certify an atomless spectral measure of x under U.
    Matrix inputs must be unitary to 1e-8. The sequence shift is evaluated
    symbolically and gives exactly 0 for finitely supported x once the
    shifted support clears the original.
    """
    if n < 1:
        raise InputError("n must be positive")
    if isinstance(U, SequenceShift):
        x = np.asarray(x, dtype=float)
        total = 0.0
        for k in range(1, n + 1):
            if k >= len(x):
                break
            total += abs(float(np.dot(x[k:], x[:-k])))
        return total / n
    U = np.asarray(U, dtype=float)
    if float(np.linalg.norm(U.T @ U - np.eye(U.shape[0]), 2)) > 1e-8:
        raise PreconditionError("matrix is not unitary at tolerance 1e-8")
    x = np.asarray(x, dtype=float)
    y = x.copy()
    total = 0.0
    for _ in range(n):
        y = U @ y
        total += abs(float(np.dot(y, x)))
    return total / n


def strong_continuity_defect(family, test_paths, eps_list) -> np.ndarray:
    """max over the test set of ||R_eps phi - phi||_sup, one entry per eps.

    Strong continuity of the multiplicative semigroup S_t = R_{e^{-t}} is
    the eps -> 1 statement, so the defect must vanish as eps increases
    to 1.
    """
    if not test_paths:
        raise InputError("empty test set")
    out = np.zeros(len(eps_list))
    for i, eps in enumerate(eps_list):
        worst = 0.0
        for p in test_paths:
            q = apply_scaling(family, eps, p)
            worst = max(worst, float(np.max(np.abs(q.values - p.values))))
        out[i] = worst
    return out
