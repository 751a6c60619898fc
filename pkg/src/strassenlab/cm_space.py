"""Cameron-Martin space models and their inner products.

A Gaussian measure on a Banach space X has a distinguished Hilbert subspace
H (its Cameron-Martin space) whose unit ball is the limit set in the
functional laws verified by this package. Each model here fixes a concrete
discretization of one such H:

- ``H01Interval``: the Dirichlet space of the Wiener measure on [a, b],
  <f, g> = int f' g' dt with f(a) = 0. Representatives store the derivative
  on a uniform grid; the trapezoid rule on that grid integrates products of
  the half-integer cosine family exactly, so the sine basis Gram is exact
  to rounding.
- ``FbmFourier``: the fractional Brownian space with Hurst index H,
  <f, g> = (2 / c_H) int |xi|^{2H+1} fhat(xi) conj(ghat(xi)) dxi,
  c_H = 4 pi / (Gamma(2H+1) sin(pi H)). At H = 1/2 the constant reduces to
  4 pi, which is the unique value making the spectral form agree with the
  Dirichlet inner product under the transform fhat(xi) = int f e^{-i xi t} dt.
  Representatives store function samples on a periodic grid, pinned to
  vanish at the origin (constants have zero norm and are quotiented out).
- ``L2Box``: plain L2 on an interval or a space-time box; the white-noise
  Cameron-Martin space.
- ``HeatCM``: the additive stochastic-heat-equation space,
  ||h||^2 = int (d_t h - d_xx h)^2 dx dt over a space-time box, residual
  computed with second-order finite differences.

Conjugate norms: ``conjugate_norm`` evaluates sup {(f, phi): ||phi||_X <= 1}
over a finite net of test functions (a certified lower bound), and
``q_sqrt_inv_norm`` evaluates the covariance norm ||Q^{-1/2} phi|| through a
symmetric eigendecomposition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from .errors import DomainError, PreconditionError, StructuralError

__all__ = [
    "H01Interval",
    "FbmFourier",
    "L2Box",
    "HeatCM",
    "HVector",
    "cm_inner",
    "cm_norm",
    "orthonormal_basis",
    "ball_net",
    "conjugate_norm",
    "ConjugateNormReport",
    "q_sqrt_inv_norm",
    "fbm_spectral_constant",
    "hvector_to_json",
    "hvector_from_json",
    "hvector_to_csv",
    "hvector_from_csv",
]


def fbm_spectral_constant(hurst: float) -> float:
    """c_H in the spectral inner product; 4 pi at hurst = 1/2."""
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst}")
    return 4.0 * math.pi / (_gamma(2.0 * hurst + 1.0) * math.sin(math.pi * hurst))


@dataclass(frozen=True)
class H01Interval:
    """Dirichlet space on [a, b], elements pinned at the left endpoint.

    Representatives are derivative samples on the endpoint-inclusive uniform
    grid with ``resolution`` points.
    """

    a: float = 0.0
    b: float = 1.0
    resolution: int = 4096

    variant = "h01"

    def __post_init__(self):
        if not self.b > self.a:
            raise StructuralError("empty interval")
        if self.resolution < 4:
            raise StructuralError("resolution must be at least 4")

    @property
    def dt(self) -> float:
        return (self.b - self.a) / (self.resolution - 1)

    def grid(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.resolution)

    def vector_from_derivative(self, fprime) -> "HVector":
        data = np.asarray(fprime(self.grid()) if callable(fprime) else fprime, dtype=float)
        if data.shape != (self.resolution,):
            raise StructuralError("derivative samples do not match the grid")
        return HVector(model=self, data=data)

    def vector_from_function(self, f) -> "HVector":
        """Build a representative from function samples by central differencing."""
        vals = np.asarray(f(self.grid()) if callable(f) else f, dtype=float)
        if vals.shape != (self.resolution,):
            raise StructuralError("function samples do not match the grid")
        return HVector(model=self, data=np.gradient(vals, self.dt, edge_order=2))

    def function_values(self, vec: "HVector") -> np.ndarray:
        """Integrate the stored derivative; the element vanishes at a."""
        out = np.empty(self.resolution)
        out[0] = 0.0
        np.cumsum((vec.data[1:] + vec.data[:-1]) * (0.5 * self.dt), out=out[1:])
        return out

    def inner(self, u: "HVector", v: "HVector") -> float:
        return float(np.trapezoid(u.data * v.data, dx=self.dt))

    def params(self) -> dict:
        return {"a": self.a, "b": self.b, "resolution": self.resolution}


@dataclass(frozen=True)
class FbmFourier:
    """Spectral fractional Brownian model on a periodic window [a, b).

    Representatives are function samples on the n-point periodic grid
    (right endpoint excluded). The stored samples are canonical: pinned so
    the value at the grid point nearest the origin (or at a when the window
    does not contain 0) vanishes, which quotients out the zero-norm
    constants.
    """

    hurst: float = 0.5
    a: float = 0.0
    b: float = 1.0
    resolution: int = 4096

    variant = "fbm_fourier"

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise DomainError(f"hurst must lie in (0, 1), got {self.hurst}")
        if not self.b > self.a:
            raise StructuralError("empty window")
        if self.resolution < 8:
            raise StructuralError("resolution must be at least 8")

    @property
    def dt(self) -> float:
        return (self.b - self.a) / self.resolution

    def grid(self) -> np.ndarray:
        return self.a + self.dt * np.arange(self.resolution)

    def _pin_index(self) -> int:
        if self.a <= 0.0 <= self.b:
            return int(np.argmin(np.abs(self.grid())))
        return 0

    def canonicalize(self, samples: np.ndarray) -> np.ndarray:
        return samples - samples[self._pin_index()]

    def vector_from_function(self, f) -> "HVector":
        vals = np.asarray(f(self.grid()) if callable(f) else f, dtype=float)
        if vals.shape != (self.resolution,):
            raise StructuralError("function samples do not match the grid")
        return HVector(model=self, data=self.canonicalize(vals))

    def function_values(self, vec: "HVector") -> np.ndarray:
        return vec.data

    def spectral_weights(self) -> tuple[np.ndarray, float]:
        """Nonnegative rfft frequencies and the frequency step."""
        xi = 2.0 * math.pi * np.fft.rfftfreq(self.resolution, d=self.dt)
        return xi, 2.0 * math.pi / (self.resolution * self.dt)

    def inner(self, u: "HVector", v: "HVector") -> float:
        xi, dxi = self.spectral_weights()
        uhat = self.dt * np.fft.rfft(u.data)
        vhat = self.dt * np.fft.rfft(v.data)
        w = np.abs(xi) ** (2.0 * self.hurst + 1.0)
        cross = w * (uhat * np.conj(vhat)).real
        # double the strictly positive frequencies; DC has zero weight and the
        # Nyquist bin (present for even n) is its own mirror image
        scale = np.full_like(cross, 2.0)
        scale[0] = 1.0
        if self.resolution % 2 == 0:
            scale[-1] = 1.0
        total = float(np.sum(scale * cross)) * dxi
        return 2.0 / fbm_spectral_constant(self.hurst) * total

    def params(self) -> dict:
        return {"hurst": self.hurst, "a": self.a, "b": self.b, "resolution": self.resolution}


@dataclass(frozen=True)
class L2Box:
    """L2 over an interval (shape (n,)) or a space-time box (shape (nt, nx))."""

    bounds: tuple = ((0.0, 1.0),)
    resolution: tuple = (4096,)

    variant = "l2_box"

    def __post_init__(self):
        if len(self.bounds) != len(self.resolution) or len(self.bounds) not in (1, 2):
            raise StructuralError("bounds/resolution must describe a 1d or 2d box")
        for (lo, hi), n in zip(self.bounds, self.resolution):
            if not hi > lo:
                raise StructuralError("empty box side")
            if n < 2:
                raise StructuralError("resolution must be at least 2 per side")

    def steps(self) -> tuple:
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.resolution))

    def grid(self) -> tuple:
        return tuple(np.linspace(lo, hi, n) for (lo, hi), n in zip(self.bounds, self.resolution))

    def vector_from_function(self, f) -> "HVector":
        if callable(f):
            axes = self.grid()
            if len(axes) == 1:
                vals = f(axes[0])
            else:
                vals = f(axes[0][:, None], axes[1][None, :])
        else:
            vals = f
        vals = np.asarray(vals, dtype=float)
        if vals.shape != tuple(self.resolution):
            raise StructuralError("samples do not match the box grid")
        return HVector(model=self, data=vals)

    def function_values(self, vec: "HVector") -> np.ndarray:
        return vec.data

    def inner(self, u: "HVector", v: "HVector") -> float:
        prod = u.data * v.data
        if prod.ndim == 1:
            return float(np.trapezoid(prod, dx=self.steps()[0]))
        dt, dx = self.steps()
        return float(np.trapezoid(np.trapezoid(prod, dx=dx, axis=1), dx=dt))

    def params(self) -> dict:
        return {"bounds": [list(side) for side in self.bounds],
                "resolution": list(self.resolution)}


def _second_x_derivative(h: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative along the last axis, second-order one-sided at edges."""
    out = np.empty_like(h)
    out[..., 1:-1] = (h[..., 2:] - 2.0 * h[..., 1:-1] + h[..., :-2]) / dx**2
    out[..., 0] = (2.0 * h[..., 0] - 5.0 * h[..., 1] + 4.0 * h[..., 2] - h[..., 3]) / dx**2
    out[..., -1] = (2.0 * h[..., -1] - 5.0 * h[..., -2] + 4.0 * h[..., -3] - h[..., -4]) / dx**2
    return out


@dataclass(frozen=True)
class HeatCM:
    """Cameron-Martin space of the additive stochastic heat equation.

    ||h||^2 = int_box (d_t h - d_xx h)^2 dx dt. Representatives are field
    samples on the endpoint-inclusive product grid; the residual uses
    second-order differences (np.gradient in t, central second differences
    with one-sided second-order edges in x).
    """

    t0: float = 0.0
    t1: float = 0.5
    x0: float = -2.0
    x1: float = 2.0
    nt: int = 256
    nx: int = 256

    variant = "heat_cm"

    def __post_init__(self):
        if not (self.t1 > self.t0 and self.x1 > self.x0):
            raise StructuralError("empty space-time box")
        if self.nt < 4 or self.nx < 4:
            raise StructuralError("need at least 4 points per axis")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / (self.nt - 1)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    def grid(self) -> tuple:
        return (np.linspace(self.t0, self.t1, self.nt),
                np.linspace(self.x0, self.x1, self.nx))

    def vector_from_function(self, f) -> "HVector":
        if callable(f):
            ts, xs = self.grid()
            vals = f(ts[:, None], xs[None, :])
        else:
            vals = f
        vals = np.asarray(vals, dtype=float)
        if vals.shape != (self.nt, self.nx):
            raise StructuralError("field samples do not match the box grid")
        return HVector(model=self, data=vals)

    def function_values(self, vec: "HVector") -> np.ndarray:
        return vec.data

    def residual(self, vec: "HVector") -> np.ndarray:
        h = vec.data
        ht = np.gradient(h, self.dt, axis=0, edge_order=2)
        return ht - _second_x_derivative(h, self.dx)

    def inner(self, u: "HVector", v: "HVector") -> float:
        prod = self.residual(u) * self.residual(v)
        return float(np.trapezoid(np.trapezoid(prod, dx=self.dx, axis=1), dx=self.dt))

    def params(self) -> dict:
        return {"t0": self.t0, "t1": self.t1, "x0": self.x0, "x1": self.x1,
                "nt": self.nt, "nx": self.nx}


@dataclass
class HVector:
    """Element of a Cameron-Martin model: the model plus its representative.

    The meaning of ``data`` is fixed by the model variant (derivative
    samples for ``H01Interval``, function samples otherwise).
    """

    model: object
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)

    def copy(self) -> "HVector":
        return HVector(model=self.model, data=self.data.copy())


def _check_same_model(u: HVector, v: HVector) -> None:
    if u.model != v.model:
        raise StructuralError("vectors belong to different models")


def cm_inner(u: HVector, v: HVector) -> float:
    """<u, v>_H for two representatives of the same model."""
    _check_same_model(u, v)
    return u.model.inner(u, v)


def cm_norm(u: HVector) -> float:
    val = cm_inner(u, u)
    # guard tiny negative rounding from the spectral form
    return math.sqrt(max(val, 0.0))


def orthonormal_basis(model, count: int) -> list:
    """First ``count`` vectors of a closed-form orthonormal family.

    H01Interval: e_n(t) = sqrt(2L) sin((n-1/2) pi (t-a)/L) / ((n-1/2) pi),
    derivative sqrt(2/L) cos((n-1/2) pi (t-a)/L); the sup norm of e_n is
    sqrt(2L)/((n-1/2) pi). FbmFourier: normalized window harmonics (exactly
    diagonal in the discrete spectral form). L2Box (1d): normalized sines.
    """
    if count < 1:
        raise StructuralError("count must be positive")
    res = getattr(model, "resolution", None)
    if res is None and isinstance(model, L2Box):
        res = model.resolution[0]
    if res is not None and count > res / 2:
        raise StructuralError(
            f"count {count} exceeds the Nyquist guard resolution/2 = {res / 2:g}")

    if isinstance(model, H01Interval):
        length = model.b - model.a
        s = (model.grid() - model.a) / length
        out = []
        for n in range(1, count + 1):
            freq = (n - 0.5) * math.pi
            deriv = math.sqrt(2.0 / length) * np.cos(freq * s)
            out.append(HVector(model=model, data=deriv))
        return out

    if isinstance(model, FbmFourier):
        out = []
        t = model.grid()
        period = model.b - model.a
        m = 1
        while len(out) < count:
            xi = 2.0 * math.pi * m / period
            for wave in (np.cos(xi * t), np.sin(xi * t)):
                vec = model.vector_from_function(wave)
                nrm = cm_norm(vec)
                vec.data /= nrm
                out.append(vec)
                if len(out) == count:
                    break
            m += 1
        return out

    if isinstance(model, L2Box):
        if len(model.resolution) != 1:
            raise StructuralError("closed-form basis only wired for 1d boxes")
        (lo, hi), = model.bounds
        length = hi - lo
        s = (model.grid()[0] - lo) / length
        return [HVector(model=model,
                        data=math.sqrt(2.0 / length) * np.sin(n * math.pi * s))
                for n in range(1, count + 1)]

    raise StructuralError(f"no closed-form orthonormal family for {type(model).__name__}")


def ball_net(model, span_dim: int, per_axis: int) -> list:
    """Lattice net of the unit ball within the span of the first basis vectors.

    Coefficient lattice: per_axis equispaced points per axis on [-1, 1],
    keeping points with sum c_i^2 <= 1. span_dim=2, per_axis=3 gives the
    5-point cross.
    """
    if span_dim < 1 or per_axis < 2:
        raise StructuralError("need span_dim >= 1 and per_axis >= 2")
    basis = orthonormal_basis(model, span_dim)
    axis = np.linspace(-1.0, 1.0, per_axis)
    mesh = np.meshgrid(*([axis] * span_dim), indexing="ij")
    coeffs = np.stack([m.ravel() for m in mesh], axis=1)
    keep = np.sum(coeffs**2, axis=1) <= 1.0 + 1e-12
    out = []
    for c in coeffs[keep]:
        data = sum(ci * e.data for ci, e in zip(c, basis))
        out.append(HVector(model=model, data=np.asarray(data)))
    return out


@dataclass
class ConjugateNormReport:
    """Net maximum of the dual pairing plus its Cauchy-Schwarz certificate."""

    value: float
    argmax_index: int
    upper_bound: float
    net_size: int


def conjugate_norm(x_norm_evaluator, f: np.ndarray, net, dx: float = None,
                   tol: float = 1e-9) -> ConjugateNormReport:
    """sup {(f, phi)_{L2}: phi in net, ||phi||_X <= 1}, a lower bound.

    ``x_norm_evaluator`` measures the ambient norm of each net element;
    elements with norm > 1 + tol are rejected as a structural error since
    the net must sample the unit ball. The certificate is the Cauchy-Schwarz
    bound ||f||_{L2} max_phi ||phi||_{L2} which dominates every achievable
    pairing over the net.
    """
    f = np.asarray(f, dtype=float)
    if dx is None:
        raise StructuralError("dx (grid step of the pairing quadrature) is required")
    if not net:
        raise StructuralError("empty net")
    best = -math.inf
    best_idx = -1
    l2_phi_max = 0.0
    for idx, phi in enumerate(net):
        phi = np.asarray(phi, dtype=float)
        if phi.shape != f.shape:
            raise StructuralError("net element shape does not match f")
        if x_norm_evaluator(phi) > 1.0 + tol:
            raise StructuralError(f"net element {idx} lies outside the unit ball")
        val = float(np.trapezoid(f * phi, dx=dx))
        l2_phi_max = max(l2_phi_max, math.sqrt(float(np.trapezoid(phi * phi, dx=dx))))
        if val > best:
            best, best_idx = val, idx
    f_l2 = math.sqrt(float(np.trapezoid(f * f, dx=dx)))
    return ConjugateNormReport(value=best, argmax_index=best_idx,
                               upper_bound=f_l2 * l2_phi_max, net_size=len(net))


def q_sqrt_inv_norm(Q: np.ndarray, phi: np.ndarray, weight: float = 1.0) -> float:
    """Covariance norm ||Q^{-1/2} phi|| = sqrt(weight * phi^T Q^{-1} phi).

    Q must be symmetric (asymmetry tolerance 1e-10 ||Q||) and positive
    definite: eigenvalues below 1e-12 * trace(Q)/n raise a precondition
    error. ``weight`` is the quadrature weight of the discretized pairing
    (1 for plain coordinate vectors, the grid step for L2 discretizations).
    """
    Q = np.asarray(Q, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or phi.shape != (Q.shape[0],):
        raise StructuralError("Q must be square and phi must match its size")
    scale = np.linalg.norm(Q)
    if np.linalg.norm(Q - Q.T) > 1e-10 * max(scale, 1e-300):
        raise PreconditionError("covariance matrix is not symmetric at tolerance 1e-10")
    from scipy.linalg import eigh
    lam, vecs = eigh(Q)
    n = Q.shape[0]
    floor = 1e-12 * float(np.trace(Q)) / n
    if lam.min() <= floor:
        raise PreconditionError(
            f"covariance not positive definite: min eigenvalue {lam.min():.3e} "
            f"<= threshold {floor:.3e}")
    y = vecs.T @ phi
    return math.sqrt(weight * float(np.sum(y * y / lam)))


# ---------------------------------------------------------------------------
# serialization

_MODEL_CLASSES = {}
for _cls in (H01Interval, FbmFourier, L2Box, HeatCM):
    _MODEL_CLASSES[_cls.variant] = _cls


def _model_from_meta(meta: dict):
    cls = _MODEL_CLASSES.get(meta.get("variant"))
    if cls is None:
        raise StructuralError(f"unknown model variant {meta.get('variant')!r}")
    params = dict(meta.get("params", {}))
    if cls is L2Box:
        params["bounds"] = tuple(tuple(side) for side in params["bounds"])
        params["resolution"] = tuple(params["resolution"])
    return cls(**params)


def hvector_to_json(vec: HVector) -> str:
    payload = {"variant": vec.model.variant, "params": vec.model.params(),
               "shape": list(vec.data.shape), "data": vec.data.ravel().tolist()}
    return json.dumps(payload)


def hvector_from_json(text: str) -> HVector:
    payload = json.loads(text)
    model = _model_from_meta(payload)
    data = np.asarray(payload["data"], dtype=float).reshape(payload["shape"])
    return HVector(model=model, data=data)


def hvector_to_csv(vec: HVector) -> str:
    """CSV with a metadata header; '.' decimal, LF line endings."""
    meta = json.dumps({"variant": vec.model.variant, "params": vec.model.params(),
                       "shape": list(vec.data.shape)})
    lines = [f"# strassenlab-hvector {meta}", "value"]
    lines.extend(repr(float(x)) for x in vec.data.ravel())
    return "\n".join(lines) + "\n"


def hvector_from_csv(text: str) -> HVector:
    lines = text.strip().split("\n")
    if not lines or not lines[0].startswith("# strassenlab-hvector "):
        raise StructuralError("missing hvector metadata header")
    meta = json.loads(lines[0][len("# strassenlab-hvector "):])
    if len(lines) < 2 or lines[1] != "value":
        raise StructuralError("missing csv column header")
    data = np.asarray([float(x) for x in lines[2:]]).reshape(meta["shape"])
    return HVector(model=_model_from_meta(meta), data=data)
