"""Seeded Gaussian samplers on uniform grids.

Everything here is deterministic given a ``SeedSpec``: the generator is a
PCG64 stream keyed by (master_seed, replica_index, label) through
numpy's SeedSequence spawn mechanism, so replicas and differently labeled
draws are independent streams and identical specs reproduce bit-identical
arrays.

Samplers:

- ``sample_bm``: Brownian motion, independent N(0, dt) increments, pinned
  to 0 at the grid start. Two-sided paths glue two independent one-sided
  samples at the origin, which must be a grid node.
- ``sample_fbm``: fractional Brownian motion via Davies-Harte circulant
  embedding of the increment covariance
  rho(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2, with a dense
  Cholesky fallback when the embedding produces negative eigenvalues
  (capped at 4096 steps; larger requests in that regime are refused).
- ``sample_white_noise``: space-time white noise as cell averages,
  iid N(0, 1/(dt dx)) per grid cell, so that pairings sum(xi * phi) dt dx
  have variance ||phi||_{L2}^2 in the cell-midpoint quadrature.
- ``mollify_path``: convolution with a compactly supported even kernel of
  radius eps, renormalized to unit mass on the grid, values held constant
  on the boundary bands [t0, t0+eps] and [t1-eps, t1].
- ``karhunen_sample``: truncated Karhunen-Loeve sum of a Cameron-Martin
  orthonormal family with iid standard normal coefficients.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

from .cm_space import H01Interval, orthonormal_basis
from .errors import (CapabilityError, DomainError, InputError,
                     ResolutionError, StructuralError)

__all__ = [
    "TimeGrid",
    "SpaceTimeGrid",
    "Path",
    "Field",
    "SeedSpec",
    "rng_from_seed",
    "sample_bm",
    "sample_fbm",
    "sample_white_noise",
    "mollify_path",
    "karhunen_sample",
    "pair_field",
]


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    n: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise StructuralError("empty time grid")
        if self.n < 2:
            raise StructuralError("time grid needs at least 2 points")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / (self.n - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n)

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Index of a node equal to t; InputError if t is not a node."""
        idx = int(round((t - self.t0) / self.dt))
        if idx < 0 or idx >= self.n or abs(self.t0 + idx * self.dt - t) > tol * max(1.0, abs(t)):
            raise InputError(f"{t} is not a node of the grid")
        return idx


@dataclass(frozen=True)
class SpaceTimeGrid:
    t0: float
    t1: float
    nt: int
    x0: float
    x1: float
    nx: int

    def __post_init__(self):
        if not (self.t1 > self.t0 and self.x1 > self.x0):
            raise StructuralError("empty space-time grid")
        if self.nt < 2 or self.nx < 2:
            raise StructuralError("space-time grid needs at least 2 points per axis")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / (self.nt - 1)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)

    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)


@dataclass
class Path:
    """Vector-valued path: values has shape (components, grid.n)."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[1] != self.grid.n:
            raise StructuralError("path values do not match the grid")

    @property
    def components(self) -> int:
        return self.values.shape[0]

    def component(self, i: int) -> np.ndarray:
        return self.values[i]

    def copy(self) -> "Path":
        return Path(grid=self.grid, values=self.values.copy())


@dataclass
class Field:
    """Scalar space-time field. kind='nodes' lives on the product grid
    (shape (nt, nx)); kind='cells' on grid cells (shape (nt-1, nx-1)),
    which is how white noise is stored."""

    stgrid: SpaceTimeGrid
    values: np.ndarray = field(repr=False)
    kind: str = "nodes"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        want = ((self.stgrid.nt, self.stgrid.nx) if self.kind == "nodes"
                else (self.stgrid.nt - 1, self.stgrid.nx - 1))
        if self.kind not in ("nodes", "cells"):
            raise StructuralError(f"unknown field kind {self.kind!r}")
        if self.values.shape != want:
            raise StructuralError(
                f"field values shape {self.values.shape} does not match {want} for kind={self.kind!r}")

    def copy(self) -> "Field":
        return Field(stgrid=self.stgrid, values=self.values.copy(), kind=self.kind)


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic stream key: (master_seed, replica_index, label).

    ``replica`` sets the index, it does not compose: consumers that fan out
    internally (headline replicas, tail banks, MC blocks) call
    ``seed.replica(j)`` themselves and would erase an index set by the
    caller. Vary ensemble members by child label and leave the replica
    axis to the leaf consumer.
    """

    master_seed: int
    replica_index: int = 0
    label: str = ""

    def seed_sequence(self) -> np.random.SeedSequence:
        label_key = int.from_bytes(
            hashlib.sha256(self.label.encode("utf-8")).digest()[:8], "little")
        return np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.replica_index, label_key))

    def child(self, label: str) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.replica_index,
                        f"{self.label}/{label}" if self.label else label)

    def replica(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index, self.label)


def _as_seedspec(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    if isinstance(seed, (int, np.integer)):
        return SeedSpec(master_seed=int(seed))
    raise InputError(f"seed must be SeedSpec or int, got {type(seed).__name__}")


class _BiasedGenerator:
    """Fault-injection wrapper: shifts every Gaussian draw by a constant.

    Only built when STRASSENLAB_RNG_BIAS is set. The verification suite
    uses it to confirm its statistical verdicts have power: a biased
    stream must trip at least one of them.
    """

    def __init__(self, gen: np.random.Generator, bias: float):
        self._gen = gen
        self._bias = bias

    def standard_normal(self, *args, **kwargs):
        return self._gen.standard_normal(*args, **kwargs) + self._bias

    def normal(self, *args, **kwargs):
        return self._gen.normal(*args, **kwargs) + self._bias

    def __getattr__(self, name):
        return getattr(self._gen, name)


def rng_from_seed(seed) -> np.random.Generator:
    gen = np.random.Generator(np.random.PCG64(_as_seedspec(seed).seed_sequence()))
    bias = os.environ.get("STRASSENLAB_RNG_BIAS")
    if bias:
        return _BiasedGenerator(gen, float(bias))
    return gen


def sample_bm(grid: TimeGrid, components: int = 1, seed=0,
              two_sided: bool = False) -> Path:
    """Brownian path(s) on the grid, pinned to 0 at t0 (or at 0 if two-sided)."""
    if components < 1:
        raise InputError("components must be positive")
    gen = rng_from_seed(seed)
    if not two_sided:
        incs = gen.normal(0.0, np.sqrt(grid.dt), size=(components, grid.n - 1))
        vals = np.zeros((components, grid.n))
        np.cumsum(incs, axis=1, out=vals[:, 1:])
        return Path(grid=grid, values=vals)
    # two-sided: the origin must be a node; two independent wings glued at 0
    idx0 = grid.index_of(0.0)
    if idx0 == 0 or idx0 == grid.n - 1:
        raise InputError("two-sided sampling needs 0 strictly inside the grid")
    vals = np.zeros((components, grid.n))
    right = gen.normal(0.0, np.sqrt(grid.dt), size=(components, grid.n - 1 - idx0))
    left = gen.normal(0.0, np.sqrt(grid.dt), size=(components, idx0))
    np.cumsum(right, axis=1, out=vals[:, idx0 + 1:])
    vals[:, :idx0] = np.cumsum(left, axis=1)[:, ::-1]
    return Path(grid=grid, values=vals)


def _fgn_circulant_eigenvalues(m: int, hurst: float) -> np.ndarray:
    k = np.arange(m + 1, dtype=float)
    rho = 0.5 * (np.abs(k + 1) ** (2 * hurst) + np.abs(k - 1) ** (2 * hurst)
                 - 2.0 * np.abs(k) ** (2 * hurst))
    row = np.concatenate([rho, rho[-2:0:-1]])  # length 2m
    return np.fft.fft(row).real


def sample_fbm(hurst: float, grid: TimeGrid, components: int = 1, seed=0) -> Path:
    """Fractional Brownian path(s) by circulant embedding of the increments.

    Falls back to a dense Cholesky factorization when the embedding is not
    nonnegative; the fallback refuses more than 4096 steps.
    """
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst}")
    if components < 1:
        raise InputError("components must be positive")
    gen = rng_from_seed(seed)
    m = grid.n - 1
    lam = _fgn_circulant_eigenvalues(m, hurst)
    scale = grid.dt ** hurst
    vals = np.zeros((components, grid.n))
    if lam.min() >= -1e-9 * lam.max():
        lam = np.clip(lam, 0.0, None)
        for c in range(components):
            w = np.zeros(2 * m, dtype=complex)
            w[0] = gen.normal()
            w[m] = gen.normal()
            re = gen.normal(size=m - 1)
            im = gen.normal(size=m - 1)
            w[1:m] = (re + 1j * im) / np.sqrt(2.0)
            w[m + 1:] = np.conj(w[1:m][::-1])
            fgn = np.fft.fft(np.sqrt(lam / (2.0 * m)) * w).real[:m]
            np.cumsum(scale * fgn, out=vals[c, 1:])
        return Path(grid=grid, values=vals)
    if m > 4096:
        raise CapabilityError(
            f"circulant embedding not nonnegative at hurst={hurst} and the "
            f"Cholesky fallback is capped at 4096 steps (requested {m})")
    k = np.arange(m, dtype=float)
    diff = np.abs(k[:, None] - k[None, :])
    cov = 0.5 * ((diff + 1) ** (2 * hurst) + np.abs(diff - 1) ** (2 * hurst)
                 - 2.0 * diff ** (2 * hurst))
    chol = np.linalg.cholesky(cov + 1e-12 * np.eye(m))
    for c in range(components):
        fgn = chol @ gen.normal(size=m)
        np.cumsum(scale * fgn, out=vals[c, 1:])
    return Path(grid=grid, values=vals)


def sample_white_noise(stgrid: SpaceTimeGrid, seed=0) -> Field:
    """Space-time white noise: iid N(0, 1/(dt dx)) cell averages."""
    gen = rng_from_seed(seed)
    sigma = 1.0 / np.sqrt(stgrid.dt * stgrid.dx)
    vals = gen.normal(0.0, sigma, size=(stgrid.nt - 1, stgrid.nx - 1))
    return Field(stgrid=stgrid, values=vals, kind="cells")


def pair_field(noise: Field, phi) -> float:
    """(xi, phi) by cell-midpoint quadrature; phi is a callable or cell array."""
    if noise.kind != "cells":
        raise StructuralError("pairing defined for cell fields")
    g = noise.stgrid
    if callable(phi):
        tm = g.times()[:-1] + 0.5 * g.dt
        xm = g.xs()[:-1] + 0.5 * g.dx
        phi_vals = phi(tm[:, None], xm[None, :])
    else:
        phi_vals = np.asarray(phi, dtype=float)
        if phi_vals.shape != noise.values.shape:
            raise StructuralError("phi cell array does not match the noise cells")
    return float(np.sum(noise.values * phi_vals) * g.dt * g.dx)


def _kernel_weights(eps: float, dt: float, kernel: str) -> np.ndarray:
    r = int(np.floor(eps / dt + 1e-12))
    u = np.arange(-r, r + 1) * dt / eps
    if kernel == "bump":
        w = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        w[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    elif kernel == "gaussian":
        # truncated at +-eps, sigma = eps/3
        w = np.exp(-0.5 * (3.0 * u) ** 2)
    else:
        raise InputError(f"unknown kernel {kernel!r}")
    total = w.sum()
    if total <= 0:
        raise ResolutionError("kernel support contains no grid point")
    return w / total


def mollify_path(p: Path, eps: float, kernel: str = "bump") -> Path:
    """Convolve with an even unit-mass kernel of radius eps.

    Requires eps > dt (otherwise the kernel cannot be resolved). The output
    is held constant on the two boundary bands of width eps, matching the
    constant-continuation convention for paths on a window.
    """
    dt = p.grid.dt
    if eps <= dt:
        raise ResolutionError(f"mollification radius {eps} must exceed the grid step {dt}")
    span = p.grid.t1 - p.grid.t0
    if 2.0 * eps >= span:
        raise ResolutionError("mollification radius swallows the whole window")
    w = _kernel_weights(eps, dt, kernel)
    r = (len(w) - 1) // 2
    out = np.empty_like(p.values)
    for c in range(p.values.shape[0]):
        smoothed = np.convolve(p.values[c], w[::-1], mode="same")
        smoothed[:r] = smoothed[r]
        smoothed[-r:] = smoothed[-r - 1]
        out[c] = smoothed
    return Path(grid=p.grid, values=out)


def karhunen_sample(model: H01Interval, basis_count: int, seed=0) -> Path:
    """Truncated Karhunen-Loeve sample sum Z_i e_i as a function-valued path."""
    if basis_count < 1:
        raise InputError("basis_count must be positive")
    basis = orthonormal_basis(model, basis_count)
    gen = rng_from_seed(seed)
    z = gen.normal(size=basis_count)
    deriv = np.zeros(model.resolution)
    for zi, e in zip(z, basis):
        deriv += zi * e.data
    from .cm_space import HVector
    vals = model.function_values(HVector(model=model, data=deriv))
    return Path(grid=TimeGrid(model.a, model.b, model.resolution), values=vals)
