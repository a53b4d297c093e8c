"""Benchmark objectives (all maximized) and an exhaustive grid oracle.

``m1`` and ``m2`` accept scalars or broadcastable arrays. Registered
benchmarks are looked up by string id through :func:`get_benchmark`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import ConfigError, ContractViolation, Objective, SearchDomain

__all__ = [
    "BENCHMARK_IDS",
    "Benchmark",
    "ShiftedSphereSpec",
    "get_benchmark",
    "grid_oracle",
    "m1",
    "m2",
    "shifted_sphere",
]


def m1(x, y):
    return -(x * np.sin(4.0 * x) + 1.1 * y * np.sin(2.0 * y))


def m2(x, y):
    # Printed leading minus kept: it is the sign whose max over [0, 10]^2 is ~30.35.
    return -(np.sqrt(x * x + y * y) * np.cos(x - y) * np.exp(np.cos(x * (y + 5.0) / 7.0)))


@dataclass(frozen=True)
class ShiftedSphereSpec:
    dimension: int = 2
    shift: tuple[float, ...] | None = None
    f_bias: float = 450.0

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dimension!r}", key="dimension")
        shift = (0.0,) * self.dimension if self.shift is None else tuple(float(v) for v in self.shift)
        if len(shift) != self.dimension:
            raise ConfigError(f"shift must have length {self.dimension}, got {len(shift)}", key="shift")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "f_bias", float(self.f_bias))


def shifted_sphere(x, spec: ShiftedSphereSpec = ShiftedSphereSpec()):
    """``f_bias - sum((x - shift)**2)``; equals ``f_bias`` only at the shift point.

    ``x`` may also be an array of shape ``(D, ...)`` to evaluate many points.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[:1] != (spec.dimension,):
        raise ContractViolation(f"shifted_sphere expects {spec.dimension} coordinates, got shape {x.shape}")
    d = x - np.reshape(spec.shift, (-1,) + (1,) * (x.ndim - 1))
    return spec.f_bias - np.sum(d * d, axis=0)


@dataclass(frozen=True)
class Benchmark:
    """A named objective with its default search box."""

    id: str
    objective: Objective
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    known_max: float | None = None
    params: dict = field(default_factory=dict, compare=False)

    def domain(self, bits_per_var: int = 16, lower=None, upper=None) -> SearchDomain:
        return SearchDomain(self.lower if lower is None else tuple(lower),
                            self.upper if upper is None else tuple(upper),
                            bits_per_var)


def _pairwise(fn: Callable) -> Objective:
    def objective(x):
        return fn(x[0], x[1])

    objective.__name__ = fn.__name__
    objective.vectorized = True
    return objective


def _m1_benchmark(**params) -> Benchmark:
    if params:
        raise ConfigError(f"m1 takes no parameters, got {sorted(params)}", key="benchmark")
    return Benchmark("m1", _pairwise(m1), (0.0, 0.0), (10.0, 10.0), known_max=18.5547)


def _m2_benchmark(**params) -> Benchmark:
    if params:
        raise ConfigError(f"m2 takes no parameters, got {sorted(params)}", key="benchmark")
    return Benchmark("m2", _pairwise(m2), (0.0, 0.0), (10.0, 10.0), known_max=30.3489)


def _sphere_benchmark(dimension=2, shift=None, f_bias=450.0, lower=-100.0, upper=100.0) -> Benchmark:
    spec = ShiftedSphereSpec(dimension, None if shift is None else tuple(shift), f_bias)

    def objective(x):
        return shifted_sphere(x, spec)

    objective.__name__ = "shifted_sphere"
    objective.vectorized = True
    params = {"dimension": spec.dimension, "shift": list(spec.shift), "f_bias": spec.f_bias,
              "lower": lower, "upper": upper}
    return Benchmark("shifted_sphere", objective, (float(lower),) * dimension,
                     (float(upper),) * dimension, known_max=spec.f_bias, params=params)


_FACTORIES = {
    "m1": _m1_benchmark,
    "m2": _m2_benchmark,
    "shifted_sphere": _sphere_benchmark,
}
BENCHMARK_IDS = tuple(_FACTORIES)


def get_benchmark(benchmark_id: str, **params) -> Benchmark:
    try:
        factory = _FACTORIES[benchmark_id]
    except KeyError:
        raise ConfigError(f"unknown benchmark id {benchmark_id!r}; expected one of {BENCHMARK_IDS}",
                          key="benchmark") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for benchmark {benchmark_id!r}: {exc}", key="benchmark_params") from None


MAX_ORACLE_DIMS = 3
REFINE_STEPS = 1000


def _evaluate_grid(objective, points: np.ndarray) -> np.ndarray:
    """Evaluate ``points`` of shape (n_vars, N), vectorized when the objective allows it."""
    try:
        values = np.asarray(objective(points), dtype=np.float64)
    except Exception:
        values = None
    if values is None or values.shape != (points.shape[1],):
        values = np.array([float(objective(points[:, j])) for j in range(points.shape[1])])
    return values


def grid_oracle(objective: Objective, domain: SearchDomain, resolution: int = 2001,
                refine: bool = True) -> tuple[float, np.ndarray]:
    """Exhaustive maximum over a uniform ``resolution**n_vars`` grid.

    The grid includes both box corners. With ``refine`` the best grid point
    is then polished by ``REFINE_STEPS`` coordinate-wise bisection steps
    inside its grid cell; refinement only ever accepts improvements.

    Ties on the grid go to the lexicographically smallest point.

    Returns
    -------
    best_value : float
    best_point : ndarray of shape (n_vars,)
    """
    if resolution < 2:
        raise ContractViolation(f"resolution must be >= 2, got {resolution}")
    n = domain.n_vars
    if n > MAX_ORACLE_DIMS:
        raise ContractViolation(f"grid_oracle is limited to {MAX_ORACLE_DIMS} variables, got {n}")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(domain.lower, domain.upper)]

    best_value = -np.inf
    best_point = None
    # chunk along the first axis to bound memory; C order keeps lexicographic tie-breaking
    rest = [g.ravel() for g in np.meshgrid(*axes[1:], indexing="ij")] if n > 1 else []
    pts = np.empty((n, resolution ** (n - 1)))
    for k, grid in enumerate(rest, start=1):
        pts[k] = grid
    for x0 in axes[0]:
        pts[0] = x0
        values = _evaluate_grid(objective, pts)
        j = int(np.argmax(values))
        if values[j] > best_value:
            best_value = float(values[j])
            best_point = pts[:, j].copy()
    if not np.isfinite(best_value):
        raise ContractViolation("objective produced no finite value on the grid")

    if refine:
        best_value, best_point = _bisect_refine(objective, domain, best_value, best_point,
                                                domain.width / (resolution - 1))
    return best_value, best_point


def _bisect_refine(objective, domain, value, point, half_width):
    lo = domain.clip(point - half_width)
    hi = domain.clip(point + half_width)
    x = point.copy()
    for step in range(REFINE_STEPS):
        i = step % x.size
        candidates = ((lo[i] + x[i]) / 2.0, (x[i] + hi[i]) / 2.0)
        for c in candidates:
            trial = x.copy()
            trial[i] = c
            v = float(objective(trial))
            if v > value:
                value, x = v, trial
        # halve the bracket around the (possibly moved) centre
        span = (hi[i] - lo[i]) / 4.0
        lo[i] = max(domain.lower[i], x[i] - span)
        hi[i] = min(domain.upper[i], x[i] + span)
    return value, x

