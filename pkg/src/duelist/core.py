"""Shared domain types: skillsets, duelists, search domains and random streams.

A skillset is a 1-D ``numpy.uint8`` array of zeros and ones. Each decision
variable owns a contiguous big-endian slice of ``bits_per_var`` bits which
decodes linearly onto ``[lower, upper]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Category",
    "ConfigError",
    "ContractViolation",
    "Duelist",
    "EvaluationError",
    "Evaluator",
    "Objective",
    "RandomStream",
    "SearchDomain",
    "decode",
    "decode_many",
    "encode",
    "evaluate",
    "random_skillset",
    "validate_skillset",
]

Objective = Callable[[NDArray[np.float64]], float]

DEFAULT_BITS_PER_VAR = 16


class ContractViolation(ValueError):
    """An operation was called with arguments breaking its precondition."""


class ConfigError(ValueError):
    """Invalid configuration. ``key`` names the offending setting when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class EvaluationError(RuntimeError):
    """The objective returned a non-finite value."""

    def __init__(self, message: str, point=None, index: int | None = None,
                 generation: int | None = None):
        super().__init__(message)
        self.point = point
        self.index = index
        self.generation = generation


def check_positive_int(value, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}", key=name)


def check_probability(value, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be a number in [0, 1], got {value!r}", key=name)


def check_real(value, name: str, minimum: float | None = None) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}", key=name)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value!r}", key=name)


def check_seed(value, name: str = "seed") -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or not 0 <= value < 2**64:
        raise ConfigError(f"{name} must be an unsigned 64-bit integer, got {value!r}", key=name)


class Category(enum.Enum):
    UNRANKED = "unranked"
    CHAMPION = "champion"
    WINNER = "winner"
    LOSER = "loser"


@dataclass(frozen=True)
class SearchDomain:
    """Box-bounded search space with a fixed-point binary codec.

    Parameters
    ----------
    lower, upper : sequence of float
        Per-variable bounds, ``lower[i] < upper[i]``.
    bits_per_var : int, default 16
        Bits allotted to each variable in a skillset.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    bits_per_var: int = DEFAULT_BITS_PER_VAR
    # derived, filled in __post_init__
    _weights: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _levels: float = field(init=False, repr=False, compare=False)
    _lo: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _hi: NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _scale: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) == 0 or len(lower) != len(upper):
            raise ConfigError(
                f"lower and upper must be non-empty and of equal length, got {len(lower)} and {len(upper)}",
                key="bounds",
            )
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"bounds[{i}]: need finite lower < upper, got [{lo}, {hi}]", key="bounds")
        if not isinstance(self.bits_per_var, (int, np.integer)) or self.bits_per_var < 1:
            raise ConfigError(f"bits_per_var must be a positive integer, got {self.bits_per_var!r}",
                              key="bits_per_var")
        if self.bits_per_var > 52:
            # keeps the integer value of a slice exactly representable in a float64
            raise ConfigError(f"bits_per_var must be <= 52, got {self.bits_per_var}", key="bits_per_var")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "bits_per_var", int(self.bits_per_var))
        levels = 2.0 ** self.bits_per_var - 1.0
        lo, hi = np.array(lower), np.array(upper)
        object.__setattr__(self, "_weights", 2.0 ** np.arange(self.bits_per_var - 1, -1, -1))
        object.__setattr__(self, "_levels", levels)
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)
        object.__setattr__(self, "_scale", (hi - lo) / levels)

    @classmethod
    def uniform(cls, n_vars: int, lower: float, upper: float,
                bits_per_var: int = DEFAULT_BITS_PER_VAR) -> SearchDomain:
        return cls((lower,) * n_vars, (upper,) * n_vars, bits_per_var)

    @property
    def n_vars(self) -> int:
        return len(self.lower)

    @property
    def n_bits(self) -> int:
        return self.n_vars * self.bits_per_var

    @property
    def lower_array(self) -> NDArray[np.float64]:
        return self._lo.copy()

    @property
    def upper_array(self) -> NDArray[np.float64]:
        return self._hi.copy()

    @property
    def width(self) -> NDArray[np.float64]:
        return self._hi - self._lo

    def clip(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.clip(x, self._lo, self._hi)


class RandomStream:
    """Seeded random stream: PCG64 through ``numpy.random.Generator``.

    The generator is seeded with ``SeedSequence(seed, spawn_key=(stream,))``,
    so ``(seed, stream)`` pins the whole draw sequence on every platform
    numpy supports. Different ``stream`` ids give independent sequences for
    the same seed. Instances are single-owner; do not share across threads.
    """

    def __init__(self, seed: int, stream: int = 0):
        check_seed(seed)
        self.seed = int(seed)
        self.stream = int(stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream={self.stream})"

    def next_unit(self) -> float:
        """One draw from U[0, 1)."""
        return float(self.generator.random())

    def units(self, n: int) -> NDArray[np.float64]:
        return self.generator.random(n)

    def bits(self, n: int) -> NDArray[np.uint8]:
        return self.generator.integers(0, 2, size=n, dtype=np.uint8)

    def integer(self, high: int) -> int:
        """Uniform integer in ``[0, high)``."""
        return int(self.generator.integers(high))

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in ``[low, high)``."""
        return self.generator.integers(low, high, size=size)

    def permutation(self, n: int) -> NDArray[np.int64]:
        return self.generator.permutation(n)

    def uniform(self, low, high, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def coin(self) -> bool:
        return bool(self.generator.random() < 0.5)


@dataclass(eq=False)
class Duelist:
    """One candidate solution (compared by identity).

    ``fitness`` is ``None`` until evaluated and is reset whenever the
    skillset changes. ``luck`` only holds the bonus drawn in the last duel.
    """

    skillset: NDArray[np.uint8]
    fitness: float | None = None
    luck: float = 0.0
    category: Category = Category.UNRANKED

    def copy(self, **changes) -> Duelist:
        new = Duelist(self.skillset.copy(), self.fitness, self.luck, self.category)
        for name, value in changes.items():
            setattr(new, name, value)
        return new

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


def validate_skillset(skillset: NDArray, domain: SearchDomain) -> None:
    if skillset.ndim != 1 or skillset.shape[0] != domain.n_bits:
        raise ContractViolation(
            f"skillset length mismatch: expected {domain.n_bits} "
            f"({domain.bits_per_var} bits x {domain.n_vars} vars), got {skillset.size}"
        )


def decode(skillset: NDArray, domain: SearchDomain) -> NDArray[np.float64]:
    """Map a skillset onto a point of the closed box.

    Variable ``i`` reads slice ``i`` as a big-endian unsigned integer ``k``
    and becomes ``lower[i] + k / (2**bits - 1) * (upper[i] - lower[i])``.
    Both corners are hit exactly.
    """
    if skillset.shape != (domain.n_bits,):
        validate_skillset(skillset, domain)
    ints = skillset.reshape(-1, domain.bits_per_var) @ domain._weights
    x = domain._lo + ints * domain._scale
    # affine rounding can land one ulp off the top corner
    top = ints == domain._levels
    if top.any():
        x[top] = domain._hi[top]
    return x


def decode_many(skillsets: NDArray, domain: SearchDomain) -> NDArray[np.float64]:
    """Row-wise :func:`decode` of an ``(N, n_bits)`` array; returns ``(N, n_vars)``."""
    skillsets = np.asarray(skillsets)
    if skillsets.ndim != 2 or skillsets.shape[1] != domain.n_bits:
        raise ContractViolation(
            f"skillset length mismatch: expected rows of {domain.n_bits} bits, got shape {skillsets.shape}")
    ints = skillsets.reshape(len(skillsets), domain.n_vars, domain.bits_per_var) @ domain._weights
    x = domain._lo + ints * domain._scale
    top = ints == domain._levels
    if top.any():
        x[top] = np.broadcast_to(domain._hi, x.shape)[top]
    return x


def encode(x: Sequence[float], domain: SearchDomain) -> NDArray[np.uint8]:
    """Nearest skillset to ``x`` (values outside the box are clipped)."""
    x = domain.clip(np.asarray(x, dtype=np.float64))
    levels = 2**domain.bits_per_var - 1
    ints = np.rint((x - domain.lower_array) / domain.width * levels).astype(np.int64)
    shifts = np.arange(domain.bits_per_var - 1, -1, -1)
    return ((ints[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def random_skillset(domain: SearchDomain, rng: RandomStream) -> NDArray[np.uint8]:
    return rng.bits(domain.n_bits)


class Evaluator:
    """Objective wrapper that decodes skillsets and counts evaluations.

    Objectives carrying a true ``vectorized`` attribute are called once per
    batch with an ``(n_vars, N)`` array and must return ``N`` values equal
    to the per-point results.
    """

    def __init__(self, objective: Objective, domain: SearchDomain):
        self.objective = objective
        self.domain = domain
        self.count = 0
        self.vectorized = bool(getattr(objective, "vectorized", False))

    def value(self, point: NDArray[np.float64]) -> float:
        """Evaluate a real point directly (continuous baselines)."""
        self.count += 1
        value = float(self.objective(point))
        if not math.isfinite(value):
            raise EvaluationError(f"objective returned {value} at {list(point)}", point=point)
        return value

    def values(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Evaluate each row of an ``(N, n_vars)`` array."""
        if self.vectorized:
            out = np.asarray(self.objective(points.T), dtype=np.float64)
        else:
            out = np.array([float(self.objective(p)) for p in points])
        self.count += len(points)
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.argmax(bad))
            raise EvaluationError(f"objective returned {out[i]} at {list(points[i])}",
                                  point=points[i], index=i)
        return out

    def __call__(self, duelist: Duelist) -> Duelist:
        point = decode(duelist.skillset, self.domain)
        return Duelist(duelist.skillset, self.value(point), duelist.luck, duelist.category)

    def evaluate_many(self, duelists: Sequence[Duelist]) -> list[Duelist]:
        if not duelists:
            return []
        points = decode_many(np.stack([d.skillset for d in duelists]), self.domain)
        fitness = self.values(points)
        return [Duelist(d.skillset, float(f), d.luck, d.category) for d, f in zip(duelists, fitness)]


def evaluate(duelist: Duelist, objective: Objective, domain: SearchDomain,
             evaluator: Evaluator | None = None) -> Duelist:
    """Return a copy of ``duelist`` with its fitness set to ``objective(decode(...))``.

    Pass an ``evaluator`` to have the call counted against it.
    """
    if evaluator is None:
        evaluator = Evaluator(objective, domain)
    return evaluator(duelist)
