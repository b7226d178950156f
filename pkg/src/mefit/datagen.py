"""Synthetic two-factor designs with a known cell-mean matrix.

Noise comes from a counter-based generator so a (seed, row) pair always maps
to the same deviate:

* uniform bits: SplitMix64 finalizer applied to ``key + (i + 1) * GAMMA``,
  where ``key`` is the finalizer applied to the seed and ``i`` the counter;
* a uniform in (0, 1): the top 53 bits, offset by half a step;
* standard normals: Box-Muller on consecutive uniform pairs, the cosine
  branch for even rows and the sine branch for odd rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, FactorColumn, NumericColumn

__all__ = ["FactorialSpec", "generate", "uniforms", "standard_normals", "DEMO_BETA"]

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# 2 x 3 cell means, rows x1..x2, columns y1..y3; both row means are 3
DEMO_BETA = ((1.0, 5.0, 3.0), (4.0, 2.0, 3.0))


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """``count`` uniforms in (0, 1) from positions ``offset...`` of stream ``seed``."""
    with np.errstate(over="ignore"):
        key = _mix(np.array([seed % 2**64], dtype=np.uint64))[0]
        counter = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
        bits = _mix(key + counter * GAMMA)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def standard_normals(seed: int, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log(u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).reshape(-1)
    return z[:count]


@dataclass(frozen=True)
class FactorialSpec:
    """Fully crossed X-by-Y design with ``repetitions`` rows per cell.

    ``beta[i][j]`` is the true mean of cell (x{i+1}, y{j+1}).
    """

    beta: tuple
    repetitions: int = 5
    noise_sd: float = 0.1
    seed: int = 1

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float)
        if beta.ndim != 2 or min(beta.shape) < 1:
            raise ValueError(f"beta must be a non-empty matrix, got shape {beta.shape}")
        if not np.all(np.isfinite(beta)):
            raise ValueError("beta must be finite")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.noise_sd >= 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        object.__setattr__(self, "beta", tuple(map(tuple, beta.tolist())))

    @classmethod
    def from_column_major(cls, values, x_levels: int, y_levels: int, **kwargs):
        """Build from a flat list filled column by column (x varies fastest)."""
        values = list(values)
        if len(values) != x_levels * y_levels:
            raise ValueError(f"need {x_levels * y_levels} beta values, got {len(values)}")
        beta = np.array(values, dtype=float).reshape(y_levels, x_levels).T
        return cls(beta, **kwargs)

    @property
    def x_levels(self) -> int:
        return len(self.beta)

    @property
    def y_levels(self) -> int:
        return len(self.beta[0])

    @property
    def n_rows(self) -> int:
        return self.x_levels * self.y_levels * self.repetitions


def generate(spec: FactorialSpec, response: str = "Response") -> Dataset:
    """Rows in odometer order, X fastest, then Y, then repetition."""
    m, n, r = spec.x_levels, spec.y_levels, spec.repetitions
    x_codes = np.tile(np.arange(m), n * r)
    y_codes = np.tile(np.repeat(np.arange(n), m), r)
    mean = np.array(spec.beta)[x_codes, y_codes]
    if spec.noise_sd > 0:
        values = mean + spec.noise_sd * standard_normals(spec.seed, spec.n_rows)
    else:
        values = mean
    return Dataset({
        "X": FactorColumn(tuple(f"x{i + 1}" for i in range(m)), x_codes),
        "Y": FactorColumn(tuple(f"y{j + 1}" for j in range(n)), y_codes),
        response: NumericColumn(values),
    })
