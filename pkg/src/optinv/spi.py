"""Single-pixel imaging: random illumination patterns and the bucket-detector model.

Each measurement is the inner product of the object with one illumination
pattern; stacking the vectorized patterns as matrix rows makes the whole
acquisition a matrix-vector product.
"""

from dataclasses import dataclass

import numpy as np

from .fields import vectorize


@dataclass(frozen=True)
class PatternSet:
    """N illumination patterns of shape height x width, one vectorized per row."""

    rows: np.ndarray  # (N, height*width), values in [0, 1]
    height: int
    width: int

    def __post_init__(self):
        r = self.rows
        if r.ndim != 2 or r.shape[0] < 1 or r.shape[1] < 1:
            raise ValueError("pattern matrix must be a nonempty 2D array")
        if r.shape[1] != self.height * self.width:
            raise ValueError(
                f"pattern rows of length {r.shape[1]} do not match "
                f"{self.height}x{self.width}"
            )
        if r.min() < 0.0 or r.max() > 1.0:
            raise ValueError("pattern values must lie in [0, 1]")

    @property
    def num_patterns(self) -> int:
        return self.rows.shape[0]

    @property
    def num_pixels(self) -> int:
        return self.rows.shape[1]

    def pattern(self, n: int) -> np.ndarray:
        """Pattern n as a 2D grid."""
        return self.rows[n].reshape(self.height, self.width)


def gen_patterns(num_patterns: int, height: int, width: int, seed) -> PatternSet:
    """Draw uniform-[0, 1) illumination patterns, deterministic per seed."""
    if num_patterns < 1:
        raise ValueError("need at least one pattern")
    rng = np.random.default_rng(seed)
    rows = rng.random((num_patterns, height * width))
    return PatternSet(rows, height, width)


def sampling_ratio(patterns: PatternSet) -> float:
    """Number of patterns divided by number of pixels (N/M)."""
    return patterns.num_patterns / patterns.num_pixels


def measure(obj, patterns: PatternSet) -> np.ndarray:
    """Noise-free single-pixel intensities: one inner product per pattern."""
    x = vectorize(np.asarray(obj, dtype=np.float64))
    if x.size != patterns.num_pixels:
        raise ValueError(
            f"object with {x.size} pixels does not match patterns with "
            f"{patterns.num_pixels}"
        )
    return patterns.rows @ x


def add_noise(intensities, sigma: float, seed) -> np.ndarray:
    """Add Gaussian noise with std sigma * mean(|intensities|); sigma=0 is identity."""
    m = np.asarray(intensities, dtype=np.float64)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return m.copy()
    rng = np.random.default_rng(seed)
    scale = sigma * np.mean(np.abs(m))
    return m + rng.normal(0.0, scale, m.shape)
