"""Image-quality evaluation: PSNR and corpus-level aggregation."""

import math
from dataclasses import dataclass

import numpy as np


def psnr(reference, candidate, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; identical images give +inf."""
    ref = np.asarray(reference, dtype=np.float64)
    cand = np.asarray(candidate, dtype=np.float64)
    if ref.shape != cand.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {cand.shape}")
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((ref - cand) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


@dataclass
class QualityReport:
    per_image_psnr: list
    mean_psnr: float
    std_psnr: float
    num_images: int
    num_infinite: int


def evaluate_corpus(references, candidates, peak: float = 1.0) -> QualityReport:
    """Per-image PSNR plus mean and sample standard deviation.

    Infinite entries (identical pairs) are excluded from the mean/std and
    counted separately; if every pair is identical the mean is NaN.
    """
    references = list(references)
    candidates = list(candidates)
    if len(references) != len(candidates):
        raise ValueError(
            f"{len(references)} references vs {len(candidates)} candidates"
        )
    values = [psnr(r, c, peak) for r, c in zip(references, candidates)]
    finite = [v for v in values if math.isfinite(v)]
    if finite:
        mean = float(np.mean(finite))
        std = float(np.std(finite, ddof=1)) if len(finite) > 1 else 0.0
    else:
        mean = math.nan
        std = math.nan
    return QualityReport(
        per_image_psnr=values,
        mean_psnr=mean,
        std_psnr=std,
        num_images=len(values),
        num_infinite=len(values) - len(finite),
    )
