"""2D grids, unitary Fourier transforms, and grid/vector reshaping.

Images are 2D float arrays with values in [0, 1]; complex light fields are
2D complex128 arrays. Both directions of the 2D transform carry the
1/sqrt(dim) scaling, so ``dft2``/``idft2`` preserve the Euclidean norm.
"""

import numpy as np


def ensure_image(arr) -> np.ndarray:
    """Validate a 2D real array with finite values in [0, 1]; return float64."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"image must be a nonempty 2D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("image contains non-finite values")
    if a.min() < 0.0 or a.max() > 1.0:
        raise ValueError(f"image values outside [0, 1]: min={a.min()}, max={a.max()}")
    return a


def ensure_field(arr) -> np.ndarray:
    """Validate a 2D finite array; return complex128."""
    a = np.asarray(arr, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"field must be a nonempty 2D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("field contains non-finite values")
    return a


def dft2(field) -> np.ndarray:
    """Unitary 2D discrete Fourier transform (each axis scaled by 1/sqrt(n))."""
    return np.fft.fft2(np.asarray(field, dtype=np.complex128), norm="ortho")


def idft2(field) -> np.ndarray:
    """Inverse of :func:`dft2` under the same unitary scaling."""
    return np.fft.ifft2(np.asarray(field, dtype=np.complex128), norm="ortho")


def vectorize(field) -> np.ndarray:
    """Flatten a 2D grid to a 1D vector, row-major. Dtype is preserved."""
    a = np.asarray(field)
    if a.ndim != 2:
        raise ValueError(f"expected a 2D grid, got shape {a.shape}")
    return a.flatten()


def devectorize(vec, height: int, width: int) -> np.ndarray:
    """Reshape a 1D vector back to a height x width grid (inverse of vectorize)."""
    v = np.asarray(vec)
    if v.ndim != 1:
        raise ValueError(f"expected a 1D vector, got shape {v.shape}")
    if v.size != height * width:
        raise ValueError(
            f"vector of length {v.size} cannot fill a {height}x{width} grid"
        )
    return v.reshape(height, width).copy()


def devectorize_image(vec, height: int, width: int, clamp: bool = False) -> np.ndarray:
    """Reshape a real vector into an image in [0, 1].

    Out-of-range values raise unless ``clamp`` is set, in which case they are
    clipped into range.
    """
    v = np.asarray(vec, dtype=np.float64)
    grid = devectorize(v, height, width)
    if clamp:
        return np.clip(grid, 0.0, 1.0)
    return ensure_image(grid)
