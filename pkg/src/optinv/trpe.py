"""Triple-random-phase encryption: key generation, encryption, decryption.

The cipher is a 4f system with random phase masks at the input, Fourier and
output planes:

    C = IFT[ FT(O * exp(i*R1)) * exp(i*R2) ] * exp(i*R3)

Decryption applies the conjugate masks in reverse order. With unitary
transforms the map is linear in O and preserves the L2 norm, and
decrypt(encrypt(O)) == O exactly.
"""

from dataclasses import dataclass

import numpy as np

from .fields import dft2, idft2

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseMaskTriple:
    """The cipher key: three phase grids in radians, values in [0, 2*pi)."""

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray

    def __post_init__(self):
        if not (self.r1.shape == self.r2.shape == self.r3.shape):
            raise ValueError("phase masks must share one shape")
        for m in (self.r1, self.r2, self.r3):
            if m.ndim != 2:
                raise ValueError("phase masks must be 2D")
            if m.min() < 0.0 or m.max() >= TWO_PI:
                raise ValueError("phase values must lie in [0, 2*pi)")

    @property
    def height(self) -> int:
        return self.r1.shape[0]

    @property
    def width(self) -> int:
        return self.r1.shape[1]


@dataclass(frozen=True)
class PlainCipherPair:
    plaintext: np.ndarray
    ciphertext: np.ndarray


def gen_phase_mask_triple(height: int, width: int, seed) -> PhaseMaskTriple:
    """Draw three independent uniform-[0, 2*pi) phase masks from one seed."""
    if height < 1 or width < 1:
        raise ValueError("mask dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    r1, r2, r3 = (rng.uniform(0.0, TWO_PI, (height, width)) for _ in range(3))
    return PhaseMaskTriple(r1, r2, r3)


def _check_dims(field: np.ndarray, key: PhaseMaskTriple):
    if field.shape != (key.height, key.width):
        raise ValueError(
            f"field shape {field.shape} does not match key "
            f"{(key.height, key.width)}"
        )


def encrypt(plaintext, key: PhaseMaskTriple) -> np.ndarray:
    """Encrypt a real image (treated as the input amplitude) to a complex field."""
    o = np.asarray(plaintext, dtype=np.float64)
    _check_dims(o, key)
    inner = dft2(o * np.exp(1j * key.r1))
    return idft2(inner * np.exp(1j * key.r2)) * np.exp(1j * key.r3)


def decrypt(ciphertext, key: PhaseMaskTriple) -> np.ndarray:
    """Invert :func:`encrypt`; returns a complex field (imaginary part ~0)."""
    c = np.asarray(ciphertext, dtype=np.complex128)
    _check_dims(c, key)
    inner = dft2(c * np.exp(-1j * key.r3))
    return idft2(inner * np.exp(-1j * key.r2)) * np.exp(-1j * key.r1)


def gen_kpa_corpus(images, key: PhaseMaskTriple) -> list[PlainCipherPair]:
    """Encrypt every image under one fixed key, pairing plaintexts with ciphertexts."""
    return [PlainCipherPair(np.asarray(img, dtype=np.float64), encrypt(img, key))
            for img in images]
