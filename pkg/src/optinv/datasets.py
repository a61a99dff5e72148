"""Dataset ingestion: IDX image files, CIFAR-100 binary, 32x32 conversion, splits.

Files ending in ``.gz`` are decompressed transparently (the common
distribution form of the IDX files). No parser ever touches the network.
"""

import gzip
import struct

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
CIFAR_RECORD_BYTES = 3074  # coarse label, fine label, 3 x 1024 color planes

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class FormatError(ValueError):
    """Malformed dataset file."""


def _read_bytes(path) -> bytes:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as f:
        return f.read()


def _write_bytes(path, payload: bytes):
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wb") as f:
        f.write(payload)


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a (count, rows, cols) uint8 array."""
    raw = _read_bytes(path)
    if len(raw) < 16:
        raise FormatError(f"{path}: too short for an IDX image header")
    magic, count, rows, cols = struct.unpack_from(">IIII", raw)
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(
            f"{path}: magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}"
        )
    expected = 16 + count * rows * cols
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload of {len(raw) - 16} bytes, expected {count * rows * cols}"
        )
    data = np.frombuffer(raw, dtype=np.uint8, offset=16)
    return data.reshape(count, rows, cols).copy()


def write_idx_images(path, images):
    """Write a (count, rows, cols) uint8 array as an IDX image file."""
    arr = np.asarray(images, dtype=np.uint8)
    if arr.ndim != 3:
        raise ValueError("expected a (count, rows, cols) array")
    header = struct.pack(">IIII", IDX_IMAGE_MAGIC, *arr.shape)
    _write_bytes(path, header + arr.tobytes(order="C"))


def load_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a (count,) uint8 array."""
    raw = _read_bytes(path)
    if len(raw) < 8:
        raise FormatError(f"{path}: too short for an IDX label header")
    magic, count = struct.unpack_from(">II", raw)
    if magic != IDX_LABEL_MAGIC:
        raise FormatError(
            f"{path}: magic 0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}"
        )
    if len(raw) != 8 + count:
        raise FormatError(f"{path}: payload of {len(raw) - 8} bytes, expected {count}")
    return np.frombuffer(raw, dtype=np.uint8, offset=8).copy()


def write_idx_labels(path, labels):
    arr = np.asarray(labels, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("expected a flat label array")
    _write_bytes(path, struct.pack(">II", IDX_LABEL_MAGIC, arr.size) + arr.tobytes())


def load_cifar100(path):
    """Parse CIFAR-100 binary records.

    Returns (images, coarse_labels, fine_labels) with images of shape
    (count, 32, 32, 3) uint8. Each 3074-byte record holds two label bytes
    followed by row-major 1024-byte R, G and B planes.
    """
    raw = _read_bytes(path)
    if len(raw) == 0 or len(raw) % CIFAR_RECORD_BYTES != 0:
        raise FormatError(
            f"{path}: size {len(raw)} is not a positive multiple of {CIFAR_RECORD_BYTES}"
        )
    records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
    coarse = records[:, 0].copy()
    fine = records[:, 1].copy()
    planes = records[:, 2:].reshape(-1, 3, 32, 32)
    images = planes.transpose(0, 2, 3, 1).copy()
    return images, coarse, fine


def to_experiment_image(raw) -> np.ndarray:
    """Convert a raw dataset image to the 32x32 grayscale [0, 1] format.

    28x28 grayscale inputs are zero-padded to 32x32 (centered, 2-pixel
    border); 32x32 RGB inputs are converted with the 0.299/0.587/0.114
    luma weights; 32x32 grayscale passes through. All outputs are byte
    values divided by 255.
    """
    a = np.asarray(raw, dtype=np.float64)
    if a.shape == (32, 32, 3):
        a = a @ np.asarray(LUMA_WEIGHTS)
    elif a.shape == (28, 28):
        padded = np.zeros((32, 32))
        padded[2:30, 2:30] = a
        a = padded
    elif a.shape != (32, 32):
        raise ValueError(f"unsupported raw image shape {a.shape}")
    return a / 255.0


def split(images, num_train: int, num_test: int, seed):
    """Disjoint random train/test selections, deterministic per seed."""
    images = list(images)
    if num_train < 1 or num_test < 1:
        raise ValueError("num_train and num_test must be >= 1")
    if num_train + num_test > len(images):
        raise ValueError(
            f"corpus of {len(images)} cannot supply {num_train} train "
            f"+ {num_test} test images"
        )
    order = np.random.default_rng(seed).permutation(len(images))
    train = [images[i] for i in order[:num_train]]
    test = [images[i] for i in order[num_train:num_train + num_test]]
    return train, test


def load_experiment_corpus(kind: str, path) -> list[np.ndarray]:
    """Load a dataset file and convert every image to 32x32 [0, 1] grayscale."""
    if kind in ("mnist", "fashion-mnist"):
        return [to_experiment_image(img) for img in load_idx_images(path)]
    if kind == "cifar100":
        images, _, _ = load_cifar100(path)
        return [to_experiment_image(img) for img in images]
    raise ValueError(f"unknown dataset kind {kind!r}")
