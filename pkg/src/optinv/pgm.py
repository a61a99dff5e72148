"""Binary PGM (P5, maxval 255) image dumps."""

import numpy as np


def write_pgm(path, image):
    """Write a [0, 1] image as an 8-bit binary PGM (values round(255*pixel))."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("PGM dump expects a 2D image")
    bytes_ = np.round(255.0 * np.clip(img, 0.0, 1.0)).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(bytes_.tobytes(order="C"))


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM written by :func:`write_pgm` back to a [0, 1] image."""
    with open(path, "rb") as f:
        raw = f.read()
    parts = raw.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM file")
    try:
        w, h = (int(t) for t in parts[1].split())
        maxval = int(parts[2])
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PGM header") from exc
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    data = np.frombuffer(parts[3][: w * h], dtype=np.uint8)
    if data.size != w * h:
        raise ValueError(f"{path}: truncated pixel data")
    return data.reshape(h, w).astype(np.float64) / 255.0
