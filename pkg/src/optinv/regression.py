"""Stochastic-gradient linear regression, real- and complex-valued.

Learns the N x M weight matrix of a linear system y = W x from sample pairs
using the per-sample update

    w_nm += lr * (y_n - y'_n) * x_m          (real inputs)
    w_nm += lr * (y_n - y'_n) * conj(x_m)    (complex inputs)

applied as a rank-1 outer-product addition. Training is a sequential,
deterministic loop; given identical data and config the result is bitwise
reproducible.
"""

import struct
from dataclasses import dataclass

import numpy as np

from ._kernels import sgd_epoch_complex, sgd_epoch_real

DIVERGENCE_LIMIT = 1e12


class TrainingDiverged(RuntimeError):
    """Raised when weights blow up; carries the epoch that diverged."""

    def __init__(self, epoch: int):
        super().__init__(
            f"training diverged at epoch {epoch} "
            f"(weight magnitude exceeded {DIVERGENCE_LIMIT:g} or became non-finite); "
            "reduce the learning rate"
        )
        self.epoch = epoch


@dataclass
class TrainingConfig:
    learning_rate: float
    epochs: int
    init_seed: int = 0
    init_scale: float = 0.01
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.init_scale < 0:
            raise ValueError("init_scale must be nonnegative")


def _check_training_set(X, Y):
    if X.ndim != 2 or Y.ndim != 2:
        raise ValueError("inputs and targets must be 2D (samples x length)")
    if X.shape[0] != Y.shape[0]:
        raise ValueError(
            f"{X.shape[0]} inputs vs {Y.shape[0]} targets"
        )
    if X.shape[0] == 0:
        raise ValueError("training set is empty")


def _rngs(cfg: TrainingConfig):
    # Separate streams so the shuffle schedule does not depend on the
    # weight-matrix size (keeps row-restricted trainings bit-compatible).
    init_ss, shuffle_ss = np.random.SeedSequence(cfg.init_seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(shuffle_ss)


def _run_epochs(W, X, Y, cfg, epoch_kernel, shuffle_rng):
    num_samples = X.shape[0]
    for epoch in range(cfg.epochs):
        if cfg.shuffle:
            order = shuffle_rng.permutation(num_samples)
        else:
            order = np.arange(num_samples)
        epoch_kernel(W, X, Y, order.astype(np.int64), cfg.learning_rate)
        if not np.all(np.isfinite(W)) or np.max(np.abs(W)) > DIVERGENCE_LIMIT:
            raise TrainingDiverged(epoch)
    return W


def train_real(inputs, targets, cfg: TrainingConfig, init=None) -> np.ndarray:
    """Fit a real N x M weight matrix to (input, target) sample pairs.

    ``inputs`` is (K, M), ``targets`` is (K, N). ``init`` overrides the
    seeded uniform [-init_scale, init_scale] weight initialization.
    """
    X = np.ascontiguousarray(inputs, dtype=np.float64)
    Y = np.ascontiguousarray(targets, dtype=np.float64)
    _check_training_set(X, Y)
    init_rng, shuffle_rng = _rngs(cfg)
    if init is None:
        W = init_rng.uniform(-cfg.init_scale, cfg.init_scale, (Y.shape[1], X.shape[1]))
    else:
        W = np.array(init, dtype=np.float64)
    return _run_epochs(W, X, Y, cfg, sgd_epoch_real, shuffle_rng)


def train_complex(inputs, targets, cfg: TrainingConfig, init=None) -> np.ndarray:
    """Complex-valued variant of :func:`train_real` (conjugate update rule).

    Targets may be real; they are embedded as complex with zero imaginary
    part. The seeded initialization is real-valued, so purely real data
    reproduces :func:`train_real` exactly.
    """
    X = np.ascontiguousarray(inputs, dtype=np.complex128)
    Y = np.ascontiguousarray(targets, dtype=np.complex128)
    _check_training_set(X, Y)
    init_rng, shuffle_rng = _rngs(cfg)
    if init is None:
        W = init_rng.uniform(-cfg.init_scale, cfg.init_scale, (Y.shape[1], X.shape[1]))
        W = W.astype(np.complex128)
    else:
        W = np.array(init, dtype=np.complex128)
    return _run_epochs(W, X, Y, cfg, sgd_epoch_complex, shuffle_rng)


def predict(W, x) -> np.ndarray:
    """Apply the learned system: returns W @ x."""
    W = np.asarray(W)
    x = np.asarray(x)
    if x.shape[0] != W.shape[1]:
        raise ValueError(f"input of length {x.shape[0]} vs W with {W.shape[1]} columns")
    return W @ x


def training_loss(W, inputs, targets) -> float:
    """Mean over samples of ||y - W x||^2 / N."""
    W = np.asarray(W)
    X = np.asarray(inputs)
    Y = np.asarray(targets)
    _check_training_set(X, Y)
    if X.shape[1] != W.shape[1] or Y.shape[1] != W.shape[0]:
        raise ValueError("training set shapes do not match W")
    residual = Y - X @ W.T
    return float(np.mean(np.abs(residual) ** 2))


_MAGIC = b"OPTW"
_VERSION = 1
_HEADER = struct.Struct("<4sBBII")


def save_weights(path, W):
    """Serialize a weight matrix: magic, version, real/complex flag, dims, float64 data."""
    W = np.asarray(W)
    if W.ndim != 2:
        raise ValueError("weight matrix must be 2D")
    is_complex = np.iscomplexobj(W)
    header = _HEADER.pack(_MAGIC, _VERSION, int(is_complex), W.shape[0], W.shape[1])
    body = W.astype("<c16" if is_complex else "<f8").tobytes(order="C")
    with open(path, "wb") as f:
        f.write(header)
        f.write(body)


def load_weights(path) -> np.ndarray:
    """Inverse of :func:`save_weights`."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ValueError("weight file too short for header")
    magic, version, flag, n, m = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
    if version != _VERSION:
        raise ValueError(f"unsupported weight-file version {version}")
    if flag not in (0, 1):
        raise ValueError(f"bad real/complex flag {flag}")
    dtype = "<c16" if flag else "<f8"
    expected = _HEADER.size + n * m * (16 if flag else 8)
    if len(raw) != expected:
        raise ValueError(f"weight file has {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype=dtype, offset=_HEADER.size)
    return data.reshape(n, m).astype(np.complex128 if flag else np.float64)
