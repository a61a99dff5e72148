"""Per-sample gradient-descent epoch kernels, numba-compiled when available.

One epoch visits the samples in the given order and applies, per sample,

    y_pred = W @ x
    W     += lr * outer(y - y_pred, conj(x))

in place. The numba kernels fuse the matvec and the rank-1 update row by
row, one pass over W per sample. Set OPTINV_BACKEND=numpy to force the
pure-numpy implementations (the default prefers numba and falls back to
numpy if it cannot be imported).
"""

import os

import numpy as np


def _numpy_epoch_real(W, X, Y, order, lr):
    for i in order:
        x = X[i]
        err = Y[i] - W @ x
        W += lr * np.outer(err, x)


def _numpy_epoch_complex(W, X, Y, order, lr):
    for i in order:
        x = X[i]
        err = Y[i] - W @ x
        W += lr * np.outer(err, np.conj(x))


def _pick_backend() -> str:
    choice = os.environ.get("OPTINV_BACKEND", "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"OPTINV_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    return choice


BACKEND = _pick_backend()

if BACKEND == "numba":
    try:
        from numba import njit
    except ImportError:
        BACKEND = "numpy"

if BACKEND == "numba":

    @njit(cache=True)
    def _numba_epoch_real(W, X, Y, order, lr):
        n_rows, n_cols = W.shape
        for k in range(order.shape[0]):
            i = order[k]
            for n in range(n_rows):
                acc = 0.0
                for m in range(n_cols):
                    acc += W[n, m] * X[i, m]
                g = lr * (Y[i, n] - acc)
                for m in range(n_cols):
                    W[n, m] += g * X[i, m]

    @njit(cache=True)
    def _numba_epoch_complex(W, X, Y, order, lr):
        n_rows, n_cols = W.shape
        for k in range(order.shape[0]):
            i = order[k]
            for n in range(n_rows):
                acc = 0.0 + 0.0j
                for m in range(n_cols):
                    acc += W[n, m] * X[i, m]
                g = lr * (Y[i, n] - acc)
                for m in range(n_cols):
                    W[n, m] += g * np.conj(X[i, m])

    sgd_epoch_real = _numba_epoch_real
    sgd_epoch_complex = _numba_epoch_complex
else:
    sgd_epoch_real = _numpy_epoch_real
    sgd_epoch_complex = _numpy_epoch_complex
