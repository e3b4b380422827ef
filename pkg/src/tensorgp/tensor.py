"""Dense tensor algebra on numpy arrays.

Tensors are plain C-ordered ``numpy.ndarray`` objects, so ``vec`` is
``ravel()`` and the last axis varies fastest. That ordering matches the
row/column indexing of ``K_1 kron K_2 kron ... kron K_K``, which means

    kron(B_1, ..., B_K) @ vec(Y) == vec(Y x_1 B_1.T x_2 ... x_K B_K.T)

where ``x_j`` is :func:`mode_product`. Axes are 0-based throughout.
"""

from functools import reduce

import numpy as np

from .exceptions import InputError


def _check_axis(t, j):
    if not -t.ndim <= j < t.ndim:
        raise InputError(f"axis {j} out of range for a {t.ndim}-dimensional tensor")
    return j % t.ndim


def vec(t):
    """Flatten ``t`` in canonical (last index fastest) order."""
    return np.ravel(np.asarray(t, dtype=float), order="C")


def unvec(v, shape):
    v = np.asarray(v, dtype=float)
    if v.size != int(np.prod(shape)):
        raise InputError(f"cannot fold {v.size} values into shape {tuple(shape)}")
    return v.reshape(shape)


def unfold(t, j):
    """Mode-``j`` unfolding: an ``(N / n_j) x n_j`` matrix whose rows are fibres along ``j``.

    For a 2-D tensor ``unfold(t, 0) == t.T`` and ``unfold(t, 1) == t``.
    """
    t = np.asarray(t)
    j = _check_axis(t, j)
    return np.moveaxis(t, j, -1).reshape(-1, t.shape[j])


def fold(m, j, shape):
    """Inverse of :func:`unfold` for a tensor of the given ``shape``."""
    shape = tuple(shape)
    j = j % len(shape)
    moved = shape[:j] + shape[j + 1:] + (shape[j],)
    return np.moveaxis(np.asarray(m).reshape(moved), -1, j)


def mode_product(t, b, j):
    """Multiply tensor ``t`` by matrix ``b`` along axis ``j``.

    The result ``z`` satisfies ``unfold(z, j) == unfold(t, j) @ b``; its
    shape is ``t.shape`` with ``n_j`` replaced by ``b.shape[1]``.
    """
    t = np.asarray(t, dtype=float)
    b = np.asarray(b, dtype=float)
    j = _check_axis(t, j)
    if b.ndim != 2 or b.shape[0] != t.shape[j]:
        raise InputError(
            f"mode-{j} product needs a matrix with {t.shape[j]} rows, got shape {b.shape}"
        )
    return np.moveaxis(np.tensordot(t, b, axes=([j], [0])), -1, j)


def multi_mode_product(t, bs):
    """Apply :func:`mode_product` along every axis in turn.

    ``bs[j]`` may be ``None`` to skip axis ``j``.
    """
    t = np.asarray(t, dtype=float)
    if len(bs) != t.ndim:
        raise InputError(f"expected {t.ndim} matrices, got {len(bs)}")
    for j, b in enumerate(bs):
        if b is not None:
            t = mode_product(t, b, j)
    return t


def inner(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InputError(f"inner product of tensors with shapes {a.shape} and {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def outer(vectors):
    """Rank-one tensor ``v_1 o v_2 o ... o v_K``."""
    return reduce(np.multiply.outer, [np.asarray(v, dtype=float) for v in vectors])


def kron_apply_reference(bs, v):
    """Materialise ``B_1 kron ... kron B_K`` and multiply by ``v``.

    Quadratic in the total size; intended as a test oracle only.
    """
    bs = [np.atleast_2d(np.asarray(b, dtype=float)) for b in bs]
    v = np.asarray(v, dtype=float).ravel()
    cols = int(np.prod([b.shape[1] for b in bs]))
    if cols != v.size:
        raise InputError(f"Kronecker operand has {cols} columns but vector has length {v.size}")
    return reduce(np.kron, bs) @ v
