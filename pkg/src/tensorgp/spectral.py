"""Per-factor eigendecompositions and the eigenvalue tensor of ``K_y``."""

from typing import NamedTuple

import numpy as np

from .exceptions import InputError, NumericalError
from .tensor import outer

SYMMETRY_TOL = 1e-12


class EigenPair(NamedTuple):
    u: np.ndarray  # columns are eigenvectors
    d: np.ndarray  # eigenvalues, descending


def sym_eig(k):
    """Symmetric eigendecomposition ``k = u @ diag(d) @ u.T``.

    Eigenvalues come back in descending order. Each eigenvector is signed
    so its first component that is not negligible is positive, which makes
    the output reproducible for serialisation.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise InputError(f"expected a square matrix, got shape {k.shape}")
    if np.max(np.abs(k - k.T), initial=0.0) > SYMMETRY_TOL:
        raise InputError("matrix is not symmetric")
    try:
        d, u = np.linalg.eigh(k)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    d, u = d[::-1].copy(), u[:, ::-1].copy()
    lead = np.argmax(np.abs(u) > 1e-12, axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u *= signs
    return EigenPair(u, d)


def build_eigen_tensor(ds, noise_var):
    """Eigenvalues of ``kron(K_1..K_K) + noise_var * I`` arranged as a tensor.

    ``noise_var`` is the noise *variance* (already including any jitter).
    """
    if noise_var < 0:
        raise InputError("noise variance must be non-negative")
    return outer(ds) + noise_var


def log_det_from_tensor(d_tensor):
    """``log |K_y|`` as the sum of logs of the eigenvalue tensor."""
    d_tensor = np.asarray(d_tensor, dtype=float)
    if d_tensor.size and np.min(d_tensor) <= 0:
        idx = tuple(int(i) for i in np.unravel_index(np.argmin(d_tensor), d_tensor.shape))
        raise NumericalError(
            f"non-positive eigenvalue {d_tensor[idx]:.3e} of K_y at index {idx}; "
            "increase sigma_noise or add jitter"
        )
    return float(np.sum(np.log(d_tensor)))
