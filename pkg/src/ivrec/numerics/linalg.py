"""Dense SVD and rcond-truncated Moore-Penrose pseudoinverse.

The pseudoinverse is the workhorse of the least-squares projection onto
query-embedding columns.  Stacked query matrices are routinely
rank-deficient (zero padding, near-duplicate queries), so the inverse is
always computed through an SVD with small singular values cut off, never
through normal equations.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, NumericalError


def svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD returning (u, s, v) such that m == u @ diag(s) @ v.T.

    Singular values come back non-negative in descending order; u and v
    have orthonormal columns.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ConfigError(f"svd expects a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"non-finite entries in matrix of shape {m.shape}")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for matrix of shape {m.shape}") from exc
    return u, s, vt.T


def pinv(m: np.ndarray, rcond: float | None = None) -> np.ndarray:
    """Pseudoinverse via SVD; singular values <= rcond * s_max are zeroed.

    rcond defaults to machine epsilon times max(rows, cols), matching the
    usual conditioning heuristic for least-squares problems.
    """
    m = np.asarray(m, dtype=np.float64)
    if rcond is None:
        rcond = float(np.finfo(np.float64).eps) * max(m.shape) if m.size else 0.0
    if rcond < 0:
        raise ConfigError(f"rcond must be >= 0, got {rcond}")
    u, s, v = svd(m)
    if s.size == 0:
        return np.zeros((m.shape[1], m.shape[0]))
    cutoff = rcond * s[0]
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (v * inv) @ u.T
