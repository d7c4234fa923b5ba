"""Computation rates of integer combinations at a (multi-antenna) relay.

Rates are in bits per real channel use. ``P`` is the transmit power of every
user relative to unit noise variance; pass an effective channel with ``P=1``
when per-user powers are already folded into ``H``.
"""

from __future__ import annotations

import numpy as np

from .channel import as_matrix
from .errors import InvalidArgumentError

# eigenvalues of H^T H below this are treated as zero (rank deficiency)
EIG_TOL = 1e-12


def _check_power(P):
    if not (np.isfinite(P) and P > 0):
        raise InvalidArgumentError(f"power must be positive and finite, got {P}")


def _as_coeffs(a, L):
    a = np.asarray(a)
    if a.ndim != 1 or a.size != L:
        raise InvalidArgumentError(f"coefficient vector must have length {L}")
    if not np.all(np.equal(np.mod(a, 1), 0)):
        raise InvalidArgumentError(f"coefficients must be integers, got {a}")
    return a.astype(float)


def log2_plus(x: float) -> float:
    """max(0, log2(x)), with log2_plus(inf) = inf."""
    return max(0.0, float(np.log2(x))) if x > 0 else 0.0


def computation_rate_with_b(H, a, b, P: float) -> float:
    """Rate of combination ``a`` when the relay projects onto ``b`` before decoding."""
    H = as_matrix(H)
    _check_power(P)
    a = _as_coeffs(a, H.shape[1])
    b = np.asarray(b, dtype=float).ravel()
    if b.size != H.shape[0]:
        raise InvalidArgumentError(f"preprocessing vector must have length {H.shape[0]}")
    if not b.any() and not a.any():
        raise InvalidArgumentError("b and a are both zero")
    denom = b @ b + P * np.sum((H.T @ b - a) ** 2)
    if denom == 0.0:
        return float("inf")
    return 0.5 * log2_plus(P / denom)


def optimal_preprocessing(H, A, P: float) -> np.ndarray:
    """MMSE preprocessing ``B = A H^T (H H^T + I/P)^{-1}``, one row per combination."""
    H = as_matrix(H)
    _check_power(P)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != H.shape[1]:
        raise InvalidArgumentError(
            f"coefficient matrix has {A.shape[1]} columns, channel has {H.shape[1]} users")
    G = H @ H.T + np.eye(H.shape[0]) / P
    # B G = A H^T  ->  solve G^T B^T = H A^T, G symmetric
    return np.linalg.solve(G, H @ A.T).T


def rate_quadratic_form(H, P: float) -> np.ndarray:
    """The matrix ``M = V D V^T`` with ``R(H, a) = -1/2 log2(a^T M a)``.

    ``V`` holds the eigenvectors of ``H^T H`` (right singular vectors of H) and
    ``D_ii = 1 / (P lambda_i + 1)`` on the nonzero eigenvalues, 1 elsewhere.
    """
    H = as_matrix(H)
    _check_power(P)
    lam, V = np.linalg.eigh(H.T @ H)
    d = np.where(lam > EIG_TOL, 1.0 / (P * np.clip(lam, 0.0, None) + 1.0), 1.0)
    M = (V * d) @ V.T
    return 0.5 * (M + M.T)


def rate_from_form(M, a) -> float:
    """Computation rate for ``a`` given the quadratic form from :func:`rate_quadratic_form`.

    Evaluated in plain Python so identical inputs give bit-identical rates
    regardless of batch shape.
    """
    L = len(a)
    q = 0.0
    for i in range(L):
        ai = a[i]
        if ai == 0:
            continue
        row = M[i]
        s = 0.0
        for j in range(L):
            s += row[j] * a[j]
        q += ai * s
    if q >= 1.0:
        return 0.0
    if q <= 0.0:
        return float("inf")
    return -0.5 * float(np.log2(q))


def computation_rate(H, a, P: float, half: bool = True) -> float:
    """Achievable computation rate of ``a`` with optimal MMSE preprocessing.

    ``half=False`` drops the leading 1/2, matching the SISO/MISO closed form
    expressions literally.
    """
    H = as_matrix(H)
    a = _as_coeffs(a, H.shape[1])
    if not a.any():
        raise InvalidArgumentError("coefficient vector must be nonzero")
    M = rate_quadratic_form(H, P)
    r = rate_from_form(M.tolist(), a.tolist())
    return r if half else 2.0 * r


def siso_closed_form_rate(h_eff, a, half: bool = True) -> float:
    """Closed-form SISO computation rate for an effective 1 x L channel.

    ``log2+(( |a|^2 - (h^T a)^2 / (1 + |h|^2) )^{-1})``, times 1/2 by default.
    """
    h = np.asarray(h_eff, dtype=float).ravel()
    a = _as_coeffs(a, h.size)
    if not a.any():
        raise InvalidArgumentError("coefficient vector must be nonzero")
    v = a @ a - (h @ a) ** 2 / (1.0 + h @ h)
    r = log2_plus(1.0 / v) if v > 0 else float("inf")
    return 0.5 * r if half else r
