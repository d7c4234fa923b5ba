"""Integer coefficient matrix search for compute-and-forward.

The relay decodes ``L - 1`` integer combinations. A coefficient matrix is
admissible when, for every user ``l``, stacking its rows with the unit vector
``e_l`` gives a full-rank ``L x L`` matrix: every user can then solve for all
other codewords, while no single combination exposes one user's codeword.

Only vectors with strictly positive computation rate are searched. A zero-rate
row can never raise the min-rate objective, so the restriction is lossless.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cf_rate import rate_from_form, rate_quadratic_form
from .channel import as_matrix
from .errors import InvalidArgumentError, SearchError

# rates within this absolute distance are considered tied
TIE_TOL = 1e-12
MAX_CANDIDATES = 10**5
BRUTE_FORCE_LIMIT = 10**8


@dataclass(frozen=True)
class SearchResult:
    A: tuple = ()
    rate: float = 0.0
    candidates_examined: int = 0
    feasible: bool = False
    row_rates: tuple = field(default=())

    def as_array(self) -> np.ndarray:
        return np.array(self.A, dtype=int)


def canonical(a) -> tuple:
    """Fix the global sign so the first nonzero entry is positive."""
    a = tuple(int(x) for x in a)
    for x in a:
        if x != 0:
            return a if x > 0 else tuple(-y for y in a)
    return a


def is_canonical(a) -> bool:
    for x in a:
        if x != 0:
            return x > 0
    return False


def integer_det(rows) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise InvalidArgumentError("determinant needs a square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def integer_rank(rows) -> int:
    """Exact rank of an integer matrix (any shape) by fraction-free elimination."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c]:
                f = m[i][c]
                m[i] = [x * p[c] - f * y for x, y in zip(m[i], p)]
        rank += 1
        if rank == len(m):
            break
    return rank


def is_unit_like(a) -> bool:
    nz = [x for x in a if x != 0]
    return len(nz) == 1 and abs(nz[0]) == 1


def admissible(rows, L: int) -> bool:
    """Check the full-recovery rank constraint for every unit vector."""
    rows = [tuple(r) for r in rows]
    if len(rows) != L - 1:
        return False
    for r in rows:
        if not any(r) or is_unit_like(r):
            return False
    for ell in range(L):
        e = tuple(1 if j == ell else 0 for j in range(L))
        if integer_det(rows + [e]) == 0:
            return False
    return True


def _fincke_pohst(M: np.ndarray, radius: float):
    """All nonzero integer vectors with ``a^T M a <= radius`` (both signs)."""
    L = M.shape[0]
    try:
        R = np.linalg.cholesky(M).T  # upper triangular, M = R^T R
    except np.linalg.LinAlgError as exc:
        raise SearchError("rate quadratic form is not positive definite") from exc
    diag = [float(R[i, i]) for i in range(L)]
    if min(diag) <= 1e-150:
        raise SearchError("rate quadratic form is numerically singular")
    # mu[i][j] = R_ij / R_ii for j > i
    mu = [[float(R[i, j]) / diag[i] for j in range(L)] for i in range(L)]
    d2 = [x * x for x in diag]
    out = []
    a = [0] * L

    def walk(i, remaining):
        c = -sum(mu[i][j] * a[j] for j in range(i + 1, L))
        half_width = math.sqrt(max(remaining, 0.0) / d2[i])
        lo = math.ceil(c - half_width)
        hi = math.floor(c + half_width)
        for v in range(lo, hi + 1):
            rest = remaining - d2[i] * (v - c) ** 2
            if rest < 0:
                continue
            a[i] = v
            if i == 0:
                if any(a):
                    out.append(tuple(a))
            else:
                walk(i - 1, rest)
        a[i] = 0

    walk(L - 1, radius)
    return out


def enumerate_candidates(H, P: float, max_candidates: int = MAX_CANDIDATES) -> list:
    """Canonical integer vectors with strictly positive computation rate.

    Returns ``(a, rate)`` pairs sorted by rate (descending), then by ``a``.
    """
    M = rate_quadratic_form(H, P)
    Ml = M.tolist()
    found = _fincke_pohst(M, 1.0 + 1e-9)
    out = []
    for a in found:
        if not is_canonical(a):
            continue
        r = rate_from_form(Ml, a)
        if r > 0.0:
            out.append((a, r))
            if len(out) > max_candidates:
                raise SearchError(f"more than {max_candidates} candidate vectors")
    out.sort(key=lambda t: (-t[1], t[0]))
    return out


def _better(rate, rows, best_rate, best_rows) -> bool:
    if best_rows is None:
        return True
    if rate > best_rate + TIE_TOL:
        return True
    return abs(rate - best_rate) <= TIE_TOL and rows < best_rows


def _result(best_rows, best_rate, rates, examined) -> SearchResult:
    if best_rows is None:
        return SearchResult((), 0.0, examined, False, ())
    return SearchResult(best_rows, best_rate, examined, True,
                        tuple(rates[r] for r in best_rows))


def best_coefficient_matrix(H, P: float = 1.0) -> SearchResult:
    """Coefficient matrix maximising the smallest computation rate of its rows.

    Ties (within ``TIE_TOL``) go to the lexicographically smallest sorted row set.
    """
    H = as_matrix(H)
    L = H.shape[1]
    if L < 2:
        raise InvalidArgumentError("need at least 2 users")
    cands = [(a, r) for a, r in enumerate_candidates(H, P) if not is_unit_like(a)]
    rates = dict(cands)
    best_rate, best_rows, examined = 0.0, None, 0
    # cands sorted by rate descending: a subset's objective is the rate of its
    # last (worst) member, so scan the limiting row k and stop once it cannot tie
    for k, (ak, rk) in enumerate(cands):
        if best_rows is not None and rk < best_rate - TIE_TOL:
            break
        for combo in itertools.combinations(range(k), L - 2):
            rows = [cands[i][0] for i in combo] + [ak]
            examined += 1
            if not admissible(rows, L):
                continue
            key = tuple(sorted(rows))
            if _better(rk, key, best_rate, best_rows):
                best_rate, best_rows = rk, key
    return _result(best_rows, best_rate, rates, examined)


def ellipsoid_box_radius(H, P: float) -> int:
    """Smallest integer box containing the positive-rate ellipsoid ``a^T M a < 1``."""
    M = rate_quadratic_form(H, P)
    return max(1, int(math.ceil(float(np.sqrt(np.max(np.diag(np.linalg.inv(M))))))))


def brute_force_best(H, P: float, box_radius: int) -> SearchResult:
    """Exhaustive reference search over ``[-box_radius, box_radius]^L``.

    Test oracle only: enumerates the whole box and every row subset without
    pruning.
    """
    H = as_matrix(H)
    L = H.shape[1]
    if box_radius < 1:
        raise InvalidArgumentError("box_radius must be >= 1")
    if L * (2 * box_radius + 1) ** L > BRUTE_FORCE_LIMIT:
        raise InvalidArgumentError(
            f"box of radius {box_radius} in {L} dimensions is too large")
    Ml = rate_quadratic_form(H, P).tolist()
    rates = {}
    for a in itertools.product(range(-box_radius, box_radius + 1), repeat=L):
        if not is_canonical(a) or is_unit_like(a):
            continue
        r = rate_from_form(Ml, a)
        if r > 0.0:
            rates[a] = r
    best_rate, best_rows, examined = 0.0, None, 0
    for combo in itertools.combinations(sorted(rates), L - 1):
        examined += 1
        if not admissible(list(combo), L):
            continue
        r = min(rates[a] for a in combo)
        key = tuple(sorted(combo))
        if _better(r, key, best_rate, best_rows):
            best_rate, best_rows = r, key
    return _result(best_rows, best_rate, rates, examined)
