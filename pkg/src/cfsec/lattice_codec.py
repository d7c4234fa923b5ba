"""Desk-scale nested lattice codec for compute-and-forward.

The chain is self-similar: fine lattice ``beta Z^n`` and coarse lattice
``q beta Z^n``, so the codebook has ``q^n`` points. A codeword is addressed
by its integer coordinates ``c in Z_q^n``. Linear combinations of codewords
modulo the coarse lattice then correspond to linear combinations of
coordinates modulo ``q``, and that is what the users solve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .cf_rate import computation_rate, optimal_preprocessing
from .channel import as_matrix
from .coeff_search import integer_det
from .errors import InvalidArgumentError, UnrecoverableError


def lattice_quantize(x, scale: float = 1.0) -> np.ndarray:
    """Nearest point of ``scale * Z^n``; ties are rounded half to even."""
    x = np.asarray(x, dtype=float)
    return scale * np.round(x / scale)


def lattice_mod(x, scale: float = 1.0) -> np.ndarray:
    """``x mod scale*Z^n``: the offset from the nearest lattice point."""
    x = np.asarray(x, dtype=float)
    return x - lattice_quantize(x, scale)


@dataclass(frozen=True)
class LatticeChain:
    """Self-similar pair ``coarse = q * fine`` with coarse second moment ``P``."""
    n: int
    q: int
    P: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("dimension must be >= 1")
        if self.q < 2:
            raise InvalidArgumentError("nesting ratio q must be >= 2")
        if not self.P > 0:
            raise InvalidArgumentError("power must be positive")

    @property
    def beta(self) -> float:
        # cube of side q*beta has second moment (q beta)^2 / 12 = P
        return math.sqrt(12.0 * self.P) / self.q

    @property
    def coarse_scale(self) -> float:
        return self.q * self.beta

    @property
    def size(self) -> int:
        return self.q ** self.n

    @property
    def rate(self) -> float:
        """Code rate in bits per dimension."""
        return math.log2(self.q)

    def quantize_fine(self, x):
        return lattice_quantize(x, self.beta)

    def mod_coarse(self, x):
        return lattice_mod(x, self.coarse_scale)

    def codeword(self, coords) -> np.ndarray:
        """Representative in the coarse Voronoi region of ``beta * coords``."""
        c = np.mod(np.asarray(coords, dtype=np.int64), self.q)
        return self.mod_coarse(self.beta * c)

    def coords(self, point) -> np.ndarray:
        """Integer coordinates in ``Z_q^n`` of a fine-lattice point."""
        return np.mod(np.round(np.asarray(point, dtype=float) / self.beta).astype(np.int64),
                      self.q)

    def index_to_coords(self, index: int) -> np.ndarray:
        if not 0 <= index < self.size:
            raise InvalidArgumentError(f"codeword index {index} out of range")
        return np.array(digits(index, self.q, self.n), dtype=np.int64)

    def coords_to_index(self, coords) -> int:
        return from_digits([int(c) for c in np.mod(coords, self.q)], self.q)


def digits(value: int, base: int, length: int) -> list[int]:
    """Base-``base`` digits of ``value``, least significant first, zero padded."""
    if value < 0:
        raise InvalidArgumentError("value must be nonnegative")
    out = []
    while value:
        value, r = divmod(value, base)
        out.append(r)
    if len(out) > length:
        raise InvalidArgumentError(f"value needs {len(out)} digits, only {length} available")
    return out + [0] * (length - len(out))


def from_digits(ds, base: int) -> int:
    return sum(int(d) * base ** i for i, d in enumerate(ds))


def message_index(message_digits, q: int, k: int) -> int:
    """Index of a message over ``Z_q`` given as up to ``k`` digits.

    Shorter messages are zero padded to length ``k`` (high-order digits).
    """
    ds = list(message_digits)
    if len(ds) > k:
        raise InvalidArgumentError(f"message longer than {k} digits")
    if any(not 0 <= d < q for d in ds):
        raise InvalidArgumentError(f"message digits must lie in [0, {q})")
    return from_digits(ds + [0] * (k - len(ds)), q)


@dataclass(frozen=True)
class BinnedCodebook:
    """Random partition of the codebook into ``2**secret_bits`` equal bins.

    Each bin gets ``q^n // 2**secret_bits`` codewords; the remaining
    ``q^n mod 2**secret_bits`` codewords are left unused.
    """
    chain: LatticeChain
    secret_bits: int = 0
    seed: int = 0
    bins: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n_bins = 2 ** self.secret_bits
        if self.secret_bits < 0 or n_bins > self.chain.size:
            raise InvalidArgumentError(
                f"{n_bins} bins do not fit a codebook of {self.chain.size} words")
        per_bin = self.chain.size // n_bins
        perm = np.random.default_rng(self.seed).permutation(self.chain.size)
        bins = tuple(tuple(int(i) for i in perm[b * per_bin:(b + 1) * per_bin])
                     for b in range(n_bins))
        object.__setattr__(self, "bins", bins)

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    @property
    def per_bin(self) -> int:
        return len(self.bins[0])

    @property
    def secret_rate(self) -> float:
        return math.log2(self.n_bins) / self.chain.n

    @property
    def dummy_rate(self) -> float:
        return math.log2(self.per_bin) / self.chain.n


def draw_dither(chain: LatticeChain, rng) -> np.ndarray:
    """Dither uniform over the coarse Voronoi region ``[-q beta/2, q beta/2)^n``."""
    s = chain.coarse_scale
    return rng.uniform(-s / 2, s / 2, size=chain.n)


@dataclass(frozen=True)
class Encoded:
    x: np.ndarray
    t: np.ndarray
    coords: np.ndarray
    index: int


def encode(w: int, chain: LatticeChain, bins: BinnedCodebook, dither, rng) -> Encoded:
    """Pick a random codeword from bin ``w`` and send ``[t + u] mod coarse``."""
    if not 0 <= w < bins.n_bins:
        raise InvalidArgumentError(f"message {w} out of range [0, {bins.n_bins})")
    members = bins.bins[w]
    idx = members[int(rng.integers(len(members)))]
    c = chain.index_to_coords(idx)
    t = chain.codeword(c)
    x = chain.mod_coarse(t + np.asarray(dither, dtype=float))
    return Encoded(x=x, t=t, coords=c, index=idx)


def transmit(H, xs, powers, P: float, noise_std: float, rng) -> np.ndarray:
    """Received block at the relay, shape ``(eta_R, n)``.

    User ``l`` scales its unit-budget signal by ``sqrt(powers[l] / P)``.
    """
    H = as_matrix(H)
    X = np.asarray(xs, dtype=float)
    g = H * np.sqrt(np.asarray(powers, dtype=float) / P)[None, :]
    Y = g @ X
    if noise_std > 0:
        Y = Y + noise_std * rng.standard_normal(Y.shape)
    return Y


def relay_decode_combination(y, a, chain: LatticeChain, dithers, powers, H,
                             P: float, alpha=None) -> np.ndarray:
    """Decode ``[sum_l a_l t_l] mod coarse`` from the relay observation.

    The relay projects with the MMSE vector for ``a`` (unless ``alpha`` is
    given), removes the known dithers, quantises to the fine lattice and
    reduces modulo the coarse lattice. Returns the integer coordinates.
    """
    H = as_matrix(H)
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    a = np.asarray(a, dtype=float)
    if alpha is None:
        g = H * np.sqrt(np.asarray(powers, dtype=float) / P)[None, :]
        alpha = optimal_preprocessing(g, a[None, :], P)[0]
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    s = alpha @ Y - a @ np.asarray(dithers, dtype=float)
    lam = chain.mod_coarse(chain.quantize_fine(s))
    return chain.coords(lam)


def inverse_mod(rows, q: int) -> list[list[int]]:
    """Inverse of a square integer matrix over ``Z_q`` via the adjugate."""
    A = [list(map(int, r)) for r in rows]
    n = len(A)
    det = integer_det(A)
    try:
        det_inv = pow(det % q, -1, q)
    except ValueError:
        raise UnrecoverableError(
            f"matrix with determinant {det} is singular modulo {q}") from None
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(A) if k != i]
            cof = (-1) ** (i + j) * (integer_det(minor) if minor else 1)
            adj[j][i] = cof
    return [[(det_inv * adj[i][j]) % q for j in range(n)] for i in range(n)]


def user_recover(A_rows, decoded, own_coords, user: int, q: int) -> np.ndarray:
    """Solve ``A_l T = Y_l`` over ``Z_q`` for all users' codeword coordinates.

    ``A_rows`` are the ``L - 1`` combinations, ``decoded`` their decoded
    coordinates (``(L-1) x n``) and ``own_coords`` the coordinates of this
    user's own codeword. Returns an ``L x n`` array.
    """
    A_rows = [list(map(int, r)) for r in A_rows]
    L = len(A_rows) + 1
    if not 0 <= user < L:
        raise InvalidArgumentError(f"user index {user} out of range")
    e = [1 if j == user else 0 for j in range(L)]
    inv = np.array(inverse_mod(A_rows + [e], q), dtype=np.int64)
    Yt = np.vstack([np.atleast_2d(np.asarray(decoded, dtype=np.int64)),
                    np.asarray(own_coords, dtype=np.int64)[None, :]])
    return np.mod(inv @ Yt, q)


def noiseless_round_trip(chain: LatticeChain, A_rows, rng) -> bool:
    """Encode random codewords, decode every row of ``A`` and let each user
    solve for the others. True when every user recovers every codeword."""
    A = np.atleast_2d(np.asarray(A_rows, dtype=np.int64))
    L = A.shape[1]
    C = rng.integers(0, chain.q, size=(L, chain.n))
    T = np.vstack([chain.codeword(c) for c in C])
    U = np.vstack([draw_dither(chain, rng) for _ in range(L)])
    X = chain.mod_coarse(T + U)
    powers = np.full(L, chain.P)
    decoded = []
    for a in A:
        y = transmit(a[None, :], X, powers, chain.P, 0.0, rng)
        decoded.append(relay_decode_combination(y, a, chain, U, powers, a[None, :],
                                                chain.P, alpha=[1.0]))
    truth = np.mod(C, chain.q)
    return all(np.array_equal(user_recover(A, decoded, C[l], l, chain.q), truth)
               for l in range(L))


def threshold_power(h, a, rate: float, lo: float = 1e-6, hi: float = 1e12) -> float:
    """Smallest common power at which combination ``a`` reaches ``rate`` bits."""
    def r(p):
        return computation_rate(h, a, p)

    if r(hi) < rate:
        raise InvalidArgumentError(f"combination {a} never reaches rate {rate}")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if r(mid) >= rate:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1 + 1e-12:
            break
    return hi


@dataclass(frozen=True)
class CodecTrialResult:
    snr_db: float
    q: int
    n: int
    L: int
    a: tuple
    trials: int
    errors: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials


def combination_error_rate(h, a, chain: LatticeChain, trials: int,
                           base_seed: int = 0, powers=None) -> CodecTrialResult:
    """Monte Carlo rate of wrong combination decodes at the relay.

    Trial ``i`` uses its own generator seeded with ``base_seed ^ i``. The
    noise has unit variance; the chain's ``P`` is the users' power budget.
    """
    H = as_matrix(h)
    L = H.shape[1]
    a = np.asarray(a, dtype=np.int64)
    powers = np.full(L, chain.P) if powers is None else np.asarray(powers, dtype=float)
    g = H * np.sqrt(powers / chain.P)[None, :]
    alpha = optimal_preprocessing(g, a[None, :].astype(float), chain.P)[0]
    errors = 0
    for i in range(trials):
        rng = np.random.default_rng(base_seed ^ i)
        C = rng.integers(0, chain.q, size=(L, chain.n))
        T = np.vstack([chain.codeword(c) for c in C])
        U = rng.uniform(-chain.coarse_scale / 2, chain.coarse_scale / 2, size=(L, chain.n))
        X = chain.mod_coarse(T + U)
        Y = transmit(H, X, powers, chain.P, 1.0, rng)
        got = relay_decode_combination(Y, a, chain, U, powers, H, chain.P, alpha=alpha)
        if not np.array_equal(got, np.mod(a @ C, chain.q)):
            errors += 1
    snr_db = 10 * math.log10(chain.P)
    return CodecTrialResult(snr_db, chain.q, chain.n, L, tuple(int(x) for x in a),
                            trials, errors)


CODEC_HEADER = ("snr_db", "q", "n", "L", "a", "error_rate")


def codec_results_to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CODEC_HEADER)
    for r in results:
        w.writerow((r.snr_db, r.q, r.n, r.L, " ".join(map(str, r.a)), r.error_rate))
    return buf.getvalue()
