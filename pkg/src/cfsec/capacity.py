"""MAC capacities at the relay and the relay's downlink multicast rate."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .channel import as_matrix
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class RegionBoundary:
    """Two-user MAC pentagon; vertices sorted by R1."""
    vertices: tuple
    sum_capacity: float
    user_capacities: tuple

    def contains(self, r1: float, r2: float, tol: float = 0.0) -> bool:
        c1, c2 = self.user_capacities
        return (r1 <= c1 + tol and r2 <= c2 + tol
                and r1 + r2 <= self.sum_capacity + tol)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["R1", "R2"])
        w.writerows(self.vertices)
        return buf.getvalue()


def mac_sum_capacity(H_eff) -> float:
    """``1/2 log2 det(I + H H^T)`` for a channel with powers folded in."""
    H = as_matrix(H_eff)
    sign, logdet = np.linalg.slogdet(np.eye(H.shape[0]) + H @ H.T)
    return 0.5 * logdet / np.log(2.0)


def mac_region_2user(h_eff) -> RegionBoundary:
    h = as_matrix(h_eff)
    if h.shape != (1, 2):
        raise InvalidArgumentError(f"two-user region needs a 1 x 2 channel, got {h.shape}")
    g1, g2 = h[0] ** 2
    c1 = 0.5 * np.log2(1 + g1)
    c2 = 0.5 * np.log2(1 + g2)
    cs = 0.5 * np.log2(1 + g1 + g2)
    pts = [(0.0, 0.0), (0.0, c2), (cs - c2, c2), (c1, cs - c1), (c1, 0.0)]
    verts = []
    for p in pts:
        p = (float(p[0]), float(p[1]))
        if not verts or not np.allclose(p, verts[-1], atol=1e-15):
            if p not in verts:
                verts.append(p)
    return RegionBoundary(tuple(verts), float(cs), (float(c1), float(c2)))


def _multicast_ascent(Hc: np.ndarray, w: np.ndarray, iters: int) -> tuple[float, np.ndarray]:
    # maximise min_l |w^T h_l| on the unit sphere by projected subgradient steps
    best = float(np.min(np.abs(w @ Hc)))
    best_w = w
    scale = float(np.max(np.linalg.norm(Hc, axis=0))) or 1.0
    for k in range(iters):
        g = w @ Hc
        l = int(np.argmin(np.abs(g)))
        step = 0.5 / (scale * np.sqrt(k + 1.0))
        w = w + step * np.sign(g[l] or 1.0) * Hc[:, l]
        w = w / np.linalg.norm(w)
        val = float(np.min(np.abs(w @ Hc)))
        if val > best:
            best, best_w = val, w
    return best, best_w


def downlink_multicast_rate(H, P: float, starts: int = 64, iters: int = 200,
                            seed: int = 0) -> float:
    """Max-min multicast rate from the relay to all users.

    For a single relay antenna this is the weakest user's point-to-point rate.
    With several antennas a deterministic multi-start projected ascent over
    unit-norm beamformers is used (the problem is NP-hard in general).
    """
    H = as_matrix(H)
    if not (P > 0):
        raise InvalidArgumentError("power must be positive")
    if H.shape[0] == 1:
        return float(np.min(0.5 * np.log2(1 + P * H[0] ** 2)))
    eta = H.shape[0]
    sob = qmc.Sobol(d=eta, scramble=True, seed=seed).random(starts)
    inits = [2 * s - 1 for s in sob]
    inits += [H[:, l] for l in range(H.shape[1])] + [H.sum(axis=1)]
    best = 0.0
    for w0 in inits:
        nrm = np.linalg.norm(w0)
        if nrm == 0:
            continue
        val, _ = _multicast_ascent(H, w0 / nrm, iters)
        best = max(best, val)
    return float(0.5 * np.log2(1 + P * best ** 2))
