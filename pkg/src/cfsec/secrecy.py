"""Achievable weak-secrecy rates under compute-and-forward.

The per-user secrecy rate is the excess of the common computation sum rate
over the relay's MAC sum capacity, shared equally among the ``L`` users:
``R_s = max(0, (L R_CF - C_sum) / L)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .capacity import downlink_multicast_rate, mac_sum_capacity
from .channel import PowerAllocation, PowerBudget, as_matrix, effective_channel
from .coeff_search import best_coefficient_matrix
from .errors import InvalidArgumentError

LOG2E = float(np.log2(np.e))
LEAKAGE_MODES = ("budget", "allocated")


@dataclass(frozen=True)
class RateReport:
    r_cf: float
    mac_sum: float
    per_user_secrecy: float
    coefficient_matrix: tuple
    allocation: tuple
    downlink_rate: float
    n_users: int
    feasible: bool = True
    leakage: str = "budget"
    mac_sum_allocated: float = float("nan")

    @property
    def sum_secrecy(self) -> float:
        return self.n_users * self.per_user_secrecy

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coefficient_matrix"] = [list(r) for r in self.coefficient_matrix]
        d["allocation"] = list(self.allocation)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def secrecy_objective(r_cf: float, mac_sum: float, L: int) -> float:
    """Per-user secrecy rate from the common computation rate and MAC sum capacity."""
    return float(max(0.0, (L * r_cf - mac_sum) / L))


def secrecy_rate(H, budget: PowerBudget, alloc: PowerAllocation | None = None, *,
                 literal: bool = False, leakage: str = "budget",
                 with_downlink: bool = True) -> RateReport:
    """Secrecy rate report for channel ``H`` under per-user powers ``alloc``.

    ``alloc`` defaults to full power. ``literal=True`` drops the 1/2 in the
    computation rate as printed in the SISO/MISO corollaries.

    ``leakage`` selects the MAC sum-capacity term subtracted from ``L R_CF``.
    ``"budget"`` (default) evaluates it with every user at the full budget
    ``P``; it bounds the relay's observation for any allocation ``P_l <= P``.
    ``"allocated"`` evaluates it on the effective channel with the allocated
    powers, which is tighter but makes power control trade computation rate
    against leakage. ``mac_sum_allocated`` is reported either way.
    """
    H = as_matrix(H)
    L = H.shape[1]
    if L < 2:
        raise InvalidArgumentError("need at least 2 users")
    if leakage not in LEAKAGE_MODES:
        raise InvalidArgumentError(f"leakage must be one of {LEAKAGE_MODES}")
    if alloc is None:
        alloc = PowerAllocation.full(L, budget.P)
    elif not isinstance(alloc, PowerAllocation):
        alloc = PowerAllocation(tuple(alloc))
    alloc.check(budget, L)
    # rates are relative to the noise floor
    scaled = tuple(p / budget.noise_variance for p in alloc.powers)
    H_eff = effective_channel(H, scaled)
    search = best_coefficient_matrix(H_eff, 1.0)
    r_cf = search.rate * (2.0 if literal else 1.0)
    c_alloc = mac_sum_capacity(H_eff)
    if leakage == "allocated":
        c_sum = c_alloc
    else:
        c_sum = mac_sum_capacity(H * np.sqrt(budget.snr))
    downlink = downlink_multicast_rate(H, budget.snr) if with_downlink else float("nan")
    return RateReport(
        r_cf=float(r_cf),
        mac_sum=float(c_sum),
        per_user_secrecy=secrecy_objective(r_cf, c_sum, L),
        coefficient_matrix=search.A,
        allocation=alloc.powers,
        downlink_rate=float(downlink),
        n_users=L,
        feasible=search.feasible,
        leakage=leakage,
        mac_sum_allocated=float(c_alloc),
    )


def twoway_jammer_rate(h1: float, h2: float, P: float) -> float:
    """Secrecy rate of user 1 when user 2 acts as a cooperative jammer.

    ``R_CF - 1/2 log2(1 + h1^2 P / (1 + h2^2 P))`` clamped at zero, with
    ``R_CF`` from the best coefficient vector for ``(h1 sqrt(P), h2 sqrt(P))``.
    """
    if not P > 0:
        raise InvalidArgumentError("power must be positive")
    h_eff = np.sqrt(P) * np.array([[h1, h2]], dtype=float)
    r_cf = best_coefficient_matrix(h_eff, 1.0).rate
    leak = 0.5 * np.log2(1 + h1 * h1 * P / (1 + h2 * h2 * P))
    return max(0.0, float(r_cf - leak))


@dataclass(frozen=True)
class TwoWayBaselines:
    P: float
    r_cf_total: float
    r_s_cf: float
    r_s_hs: float
    r_s_ks: float
    r_s_kp: float

    def ordered(self) -> bool:
        return (self.r_cf_total >= self.r_s_cf >= self.r_s_hs
                >= self.r_s_ks >= self.r_s_kp >= 0.0)

    def row(self) -> tuple:
        return (self.P, self.r_cf_total, self.r_s_cf, self.r_s_hs, self.r_s_ks, self.r_s_kp)


def baseline_rates(P: float) -> TwoWayBaselines:
    """Two-way relay rates for ``h = (1, 1)``: our scheme vs. literature schemes.

    HS is the He-Yener weak-secrecy rate; KP and KS are the Kashyap et al.
    perfect- and strong-secrecy rates.
    """
    if not P > 0:
        raise InvalidArgumentError("power must be positive")
    cf = 0.5 * np.log2(0.5 + P)
    return TwoWayBaselines(
        P=float(P),
        r_cf_total=max(0.0, float(cf)),
        r_s_cf=twoway_jammer_rate(1.0, 1.0, P),
        r_s_hs=max(0.0, float(cf - 1.0)),
        r_s_ks=max(0.0, float(cf - np.log2(2 * np.e))),
        r_s_kp=max(0.0, float(0.5 * np.log2(P) - 1.0 - LOG2E)),
    )


BASELINE_HEADER = ("P", "R_CF", "R_s_CF", "R_s_HS", "R_s_KS", "R_s_KP")


def baselines_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BASELINE_HEADER)
    for b in rows:
        w.writerow(b.row())
    return buf.getvalue()
