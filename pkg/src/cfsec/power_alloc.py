"""Grid search over per-user transmit powers for the secrecy objective.

The objective is non-convex, and lowering the power of a strong user can
raise the secrecy rate, so powers are searched exhaustively on a grid and
then refined around the best point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import PowerAllocation, PowerBudget, as_matrix
from .errors import InvalidArgumentError
from .capacity import mac_sum_capacity
from .coeff_search import best_coefficient_matrix
from .secrecy import LEAKAGE_MODES, secrecy_objective, secrecy_rate

MAX_USERS = 4
MAX_GRID_POINTS = 10**7
TIE_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    coarse_step: float = 0.1
    refine_levels: int = 0
    min_power: float | None = None  # defaults to 0.1 * P

    def __post_init__(self):
        if not self.coarse_step > 0:
            raise InvalidArgumentError("coarse_step must be positive")
        if self.refine_levels < 0:
            raise InvalidArgumentError("refine_levels must be >= 0")
        if self.min_power is not None and not self.min_power > 0:
            raise InvalidArgumentError("min_power must be positive")

    def lower(self, P: float) -> float:
        lo = 0.1 * P if self.min_power is None else self.min_power
        if lo > P:
            raise InvalidArgumentError(f"min_power {lo} exceeds budget {P}")
        return lo


def power_levels(lo: float, hi: float, step: float) -> list[float]:
    """``lo, lo + step, ...`` up to ``hi``, always ending exactly at ``hi``."""
    n = int(np.floor((hi - lo) / step + 1e-9))
    levels = [lo + k * step for k in range(n + 1)]
    if hi - levels[-1] > 1e-9 * max(1.0, hi):
        levels.append(hi)
    else:
        levels[-1] = hi
    return levels


class _Objective:
    """Memoised per-user secrecy objective keyed by the (quantised) allocation."""

    def __init__(self, H, budget, literal=False, leakage="budget"):
        if leakage not in LEAKAGE_MODES:
            raise InvalidArgumentError(f"leakage must be one of {LEAKAGE_MODES}")
        self.H, self.budget = H, budget
        self.literal, self.leakage = literal, leakage
        self.L = H.shape[1]
        self.c_budget = mac_sum_capacity(H * np.sqrt(budget.snr))
        self.cache: dict = {}

    def __call__(self, powers: tuple) -> float:
        key = tuple(round(p, 12) for p in powers)
        val = self.cache.get(key)
        if val is None:
            H_eff = self.H * np.sqrt(np.asarray(powers) / self.budget.noise_variance)
            r_cf = best_coefficient_matrix(H_eff, 1.0).rate * (2.0 if self.literal else 1.0)
            c = self.c_budget if self.leakage == "budget" else mac_sum_capacity(H_eff)
            val = secrecy_objective(r_cf, c, self.L)
            self.cache[key] = val
        return val

    @property
    def evaluations(self) -> int:
        return len(self.cache)


def _preferred(value, powers, best_value, best_powers) -> bool:
    # larger objective; then larger total power; then lexicographically smaller
    if best_powers is None or value > best_value + TIE_TOL:
        return True
    if value < best_value - TIE_TOL:
        return False
    tot, best_tot = sum(powers), sum(best_powers)
    if tot > best_tot + 1e-12:
        return True
    if tot < best_tot - 1e-12:
        return False
    return powers < best_powers


def _scan(objective, axes):
    best_v, best_p = None, None
    for powers in itertools.product(*axes):
        v = objective(powers)
        if _preferred(v, powers, best_v, best_p):
            best_v, best_p = v, powers
    return best_v, best_p


def optimize_power(H, budget: PowerBudget, grid: GridSpec | None = None,
                   return_trace: bool = False, literal: bool = False,
                   leakage: str = "budget", with_downlink: bool = True):
    """Best per-user power allocation on a grid in ``[min_power, P]^L``.

    Returns ``(PowerAllocation, RateReport)``; with ``return_trace=True`` a
    third element lists the best objective after the coarse pass and after
    each refinement level. ``literal`` and ``leakage`` select the objective
    as in :func:`secrecy_rate`.
    """
    grid = grid or GridSpec()
    H = as_matrix(H)
    L = H.shape[1]
    if L > MAX_USERS:
        raise InvalidArgumentError(f"exhaustive power grid supports at most {MAX_USERS} users")
    P = budget.P
    lo = grid.lower(P)
    levels = power_levels(lo, P, grid.coarse_step)
    if len(levels) ** L > MAX_GRID_POINTS:
        raise InvalidArgumentError(
            f"power grid has {len(levels) ** L} points (limit {MAX_GRID_POINTS})")
    objective = _Objective(H, budget, literal=literal, leakage=leakage)
    best_v, best_p = _scan(objective, [levels] * L)
    trace = [best_v]
    step = grid.coarse_step
    for _ in range(grid.refine_levels):
        fine = step / 10.0
        axes = []
        for p in best_p:
            ax = [p + k * fine for k in range(-10, 11)]
            ax = [min(max(x, lo), P) for x in ax]
            axes.append(sorted(set(ax)))
        v, pp = _scan(objective, axes)
        # the incumbent lies on the refined grid, so this never decreases
        if _preferred(v, pp, best_v, best_p):
            best_v, best_p = v, pp
        trace.append(best_v)
        step = fine
    alloc = PowerAllocation(best_p)
    report = secrecy_rate(H, budget, alloc, literal=literal, leakage=leakage,
                          with_downlink=with_downlink)
    if return_trace:
        return alloc, report, trace
    return alloc, report
