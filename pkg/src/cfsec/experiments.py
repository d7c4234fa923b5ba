"""Monte Carlo studies and parameter sweeps behind the reported rates and histograms.

Every stochastic trial draws from its own generator seeded with
``base_seed ^ trial_index``, so results do not depend on how trials are
split across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .capacity import mac_region_2user, mac_sum_capacity
from .channel import PowerAllocation, PowerBudget, as_matrix, effective_channel, miso_collapse
from .coeff_search import admissible, enumerate_candidates
from .errors import InvalidArgumentError
from .power_alloc import GridSpec, optimize_power
from .secrecy import LEAKAGE_MODES, baseline_rates, secrecy_rate

ANTENNA_CONFIGS = ("siso", "miso", "simo")


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 1000
    snr_db: float = 5.0
    L: int = 2
    antenna_config: str = "siso"
    n_antennas: int = 2  # eta_T for miso, eta_R for simo
    power_opt: bool = False
    base_seed: int = 0
    grid_step: float = 0.1
    refine_levels: int = 0
    leakage: str = "budget"
    literal: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgumentError("trials must be >= 1")
        if self.L < 2:
            raise InvalidArgumentError("need at least 2 users")
        if self.antenna_config not in ANTENNA_CONFIGS:
            raise InvalidArgumentError(
                f"antenna_config must be one of {ANTENNA_CONFIGS}, got {self.antenna_config!r}")
        if self.n_antennas < 1:
            raise InvalidArgumentError("n_antennas must be >= 1")
        if self.leakage not in LEAKAGE_MODES:
            raise InvalidArgumentError(f"leakage must be one of {LEAKAGE_MODES}")
        if not 0 <= self.base_seed < 2**64:
            raise InvalidArgumentError("base_seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, d: dict) -> "MonteCarloConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise InvalidArgumentError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    secrecy: float
    r_cf: float
    mac_sum: float
    allocation: tuple


@dataclass(frozen=True)
class MonteCarloResult:
    config: MonteCarloConfig
    positive_fraction: float
    mean_secrecy_rate: float
    records: tuple = field(repr=False)

    @property
    def std_error(self) -> float:
        p, n = self.positive_fraction, len(self.records)
        return math.sqrt(p * (1 - p) / n)

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("trial", "secrecy", "r_cf", "mac_sum", "allocation"))
        for r in self.records:
            w.writerow((r.index, repr(r.secrecy), repr(r.r_cf), repr(r.mac_sum),
                        " ".join(repr(p) for p in r.allocation)))
        return buf.getvalue()


def draw_channel(cfg: MonteCarloConfig, rng) -> np.ndarray:
    """One i.i.d. N(0, 1) channel realisation for the configured antenna setup."""
    if cfg.antenna_config == "siso":
        return rng.standard_normal((1, cfg.L))
    if cfg.antenna_config == "miso":
        return miso_collapse(list(rng.standard_normal((cfg.L, cfg.n_antennas))))
    return rng.standard_normal((cfg.n_antennas, cfg.L))


def run_trial(cfg: MonteCarloConfig, index: int) -> TrialRecord:
    rng = np.random.default_rng(cfg.base_seed ^ index)
    H = draw_channel(cfg, rng)
    budget = PowerBudget.from_snr_db(cfg.snr_db)
    if cfg.power_opt:
        grid = GridSpec(cfg.grid_step, cfg.refine_levels)
        _, rep = optimize_power(H, budget, grid, literal=cfg.literal,
                                leakage=cfg.leakage, with_downlink=False)
    else:
        rep = secrecy_rate(H, budget, literal=cfg.literal, leakage=cfg.leakage,
                           with_downlink=False)
    return TrialRecord(index, rep.per_user_secrecy, rep.r_cf, rep.mac_sum, rep.allocation)


def _run_chunk(args):
    cfg, indices = args
    return [run_trial(cfg, i) for i in indices]


def worker_count(requested: int | None = None) -> int:
    """Worker processes to use; ``CFSEC_THREADS`` caps the count."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("CFSEC_THREADS")
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise InvalidArgumentError(f"CFSEC_THREADS must be an integer, got {cap!r}")
    return max(1, n)


def monte_carlo_positive_fraction(cfg: MonteCarloConfig,
                                  workers: int | None = None) -> MonteCarloResult:
    """Fraction of random channels with positive secrecy rate, and the mean rate."""
    n = worker_count(workers)
    idx = list(range(cfg.trials))
    if n == 1 or cfg.trials < 2 * n:
        records = _run_chunk((cfg, idx))
    else:
        chunks = [(cfg, idx[k::n]) for k in range(n)]
        with ProcessPoolExecutor(max_workers=n) as pool:
            records = [r for part in pool.map(_run_chunk, chunks) for r in part]
        records.sort(key=lambda r: r.index)
    positive = sum(1 for r in records if r.secrecy > 0.0)
    mean = math.fsum(r.secrecy for r in records) / len(records)
    return MonteCarloResult(cfg, positive / len(records), mean, tuple(records))


CURVE_HEADER = ("P", "R_CF", "R_s_CF", "R_s_HS", "R_s_KS", "R_s_KP")


def power_rate_curve(P_grid) -> list[tuple]:
    """Rows ``(P, R_CF, R_s^CF, R_s^HS, R_s^KS, R_s^KP)`` for ``h = (1, 1)``."""
    P_grid = list(P_grid)
    if not P_grid or any(not p > 0 for p in P_grid):
        raise InvalidArgumentError("power grid must be nonempty and positive")
    return [baseline_rates(float(p)).row() for p in P_grid]


def primitive_direction(a) -> tuple:
    g = math.gcd(*[abs(int(x)) for x in a])
    return tuple(int(x) // g for x in a)


def rate_region_sweep(h, P: float, allocations: dict | None = None,
                      optimize: bool = False, grid: GridSpec | None = None,
                      leakage: str = "budget") -> dict:
    """MAC pentagon plus the symmetric rate point of every candidate ``a``.

    ``allocations`` maps labels to power tuples; full power is always
    included. With ``optimize=True`` the grid-optimal allocation is added
    under the label ``"optimized"``.
    """
    H = as_matrix(h)
    if H.shape != (1, 2):
        raise InvalidArgumentError("rate region sweep needs a two-user SISO channel")
    budget = PowerBudget(P)
    allocs = {"full": (P, P)}
    allocs.update(allocations or {})
    if optimize:
        alloc, _ = optimize_power(H, budget, grid, leakage=leakage, with_downlink=False)
        allocs["optimized"] = alloc.powers
    out = {}
    for label, powers in allocs.items():
        PowerAllocation(powers).check(budget, 2)
        H_eff = effective_channel(H, powers)
        region = mac_region_2user(H_eff)
        points = []
        for a, r in enumerate_candidates(H_eff, 1.0):
            points.append({"a": list(a), "rate": r,
                           "outside": bool(2 * r > region.sum_capacity),
                           "admissible": admissible([a], 2)})
        out[label] = {"allocation": list(powers), "region": region,
                      "mac_sum": mac_sum_capacity(H_eff), "points": points}
    return out


def region_to_csv(sweep: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("allocation", "kind", "a", "R1", "R2", "outside", "admissible"))
    for label, d in sweep.items():
        for v in d["region"].vertices:
            w.writerow((label, "mac", "", v[0], v[1], "", ""))
        for p in d["points"]:
            w.writerow((label, "cf", " ".join(map(str, p["a"])), p["rate"], p["rate"],
                        int(p["outside"]), int(p["admissible"])))
    return buf.getvalue()


HISTOGRAM_HEADER = ("L", "snr_db", "antenna_config", "n_antennas", "power_opt",
                    "positive_fraction", "mean_secrecy_rate", "std_error")


def histogram_sweep(L_values, snr_values, configs, trials: int = 1000,
                    base_seed: int = 0, power_opt: bool = False,
                    n_antennas: int = 2, workers: int | None = None, **cfg_kw) -> list[tuple]:
    """Positive-secrecy fraction and mean rate for every (L, SNR, antenna config)."""
    rows = []
    for L in L_values:
        for snr in snr_values:
            for ac in configs:
                cfg = MonteCarloConfig(trials=trials, snr_db=snr, L=L, antenna_config=ac,
                                       n_antennas=n_antennas, power_opt=power_opt,
                                       base_seed=base_seed, **cfg_kw)
                res = monte_carlo_positive_fraction(cfg, workers)
                rows.append((L, snr, ac, n_antennas, power_opt, res.positive_fraction,
                             res.mean_secrecy_rate, res.std_error))
    return rows


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def manifest(command: str, config: dict, outputs: list[str]) -> str:
    return json.dumps({"tool": "cfsec", "version": __version__, "command": command,
                       "config": config, "outputs": outputs}, indent=2, sort_keys=True)
