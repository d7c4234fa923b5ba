"""Channel matrices, power budgets and effective channels.

All channels are real valued. A channel matrix has one row per relay antenna
and one column per user, so ``H[i, j]`` is the gain from user ``j`` to relay
antenna ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError


def as_matrix(H) -> np.ndarray:
    """Coerce ``H`` (ChannelMatrix, nested list or array) to a 2-D float array."""
    if isinstance(H, ChannelMatrix):
        return H.entries
    arr = np.asarray(H, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidArgumentError(f"channel must be a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("channel entries must be finite")
    return arr


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2:
            raise InvalidArgumentError(f"channel must be a matrix, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise InvalidArgumentError(
                f"need at least 1 relay antenna and 2 users, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("channel entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]

    @property
    def n_users(self) -> int:
        return self.entries.shape[1]

    def tolist(self) -> list:
        return self.entries.tolist()


@dataclass(frozen=True)
class PowerBudget:
    P: float
    noise_variance: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.P) and self.P > 0):
            raise InvalidArgumentError(f"power budget must be positive, got {self.P}")
        if not (np.isfinite(self.noise_variance) and self.noise_variance > 0):
            raise InvalidArgumentError(
                f"noise variance must be positive, got {self.noise_variance}")

    @classmethod
    def from_snr_db(cls, snr_db: float, noise_variance: float = 1.0) -> "PowerBudget":
        """Budget with ``P / noise_variance`` equal to ``snr_db`` decibels."""
        return cls(noise_variance * 10.0 ** (snr_db / 10.0), noise_variance)

    @property
    def snr(self) -> float:
        return self.P / self.noise_variance


@dataclass(frozen=True)
class PowerAllocation:
    powers: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in np.ravel(self.powers))
        if len(p) < 1 or not all(np.isfinite(x) and x > 0 for x in p):
            raise InvalidArgumentError(f"powers must be positive, got {p}")
        object.__setattr__(self, "powers", p)

    @classmethod
    def full(cls, L: int, P: float) -> "PowerAllocation":
        return cls((P,) * L)

    def check(self, budget: PowerBudget, L: int | None = None) -> None:
        if L is not None and len(self.powers) != L:
            raise InvalidArgumentError(
                f"allocation has {len(self.powers)} entries, channel has {L} users")
        # small slack so grid points computed as min + k*step still count as <= P
        if max(self.powers) > budget.P * (1 + 1e-12):
            raise InvalidArgumentError(
                f"allocation {self.powers} exceeds power budget {budget.P}")

    def __len__(self):
        return len(self.powers)


@dataclass(frozen=True)
class MisoUserChannels:
    """Per-user transmit-antenna channel vectors towards a single-antenna relay."""
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(np.atleast_1d(np.asarray(v, dtype=float)) for v in self.vectors)
        for v in vecs:
            if v.ndim != 1 or v.size < 1 or not np.all(np.isfinite(v)):
                raise InvalidArgumentError("each user channel must be a finite vector")
        object.__setattr__(self, "vectors", vecs)


def effective_channel(H, alloc: PowerAllocation | Sequence[float]) -> np.ndarray:
    """Scale column ``l`` of ``H`` by ``sqrt(powers[l])``."""
    H = as_matrix(H)
    powers = alloc.powers if isinstance(alloc, PowerAllocation) else tuple(np.ravel(alloc))
    if len(powers) != H.shape[1]:
        raise InvalidArgumentError(
            f"allocation length {len(powers)} does not match {H.shape[1]} users")
    return H * np.sqrt(np.asarray(powers, dtype=float))[None, :]


def miso_collapse(users: MisoUserChannels | Sequence) -> np.ndarray:
    """Reduce a MISO instance to an equivalent 1 x L SISO channel.

    With maximum ratio transmission each user beamforms along its own channel
    vector, so the scalar gain seen by the relay is the vector's norm.
    """
    if not isinstance(users, MisoUserChannels):
        if users is None or len(users) == 0:
            raise InvalidArgumentError("need at least one user channel")
        users = MisoUserChannels(tuple(users))
    if len(users.vectors) < 2:
        raise InvalidArgumentError("MISO collapse needs at least 2 users")
    return np.array([[float(np.linalg.norm(v)) for v in users.vectors]])


def parse_channel_json(text: str) -> tuple[ChannelMatrix, PowerBudget]:
    """Parse ``{"H": [[...]], "P": float, "noise_var": float}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"malformed channel JSON: {exc}") from exc
    if not isinstance(doc, dict) or "H" not in doc:
        raise InvalidArgumentError("channel JSON must be an object with key 'H'")
    H = ChannelMatrix(doc["H"])
    budget = PowerBudget(float(doc.get("P", 1.0)), float(doc.get("noise_var", 1.0)))
    return H, budget


def channel_to_json(H, budget: PowerBudget) -> str:
    return json.dumps({"H": as_matrix(H).tolist(), "P": budget.P,
                       "noise_var": budget.noise_variance})
