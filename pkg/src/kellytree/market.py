"""Binomial market model.

A stock moves up by a factor ``u`` or down by a factor ``d`` each period
while a bond compounds at the gross rate ``R``, with ``0 < d < R < u`` so
the market is arbitrage-free.  This module holds the believed and realized
parameter sets, the one-period put pricing formula, the rolling-strike
mechanism that keeps strike/price ratios stationary, and seeded Bernoulli
path generation.

Path generation uses the counter-based Philox bit generator keyed by
``(seed, stream)`` so that path ``i`` of ``N`` is reproducible on its own,
independent of execution order or parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ParameterError

__all__ = [
    "Move",
    "UP",
    "DOWN",
    "MarketParams",
    "RealizedMarket",
    "OptionContract",
    "PricePath",
    "put_price",
    "roll_strike",
    "generate_path",
]


class Move(IntEnum):
    """One-period stock outcome."""

    DOWN = 0
    UP = 1


UP = Move.UP
DOWN = Move.DOWN


@dataclass(frozen=True)
class MarketParams:
    """Believed binomial parameters used for optimization and pricing.

    Attributes
    ----------
    u : float
        Up factor (> 0).
    d : float
        Down factor, with ``0 < d < u``.
    p : float
        Probability of an up move, strictly inside (0, 1).
    R : float
        Gross one-period bond return, with ``d < R < u`` (no arbitrage).
    """

    u: float
    d: float
    p: float
    R: float

    def __post_init__(self) -> None:
        if not (0.0 < self.d < self.u):
            raise ParameterError(f"need 0 < d < u, got d={self.d}, u={self.u}")
        if not (self.d < self.R < self.u):
            raise ParameterError(
                f"no-arbitrage requires d < R < u, got d={self.d}, R={self.R}, u={self.u}"
            )
        if not (0.0 < self.p < 1.0):
            raise ParameterError(f"up probability must lie in (0, 1), got p={self.p}")


@dataclass(frozen=True)
class RealizedMarket:
    """Realized up/down factors that drive simulated price paths."""

    u_m: float
    d_m: float

    def __post_init__(self) -> None:
        if not (0.0 < self.d_m < self.u_m):
            raise ParameterError(f"need 0 < d_m < u_m, got d_m={self.d_m}, u_m={self.u_m}")

    @classmethod
    def from_up_factor(cls, u_m: float) -> "RealizedMarket":
        """Build the reciprocal pair ``d_m = 1/u_m`` used in the sweeps."""
        if u_m <= 1.0:
            raise ParameterError(f"reciprocal construction needs u_m > 1, got {u_m}")
        return cls(u_m=u_m, d_m=1.0 / u_m)


def put_price(mkt: MarketParams, S0: float, K0: float) -> float:
    """Arbitrage-free price of a one-period put with strike ``K0``.

    Requires ``d*S0 <= K0 < u*S0``; outside this range the put would be
    exercised never or always advantage-free, so pricing is refused.  The
    price is zero exactly at ``K0 == d*S0`` and strictly positive above it.
    """
    if S0 <= 0.0:
        raise ParameterError(f"spot price must be positive, got S0={S0}")
    if K0 < mkt.d * S0 or K0 >= mkt.u * S0:
        raise ParameterError(
            f"strike must satisfy d*S0 <= K0 < u*S0, got K0={K0} with "
            f"bounds [{mkt.d * S0}, {mkt.u * S0})"
        )
    return (1.0 / mkt.R) * ((mkt.u - mkt.R) / (mkt.u - mkt.d)) * (K0 - mkt.d * S0)


@dataclass(frozen=True)
class OptionContract:
    """Spot, strike and derived put price of the rolling one-period put."""

    S0: float
    K0: float
    P0: float

    def __post_init__(self) -> None:
        if self.S0 <= 0.0 or self.K0 <= 0.0:
            raise ParameterError(f"prices must be positive, got S0={self.S0}, K0={self.K0}")
        if self.P0 <= 0.0:
            raise ParameterError(f"put price must be positive, got P0={self.P0}")

    @classmethod
    def from_market(cls, mkt: MarketParams, S0: float, K0: float) -> "OptionContract":
        """Price the put from the believed parameters.

        The strike must lie strictly inside ``(d*S0, u*S0)``: the replication
        results need a put that is exercised on exactly one branch.
        """
        if not (mkt.d * S0 < K0 < mkt.u * S0):
            raise ParameterError(
                f"strike must lie strictly inside (d*S0, u*S0) = "
                f"({mkt.d * S0}, {mkt.u * S0}), got K0={K0}"
            )
        return cls(S0=S0, K0=K0, P0=put_price(mkt, S0, K0))

    @property
    def moneyness(self) -> float:
        """Constant strike/spot ratio maintained by the rolling mechanism."""
        return self.K0 / self.S0

    @property
    def stock_to_put(self) -> float:
        """Constant spot/put ratio maintained by the rolling mechanism."""
        return self.S0 / self.P0


def roll_strike(K_prev: float, outcome: Move | int, mkt: MarketParams) -> float:
    """Roll the strike with the realized move: ``K*u`` on UP, ``K*d`` on DOWN.

    Along any path this keeps ``K_t / S_t`` equal to ``K_0 / S_0`` when the
    stock evolves with the same factors, which makes the per-period betting
    odds stationary.
    """
    if K_prev <= 0.0:
        raise ParameterError(f"strike must be positive, got {K_prev}")
    return K_prev * (mkt.u if outcome == Move.UP else mkt.d)


@dataclass(frozen=True, eq=False)
class PricePath:
    """A seeded sequence of up/down outcomes (1 = up)."""

    moves: np.ndarray
    seed: tuple[int, ...] = field(default=(0,))

    @property
    def n(self) -> int:
        return int(self.moves.shape[0])

    @property
    def up_count(self) -> int:
        return int(np.count_nonzero(self.moves))


def _philox_key(seed: int | tuple[int, ...]) -> np.ndarray:
    if isinstance(seed, (int, np.integer)):
        seed = (int(seed),)
    key = np.zeros(2, dtype=np.uint64)
    if len(seed) > 2:
        raise ParameterError(f"seed key takes at most two integers, got {len(seed)}")
    for i, s in enumerate(seed):
        key[i] = np.uint64(int(s) % (1 << 64))
    return key


def generate_path(mkt: MarketParams, n: int, seed: int | tuple[int, ...]) -> PricePath:
    """Draw ``n`` i.i.d. Bernoulli(p) outcomes from a Philox stream.

    ``seed`` may be a single integer or a ``(base_seed, stream)`` pair; the
    pair form is what the Monte Carlo engine uses to give every path its own
    independent, order-free stream.  The same seed always reproduces the same
    path bit-exactly.
    """
    if n < 1:
        raise ParameterError(f"path length must be >= 1, got n={n}")
    rng = np.random.Generator(np.random.Philox(key=_philox_key(seed)))
    moves = (rng.random(n) < mkt.p).astype(np.uint8)
    key = (seed,) if isinstance(seed, (int, np.integer)) else tuple(int(s) for s in seed)
    return PricePath(moves=moves, seed=key)
