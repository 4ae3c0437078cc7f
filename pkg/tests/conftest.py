import numpy as np
import pytest

from kellytree import KoParams, MarketParams, OptionContract


@pytest.fixture
def mild_market() -> MarketParams:
    # u = 1.5, d = 1/u, the well-specified simulation setting
    return MarketParams(u=1.5, d=2.0 / 3.0, p=0.5, R=1.05)


@pytest.fixture
def wide_market() -> MarketParams:
    # u = 2, d = 1/u, the misspecification-sweep setting
    return MarketParams(u=2.0, d=0.5, p=0.5, R=1.05)


@pytest.fixture
def itm_contract(wide_market) -> OptionContract:
    return OptionContract.from_market(wide_market, S0=100.0, K0=110.0)


@pytest.fixture
def otm_contract(wide_market) -> OptionContract:
    return OptionContract.from_market(wide_market, S0=100.0, K0=91.0)


@pytest.fixture
def itm_ko(wide_market, itm_contract) -> KoParams:
    return KoParams.from_contract(wide_market, itm_contract)


def random_admissible_market(rng: np.random.Generator) -> MarketParams:
    d = rng.uniform(0.3, 0.95)
    u = rng.uniform(1.1, 3.0)
    R = d + rng.uniform(0.1, 0.7) * (u - d)
    return MarketParams(u=u, d=d, p=rng.uniform(0.1, 0.9), R=R)


def random_admissible_contract(rng: np.random.Generator, mkt: MarketParams) -> OptionContract:
    S0 = rng.uniform(50.0, 150.0)
    K0 = S0 * (mkt.d + rng.uniform(0.05, 0.95) * (mkt.u - mkt.d))
    return OptionContract.from_market(mkt, S0=S0, K0=K0)
