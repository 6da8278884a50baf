import pytest

from lphedge.amm_math import ConcentratedPosition, UniformPosition

# Table 2 (uniform, ETH/USDT) and Table 3 (concentrated, WBTC/USDC) deposits
ETH_ENTRY, ETH_A, ETH_B = 1613.68, 143.78, 232015.77
BTC_ENTRY, BTC_LOWER, BTC_UPPER, BTC_A, BTC_B = 23776.00, 18050.17, 40089.53, 19.94, 265132.51

ACCEPTANCE_LINES = []


@pytest.fixture
def eth_position():
    return UniformPosition.from_deposit(ETH_ENTRY, ETH_A, ETH_B)


@pytest.fixture
def btc_position():
    return ConcentratedPosition.from_deposit(BTC_ENTRY, BTC_LOWER, BTC_UPPER, BTC_A, BTC_B)


@pytest.fixture
def toy_position():
    # liquidity 10 on [1, 4] entered at 2.25: deposit (5/3, 5)
    return ConcentratedPosition(2.25, 1.0, 4.0, 10 * 0.5 / 3.0, 5.0, 10.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
