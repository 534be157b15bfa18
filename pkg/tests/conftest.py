import pytest

from zigzag_ctap import ChainSpec, DriveProtocol, TransferConfig, run_transfer

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref_chain():
    return ChainSpec(n_sites=19, j_nn=1.0, j_nnn=0.0, a=1.0, b=1.0)


@pytest.fixture(scope="session")
def ref_protocol():
    # w/J = 10, JT = 60, tau/T = 0.5, delay/tau = 0.85
    return DriveProtocol(omega=10.0, tau=30.0, delay=25.5, t_half=60.0)


@pytest.fixture(scope="session")
def ref_config(ref_chain, ref_protocol):
    return TransferConfig(ref_chain, ref_protocol, model="full")


@pytest.fixture(scope="session")
def ref_run(ref_config):
    return run_transfer(ref_config)


@pytest.fixture(scope="session")
def ref_effective_run(ref_config):
    return run_transfer(ref_config.replace(model="effective"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
