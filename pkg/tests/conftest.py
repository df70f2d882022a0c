import pytest

from glekin import BarrierSpec, InitialState, correlation_form, decompose, make_noise_model

NOISE_KINDS = ("HN", "HVN", "HAN")

# acceptance lines, printed in the terminal summary
REPORT = []


@pytest.fixture
def barrier():
    return BarrierSpec(omega_b=1.0)


@pytest.fixture
def state():
    return InitialState(0.0, 2.0)


@pytest.fixture(params=NOISE_KINDS)
def noise_model(request):
    return make_noise_model(request.param)


@pytest.fixture
def noise_setup(noise_model, barrier):
    return noise_model, decompose(noise_model, barrier), correlation_form(noise_model)


@pytest.fixture
def ohmic():
    return make_noise_model("Ohmic", gamma_ohmic=1.0)


def pytest_terminal_summary(terminalreporter):
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
