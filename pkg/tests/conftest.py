import pytest

from drivephase import DriveChain, PhasePolynomial, PulseShape, turns

# reference experiment parameters: 1.2 us pulses, 200 ns ramps, N = 200 trains
REF_DURATION = 1.2e-6
REF_T_RAMP = 0.2e-6
TRAIN_N = 200
NATIVE_SLOPE = turns(1.8e-3)

# frozen from the scipy.integrate.quad oracle over the exact integrand
A_Y_REF = -0.3087223594058627
# frozen from the Bessel closed form -(pi/2)*(J1(1) + (J1(1) - J3(1))/2)
A_Y_FULL_SIN2 = -1.0214797432502445


@pytest.fixture
def ref_shape() -> PulseShape:
    return PulseShape(REF_DURATION, REF_T_RAMP, 1.0)


@pytest.fixture
def distorted_chain(ref_shape) -> DriveChain:
    return DriveChain.for_shape(
        ref_shape, native=PhasePolynomial.linear(NATIVE_SLOPE)
    )


@pytest.fixture
def clean_chain(ref_shape) -> DriveChain:
    return DriveChain.for_shape(ref_shape)


@pytest.fixture
def full_sin2_shape() -> PulseShape:
    return PulseShape(REF_DURATION, REF_DURATION / 2, 1.0)


def plateau_referenced(slope: float, amplitude: float = 1.0) -> PhasePolynomial:
    """Linear phase polynomial with phi(amplitude) = 0."""
    return PhasePolynomial((-slope * amplitude, slope))
