import pytest

from ecdlp_forge.classical_ec import curve_new


@pytest.fixture(scope="session")
def curve7():
    return curve_new(7, 5, 4)


def assert_basis(state, reg, value, msg=None):
    """The register holds `value` on (essentially) all amplitude mass."""
    marg = state.marginal(list(reg))
    got = max(marg, key=marg.get)
    assert got == value and marg[got] > 1 - 1e-9, msg or (marg, value)


def basis_value(state, reg):
    marg = state.marginal(list(reg))
    got = max(marg, key=marg.get)
    assert marg[got] > 1 - 1e-9, marg
    return got
