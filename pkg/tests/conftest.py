import pytest

from fareyphase.partition import warmup_kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the numba kernels once up front so timed assertions measure
    # steady-state arithmetic, not JIT latency
    warmup_kernels()
