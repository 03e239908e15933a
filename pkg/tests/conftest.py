import pytest

from fractalmarch.kernels import available_backends

needs_cython = pytest.mark.skipif(
    "cython" not in available_backends(),
    reason="compiled kernel not built",
)
