import pytest

from lbcac.lp._backend import KERNELS


@pytest.fixture(params=sorted(KERNELS))
def backend(request):
    return request.param
