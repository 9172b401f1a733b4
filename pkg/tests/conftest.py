import numpy as np
import pytest

from hplap.algebra import OperatorParams, make_heisenberg, make_quaternionic


@pytest.fixture(scope="session")
def heis1():
    return make_heisenberg(1)


@pytest.fixture(scope="session")
def heis2():
    return make_heisenberg(2)


@pytest.fixture(scope="session")
def quat1():
    return make_quaternionic(1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def params_for(alg, k=1.0, p=2.0, alpha=0.0, beta=0.0):
    return OperatorParams.of(alg, k=k, p=p, alpha=alpha, beta=beta)


_GL_CACHE = {}


def _leggauss(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def moment_oracle_1d(m, q, k, gamma, nodes=800):
    """Independent oracle for the gauge-ball moment integral of |z|^gamma:
    reduce by rotational symmetry in z and t separately, then integrate the
    remaining 1-D profile,

        int_{d<1} |z|^gamma
            = omega_{m-1}/(gamma+m) * omega_{q-1}
              * int_0^{1/4} (1-16 s^2)^{(gamma+m)/(4k)} s^{q-1} ds,

    with s = sin(theta)/4 to soften the endpoint singularity.
    """
    import math

    om = lambda dim: 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)
    x, w = _leggauss(nodes)
    th = 0.25 * math.pi * (x + 1.0)  # [0, pi/2]
    ww = 0.25 * math.pi * w
    c = (gamma + m) / (4.0 * k)
    s = 0.25 * np.sin(th)
    prof = np.sum(ww * np.cos(th) ** (2.0 * c) * s ** (q - 1) * 0.25 * np.cos(th))
    t_factor = om(q) * prof if q > 1 else 2.0 * prof
    return om(m) / (gamma + m) * t_factor
