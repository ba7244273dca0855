import numpy as np
import pytest

import critns
from critns import Grid, taylor_green


@pytest.fixture(scope="session", autouse=True)
def fft_workers():
    critns.set_fft_workers(2)


@pytest.fixture(scope="session")
def grid16():
    return Grid(16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(32)


@pytest.fixture(scope="session")
def tg32(grid32):
    return taylor_green(grid32, 1.0)


def taylor_green_samples(n, l, a, shift=(0.0, 0.0, 0.0)):
    """Analytic Taylor-Green samples on an n^3 lattice, optionally shifted.

    Construction is independent of the spectral pipeline: pure closed-form
    evaluation, used by the finite-difference oracles.
    """
    k0 = 2.0 * np.pi / l
    ax = np.arange(n) * (l / n)
    x = ax[:, None, None] + shift[0]
    y = ax[None, :, None] + shift[1]
    z = ax[None, None, :] + shift[2]
    u1 = a * np.sin(k0 * x) * np.cos(k0 * y) * np.cos(k0 * z)
    u2 = -a * np.cos(k0 * x) * np.sin(k0 * y) * np.cos(k0 * z)
    u3 = np.zeros((n, n, n))
    return np.stack([np.broadcast_to(u1, (n, n, n)),
                     np.broadcast_to(u2, (n, n, n)), u3])


def tg_divergence_fd_oracle(n, l, a, oversample=4, decay=1.0):
    """div(w (x) w) for w = decay * TaylorGreen(a), via 4th-order centered
    finite differences with stencil step (l/n)/oversample, evaluated at the
    n^3 lattice points from the analytic formula only."""
    h = (l / n) / oversample
    out = np.zeros((3, n, n, n))
    base = decay * taylor_green_samples(n, l, a)
    for j in range(3):
        shifts = {}
        for mult in (-2, -1, 1, 2):
            off = [0.0, 0.0, 0.0]
            off[j] = mult * h
            shifts[mult] = decay * taylor_green_samples(n, l, a, tuple(off))
        for i in range(3):
            stencil = (-shifts[2][i] * shifts[2][j] + 8.0 * shifts[1][i] * shifts[1][j]
                       - 8.0 * shifts[-1][i] * shifts[-1][j]
                       + shifts[-2][i] * shifts[-2][j]) / (12.0 * h)
            out[i] += stencil
    del base
    return out
