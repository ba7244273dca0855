"""Hot inner-loop kernels, compiled with numba when available.

Every kernel has a pure-numpy twin (same name with ``_np`` suffix). The
dispatched name points at the numba build unless the environment variable
``CRITNS_DISABLE_NUMBA=1`` is set or numba is missing. Both paths are
deterministic; the numba path uses a fixed sequential reduction order, the
numpy path relies on numpy's (also fixed) pairwise summation, so the two may
differ by O(1e-15) relative. Outputs are reproducible run-to-run per path.
"""

import os

import numpy as np

_DISABLED = os.environ.get("CRITNS_DISABLE_NUMBA", "0") == "1"

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def tensor_products_np(ux, uy, uz):
    """Six independent products u_i u_j, order (xx, yy, zz, xy, xz, yz)."""
    out = np.empty((6,) + ux.shape, dtype=ux.dtype)
    out[0] = ux * ux
    out[1] = uy * uy
    out[2] = uz * uz
    out[3] = ux * uy
    out[4] = ux * uz
    out[5] = uy * uz
    return out


def magnitude_max_np(ux, uy, uz):
    """max over samples of the pointwise Euclidean magnitude."""
    return float(np.sqrt((ux * ux + uy * uy + uz * uz).max()))


def weighted_spectral_sum_np(coeffs, k2, plane_weight, s):
    """sum over k != 0 of w(k) |k|^(2s) sum_c |coeff_c(k)|^2.

    ``plane_weight`` carries the rfft conjugate-plane doubling factors.
    """
    mag = np.zeros(k2.shape)
    for c in range(coeffs.shape[0]):
        mag += coeffs[c].real ** 2 + coeffs[c].imag ** 2
    mask = k2 > 0.0
    if s == 0.0:
        weighted = mag[mask]
    else:
        weighted = k2[mask] ** s * mag[mask]
    return float(np.sum(plane_weight[mask] * weighted))


def assemble_divergence_np(t6, kx, ky, kz, keep):
    """Spectral divergence of a symmetric tensor, with dealias mask ``keep``.

    Returns d_i = i sum_j k_j T_ij restricted to the retained modes.
    """
    out = np.empty((3,) + t6.shape[1:], dtype=t6.dtype)
    out[0] = 1j * (kx * t6[0] + ky * t6[3] + kz * t6[4])
    out[1] = 1j * (kx * t6[3] + ky * t6[1] + kz * t6[5])
    out[2] = 1j * (kx * t6[4] + ky * t6[5] + kz * t6[2])
    out *= keep
    return out


def leray_apply_np(coeffs, kx, ky, kz, inv_k2):
    """Projection Id - k k^T / |k|^2 per mode; identity at k = 0."""
    kdotu = kx * coeffs[0] + ky * coeffs[1] + kz * coeffs[2]
    kdotu = kdotu * inv_k2
    out = np.empty_like(coeffs)
    out[0] = coeffs[0] - kx * kdotu
    out[1] = coeffs[1] - ky * kdotu
    out[2] = coeffs[2] - kz * kdotu
    return out


def ifrk4_combine_np(u, a, b, c, d, e_half, e_full, dt):
    """Fused integrating-factor RK4 update."""
    return e_full * u + (dt / 6.0) * (e_full * a + 2.0 * e_half * (b + c) + d)


def stage_mult_axpy_np(u, k, e, c):
    """e * (u + c * k), the shifted-then-decayed RK stage input."""
    return e * (u + c * k)


def stage_axpy_np(base, k, c):
    """base + c * k for precomputed decayed state."""
    return base + c * k


def health_stats_np(coeffs, tail_mask):
    """(total squared magnitude, squared magnitude in the tail mask)."""
    mag = np.zeros(coeffs.shape[1:])
    for c in range(coeffs.shape[0]):
        mag += coeffs[c].real ** 2 + coeffs[c].imag ** 2
    return float(np.sum(mag)), float(np.sum(mag[tail_mask]))


# ---------------------------------------------------------------------------
# numba builds
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True)
    def _tensor_products_nb(ux, uy, uz):
        out = np.empty((6,) + ux.shape, dtype=ux.dtype)
        x = ux.ravel()
        y = uy.ravel()
        z = uz.ravel()
        o = out.reshape(6, x.size)
        for i in range(x.size):
            o[0, i] = x[i] * x[i]
            o[1, i] = y[i] * y[i]
            o[2, i] = z[i] * z[i]
            o[3, i] = x[i] * y[i]
            o[4, i] = x[i] * z[i]
            o[5, i] = y[i] * z[i]
        return out

    @njit(cache=True)
    def _magnitude_max_nb(ux, uy, uz):
        x = ux.ravel()
        y = uy.ravel()
        z = uz.ravel()
        best = 0.0
        for i in range(x.size):
            m = x[i] * x[i] + y[i] * y[i] + z[i] * z[i]
            if m > best:
                best = m
        return np.sqrt(best)

    @njit(cache=True)
    def _weighted_spectral_sum_nb(coeffs, k2, plane_weight, s):
        nc = coeffs.shape[0]
        flat = coeffs.reshape(nc, -1)
        q = k2.ravel()
        w = plane_weight.ravel()
        acc = 0.0
        for i in range(q.size):
            if q[i] > 0.0:
                mag = 0.0
                for c in range(nc):
                    v = flat[c, i]
                    mag += v.real * v.real + v.imag * v.imag
                if s == 0.0:
                    acc += w[i] * mag
                else:
                    acc += w[i] * q[i] ** s * mag
        return acc

    @njit(cache=True)
    def _assemble_divergence_nb(t6, kx, ky, kz, keep):
        out = np.empty((3,) + t6.shape[1:], dtype=t6.dtype)
        f = t6.reshape(6, -1)
        o = out.reshape(3, -1)
        x = kx.ravel()
        y = ky.ravel()
        z = kz.ravel()
        m = keep.ravel()
        for i in range(x.size):
            if m[i]:
                o[0, i] = 1j * (x[i] * f[0, i] + y[i] * f[3, i] + z[i] * f[4, i])
                o[1, i] = 1j * (x[i] * f[3, i] + y[i] * f[1, i] + z[i] * f[5, i])
                o[2, i] = 1j * (x[i] * f[4, i] + y[i] * f[5, i] + z[i] * f[2, i])
            else:
                o[0, i] = 0.0
                o[1, i] = 0.0
                o[2, i] = 0.0
        return out

    @njit(cache=True)
    def _leray_apply_nb(coeffs, kx, ky, kz, inv_k2):
        out = np.empty_like(coeffs)
        f = coeffs.reshape(3, -1)
        o = out.reshape(3, -1)
        x = kx.ravel()
        y = ky.ravel()
        z = kz.ravel()
        q = inv_k2.ravel()
        for i in range(x.size):
            kdotu = (x[i] * f[0, i] + y[i] * f[1, i] + z[i] * f[2, i]) * q[i]
            o[0, i] = f[0, i] - x[i] * kdotu
            o[1, i] = f[1, i] - y[i] * kdotu
            o[2, i] = f[2, i] - z[i] * kdotu
        return out

    @njit(cache=True)
    def _ifrk4_combine_nb(u, a, b, c, d, e_half, e_full, dt):
        out = np.empty_like(u)
        nu = u.reshape(3, -1)
        na = a.reshape(3, -1)
        nb = b.reshape(3, -1)
        nc = c.reshape(3, -1)
        nd = d.reshape(3, -1)
        eh = e_half.ravel()
        ef = e_full.ravel()
        o = out.reshape(3, -1)
        sixth = dt / 6.0
        for comp in range(3):
            for i in range(eh.size):
                o[comp, i] = ef[i] * nu[comp, i] + sixth * (
                    ef[i] * na[comp, i]
                    + 2.0 * eh[i] * (nb[comp, i] + nc[comp, i])
                    + nd[comp, i]
                )
        return out

    @njit(cache=True)
    def _stage_mult_axpy_nb(u, k, e, c):
        out = np.empty_like(u)
        nu = u.reshape(3, -1)
        nk = k.reshape(3, -1)
        ne = e.ravel()
        o = out.reshape(3, -1)
        for comp in range(3):
            for i in range(ne.size):
                o[comp, i] = ne[i] * (nu[comp, i] + c * nk[comp, i])
        return out

    @njit(cache=True)
    def _stage_axpy_nb(base, k, c):
        out = np.empty_like(base)
        nb_ = base.reshape(3, -1)
        nk = k.reshape(3, -1)
        o = out.reshape(3, -1)
        for comp in range(3):
            for i in range(o.shape[1]):
                o[comp, i] = nb_[comp, i] + c * nk[comp, i]
        return out

    @njit(cache=True)
    def _health_stats_nb(coeffs, tail_mask):
        flat = coeffs.reshape(3, -1)
        tm = tail_mask.ravel()
        total = 0.0
        tail = 0.0
        for i in range(tm.size):
            mag = 0.0
            for comp in range(3):
                v = flat[comp, i]
                mag += v.real * v.real + v.imag * v.imag
            total += mag
            if tm[i]:
                tail += mag
        return total, tail

    tensor_products = _tensor_products_nb
    magnitude_max = _magnitude_max_nb
    weighted_spectral_sum = _weighted_spectral_sum_nb
    assemble_divergence = _assemble_divergence_nb
    leray_apply = _leray_apply_nb
    ifrk4_combine = _ifrk4_combine_nb
    stage_mult_axpy = _stage_mult_axpy_nb
    stage_axpy = _stage_axpy_nb
    health_stats = _health_stats_nb
else:
    tensor_products = tensor_products_np
    magnitude_max = magnitude_max_np
    weighted_spectral_sum = weighted_spectral_sum_np
    assemble_divergence = assemble_divergence_np
    leray_apply = leray_apply_np
    ifrk4_combine = ifrk4_combine_np
    stage_mult_axpy = stage_mult_axpy_np
    stage_axpy = stage_axpy_np
    health_stats = health_stats_np
