"""Initial-data families: stream-function data, oscillatory profiles with a
lattice carrier frequency, the Taylor-Green vortex, and seeded random
solenoidal fields. Everything produced here is real-valued, mean-free and
solenoidal by construction.
"""

from dataclasses import dataclass

import numpy as np

from .spectral import (Grid, SpectralScalarField, SpectralVectorField,
                       leray_project)


@dataclass
class DataFamilySpec:
    """Config-level description of one initial datum."""

    family: str                  # stream_function | taylor_green | random_solenoidal
    amplitude: float = 1.0
    eps: float = 0.25            # oscillation scale for the stream family
    seed: int = 0
    slope: float = -2.0
    k_max: int = 8

    def __post_init__(self):
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        known = ("stream_function", "taylor_green", "random_solenoidal")
        if self.family not in known:
            raise ValueError(f"unknown family {self.family!r}, expected one of {known}")


def stream_function_data(phi: SpectralScalarField) -> SpectralVectorField:
    """u0 = (d2 phi, -d1 phi, 0): solenoidal and mean-free by construction."""
    g = phi.grid
    zeros = np.zeros(g.spectral_shape, dtype=np.complex128)
    coeffs = np.stack([1j * g.ky * phi.coeffs, -1j * g.kx * phi.coeffs, zeros])
    return SpectralVectorField(g, coeffs, mean_free=True, solenoidal_checked=True)


def default_envelope(grid: Grid) -> SpectralScalarField:
    """Band-limited nonnegative bump: (1 + cos k0 x2)(1 + cos k0 x3) / 4."""
    x, y, z = grid.meshgrid()
    k0 = 2.0 * np.pi / grid.l
    env = 0.25 * (1.0 + np.cos(k0 * y)) * (1.0 + np.cos(k0 * z))
    return SpectralScalarField.from_samples(grid, env)


def oscillatory_profile(grid: Grid, eps: float,
                        envelope: SpectralScalarField = None) -> SpectralScalarField:
    """Stream profile eps^(-1/2) * envelope(x) * cos(x1 / eps).

    The carrier 1/eps must sit on the wavenumber lattice (an integer multiple
    of 2*pi/l). The eps^(-1/2) amplitude makes the B^-1_{inf,inf} norm of the
    associated stream-function data grow as eps shrinks, which is the
    qualitative largeness property this family exists to exhibit.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    k0 = 2.0 * np.pi / grid.l
    carrier = 1.0 / eps
    m = carrier / k0
    if abs(m - round(m)) > 1e-9 or round(m) == 0:
        raise ValueError(
            f"1/eps = {carrier:g} is not a nonzero multiple of 2*pi/l = {k0:g}"
        )
    if round(m) >= grid.n // 2:
        raise ValueError(f"carrier frequency {carrier:g} is not resolvable on n = {grid.n}")
    if envelope is None:
        envelope = default_envelope(grid)
    if envelope.grid != grid:
        raise ValueError("envelope lives on a different grid")
    x = grid.meshgrid()[0]
    samples = eps ** (-0.5) * envelope.samples() * np.cos(carrier * x)
    return SpectralScalarField.from_samples(grid, samples)


def taylor_green(grid: Grid, a: float = 1.0) -> SpectralVectorField:
    """a * (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0), exactly solenoidal.

    Every active mode has |k| = sqrt(3) * (2 pi / l): a single-shell field, so
    its heat flow is the exact exponential decay of one shell.
    """
    x, y, z = grid.meshgrid()
    k0 = 2.0 * np.pi / grid.l
    u = np.stack([
        a * np.sin(k0 * x) * np.cos(k0 * y) * np.cos(k0 * z),
        -a * np.cos(k0 * x) * np.sin(k0 * y) * np.cos(k0 * z),
        np.zeros_like(x),
    ])
    return SpectralVectorField.from_samples(grid, u, mean_free=True,
                                            solenoidal_checked=True)


def random_solenoidal(grid: Grid, seed: int, slope: float = -2.0,
                      k_max: int = None, amplitude: float = 1.0) -> SpectralVectorField:
    """Random-phase solenoidal field with shell energies ~ |k|^slope.

    Modes are filled for 0 < |k| <= k_max (in units of 2*pi/l), Leray
    projected, then rescaled so the L^2 norm equals ``amplitude``.
    Bit-reproducible from the seed.
    """
    n = grid.n
    if k_max is None:
        k_max = max(2, n // 4)
    if k_max >= n // 2:
        raise ValueError("k_max must stay below the Nyquist shell")
    rng = np.random.default_rng(np.uint64(seed))
    shape = (3,) + grid.spectral_shape
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    k0 = 2.0 * np.pi / grid.l
    kk = np.sqrt(grid.k2) / k0
    keep = (kk > 0.5) & (kk <= k_max)
    coeffs = raw * np.where(keep, 1.0, 0.0)
    u = SpectralVectorField(grid, coeffs, mean_free=True, symmetrize=True)
    u = leray_project(u)
    # pin each shell's energy to shell^slope exactly; a radial rescale is a
    # per-mode scalar so solenoidality is untouched
    mag = np.sum(np.abs(u.coeffs) ** 2, axis=0) * grid.plane_weight
    shells = np.rint(kk).astype(int)
    scale = np.zeros(grid.spectral_shape)
    for s in range(1, k_max + 1):
        sel = keep & (shells == s)
        mass = float(mag[sel].sum())
        if mass > 0:
            scale[sel] = np.sqrt(float(s) ** slope / mass)
    projected = u.coeffs * scale
    u = SpectralVectorField(grid, projected, mean_free=True,
                            solenoidal_checked=True)
    from .norms import l2_norm  # local import; norms depends on spectral only
    current = l2_norm(u)
    if current == 0.0:
        return u
    return u.with_coeffs(u.coeffs * (amplitude / current), mean_free=True,
                         solenoidal_checked=True)


def shear_flow(grid: Grid, a: float = 1.0) -> SpectralVectorField:
    """(a sin x2, 0, 0): stationary for the nonlinearity (Nu = 0)."""
    x, y, z = grid.meshgrid()
    k0 = 2.0 * np.pi / grid.l
    u = np.stack([a * np.sin(k0 * y), np.zeros_like(x), np.zeros_like(x)])
    return SpectralVectorField.from_samples(grid, u, mean_free=True,
                                            solenoidal_checked=True)


def single_mode_vector(grid: Grid, kvec, amp: complex,
                       direction=None) -> SpectralVectorField:
    """Hermitian pair at integer wavenumber kvec with coefficient amp.

    Test helper: the physical field is 2 Re(amp * d * exp(i k.x)) with d a
    unit vector orthogonal to k (so the field is solenoidal).
    """
    kvec = np.asarray(kvec, dtype=int)
    if np.all(kvec == 0):
        raise ValueError("kvec must be nonzero")
    if direction is None:
        trial = np.array([0.0, 0.0, 1.0]) if (kvec[0] or kvec[1]) \
            else np.array([1.0, 0.0, 0.0])
        direction = np.cross(kvec, trial)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    if abs(np.dot(direction, kvec)) > 1e-12:
        raise ValueError("direction must be orthogonal to kvec for a solenoidal mode")
    coeffs = np.zeros((3,) + grid.spectral_shape, dtype=np.complex128)
    ix, iy, iz = (int(kvec[0]) % grid.n, int(kvec[1]) % grid.n, int(kvec[2]))
    if iz < 0:
        kvec = -kvec
        amp = np.conj(amp)
        ix, iy, iz = (int(kvec[0]) % grid.n, int(kvec[1]) % grid.n, int(kvec[2]))
    for c in range(3):
        coeffs[c, ix, iy, iz] = amp * direction[c]
    if iz == 0 or iz == grid.n // 2:
        jx, jy = (-int(kvec[0])) % grid.n, (-int(kvec[1])) % grid.n
        for c in range(3):
            coeffs[c, jx, jy, iz] = np.conj(amp) * direction[c]
    return SpectralVectorField(grid, coeffs, mean_free=True, solenoidal_checked=True)


def build_datum(grid: Grid, spec: DataFamilySpec) -> SpectralVectorField:
    """Construct the initial datum described by a family spec."""
    if spec.family == "taylor_green":
        return taylor_green(grid, spec.amplitude)
    if spec.family == "stream_function":
        phi = oscillatory_profile(grid, spec.eps)
        u = stream_function_data(phi)
        return u * spec.amplitude if spec.amplitude != 1.0 else u
    if spec.family == "random_solenoidal":
        return random_solenoidal(grid, spec.seed, slope=spec.slope,
                                 k_max=spec.k_max, amplitude=spec.amplitude)
    raise ValueError(f"unknown family {spec.family!r}")
