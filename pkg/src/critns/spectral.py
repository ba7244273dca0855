"""Fourier-space fields on the 3D periodic box and the exact linear and
bilinear operators acting on them: heat semigroup, Leray projection,
fractional Laplacian, and the advection source Nu = -div(u (x) u).

Representation
--------------
Real fields are stored as rfftn coefficients normalized so that the k = 0
coefficient equals the spatial mean: ``coeffs = rfftn(samples, norm="forward")``
with shape (n, n, n//2 + 1). Conjugate modes are implicit except on the
kz = 0 and kz = n/2 planes, where 2D Hermitian symmetry is enforced by the
constructors. Wavenumbers live on (2*pi/l) * Z^3.

All homogeneous quantities exclude k = 0; fields must be mean-free before
negative-order multipliers are applied.

Dealiasing uses the sharp radial 2/3 ball: modes with |k| > (2/3) k_max are
zeroed when quadratic products are formed. Oracles in the test suite use the
same rule.
"""

from dataclasses import dataclass
from fractions import Fraction
import warnings

import numpy as np
import scipy.fft as sfft
from scipy.special import roots_legendre

from . import _kernels

_FFT_WORKERS = 1

SOLENOIDAL_TOL = 1e-12
MEAN_TOL = 1e-14


class NegativeOrderOnMeanfulField(ValueError):
    """Negative-order multiplier requested on a field with nonzero mean."""


class IncompatibleScaling(ValueError):
    """Rescaling factor does not map the sample lattice to itself."""


def set_fft_workers(n: int):
    """Set the worker count passed to scipy.fft (results are unaffected)."""
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(n))


def get_fft_workers() -> int:
    return _FFT_WORKERS


@dataclass(frozen=True)
class Grid:
    """Periodic cubic grid: n points per dimension, box period l.

    Derived spectral quantities (wavenumber meshes, |k|^2, rfft plane
    weights, dealias mask) are precomputed once.
    """

    n: int
    l: float = 2.0 * np.pi

    def __post_init__(self):
        n, l = self.n, self.l
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 8, got {n}")
        if not (l > 0):
            raise ValueError(f"box period must be positive, got {l}")
        k0 = 2.0 * np.pi / l
        k_full = k0 * np.fft.fftfreq(n, d=1.0 / n)        # 0, 1, ..., -n/2, ..., -1
        k_half = k0 * np.arange(n // 2 + 1)               # rfft z axis
        kx, ky, kz = np.meshgrid(k_full, k_full, k_half, indexing="ij")
        k2 = kx * kx + ky * ky + kz * kz
        inv_k2 = np.zeros_like(k2)
        np.divide(1.0, k2, out=inv_k2, where=k2 > 0)
        # conjugate-plane doubling for sums over the half spectrum
        weight = np.full(k2.shape, 2.0)
        weight[:, :, 0] = 1.0
        weight[:, :, -1] = 1.0
        kmax = k0 * (n // 2)
        dealias = np.sqrt(k2) <= (2.0 / 3.0) * kmax
        for name, arr in (("kx", kx), ("ky", ky), ("kz", kz), ("k2", k2),
                          ("inv_k2", inv_k2), ("plane_weight", weight),
                          ("dealias", dealias)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "kmax", kmax)

    @property
    def spectral_shape(self):
        return (self.n, self.n, self.n // 2 + 1)

    @property
    def physical_shape(self):
        return (self.n, self.n, self.n)

    @property
    def dx(self):
        return self.l / self.n

    def axis_points(self):
        return np.arange(self.n) * self.dx

    def meshgrid(self):
        x = self.axis_points()
        return np.meshgrid(x, x, x, indexing="ij")

    def __eq__(self, other):
        return isinstance(other, Grid) and self.n == other.n and self.l == other.l

    def __hash__(self):
        return hash((self.n, self.l))


def _fix_conjugate_planes(coeffs: np.ndarray) -> np.ndarray:
    """Enforce 2D Hermitian symmetry on the self-conjugate kz planes."""
    out = np.array(coeffs)
    for iz in (0, coeffs.shape[-1] - 1):
        plane = out[..., iz]
        mirrored = np.conj(plane[::-1, ::-1])
        mirrored = np.roll(np.roll(mirrored, 1, axis=0), 1, axis=1)
        out[..., iz] = 0.5 * (plane + mirrored)
    return out


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Max deviation from conjugate symmetry on the self-conjugate planes,
    relative to max(1, max |coeff|)."""
    worst = 0.0
    for iz in (0, coeffs.shape[-1] - 1):
        plane = coeffs[..., iz]
        mirrored = np.conj(plane[::-1, ::-1])
        mirrored = np.roll(np.roll(mirrored, 1, axis=-2), 1, axis=-1)
        worst = max(worst, float(np.max(np.abs(plane - mirrored))))
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    return worst / scale


def _freeze(arr):
    arr.setflags(write=False)
    return arr


class SpectralScalarField:
    """Real scalar field stored as normalized rfftn coefficients."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: Grid, coeffs: np.ndarray, symmetrize: bool = False):
        if coeffs.shape != grid.spectral_shape:
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match grid {grid.spectral_shape}"
            )
        coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        if symmetrize:
            coeffs = _fix_conjugate_planes(coeffs)
        self.grid = grid
        self.coeffs = _freeze(coeffs)

    @classmethod
    def from_samples(cls, grid: Grid, samples: np.ndarray):
        if samples.shape != grid.physical_shape:
            raise ValueError(
                f"sample shape {samples.shape} does not match grid {grid.physical_shape}"
            )
        coeffs = sfft.rfftn(np.asarray(samples, dtype=np.float64),
                            norm="forward", workers=_FFT_WORKERS)
        return cls(grid, coeffs)

    def samples(self) -> np.ndarray:
        return sfft.irfftn(self.coeffs, s=self.grid.physical_shape,
                           norm="forward", workers=_FFT_WORKERS)

    def mean(self) -> float:
        return float(self.coeffs[0, 0, 0].real)


class SpectralVectorField:
    """Three-component real vector field in spectral storage.

    ``mean_free`` and ``solenoidal_checked`` record validated structure; they
    are set by the operators that guarantee the property.
    """

    __slots__ = ("grid", "coeffs", "mean_free", "solenoidal_checked")

    def __init__(self, grid: Grid, coeffs: np.ndarray, mean_free: bool = False,
                 solenoidal_checked: bool = False, symmetrize: bool = False):
        if coeffs.shape != (3,) + grid.spectral_shape:
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match grid "
                f"{(3,) + grid.spectral_shape}"
            )
        coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        if symmetrize:
            coeffs = np.stack([_fix_conjugate_planes(coeffs[c]) for c in range(3)])
        if mean_free:
            coeffs = np.array(coeffs)
            coeffs[:, 0, 0, 0] = 0.0
        self.grid = grid
        self.coeffs = _freeze(coeffs)
        self.mean_free = mean_free
        self.solenoidal_checked = solenoidal_checked

    @classmethod
    def from_samples(cls, grid: Grid, samples: np.ndarray, **flags):
        if samples.shape != (3,) + grid.physical_shape:
            raise ValueError(
                f"sample shape {samples.shape} does not match grid "
                f"{(3,) + grid.physical_shape}"
            )
        coeffs = np.stack([
            sfft.rfftn(np.asarray(samples[c], dtype=np.float64),
                       norm="forward", workers=_FFT_WORKERS)
            for c in range(3)
        ])
        return cls(grid, coeffs, **flags)

    @classmethod
    def zero(cls, grid: Grid):
        return cls(grid, np.zeros((3,) + grid.spectral_shape, dtype=np.complex128),
                   mean_free=True, solenoidal_checked=True)

    def samples(self) -> np.ndarray:
        return np.stack([
            sfft.irfftn(self.coeffs[c], s=self.grid.physical_shape,
                        norm="forward", workers=_FFT_WORKERS)
            for c in range(3)
        ])

    def component(self, i: int) -> SpectralScalarField:
        return SpectralScalarField(self.grid, self.coeffs[i])

    def with_coeffs(self, coeffs, mean_free=False, solenoidal_checked=False):
        return SpectralVectorField(self.grid, coeffs, mean_free=mean_free,
                                   solenoidal_checked=solenoidal_checked)

    def mean(self) -> np.ndarray:
        return self.coeffs[:, 0, 0, 0].real.copy()

    # value-like arithmetic (fresh outputs, inputs untouched)
    def __add__(self, other):
        _require_same_grid(self, other)
        return SpectralVectorField(self.grid, self.coeffs + other.coeffs,
                                   mean_free=self.mean_free and other.mean_free,
                                   solenoidal_checked=self.solenoidal_checked
                                   and other.solenoidal_checked)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return SpectralVectorField(self.grid, self.coeffs - other.coeffs,
                                   mean_free=self.mean_free and other.mean_free,
                                   solenoidal_checked=self.solenoidal_checked
                                   and other.solenoidal_checked)

    def __mul__(self, a: float):
        return SpectralVectorField(self.grid, self.coeffs * float(a),
                                   mean_free=self.mean_free,
                                   solenoidal_checked=self.solenoidal_checked)

    __rmul__ = __mul__


class SymmetricTensorField:
    """Symmetric 3x3 tensor field; six stored components in the order
    (xx, yy, zz, xy, xz, yz)."""

    __slots__ = ("grid", "coeffs")
    INDEX = {(0, 0): 0, (1, 1): 1, (2, 2): 2, (0, 1): 3, (1, 0): 3,
             (0, 2): 4, (2, 0): 4, (1, 2): 5, (2, 1): 5}

    def __init__(self, grid: Grid, coeffs: np.ndarray):
        if coeffs.shape != (6,) + grid.spectral_shape:
            raise ValueError("tensor coefficient shape does not match grid")
        self.grid = grid
        self.coeffs = _freeze(np.ascontiguousarray(coeffs, dtype=np.complex128))

    def component(self, i: int, j: int) -> SpectralScalarField:
        return SpectralScalarField(self.grid, self.coeffs[self.INDEX[(i, j)]])


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------

def solenoidal_defect(u: SpectralVectorField) -> float:
    """max_k |k . u_hat(k)| / max(1, max |u_hat|)."""
    g = u.grid
    div = np.abs(g.kx * u.coeffs[0] + g.ky * u.coeffs[1] + g.kz * u.coeffs[2])
    scale = max(1.0, float(np.max(np.abs(u.coeffs))))
    return float(div.max()) / scale


def is_solenoidal(u: SpectralVectorField, tol: float = SOLENOIDAL_TOL) -> bool:
    return solenoidal_defect(u) <= tol


def mean_magnitude(u: SpectralVectorField) -> float:
    return float(np.max(np.abs(u.coeffs[:, 0, 0, 0])))


# ---------------------------------------------------------------------------
# transforms (thin wrappers kept for API symmetry and validation)
# ---------------------------------------------------------------------------

def forward_transform(grid: Grid, samples: np.ndarray) -> SpectralScalarField:
    """Physical samples -> spectral scalar field."""
    return SpectralScalarField.from_samples(grid, samples)


def inverse_transform(field: SpectralScalarField) -> np.ndarray:
    """Spectral scalar field -> physical samples."""
    return field.samples()


# ---------------------------------------------------------------------------
# linear multipliers
# ---------------------------------------------------------------------------

def heat_semigroup(u: SpectralVectorField, t: float) -> SpectralVectorField:
    """e^{t Laplacian} u: every coefficient scaled by exp(-|k|^2 t)."""
    if t < 0:
        raise ValueError(f"heat semigroup requires t >= 0, got {t}")
    if t == 0:
        return u
    mult = np.exp(-u.grid.k2 * t)
    return u.with_coeffs(u.coeffs * mult, mean_free=u.mean_free,
                         solenoidal_checked=u.solenoidal_checked)


def heat_semigroup_scalar(f: SpectralScalarField, t: float) -> SpectralScalarField:
    if t < 0:
        raise ValueError(f"heat semigroup requires t >= 0, got {t}")
    if t == 0:
        return f
    return SpectralScalarField(f.grid, f.coeffs * np.exp(-f.grid.k2 * t))


def fractional_laplacian(u: SpectralVectorField, s: float) -> SpectralVectorField:
    """(-Laplacian)^s u: multiplier |k|^(2s), zero at k = 0.

    Requires a mean-free input when s < 0.
    """
    if s == 0:
        return u
    if s < 0 and mean_magnitude(u) > MEAN_TOL:
        raise NegativeOrderOnMeanfulField(
            f"(-Lap)^{s} on a field with mean magnitude {mean_magnitude(u):.3e}"
        )
    g = u.grid
    mult = np.zeros(g.spectral_shape)
    mask = g.k2 > 0
    np.power(g.k2, s, out=mult, where=mask)
    return u.with_coeffs(u.coeffs * mult, mean_free=True,
                         solenoidal_checked=u.solenoidal_checked)


def leray_project(u: SpectralVectorField) -> SpectralVectorField:
    """Orthogonal projection onto divergence-free fields; identity at k = 0."""
    g = u.grid
    out = _kernels.leray_apply(u.coeffs, g.kx, g.ky, g.kz, g.inv_k2)
    return u.with_coeffs(out, mean_free=u.mean_free, solenoidal_checked=True)


def gradient(phi: SpectralScalarField) -> SpectralVectorField:
    g = phi.grid
    coeffs = np.stack([1j * g.kx * phi.coeffs, 1j * g.ky * phi.coeffs,
                       1j * g.kz * phi.coeffs])
    return SpectralVectorField(g, coeffs, mean_free=True)


def divergence(u: SpectralVectorField) -> SpectralScalarField:
    g = u.grid
    return SpectralScalarField(
        g, 1j * (g.kx * u.coeffs[0] + g.ky * u.coeffs[1] + g.kz * u.coeffs[2]))


# ---------------------------------------------------------------------------
# bilinear terms (pseudo-spectral with 2/3-ball dealiasing)
# ---------------------------------------------------------------------------

def tensor_product(u: SpectralVectorField) -> SymmetricTensorField:
    """u (x) u formed by physical-space products."""
    phys = u.samples()
    prods = _kernels.tensor_products(phys[0], phys[1], phys[2])
    coeffs = np.stack([
        sfft.rfftn(prods[c], norm="forward", workers=_FFT_WORKERS)
        for c in range(6)
    ])
    return SymmetricTensorField(u.grid, coeffs)


def tensor_divergence(t: SymmetricTensorField) -> SpectralVectorField:
    """(div T)_i = sum_j d_j T_ij, dealiased to the 2/3 ball; mean-free."""
    g = t.grid
    out = _kernels.assemble_divergence(t.coeffs, g.kx, g.ky, g.kz, g.dealias)
    return SpectralVectorField(g, out, mean_free=True)


def nonlinear_term(u: SpectralVectorField) -> SpectralVectorField:
    """Nu = -div(u (x) u), pseudo-spectral, dealiased, mean-free.

    Warns (does not reject) when the input is measurably non-solenoidal.
    """
    defect = solenoidal_defect(u)
    if defect > 1e-8:
        warnings.warn(
            f"nonlinear_term called on non-solenoidal field (defect {defect:.2e})",
            stacklevel=2,
        )
    div_t = tensor_divergence(tensor_product(u))
    return div_t.with_coeffs(-div_t.coeffs, mean_free=True)


def advective_terms(a: SpectralVectorField, b: SpectralVectorField) -> SpectralVectorField:
    """(a . grad) b, pseudo-spectral, dealiased to the 2/3 ball."""
    _require_same_grid(a, b)
    g = a.grid
    a_phys = a.samples()
    k = (g.kx, g.ky, g.kz)
    out = np.empty((3,) + g.spectral_shape, dtype=np.complex128)
    for i in range(3):
        acc = np.zeros(g.physical_shape)
        for j in range(3):
            db = sfft.irfftn(1j * k[j] * b.coeffs[i], s=g.physical_shape,
                             norm="forward", workers=_FFT_WORKERS)
            acc += a_phys[j] * db
        out[i] = sfft.rfftn(acc, norm="forward", workers=_FFT_WORKERS)
    out *= g.dealias
    return SpectralVectorField(g, out)


# ---------------------------------------------------------------------------
# heat kernel cross-check utilities (continuum side, radial quadrature)
# ---------------------------------------------------------------------------

def heat_kernel_values(t: float, points) -> np.ndarray:
    """Pointwise values of K(t,x) = (4 pi t)^(-3/2) exp(-|x|^2 / 4t)."""
    if not t > 0:
        raise ValueError(f"heat kernel requires t > 0, got {t}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r2 = np.sum(pts * pts, axis=-1)
    return (4.0 * np.pi * t) ** (-1.5) * np.exp(-r2 / (4.0 * t))


def heat_kernel_mass(t: float, n_quad: int = 400) -> float:
    """Radial Gauss-Legendre quadrature of K over [0, 12 sqrt(t)].

    Truncation error is bounded by the Gaussian tail mass beyond radius
    12 sqrt(t), below 1e-30.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    radius = 12.0 * np.sqrt(t)
    x, w = roots_legendre(n_quad)
    r = 0.5 * radius * (1.0 + x)
    wq = 0.5 * radius * w
    vals = (4.0 * np.pi * t) ** (-1.5) * np.exp(-r * r / (4.0 * t))
    return float(np.sum(wq * 4.0 * np.pi * r * r * vals))


def half_laplacian_heat_kernel_radial(t: float, r: np.ndarray,
                                      n_quad: int = 2000) -> np.ndarray:
    """(-Lap)^(1/2) K(t, .) at radii r, via the radial inverse transform
    g(r) = (2 pi^2 r)^(-1) * int_0^inf rho^2 exp(-t rho^2) sin(rho r) drho."""
    if not t > 0:
        raise ValueError("t must be positive")
    rho_max = 12.0 / np.sqrt(t)
    x, w = roots_legendre(n_quad)
    rho = 0.5 * rho_max * (1.0 + x)
    wq = 0.5 * rho_max * w
    damped = wq * rho * rho * np.exp(-t * rho * rho)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        if ri < 1e-12:
            out[i] = np.sum(damped * rho) / (2.0 * np.pi ** 2)
        else:
            out[i] = np.sum(damped * np.sin(rho * ri)) / (2.0 * np.pi ** 2 * ri)
    return out


def half_laplacian_kernel_lp_norm(t: float, p: float, n_r: int = 800,
                                  n_rho: int = 2000) -> float:
    """L^p norm of (-Lap)^(1/2) K(t, .), radial quadrature on [0, 12 sqrt(t)].

    These are the convolution kernels behind the (t - tau)^(-1/2) and
    (t - tau)^(-7/8) bounds; the returned values carry the true constants.
    """
    radius = 12.0 * np.sqrt(t)
    x, w = roots_legendre(n_r)
    r = 0.5 * radius * (1.0 + x)
    wq = 0.5 * radius * w
    g = half_laplacian_heat_kernel_radial(t, r, n_quad=n_rho)
    return float(np.sum(wq * 4.0 * np.pi * r * r * np.abs(g) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def rescale_field(u0: SpectralVectorField, lam: float) -> SpectralVectorField:
    """lambda * u0(lambda x) represented on the grid with period l / lambda.

    On the rescaled lattice the samples of u0(lambda x) coincide with the
    original samples, so the coefficients transfer unchanged (times lambda).
    lambda must be (numerically) a small-denominator rational so that the
    construction stays meaningful next to other fields on derived grids.
    """
    if not lam > 0:
        raise IncompatibleScaling(f"scaling factor must be positive, got {lam}")
    frac = Fraction(lam).limit_denominator(u0.grid.n)
    if abs(float(frac) - lam) > 1e-12 * max(1.0, lam):
        raise IncompatibleScaling(
            f"scaling factor {lam} is not a small-denominator rational "
            f"(closest candidate {frac})"
        )
    new_grid = Grid(u0.grid.n, u0.grid.l / lam)
    return SpectralVectorField(new_grid, lam * u0.coeffs,
                               mean_free=u0.mean_free,
                               solenoidal_checked=u0.solenoidal_checked)
