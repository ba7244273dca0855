"""Norms: Lebesgue, homogeneous Sobolev, the time-weighted sup norm, and
Littlewood-Paley / heat-flow Besov norms.

One normalization convention is used everywhere and reported with every
value: ``|u|_{Hs}^2 = l^3 * sum_{k != 0} |k|^(2s) |u_hat(k)|^2`` (components
summed), and physical L^p norms integrate the pointwise Euclidean magnitude
with the exact trapezoid rule (equal weights on the periodic lattice).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .spectral import (Grid, NegativeOrderOnMeanfulField, SpectralScalarField,
                       SpectralVectorField, get_fft_workers, heat_semigroup,
                       mean_magnitude)

CONVENTION_VERSION = 1


def geometric_grid(t_min: float, t_max: float, points_per_decade: int = 16) -> np.ndarray:
    """Geometric time grid with a fixed number of points per decade."""
    if not (0 < t_min < t_max):
        raise ValueError("grid requires 0 < t_min < t_max")
    decades = np.log10(t_max / t_min)
    n = max(2, int(np.ceil(decades * points_per_decade)) + 1)
    return np.geomspace(t_min, t_max, n)


# ---------------------------------------------------------------------------
# Lebesgue and Sobolev
# ---------------------------------------------------------------------------

def _physical_magnitude(f) -> tuple:
    """Return (grid, pointwise |f| samples) for scalar or vector fields."""
    if isinstance(f, SpectralVectorField):
        phys = f.samples()
        return f.grid, np.sqrt(phys[0] ** 2 + phys[1] ** 2 + phys[2] ** 2)
    if isinstance(f, SpectralScalarField):
        return f.grid, np.abs(f.samples())
    raise TypeError(f"expected a spectral field, got {type(f)!r}")


def lebesgue_norm(f, p: float) -> float:
    """L^p norm over the box; p = inf is the max over grid samples."""
    if p != np.inf and p < 1:
        raise ValueError(f"Lebesgue exponent must satisfy p >= 1, got {p}")
    if p == np.inf:
        if isinstance(f, SpectralVectorField):
            phys = f.samples()
            return _kernels.magnitude_max(phys[0], phys[1], phys[2])
        grid, mag = _physical_magnitude(f)
        return float(mag.max())
    grid, mag = _physical_magnitude(f)
    return float((grid.l ** 3 * np.mean(mag ** p)) ** (1.0 / p))


def sobolev_norm(u, s: float) -> float:
    """Homogeneous Sobolev norm under the documented spectral convention.

    Mean-free input required for s < 0. The k = 0 mode never contributes.
    """
    if isinstance(u, SpectralScalarField):
        coeffs = u.coeffs[np.newaxis]
        grid = u.grid
        meanmag = abs(u.coeffs[0, 0, 0])
    else:
        coeffs = u.coeffs
        grid = u.grid
        meanmag = mean_magnitude(u)
    if s < 0 and meanmag > 1e-14:
        raise NegativeOrderOnMeanfulField(
            f"H^{s} norm on a field with mean magnitude {meanmag:.3e}"
        )
    total = _kernels.weighted_spectral_sum(coeffs, grid.k2, grid.plane_weight,
                                           float(s))
    return float(np.sqrt(grid.l ** 3 * total))


def l2_norm(u) -> float:
    """Plancherel L^2 norm including the mean mode."""
    if isinstance(u, SpectralScalarField):
        coeffs = u.coeffs[np.newaxis]
        grid = u.grid
    else:
        coeffs, grid = u.coeffs, u.grid
    mag = np.zeros(grid.spectral_shape)
    for c in range(coeffs.shape[0]):
        mag += coeffs[c].real ** 2 + coeffs[c].imag ** 2
    return float(np.sqrt(grid.l ** 3 * np.sum(grid.plane_weight * mag)))


# ---------------------------------------------------------------------------
# time series and the weighted sup norm
# ---------------------------------------------------------------------------

@dataclass
class NormSeries:
    """A sampled time series of one norm."""

    times: np.ndarray
    values: np.ndarray
    norm_tag: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1D arrays of equal length")
        if self.times.size == 0:
            raise ValueError("empty norm series")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("values must be finite and nonnegative")

    def restrict(self, t_max: float) -> "NormSeries":
        keep = self.times <= t_max
        if not np.any(keep):
            raise ValueError(f"no samples at or before t = {t_max}")
        return NormSeries(self.times[keep], self.values[keep], self.norm_tag)


def triple_bar_norm(series: NormSeries, gamma: float = 0.125,
                    t_end: float = np.inf) -> float:
    """sup over sampled times in [0, T] of min(1, t)^gamma * value.

    gamma must lie in (0, 1/4), the admissible weight range.
    """
    if not (0.0 < gamma < 0.25):
        raise ValueError(f"gamma must lie in (0, 1/4), got {gamma}")
    if np.isfinite(t_end):
        series = series.restrict(t_end)
    weight = np.minimum(1.0, series.times) ** gamma
    return float(np.max(weight * series.values))


# ---------------------------------------------------------------------------
# Littlewood-Paley decomposition
# ---------------------------------------------------------------------------

def _smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


def _chi(r: np.ndarray) -> np.ndarray:
    """C^2 radial cutoff: 1 for r <= 3/4, 0 for r >= 1, quintic in between."""
    return 1.0 - _smoothstep((np.asarray(r, dtype=float) - 0.75) / 0.25)


@dataclass(frozen=True)
class DyadicDecomposition:
    """Dyadic shells Delta_j built from a C^2 radial step.

    The shell-j multiplier is chi(|k| / 2^(j+1)) - chi(|k| / 2^j), supported
    in [3/4 * 2^j, 2 * 2^j] (inside the annulus [3/4 * 2^j, 8/3 * 2^j]).
    The multipliers telescope to exactly 1 for 2^j_min <= |k| <= 1.5 * 2^j_max.
    """

    grid: Grid
    j_min: int
    j_max: int

    @classmethod
    def for_grid(cls, grid: Grid) -> "DyadicDecomposition":
        k_lo = 2.0 * np.pi / grid.l
        j_min = int(np.floor(np.log2(k_lo)))
        j_max = int(np.ceil(np.log2(grid.kmax)))
        return cls(grid, j_min, j_max)

    @property
    def shells(self):
        return range(self.j_min, self.j_max + 1)

    def shell_multiplier(self, j: int) -> np.ndarray:
        r = np.sqrt(self.grid.k2)
        return _chi(r / 2.0 ** (j + 1)) - _chi(r / 2.0 ** j)

    def multiplier_sum(self) -> np.ndarray:
        r = np.sqrt(self.grid.k2)
        return _chi(r / 2.0 ** (self.j_max + 1)) - _chi(r / 2.0 ** self.j_min)

    def covers(self, u) -> bool:
        """True when all active modes of u sit where the partition sums to 1."""
        coeffs = u.coeffs if u.coeffs.ndim == 4 else u.coeffs[np.newaxis]
        amp = np.max(np.abs(coeffs), axis=0)
        active = amp > 1e-13 * max(amp.max(), 1e-300)
        r = np.sqrt(self.grid.k2)
        active &= r > 0
        if not np.any(active):
            return True
        ra = r[active]
        return bool(ra.min() >= 2.0 ** self.j_min
                    and ra.max() <= 1.5 * 2.0 ** self.j_max)

    def project_shell(self, u: SpectralVectorField, j: int) -> SpectralVectorField:
        mult = self.shell_multiplier(j)
        return u.with_coeffs(u.coeffs * mult, mean_free=True,
                             solenoidal_checked=u.solenoidal_checked)


def _require_coverage(u, decomp: DyadicDecomposition):
    if not decomp.covers(u):
        raise ValueError("field spectrum lies outside the decomposition range")


def besov_block_norm(u: SpectralVectorField, decomp: DyadicDecomposition,
                     s: float, p: float, q: float) -> float:
    """Generic LP-block Besov norm (sum_j (2^(js) |Delta_j u|_{L^p})^q)^(1/q)."""
    _require_coverage(u, decomp)
    blocks = []
    for j in decomp.shells:
        mult = decomp.shell_multiplier(j)
        mass = float(np.sum(np.abs(u.coeffs) ** 2 * mult ** 2))
        if mass == 0.0:
            continue
        piece = u.with_coeffs(u.coeffs * mult)
        blocks.append(2.0 ** (j * s) * lebesgue_norm(piece, p))
    if not blocks:
        return 0.0
    arr = np.asarray(blocks)
    if q == np.inf:
        return float(arr.max())
    return float(np.sum(arr ** q) ** (1.0 / q))


def besov_0_3_2(u0: SpectralVectorField, decomp: DyadicDecomposition) -> float:
    """B^0_{3,2} norm, LP form (sum_j |Delta_j u0|_{L^3}^2)^(1/2)."""
    return besov_block_norm(u0, decomp, s=0.0, p=3.0, q=2.0)


def besov_m1_inf_2(u0: SpectralVectorField, decomp: DyadicDecomposition) -> float:
    """B^-1_{inf,2} norm, LP form (sum_j 2^(-2j) |Delta_j u0|_{L^inf}^2)^(1/2)."""
    return besov_block_norm(u0, decomp, s=-1.0, p=np.inf, q=2.0)


def besov_m1_inf_inf_blocks(u0: SpectralVectorField,
                            decomp: DyadicDecomposition) -> float:
    """LP-block variant of B^-1_{inf,inf}, kept as a cross-check of the heat
    characterization."""
    return besov_block_norm(u0, decomp, s=-1.0, p=np.inf, q=np.inf)


# ---------------------------------------------------------------------------
# heat-flow characterizations
# ---------------------------------------------------------------------------

@dataclass
class BesovHeatValue:
    """Result of the heat-characterization sup, with grid-span warnings."""

    value: float
    argmax_t: float
    warnings: tuple = field(default_factory=tuple)

    def __float__(self):
        return self.value


def default_heat_grid(grid: Grid, points_per_decade: int = 16) -> np.ndarray:
    t_min = 0.5 * (2.0 * np.pi / (grid.l * grid.n)) ** 2
    t_max = 2.0 * grid.l ** 2
    return geometric_grid(t_min, t_max, points_per_decade)


def besov_m1_inf_inf(u0: SpectralVectorField,
                     t_grid: np.ndarray = None) -> BesovHeatValue:
    """B^-1_{inf,inf} via the heat characterization
    sup_t t^(1/2) |e^{t Lap} u0|_{L^inf}, sup over a geometric grid."""
    grid = u0.grid
    if t_grid is None:
        t_grid = default_heat_grid(grid)
    t_grid = np.asarray(t_grid, dtype=float)
    warns = []
    if t_grid[0] > (2.0 * np.pi / (grid.l * grid.n)) ** 2:
        warns.append("t_grid does not reach the finest heat scale (2*pi/(l*n))^2")
    if t_grid[-1] < grid.l ** 2:
        warns.append("t_grid does not reach the box heat scale l^2")
    if float(np.max(np.abs(u0.coeffs))) == 0.0:
        return BesovHeatValue(0.0, t_grid[0], tuple(warns))
    best, best_t = 0.0, t_grid[0]
    workers = get_fft_workers()
    for t in t_grid:
        decayed = u0.coeffs * np.exp(-grid.k2 * t)
        phys = [sfft.irfftn(decayed[c], s=grid.physical_shape,
                            norm="forward", workers=workers) for c in range(3)]
        val = np.sqrt(t) * _kernels.magnitude_max(phys[0], phys[1], phys[2])
        if val > best:
            best, best_t = float(val), float(t)
    return BesovHeatValue(best, best_t, tuple(warns))


def w13_seminorm(u: SpectralVectorField) -> float:
    """|grad u|_{L^3}: L^3 norm of the Frobenius magnitude of the gradient."""
    g = u.grid
    k = (g.kx, g.ky, g.kz)
    workers = get_fft_workers()
    sq = np.zeros(g.physical_shape)
    for i in range(3):
        for j in range(3):
            d = sfft.irfftn(1j * k[j] * u.coeffs[i], s=g.physical_shape,
                            norm="forward", workers=workers)
            sq += d * d
    mag = np.sqrt(sq)
    return float((g.l ** 3 * np.mean(mag ** 3)) ** (1.0 / 3.0))


def heat_flow_b032(u0: SpectralVectorField, points_per_decade: int = 32) -> float:
    """Heat-flow quantity (int_0^inf |grad e^{t Lap} u0|_{L^3}^2 dt)^(1/2),
    comparable to the LP form of B^0_{3,2}.

    Log-spaced trapezoid quadrature plus a small-t plateau correction; band
    limitation makes the integrand constant as t -> 0 and exponentially
    decaying past the box scale.
    """
    grid = u0.grid
    if float(np.max(np.abs(u0.coeffs))) == 0.0:
        return 0.0
    t_min = 0.05 * (2.0 * np.pi / (grid.l * grid.n)) ** 2
    k_lo = 2.0 * np.pi / grid.l
    t_max = 10.0 / k_lo ** 2
    ts = geometric_grid(t_min, t_max, points_per_decade)
    vals = np.array([w13_seminorm(heat_semigroup(u0, t)) ** 2 for t in ts])
    integral = np.trapezoid(vals, ts) + vals[0] * t_min
    # exponential tail beyond t_max, decay rate 2 k_lo^2 at worst
    integral += vals[-1] / (2.0 * k_lo ** 2)
    return float(np.sqrt(integral))
