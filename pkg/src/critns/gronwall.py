"""Numerical laboratory for the weakly singular Volterra inequalities: the
extremal (equality) solution by Picard iteration, the exponential bound in
log space, and the constructive time-doubling argument at mesh-reachable
step sizes.

Kernels are (t - tau)^(-alpha) tau^(-beta) with alpha in (0,1), beta in
[0,1). Convolutions use product integration: the unknown is piecewise linear
on the mesh and the kernel moments are integrated panel-by-panel with
Gauss-Jacobi rules on singular panels (exact for the algebraic endpoint
weights) and Gauss-Legendre elsewhere, so the only discretization error is
the O(h^2) interpolation of the solution itself.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import warnings as _warnings

import mpmath
import numpy as np
from scipy.special import roots_jacobi, roots_legendre

PICARD_MAX_ITER = 200
PICARD_TOL = 1e-10
_QUAD_ORDER = 24


@lru_cache(maxsize=64)
def _jacobi_rule(order: int, a: float, b: float):
    with _warnings.catch_warnings():
        # scipy's recurrence evaluates both branches of an np.where and
        # emits a spurious divide warning for k == 1
        _warnings.simplefilter("ignore", RuntimeWarning)
        return roots_jacobi(order, a, b)


@lru_cache(maxsize=8)
def _legendre_rule(order: int):
    return roots_legendre(order)


@dataclass
class GronwallProblem:
    """One instance of the time-weighted Volterra inequality.

    ``frozen_eps`` switches on the frozen-quadratic variant: the second
    kernel coefficient becomes 20 sqrt(eps) (small_time) or 16 sqrt(eps)
    (large_time) in place of c2.
    """

    a0: float
    c1: float
    c2: float
    regime: str = "small_time"          # small_time | large_time
    horizon: float = 1.0
    mesh_points: int = 161
    grading: float = 8.0
    frozen_eps: float = None

    def __post_init__(self):
        if self.regime not in ("small_time", "large_time"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if not self.a0 > 0:
            raise ValueError("a0 must be positive")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1, c2 must be nonnegative")
        if self.regime == "small_time" and self.horizon > 1:
            raise ValueError("small_time regime requires horizon <= 1")
        if self.regime == "large_time" and self.horizon < 1:
            raise ValueError("large_time regime requires horizon >= 1")
        if self.mesh_points < 9:
            raise ValueError("mesh needs at least 9 points")

    def effective_c2(self) -> float:
        if self.frozen_eps is None:
            return self.c2
        root = float(np.sqrt(self.frozen_eps))
        return 20.0 * root if self.regime == "small_time" else 16.0 * root

    def mesh(self) -> np.ndarray:
        i = np.arange(self.mesh_points, dtype=float)
        return self.horizon * (i / (self.mesh_points - 1)) ** self.grading

    def refined(self, factor: int = 2) -> "GronwallProblem":
        return GronwallProblem(self.a0, self.c1, self.c2, self.regime,
                               self.horizon, (self.mesh_points - 1) * factor + 1,
                               self.grading, self.frozen_eps)


@dataclass
class GronwallSolution:
    times: np.ndarray
    a_values: np.ndarray
    picard_iterations: int
    residual: float
    converged: bool
    bound_log: float
    doubling_checks: list = field(default_factory=list)

    def sup(self) -> float:
        return float(np.max(self.a_values))

    def running_sup(self, t: float) -> float:
        """F(t): sup of the computed solution over [0, t]."""
        times, vals = self.times, self.a_values
        if t < times[0]:
            raise ValueError("t below the mesh")
        idx = np.searchsorted(times, t, side="right") - 1
        best = float(np.max(vals[: idx + 1]))
        if idx + 1 < times.size and times[idx] < t:
            frac = (t - times[idx]) / (times[idx + 1] - times[idx])
            best = max(best, float(vals[idx] + frac * (vals[idx + 1] - vals[idx])))
        return best


# ---------------------------------------------------------------------------
# product-integration machinery
# ---------------------------------------------------------------------------

def _check_exponents(alpha: float, beta: float):
    if alpha >= 1 or beta >= 1:
        raise ValueError(
            f"kernel exponents must satisfy alpha < 1, beta < 1 (non-integrable "
            f"otherwise), got alpha={alpha}, beta={beta}"
        )
    if alpha < 0 or beta < 0:
        raise ValueError("kernel exponents must be nonnegative")


def _panel_pair(t: float, alpha: float, beta: float, ta: float, tb: float):
    """Moments (m0, m1) of (t-tau)^-alpha tau^-beta {1, (tau-ta)/(tb-ta)}
    over the panel [ta, tb] with tb <= t."""
    h = tb - ta
    sing_right = tb >= t * (1.0 - 1e-14)
    sing_left = ta == 0.0 and beta > 0.0
    if sing_left and sing_right:
        x, w = _jacobi_rule(_QUAD_ORDER, -alpha, -beta)
        tau = 0.5 * t * (1.0 + x)
        scale = (0.5 * t) ** (1.0 - alpha - beta)
        lin = (tau - ta) / h
        return float(np.sum(w) * scale), float(np.sum(w * lin) * scale)
    if sing_right:
        x, w = _jacobi_rule(_QUAD_ORDER, -alpha, 0.0)
        tau = ta + 0.5 * h * (1.0 + x)
        smooth = tau ** (-beta) if beta > 0 else np.ones_like(tau)
        scale = (0.5 * h) ** (1.0 - alpha)
    elif sing_left:
        x, w = _jacobi_rule(_QUAD_ORDER, 0.0, -beta)
        tau = ta + 0.5 * h * (1.0 + x)
        smooth = (t - tau) ** (-alpha)
        scale = (0.5 * h) ** (1.0 - beta)
    else:
        x, w = _legendre_rule(_QUAD_ORDER)
        tau = ta + 0.5 * h * (1.0 + x)
        smooth = (t - tau) ** (-alpha) * (tau ** (-beta) if beta > 0 else 1.0)
        scale = 0.5 * h
    lin = (tau - ta) / h
    return float(np.sum(w * smooth) * scale), float(np.sum(w * smooth * lin) * scale)


def convolution_matrix(mesh: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Lower-triangular C with (C f)[i] = int_0^{t_i} kernel * f_lin d tau
    for f piecewise linear on the mesh (mesh[0] must be 0)."""
    _check_exponents(alpha, beta)
    mesh = np.asarray(mesh, dtype=float)
    if mesh[0] != 0.0 or np.any(np.diff(mesh) <= 0):
        raise ValueError("mesh must start at 0 and increase strictly")
    m = mesh.size
    cmat = np.zeros((m, m))
    glx, glw = _legendre_rule(_QUAD_ORDER)
    for i in range(1, m):
        t = mesh[i]
        # interior panels vectorized with Gauss-Legendre
        if i > 2:
            ta = mesh[1:i - 1]
            tb = mesh[2:i]
            h = tb - ta
            tau = ta[:, None] + 0.5 * h[:, None] * (1.0 + glx[None, :])
            kern = (t - tau) ** (-alpha)
            if beta > 0:
                kern = kern * tau ** (-beta)
            w = 0.5 * h[:, None] * glw[None, :]
            lin = (tau - ta[:, None]) / h[:, None]
            m0 = np.sum(w * kern, axis=1)
            m1 = np.sum(w * kern * lin, axis=1)
            cmat[i, 1:i - 1] += m0 - m1
            cmat[i, 2:i] += m1
        # first panel (singular at tau = 0 when beta > 0) and last (at tau = t);
        # for i == 1 the single panel carries both singularities
        for j in {0, i - 1}:
            m0, m1 = _panel_pair(t, alpha, beta, mesh[j], mesh[j + 1])
            cmat[i, j] += m0 - m1
            cmat[i, j + 1] += m1
    return cmat


def singular_convolution(times, values, alpha: float, beta: float,
                         t: float) -> float:
    """int_0^t (t-tau)^-alpha tau^-beta f(tau) d tau for f piecewise linear
    given by (times, values); times must start at 0 and cover t."""
    _check_exponents(alpha, beta)
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if not t > 0:
        raise ValueError("t must be positive")
    if times[0] != 0.0 or times[-1] < t:
        raise ValueError("sample times must start at 0 and cover t")
    idx = np.searchsorted(times, t)
    if times[min(idx, times.size - 1)] == t:
        mesh = times[: idx + 1]
        f = values[: idx + 1]
    else:
        frac = (t - times[idx - 1]) / (times[idx] - times[idx - 1])
        mesh = np.append(times[:idx], t)
        f = np.append(values[:idx],
                      values[idx - 1] + frac * (values[idx] - values[idx - 1]))
    total = 0.0
    for j in range(mesh.size - 1):
        m0, m1 = _panel_pair(t, alpha, beta, mesh[j], mesh[j + 1])
        total += (m0 - m1) * f[j] + m1 * f[j + 1]
    return float(total)


def beta_moment(alpha: float, beta: float, panels: int = 32) -> float:
    """int_0^1 lambda^-beta (1-lambda)^-alpha d lambda by the same panel
    quadrature (the Gamma-function identity is the independent test oracle)."""
    _check_exponents(alpha, beta)
    mesh = np.linspace(0.0, 1.0, panels + 1)
    total = 0.0
    for j in range(panels):
        m0, _ = _panel_pair(1.0, alpha, beta, mesh[j], mesh[j + 1])
        total += m0
    return float(total)


# ---------------------------------------------------------------------------
# extremal solution and bound verification
# ---------------------------------------------------------------------------

def _bound_exponent(t_end: float, c1: float, c2: float) -> float:
    """20^8 T (c1+10)^8 (c2+10)^8, assembled in log space to avoid overflow."""
    log_val = (8.0 * np.log(20.0) + np.log(t_end)
               + 8.0 * np.log(c1 + 10.0) + 8.0 * np.log(c2 + 10.0))
    return float(np.exp(log_val)) if log_val < 700 else float("inf")


def solve_extremal(problem: GronwallProblem) -> GronwallSolution:
    """Picard iteration on the equality version of the inequality.

    The RHS operator is monotone with positive kernels, so its fixed point
    dominates every solution of the inequality; iterates start at the
    constant a0 and increase. Convergence is sup-difference <= 1e-10 * a0
    within 200 iterations; otherwise the last iterate is returned with
    ``converged=False`` (strongly expansive instances grow through hundreds
    of orders of magnitude before turning over and are reported, not solved).
    """
    mesh = problem.mesh()
    c1, c2 = problem.c1, problem.effective_c2()
    if problem.regime == "small_time":
        mat1 = convolution_matrix(mesh, 0.5, 0.125)
        mat2 = convolution_matrix(mesh, 0.875, 0.125)
        pref1 = mesh ** 0.125
        pref2 = mesh ** 0.125
    else:
        mat1 = convolution_matrix(mesh, 0.5, 0.0)
        mat2 = convolution_matrix(mesh, 0.875, 0.0)
        pref1 = np.ones_like(mesh)
        pref2 = mesh ** 0.125
    a = np.full(mesh.size, problem.a0)
    residual = np.inf
    iterations = 0
    for iterations in range(1, PICARD_MAX_ITER + 1):
        rhs = problem.a0 + c1 * pref1 * (mat1 @ a) + c2 * pref2 * (mat2 @ a)
        if not np.all(np.isfinite(rhs)):
            break
        residual = float(np.max(np.abs(rhs - a)))
        a = rhs
        if residual <= PICARD_TOL * problem.a0:
            break
    converged = residual <= PICARD_TOL * problem.a0
    bound_log = np.log(problem.a0) + _bound_exponent(problem.horizon, problem.c1,
                                                     problem.effective_c2())
    return GronwallSolution(mesh, a, iterations, residual, converged, bound_log)


def _paper_t0(problem: GronwallProblem):
    c1 = mpmath.mpf(problem.c1)
    c2 = mpmath.mpf(problem.effective_c2())
    if problem.regime == "small_time":
        return 1 / (mpmath.mpf(20) ** 8 * (c1 + 10) ** 8 * (c2 + 10) ** 8)
    return 1 / ((c1 + 10) ** 4 * (c2 + 10) ** 4)


def _premise(problem: GronwallProblem, step):
    """LHS of the contraction premise for a doubling step of size ``step``."""
    c1, c2 = mpmath.mpf(problem.c1), mpmath.mpf(problem.effective_c2())
    step = mpmath.mpf(step)
    if problem.regime == "small_time":
        return 10 * (c1 * mpmath.sqrt(step) + c2 * step ** mpmath.mpf("0.125"))
    return 8 * (c1 * mpmath.sqrt(step) + c2 * step ** mpmath.mpf("0.25"))


@dataclass
class DoublingRow:
    k: int
    f_value: float
    budget: float            # 2^k a0
    within_budget: bool
    within_step_doubling: bool


@dataclass
class GronwallVerification:
    log_sup_a: float
    bound_log: float
    bound_holds: bool
    paper_t0: float
    paper_premise_value: float
    paper_premise_holds: bool
    surrogate_t0: float
    surrogate_premise_value: float
    surrogate_premise_holds: bool
    surrogate_status: str
    doubling_rows: list


def verify_lemma_bound(sol: GronwallSolution, problem: GronwallProblem,
                       surrogate_t0: float = 0.05,
                       rel_tol: float = 1e-9) -> GronwallVerification:
    """Check the exponential bound in log space and the doubling structure.

    The paper's step size T0 is far below any reachable mesh, so its
    contraction premise is evaluated in high-precision arithmetic only; the
    doubling rows use the surrogate step, and are reported as skipped when
    the premise fails there.
    """
    with mpmath.workdps(50):
        t0 = _paper_t0(problem)
        paper_premise = _premise(problem, t0)
        paper_ok = paper_premise <= mpmath.mpf(1) / 2
        surr_premise = float(_premise(problem, surrogate_t0))
    sup_a = sol.sup()
    log_sup = float(np.log(sup_a))
    bound_holds = log_sup <= sol.bound_log
    rows = []
    if surr_premise <= 0.5:
        status = "checked"
        k = 1
        prev_f = sol.running_sup(min(surrogate_t0, problem.horizon))
        rows.append(DoublingRow(1, prev_f, 2.0 * problem.a0,
                                prev_f <= 2.0 * problem.a0 * (1 + rel_tol), True))
        while (k + 1) * surrogate_t0 <= problem.horizon:
            k += 1
            f_k = sol.running_sup(k * surrogate_t0)
            rows.append(DoublingRow(
                k, f_k, 2.0 ** k * problem.a0,
                f_k <= 2.0 ** k * problem.a0 * (1 + rel_tol),
                f_k <= 2.0 * prev_f * (1 + rel_tol),
            ))
            prev_f = f_k
    else:
        status = "premise-not-met, skipped"
    return GronwallVerification(
        log_sup_a=log_sup,
        bound_log=sol.bound_log,
        bound_holds=bool(bound_holds),
        paper_t0=float(t0),
        paper_premise_value=float(paper_premise),
        paper_premise_holds=bool(paper_ok),
        surrogate_t0=surrogate_t0,
        surrogate_premise_value=surr_premise,
        surrogate_premise_holds=surr_premise <= 0.5,
        surrogate_status=status,
        doubling_rows=rows,
    )
