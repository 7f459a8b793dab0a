"""Test objectives and exact worst-case machinery.

Builds every objective used by the experiments: the two-dimensional
worst-case quadratic q(x) = (kappa/2)x1^2 + (1/2)x2^2, its scaled and
Hölder-powered variants, the Huber loss with horizon-dependent threshold,
|Ax|^(1+nu) matrix powers, the one-dimensional absolute value, and
interpolated least-squares problems.  Also provides the closed-form
trajectory of the scaled-Polyak-stepsize method on the worst-case
quadratic, which serves as the exact-arithmetic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._util import ipow, make_rng
from .errors import ParameterError

__all__ = [
    "Objective",
    "StochasticProblem",
    "make_objective",
    "make_interp_lsq_problem",
    "nonconvex_sqrt_abs",
    "worstcase_initial_point",
    "kappa_for_horizon",
    "exact_trajectory",
    "worstcase_normalized_best_gap",
    "worstcase_normalized_best_gap_holder",
    "holder_constant_for_powered_quadratic",
    "spectral_norm",
]

OBJECTIVE_KINDS = (
    "quad_q",
    "scaled_q",
    "holder_power_q",
    "huber",
    "matrix_power",
    "abs1d",
    "interp_lsq",
)


@dataclass(frozen=True)
class Objective:
    """An evaluatable convex test function with known optimal value.

    value/gradient are pure callables; gradient returns a minimal-norm
    subgradient at nondifferentiable points.  Optional fields carry closed
    forms when available: distance to the solution set, the gradient-norm
    supremum over a ball, Hölder smoothness metadata (nu, L_nu), growth
    metadata as a function of the region radius, and Hessian eigenvalue
    range for exact quadratics.
    """

    name: str
    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    f_star: float = 0.0
    minimizer: Optional[np.ndarray] = None
    dist_to_solution: Optional[Callable[[np.ndarray], float]] = None
    grad_sup_on_region: Optional[Callable[..., Optional[float]]] = None
    holder: Optional[tuple[float, float]] = None
    growth: Optional[Callable[[float], tuple[float, float]]] = None
    hessian_eigs: Optional[tuple[float, float]] = None

    def gap(self, x: np.ndarray) -> float:
        return self.value(x) - self.f_star


@dataclass(frozen=True)
class StochasticProblem:
    """Finite-sum problem satisfying interpolation.

    Every component attains its own minimum value at the shared minimizer,
    so the per-component Polyak stepsize never overshoots the common
    solution.
    """

    dim: int
    n_components: int
    component_value: Callable[[np.ndarray, int], float]
    component_gradient: Callable[[np.ndarray, int], np.ndarray]
    component_f_star: np.ndarray
    minimizer: np.ndarray
    mean_objective: Optional[Objective] = None


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ParameterError("points must be one-dimensional vectors")
    return x


# ---------------------------------------------------------------------------
# worst-case quadratic family


def _check_quad_params(kappa: float) -> float:
    kappa = float(kappa)
    if not kappa > 1.0:
        raise ParameterError(f"condition number must exceed 1, got {kappa}")
    return kappa


def _quad_objective(kappa: float, scale: float, name: str) -> Objective:
    """(scale) * [ (kappa/2)x1^2 + (1/2)x2^2 ] with Hessian scale*diag(kappa, 1)."""
    lam_max = scale * kappa
    lam_min = scale

    def value(x):
        return 0.5 * scale * (kappa * x[0] * x[0] + x[1] * x[1])

    def gradient(x):
        return np.array([scale * kappa * x[0], scale * x[1]])

    def dist(x):
        return math.sqrt(float(x[0] * x[0] + x[1] * x[1]))

    def grad_sup(radius, center=None):
        if center is None:
            return lam_max * radius
        c = _as_point(center)
        h = np.array([scale * kappa * c[0], scale * c[1]])
        return math.sqrt(float(h @ h)) + lam_max * radius

    def growth(radius):
        return (2.0, lam_min / 2.0)

    return Objective(
        name=name,
        dim=2,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=np.zeros(2),
        dist_to_solution=dist,
        grad_sup_on_region=grad_sup,
        holder=(1.0, lam_max),
        growth=growth,
        hessian_eigs=(lam_min, lam_max),
    )


def holder_constant_for_powered_quadratic(L: float, nu: float) -> float:
    """Hölder smoothness constant of ((L/kappa)q)^((nu+1)/2): 2^((1-3nu)/2)(nu+1)L^((nu+1)/2)."""
    return 2.0 ** ((1.0 - 3.0 * nu) / 2.0) * (nu + 1.0) * L ** ((nu + 1.0) / 2.0)


def _holder_power_objective(kappa: float, L: float, nu: float) -> Objective:
    p = (nu + 1.0) / 2.0
    scale = L / kappa
    L_nu = holder_constant_for_powered_quadratic(L, nu)
    lam_min = scale  # smaller Hessian eigenvalue of the quadratic core

    def core(x):
        return 0.5 * scale * (kappa * x[0] * x[0] + x[1] * x[1])

    def value(x):
        return core(x) ** p

    def gradient(x):
        t = core(x)
        if t == 0.0:
            return np.zeros(2)
        return (p * t ** (p - 1.0)) * np.array([scale * kappa * x[0], scale * x[1]])

    def dist(x):
        return math.sqrt(float(x[0] * x[0] + x[1] * x[1]))

    def grad_sup(radius, center=None):
        if center is not None and float(np.linalg.norm(_as_point(center))) > 0.0:
            return None
        # maximum of p * core^(p-1) * |grad core| over the sphere sits on the
        # stiff eigendirection for every nu in (0, 1]
        return p * 2.0 ** ((1.0 - nu) / 2.0) * L ** ((nu + 1.0) / 2.0) * radius**nu

    def growth(radius):
        return (nu + 1.0, (lam_min / 2.0) ** p)

    return Objective(
        name=f"holder_power_q(kappa={kappa}, L={L}, nu={nu})",
        dim=2,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=np.zeros(2),
        dist_to_solution=dist,
        grad_sup_on_region=grad_sup,
        holder=(nu, L_nu),
        growth=growth,
        hessian_eigs=None,
    )


# ---------------------------------------------------------------------------
# Huber loss


def _huber_objective(horizon: int, dim: int) -> Objective:
    if horizon < 1 or horizon != int(horizon):
        raise ParameterError(f"huber horizon must be a positive integer, got {horizon}")
    c = 1.0 / (2 * int(horizon) + 1)

    def value(x):
        r = math.sqrt(float(x @ x))
        if r <= c:
            return 0.5 * r * r
        return c * r - 0.5 * c * c

    def gradient(x):
        r = math.sqrt(float(x @ x))
        if r <= c:
            return np.array(x, dtype=float)
        return (c / r) * np.asarray(x, dtype=float)

    def dist(x):
        return math.sqrt(float(x @ x))

    def grad_sup(radius, center=None):
        reach = radius if center is None else radius + float(np.linalg.norm(_as_point(center)))
        return min(reach, c)

    def growth(radius):
        if radius <= c:
            return (2.0, 0.5)
        return (2.0, c / radius - 0.5 * c * c / (radius * radius))

    return Objective(
        name=f"huber(horizon={horizon})",
        dim=dim,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=np.zeros(dim),
        dist_to_solution=dist,
        grad_sup_on_region=grad_sup,
        holder=(1.0, 1.0),
        growth=growth,
        hessian_eigs=None,
    )


# ---------------------------------------------------------------------------
# |Ax|^(1+nu)


def spectral_norm(A: np.ndarray, rel_tol: float = 1e-12, max_iters: int = 100_000) -> float:
    """Spectral norm of a symmetric matrix by power iteration on A@A."""
    A = np.asarray(A, dtype=float)
    M = A @ A
    v = np.ones(A.shape[0]) / math.sqrt(A.shape[0])
    lam = 0.0
    for _ in range(max_iters):
        w = M @ v
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        lam_new = float(v @ (M @ v))
        if abs(lam_new - lam) <= rel_tol * max(lam_new, 1e-300):
            return math.sqrt(lam_new)
        lam = lam_new
    return math.sqrt(lam)


def _matrix_power_objective(A: np.ndarray, nu: float) -> Objective:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError("matrix_power expects a square matrix")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(A).max()))):
        raise ParameterError("matrix_power expects a symmetric matrix")
    if not np.all(np.isfinite(A)):
        raise ParameterError("matrix_power expects finite matrix entries")
    n = A.shape[0]
    norm_A = spectral_norm(A)
    L_nu = 2.0 ** (1.0 - nu) * (nu + 1.0) * norm_A ** (nu + 1.0)
    eigs = np.linalg.eigvalsh(A)
    sigma_min = float(np.min(np.abs(eigs)))
    invertible = sigma_min > 1e-12 * max(norm_A, 1.0)

    def value(x):
        ax = A @ x
        return float(np.linalg.norm(ax)) ** (1.0 + nu)

    def gradient(x):
        ax = A @ x
        r = float(np.linalg.norm(ax))
        if r == 0.0:
            return np.zeros(n)
        return (1.0 + nu) * r ** (nu - 1.0) * (A @ ax)

    def grad_sup(radius, center=None):
        if center is not None and float(np.linalg.norm(_as_point(center))) > 0.0:
            return None
        return (1.0 + nu) * norm_A ** (1.0 + nu) * radius**nu

    dist = None
    growth = None
    minimizer = np.zeros(n)
    if invertible:

        def dist(x):  # noqa: F811 - closed form only when the null space is trivial
            return float(np.linalg.norm(x))

        def growth(radius):  # noqa: F811
            return (nu + 1.0, sigma_min ** (nu + 1.0))

    return Objective(
        name=f"matrix_power(n={n}, nu={nu})",
        dim=n,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=minimizer if invertible else None,
        dist_to_solution=dist,
        grad_sup_on_region=grad_sup,
        holder=(nu, L_nu),
        growth=growth,
        hessian_eigs=None,
    )


# ---------------------------------------------------------------------------
# 1-d absolute value


def _abs1d_objective() -> Objective:
    def value(x):
        return abs(float(x[0]))

    def gradient(x):
        # minimal-norm subgradient at 0, which also terminates the run there
        return np.array([float(np.sign(x[0]))])

    return Objective(
        name="abs1d",
        dim=1,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=np.zeros(1),
        dist_to_solution=lambda x: abs(float(x[0])),
        grad_sup_on_region=lambda radius, center=None: 1.0,
        holder=None,
        growth=lambda radius: (1.0, 1.0),
        hessian_eigs=None,
    )


def nonconvex_sqrt_abs() -> Objective:
    """sqrt(|x|) in one dimension: star-convexity fails, for negative tests."""

    def value(x):
        return math.sqrt(abs(float(x[0])))

    def gradient(x):
        t = float(x[0])
        if t == 0.0:
            return np.zeros(1)
        return np.array([math.copysign(0.5 / math.sqrt(abs(t)), t)])

    return Objective(
        name="nonconvex_sqrt_abs",
        dim=1,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=np.zeros(1),
        dist_to_solution=lambda x: abs(float(x[0])),
    )


# ---------------------------------------------------------------------------
# interpolated least squares


def _lsq_data(m: int, n: int, seed: int):
    if m <= n or n < 1:
        raise ParameterError("interp_lsq requires m > n >= 1")
    gen = make_rng(seed)
    A = gen.standard_normal((m, n))
    x_star = gen.standard_normal(n)
    if np.linalg.matrix_rank(A) < n:
        raise ParameterError("sampled least-squares matrix is rank deficient; change the seed")
    b = A @ x_star
    return A, b, x_star


def make_interp_lsq_problem(m: int, n: int, seed: int = 0) -> StochasticProblem:
    """Consistent least squares: components f_i = (a_i.x - b_i)^2 / 2, all zero at x_star."""
    A, b, x_star = _lsq_data(m, n, seed)

    def component_value(x, i):
        r = float(A[i] @ x) - b[i]
        return 0.5 * r * r

    def component_gradient(x, i):
        r = float(A[i] @ x) - b[i]
        return r * A[i]

    return StochasticProblem(
        dim=n,
        n_components=m,
        component_value=component_value,
        component_gradient=component_gradient,
        component_f_star=np.zeros(m),
        minimizer=x_star,
        mean_objective=_lsq_mean_objective(A, b, x_star, m, n, seed),
    )


def _lsq_mean_objective(A, b, x_star, m, n, seed) -> Objective:
    H = (A.T @ A) / m
    eigs = np.linalg.eigvalsh(H)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])

    def value(x):
        r = A @ x - b
        return 0.5 * float(r @ r) / m

    def gradient(x):
        return (A.T @ (A @ x - b)) / m

    def dist(x):
        return float(np.linalg.norm(x - x_star))

    def grad_sup(radius, center=None):
        offset = 0.0 if center is None else float(np.linalg.norm(_as_point(center) - x_star))
        return lam_max * (radius + offset)

    return Objective(
        name=f"interp_lsq(m={m}, n={n}, seed={seed})",
        dim=n,
        value=value,
        gradient=gradient,
        f_star=0.0,
        minimizer=x_star,
        dist_to_solution=dist,
        grad_sup_on_region=grad_sup,
        holder=(1.0, lam_max),
        growth=lambda radius: (2.0, lam_min / 2.0),
        hessian_eigs=(lam_min, lam_max),
    )


# ---------------------------------------------------------------------------
# dispatch


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not 0.0 < nu <= 1.0:
        raise ParameterError(f"Hölder exponent must lie in (0, 1], got {nu}")
    return nu


def make_objective(kind: str, **params) -> Objective:
    """Construct a built-in objective by kind.

    Kinds and parameters:
      quad_q(kappa)                  -- (kappa/2)x1^2 + (1/2)x2^2
      scaled_q(kappa, L)             -- (L/kappa) * quad_q
      holder_power_q(kappa, L, nu)   -- scaled_q ** ((nu+1)/2)
      huber(horizon, dim=2)          -- Huber loss with threshold 1/(2*horizon+1)
      matrix_power(A, nu)            -- |A x|^(1+nu), A symmetric
      abs1d()                        -- |x| in one dimension
      interp_lsq(m, n, seed=0)       -- mean of interpolated least squares
    """
    if kind == "quad_q":
        kappa = _check_quad_params(params.pop("kappa"))
        _reject_extras(kind, params)
        return _quad_objective(kappa, 1.0, f"quad_q(kappa={kappa})")
    if kind == "scaled_q":
        kappa = _check_quad_params(params.pop("kappa"))
        L = float(params.pop("L"))
        _reject_extras(kind, params)
        if L <= 0.0:
            raise ParameterError(f"smoothness scale must be positive, got {L}")
        return _quad_objective(kappa, L / kappa, f"scaled_q(kappa={kappa}, L={L})")
    if kind == "holder_power_q":
        kappa = _check_quad_params(params.pop("kappa"))
        L = float(params.pop("L", 1.0))
        nu = _check_nu(params.pop("nu"))
        _reject_extras(kind, params)
        if L <= 0.0:
            raise ParameterError(f"smoothness scale must be positive, got {L}")
        return _holder_power_objective(kappa, L, nu)
    if kind == "huber":
        horizon = int(params.pop("horizon"))
        dim = int(params.pop("dim", 2))
        _reject_extras(kind, params)
        return _huber_objective(horizon, dim)
    if kind == "matrix_power":
        A = params.pop("A")
        nu = _check_nu(params.pop("nu"))
        _reject_extras(kind, params)
        return _matrix_power_objective(A, nu)
    if kind == "abs1d":
        _reject_extras(kind, params)
        return _abs1d_objective()
    if kind == "interp_lsq":
        m = int(params.pop("m"))
        n = int(params.pop("n"))
        seed = int(params.pop("seed", 0))
        _reject_extras(kind, params)
        return make_interp_lsq_problem(m, n, seed).mean_objective
    raise ParameterError(f"unknown objective kind {kind!r}; expected one of {OBJECTIVE_KINDS}")


def _reject_extras(kind: str, params: dict) -> None:
    if params:
        raise ParameterError(f"unexpected parameters for {kind}: {sorted(params)}")


# ---------------------------------------------------------------------------
# worst-case initial points and the exact trajectory oracle


def _admissible_kappa(gamma: float, kappa: float) -> None:
    if not 0.0 < gamma < 4.0:
        raise ParameterError(f"scaling parameter must lie in (0, 4), got {gamma}")
    bound = max(4.0 / gamma - 1.0, gamma / (4.0 - gamma))
    if not kappa > bound:
        raise ParameterError(
            f"condition number {kappa} too small for gamma={gamma}; "
            f"needs kappa > {bound}"
        )


def _ray_ratio(gamma: float, kappa: float) -> float:
    """(x2/x1)^2 along the invariant ray of the worst-case trajectory."""
    return (4.0 * kappa * kappa - gamma * kappa * (kappa + 1.0)) / (gamma * (kappa + 1.0) - 4.0)


def worstcase_initial_point(gamma: float, kappa: float, unit_sphere: bool = False) -> np.ndarray:
    """Initial point on the invariant ray, both components positive.

    On this ray the Polyak ratio is constant and the trajectory contracts by
    (kappa-1)/(kappa+1) per step with alternating first-coordinate sign.
    With unit_sphere=True the point is normalized, with
    x1^2 = (gamma(kappa+1)-4) / ((4-gamma)(kappa^2-1)).
    """
    _admissible_kappa(gamma, kappa)
    if unit_sphere:
        x1_sq = (gamma * (kappa + 1.0) - 4.0) / ((4.0 - gamma) * (kappa * kappa - 1.0))
        return np.array([math.sqrt(x1_sq), math.sqrt(1.0 - x1_sq)])
    return np.array([1.0, math.sqrt(_ray_ratio(gamma, kappa))])


def kappa_for_horizon(gamma: float, K: int) -> float:
    """Condition number 4K/gamma + gamma/(4-gamma), admissible for every K >= 1."""
    if not 0.0 < gamma < 4.0:
        raise ParameterError(f"scaling parameter must lie in (0, 4), got {gamma}")
    if K < 1:
        raise ParameterError(f"horizon must be at least 1, got {K}")
    return 4.0 * K / gamma + gamma / (4.0 - gamma)


def exact_trajectory(gamma: float, kappa: float, x0, k: int) -> tuple[np.ndarray, float]:
    """Closed-form iterate and gap after k steps from a point on the invariant ray.

    x1 flips sign every step, x2 keeps its sign, both magnitudes scale by
    rho = (kappa-1)/(kappa+1); the gap scales by rho^(2k).  Raises if x0
    violates the ray condition by more than 1e-12 relative.
    """
    _admissible_kappa(gamma, kappa)
    x0 = _as_point(x0)
    if k < 0:
        raise ParameterError(f"iteration index must be nonnegative, got {k}")
    ratio = _ray_ratio(gamma, kappa)
    lhs = x0[1] * x0[1]
    rhs = ratio * x0[0] * x0[0]
    if abs(lhs - rhs) > 1e-12 * max(abs(lhs), abs(rhs)):
        raise ParameterError(
            "initial point is off the worst-case ray: "
            f"x2^2={lhs!r} but the ray requires {rhs!r}"
        )
    rho = (kappa - 1.0) / (kappa + 1.0)
    scale = ipow(rho, k)
    sign = -1.0 if k % 2 else 1.0
    xk = np.array([sign * scale * x0[0], scale * x0[1]])
    gap0 = 0.5 * (kappa * x0[0] * x0[0] + x0[1] * x0[1])
    return xk, ipow(rho, 2 * k) * gap0


def worstcase_normalized_best_gap(gamma: float, K: int) -> float:
    """Exact best-iterate gap of the horizon-K worst-case run, over L*|x0|^2.

    Uses the closed-form trajectory with kappa = kappa_for_horizon(gamma, K)
    from the unit-sphere initial point; the gap sequence is monotone, so the
    best iterate is the K-th.
    """
    kappa = kappa_for_horizon(gamma, K)
    x0 = worstcase_initial_point(gamma, kappa, unit_sphere=True)
    _, gap = exact_trajectory(gamma, kappa, x0, K)
    # the L-smooth objective is (L/kappa) * q and the normalization divides L out
    return gap / kappa


def worstcase_normalized_best_gap_holder(gamma: float, nu: float, K: int, L: float = 1.0) -> float:
    """Exact best-iterate gap for the powered worst case, over L_nu*|x0|^(nu+1).

    The run on the powered objective follows the 2*gamma/(nu+1)-scaled run on
    its quadratic core, so the gap is the core gap raised to (nu+1)/2.
    """
    nu = _check_nu(nu)
    if not 0.0 < gamma < 2.0:
        raise ParameterError(f"scaling parameter must lie in (0, 2), got {gamma}")
    geff = 2.0 * gamma / (nu + 1.0)
    core_gap = L * worstcase_normalized_best_gap(geff, K)
    return core_gap ** ((nu + 1.0) / 2.0) / holder_constant_for_powered_quadratic(L, nu)
