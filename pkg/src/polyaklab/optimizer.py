"""Gradient descent with the scaled Polyak stepsize.

The update is x+ = x - gamma * alpha * grad f(x) with the adaptive ratio
alpha = (f(x) - f_star) / |grad f(x)|^2, gamma in (0, 2].  Runs record a
full per-iteration trace and support a reproducible multiplicative
stepsize perturbation that emulates rounding error, plus a stochastic
variant for finite sums under interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._util import make_rng
from .errors import DegenerateObjectiveError, ParameterError, StepsizeUndefined
from .testbed import Objective, StochasticProblem

__all__ = [
    "RunConfig",
    "Trace",
    "polyak_stepsize",
    "step",
    "run",
    "run_stochastic",
    "best_iterate",
    "fejer_margin",
]

STOP_MAX_ITERS = "max_iters"
STOP_GRAD_TOL = "grad_tol"
STOP_GAP_TOL = "gap_tol"
STOP_STEPSIZE_UNDEFINED = "stepsize_undefined"


@dataclass(frozen=True)
class RunConfig:
    """Algorithm parameters for one run.

    noise_delta > 0 perturbs each used stepsize to alpha*(1 + delta*u) with
    u uniform on [-1, 1] from a counter-based generator, a reproducible
    stand-in for floating-point error.  The extended gamma range (0, 4) is
    reserved for runs that emulate the powered-objective reduction and must
    be enabled explicitly.
    """

    gamma: float = 1.0
    max_iters: int = 100
    grad_tol: float = 1e-14
    gap_tol: float = 0.0
    noise_delta: float = 0.0
    seed: int = 0
    allow_extended_gamma: bool = False

    def __post_init__(self):
        hi = 4.0 if self.allow_extended_gamma else 2.0
        if not 0.0 < self.gamma <= hi:
            raise ParameterError(
                f"gamma must lie in (0, {hi:g}], got {self.gamma}"
            )
        if self.allow_extended_gamma and not self.gamma < 4.0:
            raise ParameterError("extended range still requires gamma < 4")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.grad_tol < 0.0 or self.gap_tol < 0.0:
            raise ParameterError("tolerances must be nonnegative")
        if self.noise_delta < 0.0:
            raise ParameterError("noise_delta must be nonnegative")


@dataclass(frozen=True)
class Trace:
    """Immutable per-iteration record of a run.

    Arrays cover the visited iterates x^0..x^T; alphas[k] is the Polyak
    ratio gap/|grad|^2 at x^k (0.0 where the gradient vanishes).  For
    stochastic runs the gap/grad_norm/alpha columns refer to the component
    sampled at each iterate, recorded in `components`.  len(trace) is the
    number of steps taken.
    """

    xs: np.ndarray
    gaps: np.ndarray
    grad_norms: np.ndarray
    alphas: np.ndarray
    dists: Optional[np.ndarray]
    stop_reason: str
    components: Optional[np.ndarray] = None
    diagnostic: Optional[str] = None

    def __post_init__(self):
        for arr in (self.xs, self.gaps, self.grad_norms, self.alphas, self.dists, self.components):
            if arr is not None:
                arr.setflags(write=False)

    def __len__(self) -> int:
        return self.xs.shape[0] - 1


def polyak_stepsize(gap: float, grad_norm: float, gap_tol: float = 0.0) -> float:
    """The adaptive ratio gap / grad_norm^2.

    A vanishing gradient with gap <= gap_tol means the iterate is optimal
    and raises StepsizeUndefined; with gap > gap_tol the objective is
    inconsistent (convexity forbids a flat point above the optimum) and
    DegenerateObjectiveError is raised.
    """
    if gap < 0.0:
        raise ParameterError(f"gap must be nonnegative, got {gap}")
    if grad_norm < 0.0:
        raise ParameterError(f"grad_norm must be nonnegative, got {grad_norm}")
    if grad_norm == 0.0:
        if gap > gap_tol:
            raise DegenerateObjectiveError(
                f"zero gradient with positive gap {gap}: inconsistent objective"
            )
        raise StepsizeUndefined("zero gradient at optimum; terminate instead of stepping")
    return gap / (grad_norm * grad_norm)


def step(x: np.ndarray, objective: Objective, gamma: float) -> np.ndarray:
    """One update x - gamma * alpha * grad f(x); raises StepsizeUndefined at optima."""
    x = np.asarray(x, dtype=float)
    g = objective.gradient(x)
    grad_norm = math.sqrt(float(g @ g))
    alpha = polyak_stepsize(objective.gap(x), grad_norm)
    return x - (gamma * alpha) * g


def _finalize(xs, gaps, gns, alphas, dists, stop, components=None, diagnostic=None) -> Trace:
    return Trace(
        xs=np.array(xs, dtype=float),
        gaps=np.array(gaps, dtype=float),
        grad_norms=np.array(gns, dtype=float),
        alphas=np.array(alphas, dtype=float),
        dists=None if dists is None else np.array(dists, dtype=float),
        stop_reason=stop,
        components=None if components is None else np.array(components, dtype=np.int64),
        diagnostic=diagnostic,
    )


def run(objective: Objective, x0, config: RunConfig) -> Trace:
    """Run the method from x0 for at most config.max_iters steps.

    Termination order at each iterate: gradient norm <= grad_tol (also
    covers exact minimizers, where the ratio is 0/0), then gap <= gap_tol.
    Non-finite values abort the run with a diagnostic record.
    """
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("initial point must be finite")
    gen = make_rng(config.seed) if config.noise_delta > 0.0 else None

    dist_fn = objective.dist_to_solution
    xs = [x.copy()]
    gaps, gns, alphas = [], [], []
    dists = [] if dist_fn is not None else None
    stop = STOP_MAX_ITERS
    diagnostic = None

    for k in range(config.max_iters + 1):
        gap = objective.gap(x)
        g = objective.gradient(x)
        grad_norm = math.sqrt(float(g @ g))
        if not (math.isfinite(gap) and math.isfinite(grad_norm)):
            gaps.append(gap)
            gns.append(grad_norm)
            alphas.append(math.nan)
            if dists is not None:
                dists.append(math.nan)
            stop = STOP_STEPSIZE_UNDEFINED
            diagnostic = f"non-finite value or gradient at iteration {k}"
            break
        gaps.append(gap)
        gns.append(grad_norm)
        alphas.append(gap / (grad_norm * grad_norm) if grad_norm > 0.0 else 0.0)
        if dists is not None:
            dists.append(dist_fn(x))
        if k == config.max_iters:
            stop = STOP_MAX_ITERS
            break
        if grad_norm <= config.grad_tol:
            stop = STOP_GRAD_TOL
            break
        if gap <= config.gap_tol:
            stop = STOP_GAP_TOL
            break
        alpha = gap / (grad_norm * grad_norm)
        if gen is not None:
            alpha *= 1.0 + config.noise_delta * gen.uniform(-1.0, 1.0)
        x = x - (config.gamma * alpha) * g
        xs.append(x.copy())

    return _finalize(xs, gaps, gns, alphas, dists, stop, diagnostic=diagnostic)


def run_stochastic(problem: StochasticProblem, x0, config: RunConfig) -> Trace:
    """Stochastic variant: one uniformly sampled component per iteration.

    The stepsize uses the sampled component's gap and gradient; under
    interpolation every step is nonexpansive toward the shared minimizer.
    Runs always record dist to the common minimizer.  A component with zero
    gap contributes a zero step; zero gradient with positive gap raises
    DegenerateObjectiveError.
    """
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("initial point must be finite")
    gen = make_rng(config.seed)
    m = problem.n_components
    x_star = problem.minimizer

    xs = [x.copy()]
    gaps, gns, alphas, dists, comps = [], [], [], [], []
    stop = STOP_MAX_ITERS
    diagnostic = None

    for k in range(config.max_iters + 1):
        i = int(gen.integers(m))
        gap = problem.component_value(x, i) - problem.component_f_star[i]
        g = problem.component_gradient(x, i)
        grad_norm = math.sqrt(float(g @ g))
        if not (math.isfinite(gap) and math.isfinite(grad_norm)):
            gaps.append(gap)
            gns.append(grad_norm)
            alphas.append(math.nan)
            dists.append(math.nan)
            comps.append(i)
            stop = STOP_STEPSIZE_UNDEFINED
            diagnostic = f"non-finite component value or gradient at iteration {k}"
            break
        gaps.append(gap)
        gns.append(grad_norm)
        alphas.append(gap / (grad_norm * grad_norm) if grad_norm > 0.0 else 0.0)
        dists.append(float(np.linalg.norm(x - x_star)))
        comps.append(i)
        if k == config.max_iters:
            break
        if gap > config.gap_tol and grad_norm == 0.0:
            raise DegenerateObjectiveError(
                f"component {i} has zero gradient with positive gap {gap}"
            )
        if gap > 0.0 and grad_norm > 0.0:
            alpha = gap / (grad_norm * grad_norm)
            if config.noise_delta > 0.0:
                alpha *= 1.0 + config.noise_delta * gen.uniform(-1.0, 1.0)
            x = x - (config.gamma * alpha) * g
        xs.append(x.copy())

    return _finalize(xs, gaps, gns, alphas, dists, stop, components=comps, diagnostic=diagnostic)


def best_iterate(trace: Trace) -> tuple[int, float]:
    """Index and value of the smallest gap over k = 1..T, first index on ties."""
    if len(trace) < 1:
        raise ParameterError("best_iterate needs a trace with at least one step")
    tail = trace.gaps[1:]
    k = int(np.argmin(tail)) + 1
    return k, float(trace.gaps[k])


def fejer_margin(trace: Trace, x_star, gamma: float) -> np.ndarray:
    """Per-step slack in the distance-decrease inequality toward x_star.

    m_k = |x^k - x*|^2 - |x^(k+1) - x*|^2 - gamma(2-gamma) * gap_k^2 / |grad_k|^2.
    For convex objectives and gamma in (0, 2] every m_k is nonnegative up to
    rounding; a negative margin certifies a convexity violation.
    """
    x_star = np.asarray(x_star, dtype=float)
    T = len(trace)
    out = np.empty(T)
    coeff = gamma * (2.0 - gamma)
    for k in range(T):
        d0 = trace.xs[k] - x_star
        d1 = trace.xs[k + 1] - x_star
        gn = trace.grad_norms[k]
        drop = coeff * (trace.gaps[k] ** 2 / (gn * gn)) if gn > 0.0 else 0.0
        out[k] = float(d0 @ d0) - float(d1 @ d1) - drop
    return out
