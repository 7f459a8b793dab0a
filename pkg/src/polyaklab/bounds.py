"""Closed-form rate bounds and supporting numeric oracles.

Lower bounds come from the worst-case quadratic family (strongly convex,
L-smooth, Hölder-smooth, and gradient-norm versions); upper bounds cover
Hölder smoothness + growth, the gamma = 2 regime, gradient norms, and the
global curvature bound.  Also provides the scalar recursion envelope, the
three-term product inequality used by the smooth lower bound, and a
log-log rate-fit utility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._util import ipow
from .errors import ParameterError

__all__ = [
    "BoundQuery",
    "BoundValue",
    "LOWER_KINDS",
    "UPPER_KINDS",
    "lower_bound",
    "upper_bound",
    "recursion_envelope",
    "lemma_a1_margin",
    "rate_fit",
]

LOWER_KINDS = ("lb_strong", "lb_smooth", "lb_holder", "lb_gradnorm")
UPPER_KINDS = ("ub_growth_linear", "ub_growth_sublinear", "ub_2polyak", "ub_gradnorm", "ub_gcb")

NORM_GAP_LD2 = "gap_over_LD2"
NORM_GAP_LNU = "gap_over_LnuD^(nu+1)"
NORM_GRAD_LNU = "gradnorm_over_LnuD^((nu+1)/2)"
NORM_ABS_GAP = "absolute_gap"
NORM_ABS_GRAD = "absolute_gradnorm"


@dataclass(frozen=True)
class BoundQuery:
    """One closed-form rate expression plus its parameters.

    Only the fields a kind demands are read; the rest may stay None.
    `mu_hat` is a monotone curvature-bound handle for the gcb kind, and
    `statement_variant` switches its argument from 3*D0/sqrt(K) to
    3*D0^2/sqrt(K).
    """

    kind: str
    gamma: Optional[float] = None
    nu: Optional[float] = None
    r: Optional[float] = None
    kappa: Optional[float] = None
    k: Optional[int] = None
    K: Optional[int] = None
    L: Optional[float] = None
    rho_r: Optional[float] = None
    D0: Optional[float] = None
    G: Optional[float] = None
    mu_hat: Optional[Callable[[float], float]] = None
    statement_variant: bool = False


@dataclass(frozen=True)
class BoundValue:
    value: float
    normalization: str
    warning: Optional[str] = None


def _need(query: BoundQuery, *names: str):
    vals = []
    for name in names:
        v = getattr(query, name)
        if v is None:
            raise ParameterError(f"{query.kind} requires parameter {name!r}")
        vals.append(v)
    return vals


def _check_nu(kind: str, nu: float) -> float:
    nu = float(nu)
    if not 0.0 < nu <= 1.0:
        raise ParameterError(f"{kind}: Hölder exponent must lie in (0, 1], got {nu}")
    return nu


def _check_gamma(kind: str, gamma: float, lo_open: float, hi: float, hi_closed: bool) -> float:
    gamma = float(gamma)
    ok = gamma > lo_open and (gamma <= hi if hi_closed else gamma < hi)
    if not ok:
        brace = "]" if hi_closed else ")"
        raise ParameterError(f"{kind}: gamma must lie in ({lo_open:g}, {hi:g}{brace}, got {gamma}")
    return gamma


def _check_horizon(kind: str, K: int) -> int:
    K = int(K)
    if K < 1:
        raise ParameterError(f"{kind}: iteration count must be at least 1, got {K}")
    return K


def lower_bound(query: BoundQuery) -> BoundValue:
    """Evaluate one of the worst-case lower-bound expressions."""
    kind = query.kind
    if kind == "lb_strong":
        (kappa,) = _need(query, "kappa")
        (k,) = _need(query, "k")
        if not kappa > 1.0:
            raise ParameterError(f"lb_strong: condition number must exceed 1, got {kappa}")
        if k < 0:
            raise ParameterError(f"lb_strong: iterate index must be nonnegative, got {k}")
        rho = (kappa - 1.0) / (kappa + 1.0)
        # contraction of the gap relative to the initial gap
        return BoundValue(ipow(rho, 2 * int(k)), NORM_ABS_GAP)
    if kind == "lb_smooth":
        gamma, K = _need(query, "gamma", "K")
        gamma = _check_gamma(kind, gamma, 0.0, 4.0, hi_closed=False)
        K = _check_horizon(kind, K)
        value = gamma / (2.0 * math.exp(2.0 * gamma) * ((4.0 - gamma) * K + gamma))
        return BoundValue(value, NORM_GAP_LD2)
    if kind == "lb_holder":
        gamma, nu, K = _need(query, "gamma", "nu", "K")
        gamma = _check_gamma(kind, gamma, 0.0, 2.0, hi_closed=False)
        nu = _check_nu(kind, nu)
        K = _check_horizon(kind, K)
        num = 2.0 ** (nu - 1.0) * gamma ** ((nu + 1.0) / 2.0)
        den = (
            math.exp(2.0 * gamma)
            * (nu + 1.0)
            * ((2.0 * (nu + 1.0) - gamma) * K + gamma) ** ((nu + 1.0) / 2.0)
        )
        return BoundValue(num / den, NORM_GAP_LNU)
    if kind == "lb_gradnorm":
        gamma, nu, K = _need(query, "gamma", "nu", "K")
        gamma = _check_gamma(kind, gamma, 0.0, 2.0, hi_closed=False)
        nu = _check_nu(kind, nu)
        K = _check_horizon(kind, K)
        num = (
            2.0 ** ((nu - 1.0) / 2.0)
            * gamma ** ((nu + 1.0) / 2.0)
            * (nu + 1.0) ** ((nu - 1.0) / 2.0)
            * math.sqrt(4.0 - gamma)
        )
        den = (
            math.exp(gamma * nu)
            * math.sqrt(4.0 * (4.0 - gamma) + gamma * gamma)
            * (2.0 * (nu + 1.0) - gamma) ** (nu / 2.0)
            * K ** (nu / 2.0)
        )
        return BoundValue(num / den, NORM_GRAD_LNU)
    raise ParameterError(f"unknown lower-bound kind {kind!r}; expected one of {LOWER_KINDS}")


def _growth_contraction(gamma: float, nu: float, L: float, rho_r: float) -> float:
    e = 2.0 * nu / (nu + 1.0)
    return (
        gamma
        * (2.0 - gamma)
        * nu**e
        * rho_r ** (2.0 / (nu + 1.0))
        / ((nu + 1.0) ** e * L ** (2.0 / (nu + 1.0)))
    )


def upper_bound(query: BoundQuery) -> BoundValue:
    """Evaluate one of the convergence upper-bound expressions."""
    kind = query.kind
    if kind in ("ub_growth_linear", "ub_growth_sublinear"):
        gamma, nu, L, rho_r, K = _need(query, "gamma", "nu", "L", "rho_r", "K")
        gamma = _check_gamma(kind, gamma, 0.0, 2.0, hi_closed=False)
        nu = _check_nu(kind, nu)
        K = _check_horizon(kind, K)
        if L <= 0.0 or rho_r <= 0.0:
            raise ParameterError(f"{kind}: L and rho_r must be positive")
        r = float(query.r) if query.r is not None else nu + 1.0
        if r < nu + 1.0:
            raise ParameterError(
                f"growth exponent r={r} below nu+1={nu + 1.0}: incompatible with "
                "smoothness near the solution set"
            )
        if r == nu + 1.0:
            # linear regime; the expression needs an even horizon
            G, D0 = _need(query, "G", "D0")
            if G < 0.0 or D0 < 0.0:
                raise ParameterError(f"{kind}: G and D0 must be nonnegative")
            if rho_r * (nu + 1.0) > L * (1.0 + 1e-12):
                raise ParameterError(
                    f"{kind}: rho_r={rho_r} exceeds L/(nu+1)={L / (nu + 1.0)}, "
                    "impossible for a growth constant compatible with the smoothness"
                )
            c = _growth_contraction(gamma, nu, L, rho_r)
            if not 0.0 < c < 1.0:
                raise ParameterError(f"{kind}: contraction coefficient {c} outside (0, 1)")
            warning = None
            K_eff = K
            if K % 2:
                K_eff = K - 1
                warning = f"odd iteration count {K} floored to {K_eff}"
            value = ipow(1.0 - c, K_eff // 2) * G * D0
            return BoundValue(value, NORM_ABS_GAP, warning)
        # sublinear regime, r > nu + 1
        d = nu + 1.0 - r  # negative
        lead = (
            (r - nu - 1.0) ** ((nu + 1.0) ** 2 / (2.0 * d))
            * (gamma * (2.0 - gamma)) ** (r * (nu + 1.0) / (2.0 * d))
            * nu ** (nu * r / d)
            / (
                2.0 ** (r * (nu + 1.0) / (2.0 * d))
                * (nu + 1.0) ** (((nu + 1.0) ** 2 + 2.0 * nu * r) / (2.0 * d))
            )
        )
        value = (
            lead
            * L ** (r / (r - nu - 1.0))
            / (rho_r ** ((nu + 1.0) / (r - nu - 1.0)) * K ** (r * (nu + 1.0) / (2.0 * (r - nu - 1.0))))
        )
        return BoundValue(value, NORM_ABS_GAP)
    if kind == "ub_2polyak":
        nu, L, D0, K = _need(query, "nu", "L", "D0", "K")
        nu = _check_nu(kind, nu)
        K = _check_horizon(kind, K)
        value = ((nu + 1.0) / (4.0 * nu)) ** nu * L * D0 ** (nu + 1.0) / K**nu
        return BoundValue(value, NORM_ABS_GAP)
    if kind == "ub_gradnorm":
        gamma, nu, L, D0, K = _need(query, "gamma", "nu", "L", "D0", "K")
        gamma = _check_gamma(kind, gamma, 0.0, 2.0, hi_closed=True)
        nu = _check_nu(kind, nu)
        K = _check_horizon(kind, K)
        value = (
            (nu + 1.0) ** nu
            * L
            * D0**nu
            / (2.0 ** (nu / 2.0) * gamma ** (nu / 2.0) * nu**nu * K ** (nu / 2.0))
        )
        return BoundValue(value, NORM_ABS_GRAD)
    if kind == "ub_gcb":
        D0, K = _need(query, "D0", "K")
        (mu_hat,) = _need(query, "mu_hat")
        K = _check_horizon(kind, K)
        arg = 3.0 * (D0 * D0 if query.statement_variant else D0) / math.sqrt(K)
        return BoundValue(float(mu_hat(arg)), NORM_ABS_GAP)
    raise ParameterError(f"unknown upper-bound kind {kind!r}; expected one of {UPPER_KINDS}")


def recursion_envelope(a0: float, c: float, tau: float, k: int) -> float:
    """Closed-form majorant (a0^(1-tau) + (tau-1)*c*k)^(-1/(tau-1)).

    Dominates every nonnegative sequence with a_(k+1) <= a_k - c*a_k^tau,
    provided c*a0^(tau-1) < 1 so the recursion stays nonnegative.
    """
    if tau <= 1.0:
        raise ParameterError(f"decay exponent must exceed 1, got {tau}")
    if a0 <= 0.0 or c <= 0.0:
        raise ParameterError("a0 and c must be positive")
    if c * a0 ** (tau - 1.0) >= 1.0:
        raise ParameterError(
            f"c*a0^(tau-1) = {c * a0 ** (tau - 1.0)} must stay below 1"
        )
    if k < 0:
        raise ParameterError(f"index must be nonnegative, got {k}")
    return (a0 ** (1.0 - tau) + (tau - 1.0) * c * k) ** (-1.0 / (tau - 1.0))


def lemma_a1_margin(gamma: float, K: int) -> tuple[float, float, float]:
    """The three terms of the product-inequality chain, caller asserts lhs >= mid >= rhs.

    lhs = ((8K - 2(1+K)gamma + gamma^2) / (2K(4-gamma) + 2gamma))^(2K),
    mid = (K / (gamma + K))^(2K), rhs = exp(-2*gamma).
    """
    if not 0.0 < gamma < 4.0:
        raise ParameterError(f"gamma must lie in (0, 4), got {gamma}")
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    lhs_base = (8.0 * K - 2.0 * (1.0 + K) * gamma + gamma * gamma) / (
        2.0 * K * (4.0 - gamma) + 2.0 * gamma
    )
    mid_base = K / (gamma + K)
    return ipow(lhs_base, 2 * K), ipow(mid_base, 2 * K), math.exp(-2.0 * gamma)


def rate_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares fit of log(value) against log(K).

    Returns (exponent, intercept, r_squared); the exponent is the empirical
    decay rate of the series.  Needs at least three points with positive
    values.
    """
    if len(points) < 3:
        raise ParameterError(f"rate fit needs at least 3 points, got {len(points)}")
    ks = np.array([float(p[0]) for p in points])
    vals = np.array([float(p[1]) for p in points])
    if np.any(ks <= 0.0) or np.any(vals <= 0.0):
        raise ParameterError("rate fit needs positive K and positive values")
    lx = np.log(ks)
    ly = np.log(vals)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
