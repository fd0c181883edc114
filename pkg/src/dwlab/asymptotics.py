"""Closed-form limits, asymptotic variances, and deviation rate functions.

Everything here is a pure function of (theta, rho, sigma2). The slope
estimate converges to theta* = (theta+rho)/(1+theta*rho), the residual
serial-correlation estimate to rho* = theta*rho*theta_star, and the
Durbin-Watson statistic to d* = 2(1-rho*). CLT variances, the 2x2 joint
covariance, and the quadratic deviation rate functions all have explicit
forms, collected in one summary object.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularError
from .model import ModelParams

Matrix2 = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class AsymptoticSummary:
    """Limits and variances for one stable parameter point.

    theta_star, rho_star, d_star  a.s. limits of the three statistics
    ell        limit of S_n/n;  ell1 of P_n/n;  ell2 of Q_n/n
    sigma2_theta, sigma2_rho, sigma2_d   CLT variances (sigma2_d = 4 sigma2_rho)
    gamma      joint covariance of sqrt(n)(theta_hat-theta*, rho_hat-rho*)
    lambda_    limit of the normalized quadratic variation, ell [[1,t*],[t*,1]]
    a_limit    linearization matrix with gamma = sigma2 A lambda_ A'
    t_limit    limit of the drift statistic, theta*^2 + theta*rho
    j_limit    limit of J_n/n, ell (1 - theta*^2)
    """

    theta: float
    rho: float
    sigma2: float
    theta_star: float
    rho_star: float
    d_star: float
    ell: float
    ell1: float
    ell2: float
    sigma2_theta: float
    sigma2_rho: float
    sigma2_d: float
    gamma: Matrix2
    lambda_: Matrix2
    a_limit: Matrix2
    t_limit: float
    j_limit: float

    def to_dict(self) -> dict:
        d = {
            "theta": self.theta,
            "rho": self.rho,
            "sigma2": self.sigma2,
            "theta_star": self.theta_star,
            "rho_star": self.rho_star,
            "d_star": self.d_star,
            "ell": self.ell,
            "ell1": self.ell1,
            "ell2": self.ell2,
            "sigma2_theta": self.sigma2_theta,
            "sigma2_rho": self.sigma2_rho,
            "sigma2_d": self.sigma2_d,
            "gamma": [list(r) for r in self.gamma],
            "lambda": [list(r) for r in self.lambda_],
            "a_limit": [list(r) for r in self.a_limit],
            "t_limit": self.t_limit,
            "j_limit": self.j_limit,
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def summary(params: ModelParams) -> AsymptoticSummary:
    """Evaluate every closed form at the given (already validated) point."""
    th, rh, s2 = params.theta, params.rho, params.sigma2
    tr = th * rh
    ts = (th + rh) / (1.0 + tr)
    rs = tr * ts
    d_star = 2.0 * (1.0 - rs)
    ell = s2 * (1.0 + tr) / ((1.0 - th * th) * (1.0 - tr) * (1.0 - rh * rh))
    ell1 = ts * ell
    ell2 = ((th + rh) * ts - tr) * ell
    s2t = (1.0 - th * th) * (1.0 - tr) * (1.0 - rh * rh) / (1.0 + tr) ** 3
    s2r = ((1.0 - tr) / (1.0 + tr) ** 3) * (
        (th + rh) ** 2 * (1.0 + tr) ** 2 + tr * tr * (1.0 - th * th) * (1.0 - rh * rh)
    )
    s2d = 4.0 * s2r
    gamma = ((s2t, tr * s2t), (tr * s2t, s2r))
    lam = ((ell, ts * ell), (ts * ell, ell))
    c = 1.0 / (ell * (1.0 + tr) * (1.0 - ts * ts))
    a_limit = ((c * (1.0 - ts * ts), 0.0), (c * (tr + ts * ts), -c * (th + rh)))
    return AsymptoticSummary(
        theta=th, rho=rh, sigma2=s2,
        theta_star=ts, rho_star=rs, d_star=d_star,
        ell=ell, ell1=ell1, ell2=ell2,
        sigma2_theta=s2t, sigma2_rho=s2r, sigma2_d=s2d,
        gamma=gamma, lambda_=lam, a_limit=a_limit,
        t_limit=ts * ts + tr, j_limit=ell * (1.0 - ts * ts),
    )


def gamma_cross_check(s: AsymptoticSummary, params: ModelParams) -> float:
    """Max entrywise |gamma - sigma2 A lambda A'|.

    The product form only pins gamma down when A is invertible, which
    fails exactly at theta = -rho.
    """
    if params.theta == -params.rho:
        raise SingularError("a_limit is singular at theta = -rho")
    a = np.array(s.a_limit)
    lam = np.array(s.lambda_)
    product = s.sigma2 * (a @ lam @ a.T)
    return float(np.max(np.abs(np.array(s.gamma) - product)))


def det_gamma_audit(s: AsymptoticSummary) -> tuple[float, float]:
    """Determinant of gamma two ways.

    Returns (direct, shortcut): the determinant computed from the entries
    of gamma, and the closed-form shortcut
    sigma2_theta (theta+rho)^2 (1-theta rho) / (1+rho^2).
    The shortcut disagrees with the direct value at generic points; the
    direct value instead matches the same expression with denominator
    (1+theta rho). Both are returned so downstream reports can show which
    closed form is consistent with the entries.
    """
    g = s.gamma
    direct = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    th, rh = s.theta, s.rho
    shortcut = s.sigma2_theta * (th + rh) ** 2 * (1.0 - th * rh) / (1.0 + rh * rh)
    return direct, shortcut


def _quadratic_rate(x: float, variance: float) -> float:
    if variance == 0.0:
        return 0.0 if x == 0.0 else math.inf
    return x * x / (2.0 * variance)


def rate_theta(x: float, s: AsymptoticSummary) -> float:
    """Deviation rate of the slope estimate: x^2 / (2 sigma2_theta)."""
    return _quadratic_rate(x, s.sigma2_theta)


def rate_rho(x: float, s: AsymptoticSummary) -> float:
    """Deviation rate of the serial-correlation estimate: x^2 / (2 sigma2_rho)."""
    return _quadratic_rate(x, s.sigma2_rho)


def rate_dw(x: float, s: AsymptoticSummary) -> float:
    """Deviation rate of the Durbin-Watson statistic: x^2 / (2 sigma2_d).

    Equals rate_rho(-x/2) since sigma2_d = 4 sigma2_rho.
    """
    return _quadratic_rate(x, s.sigma2_d)


def rate_joint(v, s: AsymptoticSummary, params: ModelParams) -> float:
    """Joint quadratic rate (1/2) v' gamma^{-1} v for a 2-vector v.

    Solved through the explicit 2x2 adjugate with the directly computed
    determinant, which stays accurate for nearly singular gamma. The
    closed-form determinant shortcut is never used here (see
    det_gamma_audit).
    """
    if params.theta == -params.rho:
        raise SingularError("gamma is singular at theta = -rho")
    g = s.gamma
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    if det <= 0.0:
        raise SingularError(f"gamma is numerically singular (det = {det})")
    v0, v1 = float(v[0]), float(v[1])
    quad = g[1][1] * v0 * v0 - 2.0 * g[0][1] * v0 * v1 + g[0][0] * v1 * v1
    return 0.5 * quad / det


def rate_special_theta_eq_neg_rho(x: float, theta: float, which: str) -> float:
    """Rate functions on the line rho = -theta, where gamma is singular.

    which="theta": x^2 (1-theta^2) / (2 (1+theta^2)).
    which="rho":   x^2 (1-theta^2) / (2 theta^4 (1+theta^2)); at theta=0
    the estimate concentrates faster than any exponential scale, so the
    rate is +inf off the origin.
    """
    t2 = theta * theta
    if which == "theta":
        return x * x * (1.0 - t2) / (2.0 * (1.0 + t2))
    if which == "rho":
        if theta == 0.0:
            return 0.0 if x == 0.0 else math.inf
        return x * x * (1.0 - t2) / (2.0 * t2 * t2 * (1.0 + t2))
    raise DomainError(f"which must be 'theta' or 'rho', got {which!r}")


def bn_sequence(n: int, alpha: float) -> float:
    """Speed sequence b_n = n^alpha; requires 0 < alpha < 1/2 so that
    b_n grows without bound while b_n^2 = o(n)."""
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must lie strictly in (0, 1/2), got {alpha}")
    if n < 1:
        raise DomainError(f"n must be a positive count, got {n}")
    return float(n) ** alpha
