"""Single-pass estimators and functionals of a trajectory, and identity audits.

Given a path x[0..n] with innovations v[1..n], this module computes the least
squares slope estimate, the residual serial-correlation estimate, the
Durbin-Watson statistic, and the martingale / sum functionals the asymptotic
analysis is built on. It also checks the exact algebraic identities that
connect them, which hold on every path up to float rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict, fields

import numpy as np

from .errors import DegenerateError
from .model import ModelParams, Trajectory

# Above this length, square/cross sums accumulate in extended precision so
# that identity checks at the 1e-9 scale are not polluted by rounding.
EXTENDED_PRECISION_N = 1_000_000


@dataclass(frozen=True)
class StatLedger:
    """All single-pass functionals of one trajectory.

    L_n      sum of squared innovations               sum v[k]^2,    k=1..n
    M_n      martingale                               sum x[k-1]v[k], k=1..n
    N_n      lag-2 martingale                         sum x[k-2]v[k], k=2..n
    Q_n      lag-2 cross sum                          sum x[k]x[k-2], k=2..n
    S_n      sum of squares up to n;  S_nm1 up to n-1
    P_n      lag-1 cross sum                          sum x[k]x[k-1], k=1..n
    J_n      residual sum of squares (residual[0] := x[0]); J_nm1 up to n-1
    theta_hat    least squares slope P_n / S_nm1
    rho_hat      residual serial correlation, denominator J_nm1
    dw           Durbin-Watson statistic
    f_n          explosion coefficient (J_n - J_nm1) / J_n
    T_n          drift statistic of the lag-2 ratio (needs true params)
    R_theta      exact remainder of the slope decomposition (needs true params)
    T4_n     sum x[k]^4, k=0..n;  Gamma4_n = sum v[k]^4, k=1..n
    eps_hat0     the residual convention anchor, equal to x[0]
    """

    n: int
    L_n: float
    M_n: float
    N_n: float
    Q_n: float
    S_n: float
    S_nm1: float
    P_n: float
    J_n: float
    J_nm1: float
    theta_hat: float
    rho_hat: float
    dw: float
    f_n: float
    T_n: float
    R_theta: float
    T4_n: float
    Gamma4_n: float
    eps_hat0: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps({k: (None if isinstance(v, float) and math.isnan(v) else v)
                           for k, v in self.to_dict().items()})


def ledger_field_names() -> list[str]:
    return [f.name for f in fields(StatLedger)]


def _dot(a: np.ndarray, b: np.ndarray, extended: bool) -> float:
    if extended:
        return float(np.dot(a.astype(np.longdouble), b.astype(np.longdouble)))
    return float(np.dot(a, b))


def ledger(traj: Trajectory, params: ModelParams | None = None) -> StatLedger:
    """Compute every functional of one trajectory.

    theta_hat = P_n / S_nm1 and residuals are x[k] - theta_hat x[k-1] for
    k >= 1, anchored by residual[0] := x[0]. rho_hat divides by J_nm1, which
    equals the sum of squared lagged residuals under that anchor. T_n and
    R_theta depend on the true parameters and are NaN when params is None.
    """
    x, v = traj.x, traj.v
    n = traj.n
    if n < 2:
        raise DegenerateError(f"ledger needs n >= 2, got n={n}")
    ext = n >= EXTENDED_PRECISION_N

    L_n = _dot(v, v, ext)
    M_n = _dot(x[:-1], v, ext)
    N_n = _dot(x[:-2], v[1:], ext)
    Q_n = _dot(x[2:], x[:-2], ext)
    S_nm1 = _dot(x[:-1], x[:-1], ext)
    S_n = S_nm1 + float(x[-1]) ** 2
    P_n = _dot(x[1:], x[:-1], ext)
    T4_n = _dot(x * x, x * x, ext)
    Gamma4_n = _dot(v * v, v * v, ext)

    if S_nm1 == 0.0:
        raise DegenerateError("all-zero path: S_nm1 = 0")
    theta_hat = P_n / S_nm1

    e = x[1:] - theta_hat * x[:-1]
    e0 = float(x[0])
    J_nm1 = e0 * e0 + _dot(e[:-1], e[:-1], ext)
    J_n = J_nm1 + float(e[-1]) ** 2
    if J_nm1 == 0.0:
        raise DegenerateError("degenerate residuals: J_nm1 = 0")
    rho_num = e0 * float(e[0]) + _dot(e[1:], e[:-1], ext)
    rho_hat = rho_num / J_nm1
    d = np.diff(e)
    dw_num = (float(e[0]) - e0) ** 2 + _dot(d, d, ext)
    dw = dw_num / J_n
    f_n = float(e[-1]) ** 2 / J_n

    if params is not None:
        th, rh = params.theta, params.rho
        ts = (th + rh) / (1.0 + th * rh)
        rs = th * rh * ts
        T_n = (1.0 + ts * rs
               - (1.0 + rs * (theta_hat + ts)) * S_n / S_nm1
               + (2.0 * rs + theta_hat + ts) * P_n / S_nm1
               - Q_n / S_nm1)
        R_theta = th * rh * float(x[-1]) * float(x[-2]) \
            + rh * params.x0 * (params.eps0 - params.x0)
    else:
        T_n = math.nan
        R_theta = math.nan

    return StatLedger(n=n, L_n=L_n, M_n=M_n, N_n=N_n, Q_n=Q_n, S_n=S_n,
                      S_nm1=S_nm1, P_n=P_n, J_n=J_n, J_nm1=J_nm1,
                      theta_hat=theta_hat, rho_hat=rho_hat, dw=dw, f_n=f_n,
                      T_n=T_n, R_theta=R_theta, T4_n=T4_n, Gamma4_n=Gamma4_n,
                      eps_hat0=e0)


def remainder_theta(traj: Trajectory, params: ModelParams) -> float:
    """Exact remainder of the slope decomposition:
    theta*rho*x[n]*x[n-1] + rho*x[0]*(eps[0] - x[0])."""
    x = traj.x
    return params.theta * params.rho * float(x[-1]) * float(x[-2]) \
        + params.rho * params.x0 * (params.eps0 - params.x0)


def check_theta_decomposition(led: StatLedger, params: ModelParams) -> float:
    """Residual of the exact identity
    (theta_hat - theta*) = (M_n + R_theta) / ((1 + theta*rho) S_nm1).

    Zero up to rounding on every path; the contract is
    residual <= 1e-9 * (1 + |theta_hat|).
    """
    if led.S_nm1 == 0.0:
        raise DegenerateError("S_nm1 = 0")
    th, rh = params.theta, params.rho
    ts = (th + rh) / (1.0 + th * rh)
    rhs = (led.M_n + led.R_theta) / ((1.0 + th * rh) * led.S_nm1)
    return abs((led.theta_hat - ts) - rhs)


def check_sn_decomposition(led: StatLedger, traj: Trajectory,
                           params: ModelParams) -> float:
    """Residual of the exact sum-of-squares decomposition

    S_n/n - ell = (ell/sigma2) [ (L_n/n - sigma2) + 2 theta* M_n/n
                                 - 2 theta rho N_n/n + R_n/n ]

    where R_n collects boundary terms at indices 0, 1, n-1, n. Exact on
    every path up to rounding (verified symbolically); a systematic
    nonzero residual would indicate a transcription error and must be
    reported, not absorbed.
    """
    x, v = traj.x, traj.v
    n = led.n
    th, rh, s2 = params.theta, params.rho, params.sigma2
    x0, e0 = params.x0, params.eps0
    ts = (th + rh) / (1.0 + th * rh)
    rs = th * rh * ts
    ell = s2 * (1.0 + th * rh) / ((1.0 - th * th) * (1.0 - th * rh) * (1.0 - rh * rh))
    xi1 = ((1.0 - 2.0 * th * rh - rh * rh) * x0 * x0 + rh * rh * e0 * e0
           + 2.0 * th * rh * x0 * e0 - 2.0 * rh * rs * (e0 - x0) * x0
           + 2.0 * rh * (e0 - x0) * float(v[0]))
    R_n = ((2.0 * (th + rh) * rs - (th + rh) ** 2 - (th * rh) ** 2) * float(x[-1]) ** 2
           - (th * rh) ** 2 * float(x[-2]) ** 2
           + 2.0 * rs * float(x[-1]) * float(x[-2]) + xi1)
    lhs = led.S_n / n - ell
    rhs = (ell / s2) * ((led.L_n / n - s2) + 2.0 * ts * led.M_n / n
                        - 2.0 * th * rh * led.N_n / n + R_n / n)
    return abs(lhs - rhs)


def check_dw_identity(led: StatLedger) -> float:
    """Residual of the exact finite-n statistic identity

    dw = 2 (1 - rho_hat) - (1 - 2 rho_hat) f_n - residual[0]^2 / J_n.

    Derived by expanding the squared residual differences; contract <= 1e-9.
    """
    if led.J_n == 0.0:
        raise DegenerateError("J_n = 0")
    rhs = (2.0 * (1.0 - led.rho_hat) - (1.0 - 2.0 * led.rho_hat) * led.f_n
           - led.eps_hat0 ** 2 / led.J_n)
    return abs(led.dw - rhs)


def check_j_identity(led: StatLedger) -> float:
    """Relative residual of J_n = S_n - 2 theta_hat P_n + theta_hat^2 S_nm1."""
    rhs = led.S_n - 2.0 * led.theta_hat * led.P_n + led.theta_hat**2 * led.S_nm1
    return abs(led.J_n - rhs) / (1.0 + abs(led.J_n))


def check_as_inequalities(traj: Trajectory, led: StatLedger,
                          params: ModelParams) -> dict[str, bool]:
    """Pathwise bounds that hold on every realization.

    (i)   S_n <= a2 x0^2 + b2 eps0^2 + b2 L_n
    (ii)  max x[k]^2 <= x0^2/(1-|theta|) + max eps[k]^2/(1-|theta|)^2
    (iii) max eps[k]^2 <= eps0^2/(1-|rho|) + max v[k]^2/(1-|rho|)^2
    (iv)  T4_n <= a4 x0^4 + b4 eps0^4 + b4 Gamma4_n
    with a2 = 1+(1-|theta|)^-2, b2 = (1-|rho|)^-2 (1-|theta|)^-2 and the
    same constants at fourth powers for a4, b4. Maxima run over k=1..n.
    """
    th, rh = abs(params.theta), abs(params.rho)
    x0, e0 = params.x0, params.eps0
    a2 = 1.0 + (1.0 - th) ** -2
    b2 = (1.0 - rh) ** -2 * (1.0 - th) ** -2
    a4 = 1.0 + (1.0 - th) ** -4
    b4 = (1.0 - rh) ** -4 * (1.0 - th) ** -4
    max_x2 = float(np.max(traj.x[1:] ** 2))
    max_e2 = float(np.max(traj.eps[1:] ** 2))
    max_v2 = float(np.max(traj.v**2))
    return {
        "sum_squares": led.S_n <= a2 * x0**2 + b2 * e0**2 + b2 * led.L_n,
        "max_x": max_x2 <= x0**2 / (1.0 - th) + max_e2 / (1.0 - th) ** 2,
        "max_eps": max_e2 <= e0**2 / (1.0 - rh) + max_v2 / (1.0 - rh) ** 2,
        "fourth_moment": led.T4_n <= a4 * x0**4 + b4 * e0**4 + b4 * led.Gamma4_n,
    }
