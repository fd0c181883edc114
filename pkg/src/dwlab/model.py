"""Process definition, parameter validation, noise generation, simulation.

The process is a stable AR(1) driven by AR(1) noise:

    x[k] = theta * x[k-1] + eps[k]
    eps[k] = rho * eps[k-1] + v[k]

with |theta| < 1, |rho| < 1 and i.i.d. mean-zero innovations v[k] of
variance sigma2. Initial values x[0], eps[0] are deterministic constants.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError, StabilityError

NOISE_FAMILIES = ("gaussian", "weibull", "student")


@dataclass(frozen=True)
class ModelParams:
    theta: float
    rho: float
    sigma2: float = 1.0
    x0: float = 0.0
    eps0: float = 0.0


def validate_params(p: ModelParams) -> ModelParams:
    """Return p unchanged iff |theta| < 1, |rho| < 1 and sigma2 > 0."""
    if not (abs(p.theta) < 1.0):
        raise StabilityError(f"|theta| must be < 1, got theta={p.theta}")
    if not (abs(p.rho) < 1.0):
        raise StabilityError(f"|rho| must be < 1, got rho={p.rho}")
    if not (p.sigma2 > 0.0):
        raise DomainError(f"sigma2 must be > 0, got {p.sigma2}")
    return p


def companion_matrix(p: ModelParams) -> np.ndarray:
    """2x2 companion form of the order-2 recursion satisfied by x.

    Eliminating eps gives x[k] = (theta+rho) x[k-1] - theta*rho x[k-2] + v[k],
    so the state (x[k], x[k-1]) evolves by [[theta+rho, -theta*rho], [1, 0]].
    Its eigenvalues are exactly theta and rho.
    """
    return np.array([[p.theta + p.rho, -p.theta * p.rho], [1.0, 0.0]])


def spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(a))))


@dataclass(frozen=True)
class NoiseSpec:
    """Distribution of the i.i.d. innovations, with tail-class metadata.

    family "gaussian":  N(0, sigma2).
    family "weibull":   R * W, R a +-1 sign, W Weibull with shape 2*beta
                        (0 < beta < 1), scaled so the variance is sigma2.
                        Symmetric, mean zero, and E[exp(t |V|^(2 beta))]
                        is finite for small t > 0.
    family "student":   Student t with nu > 2 degrees of freedom rescaled
                        to variance sigma2. Kept as a deliberate
                        heavy-tailed control; satisfies_cl is False.
    """

    family: str
    sigma2: float = 1.0
    beta: float | None = None
    nu: float | None = None

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise DomainError(
                f"unknown noise family {self.family!r}, expected one of {NOISE_FAMILIES}")
        if not (self.sigma2 > 0.0):
            raise DomainError(f"noise variance must be > 0, got {self.sigma2}")
        if self.family == "weibull":
            b = self.beta if self.beta is not None else 0.5
            if not (0.0 < b < 1.0):
                raise DomainError(f"weibull beta must lie in (0, 1), got {self.beta}")
            object.__setattr__(self, "beta", float(b))
        if self.family == "student":
            nu = self.nu if self.nu is not None else 3.0
            if not (nu > 2.0):
                raise DomainError(
                    f"student nu must be > 2 for variance rescaling, got {self.nu}")
            object.__setattr__(self, "nu", float(nu))

    @property
    def satisfies_cl(self) -> bool:
        """Whether the tail is light enough for the moderate-deviation regime."""
        return self.family in ("gaussian", "weibull")

    @property
    def tau4(self) -> float:
        """Fourth moment E[V^4]; +inf for student noise with nu <= 4."""
        s4 = self.sigma2**2
        if self.family == "gaussian":
            return 3.0 * s4
        if self.family == "weibull":
            b = self.beta
            return s4 * math.gamma(1.0 + 2.0 / b) / math.gamma(1.0 + 1.0 / b) ** 2
        nu = self.nu
        if nu <= 4.0:
            return math.inf
        return 3.0 * s4 * (nu - 2.0) / (nu - 4.0)


def substream(master_seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator keyed by (master_seed, stream).

    Streams are independent of execution order and worker count: the key
    fully determines the sequence, so replication i always sees the same
    draws no matter which worker runs it.
    """
    key = np.array([master_seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_noise(spec: NoiseSpec, n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Draw v[1..n] i.i.d. from spec; deterministic given (spec, n, seed)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else substream(int(seed), 0)
    sigma = math.sqrt(spec.sigma2)
    if spec.family == "gaussian":
        return sigma * rng.standard_normal(n)
    if spec.family == "weibull":
        shape = 2.0 * spec.beta
        scale = sigma / math.sqrt(math.gamma(1.0 + 1.0 / spec.beta))
        w = scale * rng.weibull(shape, size=n)
        signs = 2.0 * rng.integers(0, 2, size=n) - 1.0
        return signs * w
    t = rng.standard_t(spec.nu, size=n)
    return sigma * math.sqrt((spec.nu - 2.0) / spec.nu) * t


@dataclass(frozen=True)
class Trajectory:
    """One simulated path: x[0..n], eps[0..n], v[1..n] (v has length n)."""

    x: np.ndarray
    eps: np.ndarray
    v: np.ndarray = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return len(self.x) - 1


def build_trajectory(p: ModelParams, v: np.ndarray) -> Trajectory:
    """Run both recurrences over given innovations (the noiseless test hook)."""
    v = np.asarray(v, dtype=float)
    n = len(v)
    eps = np.empty(n + 1)
    x = np.empty(n + 1)
    eps[0] = p.eps0
    x[0] = p.x0
    if n:
        eps[1:] = lfilter([1.0], [1.0, -p.rho], v, zi=[p.rho * p.eps0])[0]
        x[1:] = lfilter([1.0], [1.0, -p.theta], eps[1:], zi=[p.theta * p.x0])[0]
    return Trajectory(x=x, eps=eps, v=v)


def simulate(p: ModelParams, spec: NoiseSpec, n: int,
             seed: int | np.random.Generator) -> Trajectory:
    """Simulate a path of length n >= 2 from validated parameters."""
    validate_params(p)
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return build_trajectory(p, sample_noise(spec, n, seed))


def format_float(value: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(value))


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    """Export with header k,x,eps,v; v is empty at k=0 where it is undefined."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "x", "eps", "v"])
        for k in range(traj.n + 1):
            vcell = "" if k == 0 else format_float(traj.v[k - 1])
            w.writerow([k, format_float(traj.x[k]), format_float(traj.eps[k]), vcell])


def read_trajectory_csv(path: str) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    eps = np.array([float(r["eps"]) for r in rows])
    v = np.array([float(r["v"]) for r in rows if r["v"] != ""])
    return Trajectory(x=x, eps=eps, v=v)
