"""Sequential model-based optimization of controller parameters.

A Gaussian-process surrogate (squared-exponential kernel with per-dimension
length scales) is fitted to all evaluated (parameters, cost) pairs; the next
candidate maximizes the upper confidence bound mean + h*stddev.  Inputs are
normalized to the unit box and costs standardized before fitting, which
keeps the covariance well conditioned across search ranges of very
different widths (e.g. kp in [0, 150] against kd in [0, 30]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.linalg import cho_factor, cho_solve, cholesky
from scipy.stats import qmc

from .control import (Controller, ControllerKind, DivergedTrajectory, GainSet,
                      Reference, Trajectory)
from .fuzzy import FlrBounds
from .plant import DisturbanceModel, PlantParams, SimConfig

FAILED_COST = -1.0e4  # below any reachable tracking cost (>= -200*pi)

# log-space hyperparameter boxes (normalized inputs, standardized outputs)
_LEN_BOUNDS = (math.log(1e-2), math.log(1e2))
_SIG_BOUNDS = (math.log(1e-4), math.log(1e2))
_NOISE_RATIO_BOUNDS = (math.log(1e-8), math.log(1e-1))
_JITTERS = (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2)


class GpFitError(RuntimeError):
    """Covariance stayed singular through the whole jitter escalation."""


@dataclass(frozen=True)
class Domain:
    """Axis-aligned search box with named dimensions."""

    names: tuple[str, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.names) == len(self.lo) == len(self.hi)):
            raise ValueError("names, lo, hi must have equal length")
        for name, a, b in zip(self.names, self.lo, self.hi):
            if a > b:
                raise ValueError(f"dimension {name}: lo {a} > hi {b}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def width(self) -> np.ndarray:
        return np.maximum(np.array(self.hi) - np.array(self.lo), 1e-300)

    def normalize(self, X: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(X) - np.array(self.lo)) / self.width()

    def denormalize(self, U: np.ndarray) -> np.ndarray:
        return np.atleast_2d(U) * self.width() + np.array(self.lo)

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)


@dataclass
class Dataset:
    """Evaluated (parameter vector, cost) rows."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise ValueError("dataset contains non-finite values")

    def append(self, x, y: float) -> None:
        self.X = np.vstack([self.X, np.atleast_2d(x)])
        self.y = np.append(self.y, y)

    def __len__(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class TunerConfig:
    """SMBO settings: T total episodes, n_init initial Latin-hypercube
    samples, h the UCB exploration coefficient."""

    T: int = 150
    n_init: int = 10
    h: float = 2.576
    seed: int = 0
    n_restarts: int = 8
    n_candidates: int = 2048

    def __post_init__(self):
        if self.n_init < 1 or self.T < self.n_init:
            raise ValueError("need n_init >= 1 and T >= n_init")


@dataclass
class GpModel:
    """Fitted GP state over normalized inputs / standardized targets.

    theta = (log length scales per dim, log signal variance,
    log noise-to-signal ratio); cho is the cached Cholesky factor of the
    training covariance (including any jitter used to factor it).
    """

    domain: Domain
    Xn: np.ndarray
    theta: np.ndarray
    y_mean: float
    y_std: float
    alpha: np.ndarray = field(repr=False)
    cho: tuple = field(repr=False)

    @property
    def length_scales(self) -> np.ndarray:
        return np.exp(self.theta[:-2])

    @property
    def signal_variance(self) -> float:
        return float(np.exp(self.theta[-2]))

    @property
    def noise_variance(self) -> float:
        return float(np.exp(self.theta[-2] + self.theta[-1]))


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # (n, m, d) per-dimension squared differences
    return (A[:, None, :] - B[None, :, :]) ** 2


def _corr(D2: np.ndarray, ls: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.sum(D2 / ls ** 2, axis=-1))


def _neg_lml_and_grad(theta: np.ndarray, Xn: np.ndarray, ys: np.ndarray,
                      D2: np.ndarray) -> tuple[float, np.ndarray]:
    n, d = Xn.shape
    ls = np.exp(theta[:d])
    sf2 = np.exp(theta[d])
    ratio = np.exp(theta[d + 1])
    C = _corr(D2, ls)
    K = sf2 * (C + ratio * np.eye(n))
    try:
        L = cholesky(K + 1e-12 * sf2 * np.eye(n), lower=True)
    except np.linalg.LinAlgError:
        return 1e12, np.zeros_like(theta)
    alpha = cho_solve((L, True), ys)
    lml = (-0.5 * ys @ alpha - np.sum(np.log(np.diag(L)))
           - 0.5 * n * math.log(2.0 * math.pi))
    Kinv = cho_solve((L, True), np.eye(n))
    W = np.outer(alpha, alpha) - Kinv  # d(lml)/dK = W/2
    grad = np.empty_like(theta)
    for k in range(d):
        dK = sf2 * C * (D2[:, :, k] / ls[k] ** 2)
        grad[k] = 0.5 * np.sum(W * dK)
    grad[d] = 0.5 * np.sum(W * K)              # dK/dlog sf2 = K
    grad[d + 1] = 0.5 * np.trace(W) * sf2 * ratio  # dK/dlog ratio
    return -lml, -grad


def gp_fit(data: Dataset, config: TunerConfig, domain: Domain) -> GpModel:
    """Fit kernel hyperparameters by maximizing the log marginal likelihood
    with multi-start L-BFGS-B (analytic gradients), then cache the training
    factorization.  Singular covariances go through a fixed jitter
    escalation before failing."""
    if len(data) < 2:
        raise ValueError("gp_fit needs at least 2 rows")
    Xn = domain.normalize(data.X)
    y_mean = float(np.mean(data.y))
    y_std = float(np.std(data.y))
    if y_std <= 0.0:
        y_std = 1.0
    ys = (data.y - y_mean) / y_std
    d = Xn.shape[1]
    D2 = _sq_dists(Xn, Xn)
    bounds = [_LEN_BOUNDS] * d + [_SIG_BOUNDS, _NOISE_RATIO_BOUNDS]
    rng = np.random.default_rng((config.seed, len(data), 0x6F17))
    starts = [np.concatenate([np.zeros(d), [0.0], [math.log(1e-4)]])]
    for _ in range(config.n_restarts - 1):
        starts.append(np.array([rng.uniform(a, b) for a, b in bounds]))
    best = None
    for x0 in starts:
        res = optimize.minimize(_neg_lml_and_grad, x0, args=(Xn, ys, D2),
                                jac=True, method="L-BFGS-B", bounds=bounds)
        if best is None or res.fun < best.fun:
            best = res
    theta = np.clip(best.x, [b[0] for b in bounds], [b[1] for b in bounds])
    ls = np.exp(theta[:d])
    sf2 = float(np.exp(theta[d]))
    ratio = float(np.exp(theta[d + 1]))
    K = sf2 * (_corr(D2, ls) + ratio * np.eye(len(ys)))
    for jitter in _JITTERS:
        try:
            cho = cho_factor(K + jitter * sf2 * np.eye(len(ys)), lower=True)
            break
        except np.linalg.LinAlgError:
            continue
    else:
        raise GpFitError("training covariance singular after jitter escalation")
    alpha = cho_solve(cho, ys)
    return GpModel(domain=domain, Xn=Xn, theta=theta, y_mean=y_mean,
                   y_std=y_std, alpha=alpha, cho=cho)


def gp_predict(model: GpModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and standard deviation (original cost units) of the
    latent function at one point or a batch of points."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    Un = model.domain.normalize(X)
    ls = model.length_scales
    sf2 = model.signal_variance
    ks = sf2 * _corr(_sq_dists(Un, model.Xn), ls)      # (m, n)
    mean_s = ks @ model.alpha
    v = cho_solve(model.cho, ks.T)                     # K^-1 k*
    var = np.maximum(sf2 - np.sum(ks * v.T, axis=1), 0.0)
    mean = model.y_mean + model.y_std * mean_s
    std = model.y_std * np.sqrt(var)
    if np.ndim(x) == 1:
        return float(mean[0]), float(std[0])
    return mean, std


def ucb(mean, stddev, h: float):
    """Acquisition score mean + h*stddev."""
    return mean + h * stddev


def suggest(model: GpModel, domain: Domain, rng: np.random.Generator,
            h: float = 2.576, n_candidates: int = 2048) -> np.ndarray:
    """Maximize the UCB over the box: scrambled-Sobol candidate scan plus
    local simplex refinement from the best few candidates.  Ties fall to
    the first best candidate of the seeded scan."""
    d = domain.dim
    sob = qmc.Sobol(d, scramble=True, seed=int(rng.integers(2 ** 63)))
    U = sob.random(n_candidates)
    cand = domain.denormalize(U)
    mean, std = gp_predict(model, cand)
    scores = ucb(mean, std, h)
    order = np.argsort(scores)[::-1]
    best_x = cand[order[0]]
    best_score = scores[order[0]]

    def neg_ucb(x):
        m, s = gp_predict(model, domain.clip(x))
        return -ucb(m, s, h)

    for i in order[:8]:
        res = optimize.minimize(neg_ucb, cand[i], method="Nelder-Mead",
                                options={"maxiter": 120, "xatol": 1e-6,
                                         "fatol": 1e-12})
        x = domain.clip(res.x)
        if -res.fun > best_score:
            best_score = -res.fun
            best_x = x
    return np.asarray(best_x, dtype=float)


@dataclass
class TuningHistory:
    """Episode-indexed record of an SMBO run."""

    X: np.ndarray
    y: np.ndarray
    best_y: np.ndarray

    def __len__(self) -> int:
        return len(self.y)


def smbo(cost, domain: Domain, config: TunerConfig,
         ) -> tuple[np.ndarray, float, TuningHistory]:
    """Sequential model-based optimization (maximization).

    Draws n_init Latin-hypercube samples, then alternates GP fit, UCB
    maximization and cost evaluation until T episodes are recorded.  A cost
    evaluation that raises scores FAILED_COST and the loop continues.
    Identical seeds reproduce identical histories.
    """
    rng = np.random.default_rng((config.seed, 0x5B0))
    lhs = qmc.LatinHypercube(domain.dim, seed=int(rng.integers(2 ** 63)))
    X_init = domain.denormalize(lhs.random(config.n_init))
    data: Dataset | None = None
    xs, ys = [], []

    def evaluate(x) -> float:
        try:
            y = float(cost(np.asarray(x, dtype=float)))
        except Exception:
            return FAILED_COST
        return y if math.isfinite(y) else FAILED_COST

    for x in X_init:
        xs.append(np.array(x))
        ys.append(evaluate(x))
    data = Dataset(np.array(xs), np.array(ys))
    while len(data) < config.T:
        if len(data) < 2:
            # not enough rows to fit the surrogate yet
            x = domain.denormalize(rng.random((1, domain.dim)))[0]
        else:
            model = gp_fit(data, config, domain)
            x = suggest(model, domain, rng, h=config.h,
                        n_candidates=config.n_candidates)
        y = evaluate(x)
        data.append(x, y)
    best_y = np.maximum.accumulate(data.y)
    i_best = int(np.argmax(data.y))
    history = TuningHistory(X=data.X.copy(), y=data.y.copy(), best_y=best_y)
    return data.X[i_best].copy(), float(data.y[i_best]), history


def tracking_cost(trajectory: Trajectory, n_steps: int = 200) -> float:
    """Negative sum of absolute link-angle error over the first n_steps
    control steps."""
    e1 = trajectory.e1
    if len(e1) < n_steps:
        raise ValueError(
            f"trajectory has {len(e1)} control-step records, need {n_steps}")
    return float(-np.sum(np.abs(e1[:n_steps])))


# ---------------------------------------------------------------------------
# search boxes and cost oracles for the two tuning stages

def pd_gain_domain() -> Domain:
    """Joint PD search box: kp in [0, 150], kd in [0, 30] for both loops."""
    return Domain(names=("kp1", "kd1", "kp2", "kd2"),
                  lo=(0.0, 0.0, 0.0, 0.0), hi=(150.0, 30.0, 150.0, 30.0))


def flr_bound_domain(half_width: float = 20.0) -> Domain:
    """Search box for the eight regulator bound values; each pair is
    order-repaired to (min, max) before use."""
    names = ("dkp1_a", "dkp1_b", "dkd1_a", "dkd1_b",
             "dkp2_a", "dkp2_b", "dkd2_a", "dkd2_b")
    return Domain(names=names, lo=(-half_width,) * 8, hi=(half_width,) * 8)


def flr_bounds_from_vector(x) -> FlrBounds:
    x = np.asarray(x, dtype=float)
    return FlrBounds.ordered((x[0], x[1]), (x[2], x[3]),
                             (x[4], x[5]), (x[6], x[7]))


def make_pd_cost(params: PlantParams, sim: SimConfig, ref: Reference,
                 dist: DisturbanceModel):
    """Square-wave tracking cost of a plain cascaded PD with gains x."""
    from .control import simulate

    def cost(x) -> float:
        gains = GainSet(*np.maximum(x, 0.0))
        ctrl = Controller(kind=ControllerKind.CASCADED_PD, gains=gains)
        traj = simulate(params, sim, ctrl, ref, dist)
        return tracking_cost(traj)

    return cost


def make_flr_cost(params: PlantParams, sim: SimConfig, ref: Reference,
                  dist: DisturbanceModel, base_gains: GainSet):
    """Tracking cost of the fuzzy cascade with regulator bounds taken from
    an 8-vector, PD gains frozen at the first-stage result."""
    from .control import simulate

    def cost(x) -> float:
        ctrl = Controller(kind=ControllerKind.FUZZY_CASCADED, gains=base_gains,
                          flr_bounds=flr_bounds_from_vector(x))
        traj = simulate(params, sim, ctrl, ref, dist)
        return tracking_cost(traj)

    return cost
