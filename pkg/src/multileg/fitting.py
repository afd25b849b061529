"""Fit per-leg stiffness and friction parameters to logged forces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import RobotModel
from .errors import InsufficientData, NoConvergence
from .support import max_events

FD_STEP = 1e-6
SLIP_THRESHOLD = 1e-3


@dataclass(frozen=True)
class FitConfig:
    cov_penalty_weight: float = 0.1
    max_iterations: int = 200
    tolerance: float = 1e-10
    absolute_forces: bool = False
    slip_threshold: float = SLIP_THRESHOLD

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.cov_penalty_weight < 0:
            raise ValueError("cov_penalty_weight must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class LeastSquaresResult:
    params: np.ndarray
    cost: float
    initial_cost: float
    iterations: int
    costs: tuple  # cost after every accepted step, starting with the initial cost


def fd_jacobian(fn, p, r0=None):
    r0 = fn(p) if r0 is None else r0
    J = np.empty((len(r0), len(p)))
    for i in range(len(p)):
        h = FD_STEP * max(1.0, abs(p[i]))
        dp = p.copy()
        dp[i] += h
        J[:, i] = (fn(dp) - r0) / h
    return J


def least_squares(residual_fn, initial_params, config: FitConfig | None = None):
    """Levenberg-Marquardt minimiser of ``0.5 |r(p)|^2`` with a forward-difference Jacobian.

    Stops when an accepted step is shorter than ``tolerance`` relative to
    ``|p|``, when the scaled gradient drops below ``tolerance``, or when no
    damping level can reduce the cost further.
    """
    cfg = config or FitConfig()
    tol = cfg.tolerance
    p = np.array(initial_params, dtype=float)
    r = np.asarray(residual_fn(p), float)
    if not np.all(np.isfinite(r)):
        raise ValueError("residual is not finite at the initial parameters")
    cost = 0.5 * float(r @ r)
    costs = [cost]
    # start undamped so a well-posed problem takes the Gauss-Newton step
    lam = 0.0
    for it in range(1, cfg.max_iterations + 1):
        if cost == 0.0:
            return LeastSquaresResult(p, cost, costs[0], it - 1, tuple(costs))
        J = fd_jacobian(residual_fn, p, r)
        g = J.T @ r
        if np.max(np.abs(g)) <= tol * max(1.0, cost):
            return LeastSquaresResult(p, cost, costs[0], it - 1, tuple(costs))
        A = J.T @ J
        d = np.maximum(np.diag(A), 1e-12 * max(1.0, np.max(np.diag(A))))
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                p_new = p + step
                r_new = np.asarray(residual_fn(p_new), float)
                c_new = 0.5 * float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
                if c_new < cost:
                    break
            lam = max(4.0 * lam, 1e-3)
            if lam > 1e16:
                # no descent at any damping: stationary to working precision
                return LeastSquaresResult(p, cost, costs[0], it - 1, tuple(costs))
        p, r, cost = p_new, r_new, c_new
        costs.append(cost)
        lam = lam / 3.0 if lam > 1e-12 else 0.0
        if np.linalg.norm(step) <= tol * (np.linalg.norm(p) + tol):
            return LeastSquaresResult(p, cost, costs[0], it, tuple(costs))
    raise NoConvergence(f"least_squares: no convergence in {cfg.max_iterations} iterations")


# --------------------------------------------------------------------------
# stiffness
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StiffnessFit:
    stiffness: np.ndarray
    unidentifiable: tuple
    initial_cost: float
    cost: float
    iterations: int


def _as_logs(logs):
    return list(logs) if isinstance(logs, (list, tuple)) else [logs]


def _stiffness_data(logs):
    Q, Fm = [], []
    for log in _as_logs(logs):
        if log.q is None or log.measured_forces is None:
            raise InsufficientData("stiffness fit needs foot positions and measured normal forces")
        Q.append(log.q)
        Fm.append(log.measured_forces[..., 2])
    Q = np.concatenate(Q)
    Fm = np.concatenate(Fm)
    keep = (Fm > 0).sum(axis=1) >= 3
    if not keep.any():
        raise InsufficientData("no frame has three or more loaded legs")
    return np.ascontiguousarray(Q[keep]), Fm[keep]


def model_normal_forces(Q, K, weight):
    """Support-model normal forces for stacked frames ``Q`` (F, N, 3)."""
    n = Q.shape[1]
    zeros = np.zeros_like(Q)
    _, _, FZ, _, _, _ = kernels.viscous_batch(
        Q, zeros, np.ascontiguousarray(K, dtype=float), float(weight),
        np.ones(n), np.zeros((n, 2)), max_events(n))
    return FZ


def _shares(F):
    tot = F.sum(axis=1, keepdims=True)
    return np.divide(F, tot, out=np.zeros_like(F), where=tot > 0)


def _cov(K):
    return float(np.std(K) / np.mean(K))


def fit_stiffness(logs, robot: RobotModel, config: FitConfig | None = None, initial=None) -> StiffnessFit:
    """Fit per-leg stiffness to measured normal forces.

    By default the per-frame load shares are compared (each frame's forces
    divided by their sum); ``absolute_forces`` compares forces directly.
    The coefficient of variation of ``K`` is penalised with weight
    ``cov_penalty_weight`` times the initial mean squared residual.  Legs
    that never influence the residual are reported as unidentifiable and
    keep their initial value.
    """
    cfg = config or FitConfig()
    Q, Fm = _stiffness_data(logs)
    n = robot.n_legs
    if Q.shape[1] != n:
        raise ValueError(f"logs have {Q.shape[1]} legs, robot has {n}")
    K0 = robot.stiffness if initial is None else np.asarray(initial, float)
    target = Fm if cfg.absolute_forces else _shares(Fm)

    def data_res(K):
        F = model_normal_forces(Q, K, robot.weight)
        return ((F if cfg.absolute_forces else _shares(F)) - target).ravel()

    r0 = data_res(K0)
    lam = cfg.cov_penalty_weight * float(np.mean(r0 ** 2))

    # a leg is identifiable only if it carries measured load in some frame
    # with at least four contacts (three contacts are statically determinate)
    loaded = Fm > 0
    informative = loaded & (loaded.sum(axis=1, keepdims=True) >= 4)
    free = informative.any(axis=0)
    if not free.any():
        raise InsufficientData("no frame has four or more loaded legs", legs=range(n))

    def full_k(logp):
        K = K0.copy()
        K[free] = np.exp(logp)
        return K

    def residual(logp):
        K = full_k(logp)
        r = data_res(K)
        if lam > 0:
            r = np.append(r, np.sqrt(lam) * _cov(K))
        return r

    res = least_squares(residual, np.log(K0[free]), cfg)
    return StiffnessFit(full_k(res.params), tuple(np.flatnonzero(~free).tolist()),
                        res.initial_cost, res.cost, res.iterations)


# --------------------------------------------------------------------------
# friction
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FrictionFit:
    mu: np.ndarray
    traction_dir: np.ndarray  # (N, 2), first component >= 0
    samples: np.ndarray
    initial_cost: float
    cost: float


def _friction_samples(logs, threshold):
    Fw, Fz, V, th = [], [], [], []
    for log in _as_logs(logs):
        if log.measured_forces is None or log.foot_velocities is None:
            raise InsufficientData("friction fit needs measured forces and foot slip velocities")
        Fw.append(log.measured_forces[..., :2])
        Fz.append(log.measured_forces[..., 2])
        V.append(log.foot_velocities)
        th.append(log.poses[:, 2])
    Fw, Fz, V, th = (np.concatenate(a) for a in (Fw, Fz, V, th))
    # rotate into the body frame, where the traction matrix is constant
    c, s = np.cos(th)[:, None], np.sin(th)[:, None]
    Fb = np.stack([c * Fw[..., 0] + s * Fw[..., 1], -s * Fw[..., 0] + c * Fw[..., 1]], axis=-1)
    Vb = np.stack([c * V[..., 0] + s * V[..., 1], -s * V[..., 0] + c * V[..., 1]], axis=-1)
    use = (Fz > 0) & (np.linalg.norm(V, axis=-1) > threshold)
    return Fb, Fz, Vb, use


def _params_from_g(G):
    """``(mu, w)`` with ``mu (I + w w^T) = G`` for a symmetric 2x2 ``G``."""
    vals, vecs = np.linalg.eigh(G)
    mu = max(vals[0], 1e-12)
    w = np.sqrt(max(vals[1] / mu - 1.0, 0.0)) * vecs[:, 1]
    return mu, w


def _canonical(w):
    return -w if (w[0] < 0 or (w[0] == 0 and w[1] < 0)) else w


def fit_friction(logs, config: FitConfig | None = None) -> FrictionFit:
    """Per-leg ``(mu, w)`` of the anisotropic viscous-Coulomb law.

    The traction matrix ``mu (I + w w^T)`` is an arbitrary symmetric
    positive definite 2x2 matrix, so it is first fitted linearly and then
    refined over ``(mu, w)`` directly.
    """
    cfg = config or FitConfig()
    Fb, Fz, Vb, use = _friction_samples(logs, cfg.slip_threshold)
    n = Fb.shape[1]
    counts = use.sum(axis=0)
    missing = np.flatnonzero(counts == 0)
    if len(missing):
        raise InsufficientData(f"no slipping samples for legs {missing.tolist()}", legs=missing)
    mu = np.zeros(n)
    w = np.zeros((n, 2))
    c0 = c1 = 0.0
    for j in range(n):
        F = Fb[use[:, j], j]
        fz = Fz[use[:, j], j][:, None]
        v = Vb[use[:, j], j]
        # F = -fz G v with G = [[a, b], [b, c]]
        rows = np.zeros((2 * len(F), 3))
        rows[0::2, 0] = -(fz[:, 0] * v[:, 0])
        rows[0::2, 1] = -(fz[:, 0] * v[:, 1])
        rows[1::2, 1] = -(fz[:, 0] * v[:, 0])
        rows[1::2, 2] = -(fz[:, 0] * v[:, 1])
        g, *_ = np.linalg.lstsq(rows, F.ravel(), rcond=None)
        m0, w0 = _params_from_g(np.array([[g[0], g[1]], [g[1], g[2]]]))

        def residual(p, F=F, fz=fz, v=v):
            ww = p[1:]
            Hv = p[0] * (v + np.outer(v @ ww, ww))
            return (F + fz * Hv).ravel()

        res = least_squares(residual, np.array([m0, *w0]), cfg)
        mu[j] = res.params[0]
        w[j] = _canonical(res.params[1:])
        c0 += res.initial_cost
        c1 += res.cost
    return FrictionFit(mu, w, counts, c0, c1)
