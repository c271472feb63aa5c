"""Cox regression with normal frailty by penalized partial likelihood.

The linear predictor is ``eta = D @ theta + U @ w`` with ``D = [Z | scores]``
and ``U`` the subject-to-group incidence matrix. For a fixed frailty variance
``alpha`` the penalized partial likelihood (PPL)

    sum_i delta_i [eta_i - log sum_{j in R(t_i)} exp(eta_j)] - |w|^2 / (2 alpha)

is maximised jointly in ``(theta, w)`` by damped Newton steps; ``alpha`` is
then refreshed from the Laplace-approximated profile likelihood. Tied event
times use Breslow's convention throughout.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

log = logging.getLogger(__name__)

ALPHA_BOUNDS = (1e-6, 1e6)


class CollinearityError(np.linalg.LinAlgError):
    """Information matrix stays singular after ridge escalation."""


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RiskSetIndex:
    """Time ordering shared by every likelihood evaluation on one design.

    ``order`` sorts subjects by observed time. In sorted position ``k`` the
    risk set is ``order[first[k]:]``, so tied subjects share a risk set.
    """

    order: np.ndarray
    first: np.ndarray
    event_times: np.ndarray
    event_counts: np.ndarray

    @classmethod
    def build(cls, time: np.ndarray, status: np.ndarray) -> "RiskSetIndex":
        order = np.argsort(time, kind="stable")
        ts = time[order]
        # first sorted position holding each subject's time value
        first = np.searchsorted(ts, ts, side="left")
        ev = ts[status[order] == 1]
        event_times, event_counts = np.unique(ev, return_counts=True)
        return cls(order=order, first=first, event_times=event_times, event_counts=event_counts)

    def risk_set(self, t: float, time: np.ndarray) -> np.ndarray:
        return np.flatnonzero(time >= t)


@dataclass(frozen=True)
class CoxDesign:
    """Survival outcomes, design matrix and frailty grouping.

    Parameters
    ----------
    time : (n,) positive observed times
    status : (n,) event indicators in {0, 1}
    Z : (n, p) scalar covariates
    scores : (n, K) functional principal component scores
    group : (n,) group labels; ``None`` gives one frailty per subject
    """

    time: np.ndarray
    status: np.ndarray
    Z: np.ndarray
    scores: np.ndarray
    group: np.ndarray
    n_groups: int
    risk: RiskSetIndex = field(repr=False)

    @classmethod
    def build(cls, time, status, Z=None, scores=None, group=None) -> "CoxDesign":
        time = np.asarray(time, dtype=float).ravel()
        status = np.asarray(status).ravel()
        n = time.size
        if status.size != n:
            raise ValueError("time and status lengths differ")
        if not np.all(np.isfinite(time)) or np.any(time <= 0):
            raise ValueError("observed times must be finite and positive")
        if not np.all(np.isin(status, (0, 1))):
            raise ValueError("status must be 0 or 1")
        status = status.astype(int)
        Z = np.zeros((n, 0)) if Z is None else np.asarray(Z, dtype=float).reshape(n, -1)
        scores = np.zeros((n, 0)) if scores is None else np.asarray(scores, dtype=float).reshape(n, -1)
        if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(scores))):
            raise ValueError("covariates must be finite")
        if group is None:
            codes = np.arange(n)
        else:
            # factorize: every code in 0..d-1 is used, so U has full column rank
            _, codes = np.unique(np.asarray(group).ravel(), return_inverse=True)
            if codes.size != n:
                raise ValueError("group length differs from time")
        d = int(codes.max()) + 1 if n else 0
        D = np.hstack([Z, scores])
        if D.shape[1] and np.linalg.matrix_rank(D) < D.shape[1]:
            warnings.warn("design [Z | scores] is rank deficient", RuntimeWarning, stacklevel=2)
        return cls(time, status, Z, scores, codes, d, RiskSetIndex.build(time, status))

    @property
    def n(self) -> int:
        return self.time.size

    @property
    def D(self) -> np.ndarray:
        return np.hstack([self.Z, self.scores])

    @property
    def n_theta(self) -> int:
        return self.Z.shape[1] + self.scores.shape[1]

    @property
    def unshared(self) -> bool:
        return self.n_groups == self.n and np.array_equal(self.group, np.arange(self.n))

    @property
    def U(self) -> np.ndarray:
        U = np.zeros((self.n, self.n_groups))
        U[np.arange(self.n), self.group] = 1.0
        return U

    def eta(self, theta, w=None) -> np.ndarray:
        e = self.D @ np.asarray(theta, dtype=float) if self.n_theta else np.zeros(self.n)
        if w is not None and len(w):
            e = e + np.asarray(w, dtype=float)[self.group]
        return e


@dataclass
class FrailtyConfig:
    alpha_init: float = 0.5
    tol_inner: float = 1e-7
    tol_outer: float = 1e-5
    max_inner: int = 50
    max_outer: int = 30
    frailty_enabled: bool = True
    step_halving_max: int = 30
    alternating: bool = False
    accelerate: bool = True
    fixed_alpha: Optional[float] = None

    def __post_init__(self):
        if self.alpha_init <= 0:
            raise ValueError("alpha_init must be positive")
        if self.tol_inner <= 0 or self.tol_outer <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_inner < 1 or self.max_outer < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.fixed_alpha is not None and self.fixed_alpha <= 0:
            raise ValueError("fixed_alpha must be positive")


@dataclass(frozen=True)
class BaselineHazard:
    """Right-continuous step function with ``H(t) = 0`` before the first jump."""

    times: np.ndarray
    values: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right")
        padded = np.concatenate([[0.0], self.values])
        return padded[idx]


@dataclass
class FrailtyFit:
    gamma_hat: np.ndarray
    beta_coef_hat: np.ndarray
    w_hat: np.ndarray
    alpha_hat: Optional[float]
    baseline: BaselineHazard
    diagnostics: dict
    meta: dict = field(default_factory=dict)

    @property
    def theta_hat(self) -> np.ndarray:
        return np.concatenate([self.gamma_hat, self.beta_coef_hat])

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", False))

    def to_dict(self) -> dict:
        diag = {k: v for k, v in self.diagnostics.items()}
        return {
            "gamma_hat": [float(x) for x in self.gamma_hat],
            "beta_coef_hat": [float(x) for x in self.beta_coef_hat],
            "alpha_hat": None if self.alpha_hat is None else float(self.alpha_hat),
            "w_hat": [float(x) for x in self.w_hat],
            "baseline": {
                "times": [float(x) for x in self.baseline.times],
                "values": [float(x) for x in self.baseline.values],
            },
            "diagnostics": diag,
            **({"meta": dict(self.meta)} if self.meta else {}),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FrailtyFit":
        return cls(
            gamma_hat=np.asarray(doc["gamma_hat"], dtype=float),
            beta_coef_hat=np.asarray(doc["beta_coef_hat"], dtype=float),
            w_hat=np.asarray(doc["w_hat"], dtype=float),
            alpha_hat=doc["alpha_hat"],
            baseline=BaselineHazard(np.asarray(doc["baseline"]["times"], dtype=float),
                                    np.asarray(doc["baseline"]["values"], dtype=float)),
            diagnostics=dict(doc["diagnostics"]),
            meta=dict(doc.get("meta", {})),
        )


# ---------------------------------------------------------------------------
# partial likelihood on the linear-predictor scale
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _EtaTerms:
    loglik: float
    grad: np.ndarray  # d loglik / d eta
    eta: np.ndarray
    log_h1: np.ndarray  # log Breslow H0 at each subject's time
    log_h2: np.ndarray  # log running sum of d_k / S_k^2 at each subject's time


def _eta_terms(design: CoxDesign, eta: np.ndarray) -> _EtaTerms:
    """Partial likelihood pieces with every risk-set sum kept on the log scale.

    Working with ``log S_k`` avoids the underflow a single global shift
    suffers when the largest ``eta`` leaves the risk set early.
    """
    rs = design.risk
    o = rs.order
    es = eta[o]
    log_S = np.logaddexp.accumulate(es[::-1])[::-1][rs.first]  # log risk-set sum per sorted subject
    ev = design.status[o] > 0
    loglik = float(np.sum(es[ev] - log_S[ev]))
    # Breslow increments accumulated through the last subject tied at each time
    with np.errstate(divide="ignore"):
        lev = np.where(ev, 0.0, -np.inf)
    inc1 = np.logaddexp.accumulate(lev - log_S)
    inc2 = np.logaddexp.accumulate(lev - 2 * log_S)
    last = np.searchsorted(design.time[o], design.time[o], side="right") - 1
    log_h1 = np.empty(design.n)
    log_h2 = np.empty(design.n)
    log_h1[o] = inc1[last]
    log_h2[o] = inc2[last]
    grad = design.status - np.exp(eta + log_h1)
    if not np.isfinite(loglik):
        raise FloatingPointError("partial likelihood is not finite")
    return _EtaTerms(loglik, grad, eta, log_h1, log_h2)


def _eta_information(t: _EtaTerms) -> np.ndarray:
    """Negative Hessian of the log partial likelihood in eta.

    ``diag(e^eta H1) - (e^eta_i e^eta_j H2(min(T_i, T_j)))``.
    """
    M = np.minimum.outer(t.log_h2, t.log_h2)
    info = -np.exp(t.eta[:, None] + t.eta[None, :] + M)
    info[np.diag_indices_from(info)] += np.exp(t.eta + t.log_h1)
    return info


def penalized_partial_loglik(theta, w, alpha: float, design: CoxDesign) -> float:
    """Penalized partial log-likelihood with Breslow ties.

    ``w`` may be empty or ``None`` for the unpenalised Cox partial likelihood.
    """
    if alpha is not None and alpha <= 0:
        raise ValueError("alpha must be positive")
    w = np.zeros(0) if w is None else np.asarray(w, dtype=float)
    val = _eta_terms(design, design.eta(theta, w)).loglik
    if w.size:
        val -= float(w @ w) / (2 * alpha)
    return val


def ppl_score(theta, w, alpha: float, design: CoxDesign) -> tuple[np.ndarray, np.ndarray]:
    w = np.zeros(0) if w is None else np.asarray(w, dtype=float)
    g = _eta_terms(design, design.eta(theta, w)).grad
    s_theta = design.D.T @ g
    if not w.size:
        return s_theta, np.zeros(0)
    s_w = np.bincount(design.group, weights=g, minlength=design.n_groups) - w / alpha
    return s_theta, s_w


def _group_reduce(design: CoxDesign, A: np.ndarray) -> np.ndarray:
    """``U.T @ A`` along the first axis."""
    if design.unshared:
        return A
    out = np.zeros((design.n_groups,) + A.shape[1:])
    np.add.at(out, design.group, A)
    return out


def ppl_hessian(theta, w, alpha: float, design: CoxDesign) -> np.ndarray:
    """Negative Hessian of the PPL in ``(theta, w)``.

    Returns a symmetric matrix of size ``p + K + d`` (``p + K`` when ``w`` is
    empty); the frailty block carries ``I / alpha``.
    """
    w = np.zeros(0) if w is None else np.asarray(w, dtype=float)
    info = _eta_information(_eta_terms(design, design.eta(theta, w)))
    D = design.D
    H_tt = D.T @ info @ D
    if not w.size:
        return (H_tt + H_tt.T) / 2
    info_U = _group_reduce(design, info.T).T  # info @ U
    H_tw = D.T @ info_U
    H_ww = _group_reduce(design, info_U) + np.eye(design.n_groups) / alpha
    H = np.block([[H_tt, H_tw], [H_tw.T, H_ww]])
    return (H + H.T) / 2


# ---------------------------------------------------------------------------
# Newton iterations
# ---------------------------------------------------------------------------


def _solve_pd(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(np.diag(H)))) if H.size else 1.0, 1e-300)
    ridge = 0.0
    for _ in range(8):
        try:
            L = np.linalg.cholesky(H + ridge * scale * np.eye(H.shape[0]))
            return np.linalg.solve(L.T, np.linalg.solve(L, g))
        except np.linalg.LinAlgError:
            ridge = 1e-10 if ridge == 0 else ridge * 10
    raise CollinearityError("information matrix is not positive definite; check for collinear covariates")


@dataclass
class InnerResult:
    theta: np.ndarray
    w: np.ndarray
    ppl: float
    iterations: int
    converged: bool
    score_norm: float


def _score_norm(design, theta, w, alpha):
    s_t, s_w = ppl_score(theta, w, alpha, design)
    return max(np.max(np.abs(s_t), initial=0.0), np.max(np.abs(s_w), initial=0.0))


def _damped_step(f, x, step, f0, halvings):
    t = 1.0
    for _ in range(halvings + 1):
        cand = x + t * step
        try:
            val = f(cand)
        except FloatingPointError:
            val = -np.inf
        if np.isfinite(val) and val >= f0 - 1e-12 * (1 + abs(f0)):
            return cand, val
        t /= 2
    return x, f0


def inner_newton(design: CoxDesign, alpha: Optional[float], start, config: FrailtyConfig) -> InnerResult:
    """Maximise the PPL in ``(theta, w)`` for fixed ``alpha``.

    ``alpha=None`` (or ``config.frailty_enabled`` false) drops the frailty
    block and fits the ordinary Cox partial likelihood. Every accepted step
    does not decrease the objective; a step that would is halved up to
    ``config.step_halving_max`` times.
    """
    theta0, w0 = start
    p = design.n_theta
    theta = np.asarray(theta0, dtype=float).copy()
    frail = config.frailty_enabled and alpha is not None
    w = np.asarray(w0, dtype=float).copy() if frail else np.zeros(0)
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(w))):
        raise ValueError("start values must be finite")

    def obj(x):
        return penalized_partial_loglik(x[:p], x[p:], alpha, design)

    x = np.concatenate([theta, w])
    f = obj(x)
    it = 0
    converged = False
    for it in range(1, config.max_inner + 1):
        s_t, s_w = ppl_score(x[:p], x[p:], alpha, design)
        g = np.concatenate([s_t, s_w])
        if np.max(np.abs(g), initial=0.0) < config.tol_inner:
            converged = True
            it -= 1
            break
        H = ppl_hessian(x[:p], x[p:], alpha, design)
        if config.alternating and frail and p:
            # theta block, then w block, each a damped Newton step
            step_t = np.zeros_like(x)
            step_t[:p] = _solve_pd(H[:p, :p], s_t)
            x, f = _damped_step(obj, x, step_t, f, config.step_halving_max)
            s_w = ppl_score(x[:p], x[p:], alpha, design)[1]
            H = ppl_hessian(x[:p], x[p:], alpha, design)
            step_w = np.zeros_like(x)
            step_w[p:] = _solve_pd(H[p:, p:], s_w)
            x, f = _damped_step(obj, x, step_w, f, config.step_halving_max)
        else:
            x_new, f_new = _damped_step(obj, x, _solve_pd(H, g), f, config.step_halving_max)
            if x_new is x:
                # no ascent possible along Newton direction: numerically converged
                break
            x, f = x_new, f_new
    else:
        converged = _score_norm(design, x[:p], x[p:], alpha) < config.tol_inner
    norm = _score_norm(design, x[:p], x[p:], alpha)
    converged = converged or norm < config.tol_inner
    return InnerResult(x[:p], x[p:], f, it, converged, float(norm))


# ---------------------------------------------------------------------------
# baseline hazard and frailty variance
# ---------------------------------------------------------------------------


def breslow_cumhaz(design: CoxDesign, eta) -> BaselineHazard:
    """Breslow estimate of the cumulative baseline hazard.

    Jumps ``d_k / sum_{j in R(t_k)} exp(eta_j)`` at each distinct event time.
    """
    eta = np.asarray(eta, dtype=float)
    if not np.all(np.isfinite(eta)):
        raise ValueError("linear predictor must be finite")
    rs = design.risk
    if rs.event_times.size == 0:
        return BaselineHazard(np.zeros(0), np.zeros(0))
    m = float(np.max(eta))
    a_sorted = np.exp(eta[rs.order] - m)
    tail = np.cumsum(a_sorted[::-1])[::-1]
    ts = design.time[rs.order]
    pos = np.searchsorted(ts, rs.event_times, side="left")
    S = tail[pos]
    assert np.all(S > 0), "empty risk set at an event time"
    jumps = rs.event_counts / S * np.exp(-m)
    return BaselineHazard(rs.event_times.copy(), np.cumsum(jumps))


def laplace_K_matrix(design: CoxDesign, theta, w, alpha: float, H0: BaselineHazard) -> np.ndarray:
    """``sum_i H0(T_i) exp(eta_i) U_i U_i^T + I / alpha`` (a d x d matrix)."""
    eta = design.eta(theta, w)
    c = H0(design.time) * np.exp(eta)
    diag = np.bincount(design.group, weights=c, minlength=design.n_groups) + 1.0 / alpha
    if np.any(~np.isfinite(diag)) or np.any(diag <= 0):
        raise FloatingPointError("K matrix is not positive definite")
    return np.diag(diag)


def update_alpha(w_hat, K_matrix, d: int) -> float:
    """Profile-likelihood update ``(w'w + tr K^{-1}) / d``, clamped."""
    w_hat = np.asarray(w_hat, dtype=float)
    K = np.asarray(K_matrix, dtype=float)
    if np.count_nonzero(K - np.diag(np.diag(K))) == 0:
        tr = float(np.sum(1.0 / np.diag(K)))
    else:
        tr = float(np.trace(np.linalg.inv(K)))
    raw = (float(w_hat @ w_hat) + tr) / d
    lo, hi = ALPHA_BOUNDS
    out = min(max(raw, lo), hi)
    if out != raw:
        log.info("frailty variance update %.3g clamped to %.3g", raw, out)
    return out


def approx_profile_loglik(design: CoxDesign, alpha: float, config: Optional[FrailtyConfig] = None) -> float:
    """Laplace-approximated profile log-likelihood of the frailty variance.

    ``PPL(theta_hat, w_hat) - d/2 log(alpha) - 1/2 log|K(w_hat)|`` at the PPL
    maximiser for this ``alpha``; the PPL already carries the
    ``-w'w / (2 alpha)`` penalty.
    """
    cfg = config or FrailtyConfig()
    res = inner_newton(design, alpha, (np.zeros(design.n_theta), np.zeros(design.n_groups)), cfg)
    H0 = breslow_cumhaz(design, design.eta(res.theta, res.w))
    K = laplace_K_matrix(design, res.theta, res.w, alpha, H0)
    _, logdet = np.linalg.slogdet(K)
    d = design.n_groups
    return float(res.ppl) - 0.5 * d * np.log(alpha) - 0.5 * logdet


def _split(design: CoxDesign, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = design.Z.shape[1]
    return theta[:p].copy(), theta[p:].copy()


def fit(design: CoxDesign, config: Optional[FrailtyConfig] = None) -> FrailtyFit:
    """Fit the frailty Cox model.

    With frailty enabled, alternates a full inner Newton solve at the
    current ``alpha`` with the closed-form ``alpha`` update until the relative
    change in ``alpha`` falls below ``tol_outer``. Non-convergence is reported
    in ``diagnostics`` rather than raised.
    """
    cfg = config or FrailtyConfig()
    if design.status.sum() == 0:
        raise ValueError("no events: partial likelihood is empty")
    theta = np.zeros(design.n_theta)
    inner_iters: list[int] = []
    clamped = False

    if not cfg.frailty_enabled:
        res = inner_newton(design, None, (theta, np.zeros(0)), cfg)
        inner_iters.append(res.iterations)
        H0 = breslow_cumhaz(design, design.eta(res.theta))
        g, b = _split(design, res.theta)
        return FrailtyFit(g, b, np.zeros(0), None, H0, {
            "inner_iters": inner_iters, "outer_iters": 0, "converged": bool(res.converged),
            "final_ppl": float(res.ppl), "score_norm": res.score_norm, "alpha_clamped": False,
        })

    alpha = cfg.fixed_alpha if cfg.fixed_alpha is not None else cfg.alpha_init
    w = np.zeros(design.n_groups)
    outer_ok = cfg.fixed_alpha is not None
    outer = 0
    res = None
    lo, hi = ALPHA_BOUNDS

    def update(a):
        nonlocal theta, w, res
        res = inner_newton(design, a, (theta, w), cfg)
        inner_iters.append(res.iterations)
        theta, w = res.theta, res.w
        H0 = breslow_cumhaz(design, design.eta(theta, w))
        return update_alpha(w, laplace_K_matrix(design, theta, w, a, H0), design.n_groups)

    if cfg.fixed_alpha is not None:
        res = inner_newton(design, alpha, (theta, w), cfg)
        inner_iters.append(res.iterations)
        theta, w = res.theta, res.w
    else:
        history: list[float] = []
        while outer < cfg.max_outer:
            outer += 1
            new = update(alpha)
            clamped = new in ALPHA_BOUNDS
            if abs(new - alpha) < cfg.tol_outer * (1 + alpha):
                alpha = new
                outer_ok = True
                break
            history.append(alpha)
            alpha = new
            if cfg.accelerate and len(history) >= 2:
                # Aitken extrapolation on log(alpha); the map is nearly
                # neutral when the profile likelihood is flat
                x0, x1, x2 = np.log(history[-2]), np.log(history[-1]), np.log(alpha)
                denom = x2 - 2 * x1 + x0
                if denom != 0 and np.isfinite(denom):
                    jump = float(np.clip(x0 - (x1 - x0) ** 2 / denom - x2, -np.log(100), np.log(100)))
                    alpha = float(np.clip(np.exp(x2 + jump), lo, hi))
                history.clear()
    # final (theta, w) at the accepted alpha
    if cfg.fixed_alpha is None:
        res = inner_newton(design, alpha, (theta, w), cfg)
        inner_iters.append(res.iterations)
        theta, w = res.theta, res.w
    H0 = breslow_cumhaz(design, design.eta(theta, w))
    g, b = _split(design, theta)
    return FrailtyFit(g, b, w, float(alpha), H0, {
        "inner_iters": inner_iters, "outer_iters": outer,
        "converged": bool(outer_ok and res.converged), "final_ppl": float(res.ppl),
        "score_norm": res.score_norm, "alpha_clamped": bool(clamped),
    })


def predict_risk(fit: FrailtyFit, Z_new=None, scores_new=None, include_frailty: bool = False,
                 group_new=None) -> np.ndarray:
    """Linear predictors for new or training subjects.

    Frailties of unseen subjects are set to their prior mean 0. With
    ``include_frailty`` the fitted ``w_hat[group_new]`` is added, where
    ``group_new`` holds 0-based group codes of the training design.
    """
    p, K = fit.gamma_hat.size, fit.beta_coef_hat.size
    parts = []
    n = None
    for M, k, name in ((Z_new, p, "Z"), (scores_new, K, "scores")):
        if M is None:
            if k:
                raise ValueError(f"{name} required: fit has {k} columns")
            continue
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if k == 0 and M.size == 0:
            continue
        if M.shape[1] != k:
            raise ValueError(f"{name} has {M.shape[1]} columns, fit expects {k}")
        n = M.shape[0] if n is None else n
        if M.shape[0] != n:
            raise ValueError("row counts of Z and scores differ")
        parts.append(M)
    if n is None:
        n = 0 if group_new is None else len(group_new)
    D = np.hstack(parts) if parts else np.zeros((n, 0))
    eta = D @ fit.theta_hat if D.shape[1] else np.zeros(n)
    if include_frailty and fit.w_hat.size:
        if group_new is None:
            raise ValueError("group membership needed to add frailties")
        eta = eta + fit.w_hat[np.asarray(group_new)]
    return eta


__all__ = [
    "BaselineHazard", "CollinearityError", "CoxDesign", "FrailtyConfig", "FrailtyFit",
    "RiskSetIndex", "approx_profile_loglik", "breslow_cumhaz", "fit", "inner_newton",
    "laplace_K_matrix", "penalized_partial_loglik", "ppl_hessian", "ppl_score",
    "predict_risk", "update_alpha",
]
