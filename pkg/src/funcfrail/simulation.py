"""Monte Carlo study: data generation, replications and aggregation."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import cox
from .inference import concordance, imse_beta, mse_gamma
from .pipeline import PipelineSettings, SurvivalDataset, fit_pipeline
from .smoothing import SamplingGrid

NOISE_VAR = 0.5
N_FREQ = 10


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent Philox generator for ``(seed, *keys)``.

    Keys name the task (replicate, bootstrap draw, ...), so a task gets the
    same stream whether it runs serially or in a worker process.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, keys)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SimConfig:
    n: int = 250
    tau: float = 0.01
    phi: float = 0.01
    rho: float = 0.5
    J: int = 101
    n_test: Optional[int] = None
    replications: int = 100
    seed: int = 20240101
    fpca_threshold: float = 0.85
    n_basis: int = 8
    frailty_link: str = "log"  # "log": hazard x w; "identity": exp(w) in the hazard
    noisy_linear_predictor: bool = False
    fit_no_frailty: bool = True

    def __post_init__(self):
        if self.n < 20:
            raise ValueError("n must be >= 20")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.phi <= 0:
            raise ValueError("phi must be > 0")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        if self.frailty_link not in ("log", "identity"):
            raise ValueError("frailty_link must be 'log' or 'identity'")

    @property
    def test_size(self) -> int:
        return self.n if self.n_test is None else self.n_test


def beta_true_eval(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    p = np.pi
    return 0.3 * (
        np.sin(p * s) - np.cos(p * s) + np.sin(3 * p * s / 10) - np.cos(3 * p * s)
        + np.sin(5 * p * s) / 9 - np.cos(5 * p * s) / 9
        + np.sin(7 * p * s) / 16 - np.cos(7 * p * s) / 16
        + np.sin(9 * p * s) / 25 + np.cos(9 * p * s) / 25
        + (2 * p) ** -0.5 * np.exp(-((s - 0.5) ** 2) / 2)
    )


@dataclass(frozen=True)
class TruthSpec:
    gamma_true: np.ndarray = field(default_factory=lambda: np.full(6, 0.5))
    beta_true: Callable = beta_true_eval

    def __post_init__(self):
        if np.asarray(self.gamma_true).size != 6:
            raise ValueError("gamma_true must have length 6")


def gen_functional_predictor(n: int, J: int, rng: np.random.Generator, grid: Optional[SamplingGrid] = None):
    """Random curves ``u1 + u2 s + sum_j v_j1 sin(2(2j-1) pi s) + v_j2 cos(...)``.

    Returns the noise-free curves, the curves plus N(0, 0.5) noise, and the
    coefficients ``v_11`` that the scalar covariates correlate with.
    """
    s = (grid or SamplingGrid.uniform(J)).points
    u = rng.standard_normal((n, 2))
    sd = np.arange(1, N_FREQ + 1, dtype=float)
    v = rng.standard_normal((n, N_FREQ, 2)) * sd[None, :, None]
    freq = 2 * (2 * np.arange(1, N_FREQ + 1) - 1) * np.pi
    arg = freq[:, None] * s[None, :]
    true = u[:, :1] + u[:, 1:] * s + v[:, :, 0] @ np.sin(arg) + v[:, :, 1] @ np.cos(arg)
    noisy = true + rng.normal(0.0, np.sqrt(NOISE_VAR), size=true.shape)
    return true, noisy, v[:, 0, 0].copy()


def gen_scalar_covariates(n: int, rho: float, v11, rng: np.random.Generator, cross_cov: float = 0.1,
                          p: int = 6) -> np.ndarray:
    """Correlated Gaussian covariates given the already drawn ``v_11``.

    The joint law of ``(Z, v_11)`` has ``Cov(Z) = rho^|j-k|``, ``Var(v_11) = 1``
    and ``Cov(z_k, v_11) = cross_cov``; ``Z | v_11`` is Gaussian with mean
    ``cross_cov * v_11`` and covariance ``Sigma - cross_cov^2 11'``.
    """
    v11 = np.asarray(v11, dtype=float)
    if not np.all(np.isfinite(v11)):
        raise ValueError("v11 must be finite")
    idx = np.arange(p)
    sigma = rho ** np.abs(np.subtract.outer(idx, idx))
    cond = sigma - cross_cov**2 * np.ones((p, p))
    try:
        L = np.linalg.cholesky(cond)
    except np.linalg.LinAlgError as exc:
        raise ValueError("conditional covariance is not positive definite") from exc
    return cross_cov * v11[:, None] + rng.standard_normal((n, p)) @ L.T


def gen_frailty(n: int, phi: float, rng: np.random.Generator) -> np.ndarray:
    """Gamma frailties with mean 1 and variance ``phi``."""
    if phi <= 0:
        raise ValueError("phi must be positive")
    return rng.gamma(shape=1.0 / phi, scale=phi, size=n)


def gen_survival(Z, curves, w, beta_true, gamma_true, tau: float, grid: SamplingGrid,
                 rng: np.random.Generator, frailty_link: str = "log") -> tuple[np.ndarray, np.ndarray]:
    """Exponential event and censoring times; one frailty per subject.

    The event rate is ``exp(Z gamma + int X beta) * w`` for
    ``frailty_link="log"`` and ``exp(Z gamma + int X beta + w)`` for
    ``"identity"``. ``tau = 0`` disables censoring.

    Returns
    -------
    time, status : ndarray
    """
    Z = np.asarray(Z, dtype=float)
    beta_grid = beta_true(grid.points) if callable(beta_true) else np.asarray(beta_true, dtype=float)
    lin = Z @ np.asarray(gamma_true, dtype=float) + grid.integrate(np.asarray(curves) * beta_grid)
    w = np.asarray(w, dtype=float)
    if frailty_link == "log":
        lin = lin + np.log(w)
    elif frailty_link == "identity":
        lin = lin + w
    else:
        raise ValueError(f"unknown frailty_link {frailty_link!r}")
    n = lin.size
    T = rng.exponential(size=n) * np.exp(-lin)
    C = rng.exponential(size=n) / tau if tau > 0 else np.full(n, np.inf)
    status = (T < C).astype(int)
    return np.minimum(T, C), status


def generate_dataset(config: SimConfig, n: int, rng: np.random.Generator,
                     truth: Optional[TruthSpec] = None) -> SurvivalDataset:
    truth = truth or TruthSpec()
    grid = SamplingGrid.uniform(config.J)
    true_curves, noisy, v11 = gen_functional_predictor(n, config.J, rng, grid)
    Z = gen_scalar_covariates(n, config.rho, v11, rng)
    w = gen_frailty(n, config.phi, rng)
    used = noisy if config.noisy_linear_predictor else true_curves
    time, status = gen_survival(Z, used, w, truth.beta_true, truth.gamma_true, config.tau, grid, rng,
                                config.frailty_link)
    return SurvivalDataset(time=time, status=status, Z=Z, curves=noisy, grid=grid)


# ---------------------------------------------------------------------------
# replications
# ---------------------------------------------------------------------------

METRICS = ("ci_in", "ci_out", "mse", "imse")


@dataclass
class ReplicationRecord:
    replicate: int
    seed: int
    n: int
    tau: float
    phi: float
    psi: float
    K_selected: int
    ci_in: float
    ci_out: float
    mse: float
    imse: float
    alpha_hat: float
    converged: bool
    ci_in_nofrailty: float = float("nan")
    ci_out_nofrailty: float = float("nan")
    mse_nofrailty: float = float("nan")
    imse_nofrailty: float = float("nan")
    converged_nofrailty: bool = False


def run_replication(config: SimConfig, truth: Optional[TruthSpec] = None, replicate: int = 0,
                    fit_config: Optional[cox.FrailtyConfig] = None) -> ReplicationRecord:
    """One train/test draw, the frailty fit and optionally the no-frailty fit.

    The random stream is ``substream(config.seed, replicate)``.
    """
    truth = truth or TruthSpec()
    rng = substream(config.seed, replicate)
    train = generate_dataset(config, config.n, rng, truth)
    test = generate_dataset(config, config.test_size, rng, truth)
    settings = PipelineSettings(n_basis=config.n_basis, fpca_threshold=config.fpca_threshold)
    beta_grid = truth.beta_true(train.grid.points)

    base = fit_config or cox.FrailtyConfig()

    def metrics(res):
        eta_in = res.in_sample_eta(include_frailty=True)
        eta_out = res.predict(test.Z, test.curves)
        return (concordance(train.time, train.status, eta_in),
                concordance(test.time, test.status, eta_out),
                mse_gamma(res.fit.gamma_hat, truth.gamma_true),
                imse_beta(res.beta_hat, beta_grid))

    res = fit_pipeline(train, settings, base)
    ci_in, ci_out, mse, imse = metrics(res)
    rec = ReplicationRecord(
        replicate=replicate, seed=config.seed, n=config.n, tau=config.tau, phi=config.phi,
        psi=float(1 - train.status.mean()), K_selected=int(res.fpca.K),
        ci_in=ci_in, ci_out=ci_out, mse=mse, imse=imse,
        alpha_hat=float(res.fit.alpha_hat) if res.fit.alpha_hat is not None else float("nan"),
        converged=res.fit.converged,
    )
    if config.fit_no_frailty:
        nf_cfg = cox.FrailtyConfig(**{**asdict(base), "frailty_enabled": False})
        res0 = fit_pipeline(train, settings, nf_cfg)
        rec.ci_in_nofrailty, rec.ci_out_nofrailty, rec.mse_nofrailty, rec.imse_nofrailty = metrics(res0)
        rec.converged_nofrailty = res0.fit.converged
    return rec


def _run_one(args):
    config, replicate, fit_config = args
    return run_replication(config, None, replicate, fit_config)


def run_cell(config: SimConfig, jobs: int = 1, fit_config=None) -> list[ReplicationRecord]:
    tasks = [(config, r, fit_config) for r in range(config.replications)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


def _cell_seed(seed: int, n: int, tau: float, phi: float) -> int:
    # stable per-cell seed so adding cells to a grid leaves others unchanged
    ss = np.random.SeedSequence([seed, n, int(round(tau * 1e6)), int(round(phi * 1e6))])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


@dataclass
class StudyResult:
    table: list[dict]
    replications: list[ReplicationRecord]

    def table_csv(self) -> str:
        cols = ["tau", "phi", "n", "method", "ci_in", "ci_out", "mse", "imse", "psi",
                "se_ci_in", "se_ci_out", "se_mse", "se_imse", "se_psi", "replications", "converged"]
        return _to_csv(self.table, cols)

    def replications_csv(self) -> str:
        rows = [asdict(r) for r in self.replications]
        cols = list(rows[0]) if rows else list(ReplicationRecord.__dataclass_fields__)
        return _to_csv(rows, cols)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _to_csv(rows: Sequence[dict], cols: Sequence[str]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(cols)
    for r in rows:
        wr.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def aggregate(records: Sequence[ReplicationRecord], include_no_frailty: bool = True) -> list[dict]:
    """Per-method means and standard errors of the replication metrics."""
    if not records:
        raise ValueError("no replications to aggregate")
    r0 = records[0]
    psi = np.array([r.psi for r in records])

    def summary(method, suffix):
        row = {"tau": r0.tau, "phi": r0.phi, "n": r0.n, "method": method}
        for m in METRICS:
            x = np.array([getattr(r, m + suffix) for r in records], dtype=float)
            row[m] = float(np.mean(x))
            row["se_" + m] = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
        row["psi"] = float(psi.mean())
        row["se_psi"] = float(psi.std(ddof=1) / np.sqrt(psi.size)) if psi.size > 1 else 0.0
        row["replications"] = len(records)
        conv = "converged" + ("_nofrailty" if suffix else "")
        row["converged"] = int(sum(bool(getattr(r, conv)) for r in records))
        return row

    rows = [summary("FLCRM-F", "")]
    if include_no_frailty and not np.isnan(r0.ci_in_nofrailty):
        rows.append(summary("FLCRM", "_nofrailty"))
    return rows


TABLE1_GRID = dict(n=(100, 250, 500, 1000), tau=(0.01, 0.1, 0.2), phi=(0.01, 1, 1.5, 2))


def run_study(cells: Iterable[tuple[int, float, float]], replications: int, seed: int, jobs: int = 1,
              base: Optional[SimConfig] = None, fit_config=None) -> StudyResult:
    """Run every ``(n, tau, phi)`` cell and aggregate Table-1 style rows."""
    cells = list(cells)
    if not cells:
        raise ValueError("empty study grid")
    base = base or SimConfig()
    table, reps = [], []
    configs = []
    for n, tau, phi in cells:
        cfg = SimConfig(**{**asdict(base), "n": n, "tau": tau, "phi": phi,
                           "replications": replications, "seed": _cell_seed(seed, n, tau, phi)})
        configs.append(cfg)
    tasks = [(cfg, r, fit_config) for cfg in configs for r in range(replications)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, tasks, chunksize=1))
    else:
        results = [_run_one(t) for t in tasks]
    for i, cfg in enumerate(configs):
        recs = results[i * replications:(i + 1) * replications]
        table.extend(aggregate(recs, base.fit_no_frailty))
        reps.extend(recs)
    return StudyResult(table, reps)


# ---------------------------------------------------------------------------
# frailty-score augmentation of tabular survival data
# ---------------------------------------------------------------------------

DEFAULT_SCORE_WEIGHTS = {"age": 2.0, "bmi": 2.0, "chd": 3.0}
DEFAULT_RACE_POINTS = {"Non-Hispanic Black": 2.0, "Mexican American": 2.0}
DEFAULT_THRESHOLDS = ((7.0, 0.2), (5.0, 0.4))


def frailty_augment(rows: Sequence[dict], score_weights: Optional[dict] = None,
                    race_points: Optional[dict] = None,
                    thresholds: Sequence[tuple[float, float]] = DEFAULT_THRESHOLDS,
                    columns: Optional[dict] = None) -> list[dict]:
    """Shrink survival times of subjects with a high additive frailty score.

    Points: ``age > 65``, ``BMI > 40 or BMI < 18.5``, ``CHD == 1`` and a
    per-race increment. ``thresholds`` pairs a minimum score with a time
    multiplier; the highest threshold reached applies. The default point
    values are configurable choices, not calibrated quantities.

    Returns a new list of rows with a ``frailty_score`` column added.
    """
    weights = {**DEFAULT_SCORE_WEIGHTS, **(score_weights or {})}
    race_pts = DEFAULT_RACE_POINTS if race_points is None else race_points
    col = {"age": "age", "bmi": "bmi", "chd": "chd", "race": "race", "time": "time", **(columns or {})}
    thr = sorted(thresholds, key=lambda t: -t[0])
    out = []
    for i, row in enumerate(rows):
        missing = [c for c in col.values() if c not in row]
        if missing:
            raise KeyError(f"row {i}: missing columns {missing}")
        t = float(row[col["time"]])
        if t < 0:
            raise ValueError(f"row {i}: negative time {t}")
        bmi = float(row[col["bmi"]])
        score = 0.0
        if float(row[col["age"]]) > 65:
            score += weights["age"]
        if bmi > 40 or bmi < 18.5:
            score += weights["bmi"]
        if int(float(row[col["chd"]])) == 1:
            score += weights["chd"]
        score += float(race_pts.get(str(row[col["race"]]), 0.0))
        for level, mult in thr:
            if score >= level:
                t = t * mult
                break
        new = dict(row)
        new[col["time"]] = t
        new["frailty_score"] = score
        out.append(new)
    return out
