"""Monte Carlo experiments on the edge of sample covariance spectra.

Replica i of an experiment is sampled from ``derive_seed(master_seed, i)``,
so records do not depend on the number of workers or on execution order, and
a run with more replicas extends a shorter one record for record.
"""
from __future__ import annotations

import functools
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import __version__
from .airy_kernel import count_distribution, topk_cdf_complex
from .combinatorics import theorem3_constant
from .ensembles import WISHART, EnsembleSpec, derive_seed, sample_matrix
from .scaling import scaling_constants
from .spectral import gram_eigenvalues, trace_power
from .tracy_widom import TWTable, default_table

KS_TOLERANCE = 0.08


class ReplicaError(RuntimeError):
    """An eigensolver failure inside one replica."""

    def __init__(self, index, cause):
        super().__init__(f"replica {index} failed: {cause}")
        self.index = index


@dataclass(frozen=True)
class ExperimentConfig:
    spec: EnsembleSpec
    replicas: int
    k_top: int = 1
    master_seed: int = 0
    johnstone_centering: bool = False
    output_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if not 1 <= self.k_top <= self.spec.p:
            raise ValueError(f"k_top must lie in 1..{self.spec.p}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def beta(self):
        return 2 if self.spec.is_complex else 1

    def to_config(self):
        out = dict(self.spec.to_config())
        out.update(replicas=str(self.replicas), k_top=str(self.k_top),
                   master_seed=str(self.master_seed),
                   johnstone_centering=str(self.johnstone_centering).lower())
        return out

    def config_hash(self):
        text = "\n".join(f"{k}={v}" for k, v in sorted(self.to_config().items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class EdgeRecord:
    replica_index: int
    seed: int
    rescaled: tuple  # top-k rescaled eigenvalues, descending
    lambda1: float


def _entry_variance(spec):
    return 2.0 if (spec.entry.is_complex and spec.entry.convention == WISHART) else 1.0


def _edge_replica(args):
    spec, index, seed, k_top, mu, sigma = args
    try:
        eig = gram_eigenvalues(sample_matrix(spec, seed)).eigenvalues / _entry_variance(spec)
    except Exception as exc:  # noqa: BLE001 - reraised with the replica index
        raise ReplicaError(index, exc) from exc
    top = eig[:k_top]
    return EdgeRecord(index, seed, tuple(float(v) for v in (top - mu) / sigma), float(eig[0]))


def _map(func, tasks, workers):
    if workers == 1 or len(tasks) < 2:
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=chunk))


def run_edge_experiment(cfg: ExperimentConfig, start: int = 0) -> list:
    """One EdgeRecord per replica start..start+replicas-1, sorted by index."""
    c = scaling_constants(cfg.spec.n, cfg.spec.p, johnstone=cfg.johnstone_centering)
    tasks = [(cfg.spec, i, derive_seed(cfg.master_seed, i), cfg.k_top, c.mu, c.sigma)
             for i in range(start, start + cfg.replicas)]
    records = sorted(_map(_edge_replica, tasks, cfg.workers), key=lambda r: r.replica_index)
    if cfg.output_path:
        write_records(records, os.path.join(cfg.output_path, "records.csv"))
    return records


def rescaled_column(records, k=1):
    return np.array([r.rescaled[k - 1] for r in records])


# ---------------------------------------------------------------------------
# output

def _fmt(v):
    return repr(float(v))


def write_records(records, path):
    k = len(records[0].rescaled) if records else 0
    header = ["replica", "seed", "lambda1"] + [f"s{j + 1}" for j in range(k)]
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in records:
            row = [str(r.replica_index), str(r.seed), _fmt(r.lambda1)] + [_fmt(v) for v in r.rescaled]
            fh.write(",".join(row) + "\n")


def read_records(path):
    out = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        k = len(header) - 3
        for line in fh:
            parts = line.strip().split(",")
            out.append(EdgeRecord(int(parts[0]), int(parts[1]),
                                  tuple(float(v) for v in parts[3:3 + k]), float(parts[2])))
    return out


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) if isinstance(v, float)
                              else str(v) for v in row) + "\n")


def write_summary(path, items):
    """key = value text; values are written with repr for floats."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"version = {__version__}\n")
        for k, v in items.items():
            fh.write(f"{k} = {_fmt(v) if isinstance(v, float) else v}\n")


def read_summary(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.split("=", 1)
                out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# statistics

def ks_statistic(samples, cdf) -> float:
    """sup |F_N - F| over both sides of every sample point."""
    x = np.sort(np.asarray(samples, dtype=float))
    nobs = len(x)
    if nobs < 2:
        raise ValueError("need at least 2 samples")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, nobs + 1)
    return float(max(np.max(i / nobs - f), np.max(f - (i - 1) / nobs)))


def two_sample_ks(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / len(a)
    fb = np.searchsorted(b, pts, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def same_law_threshold(n_a, n_b=None) -> float:
    """1.5 x the 5% two-sample Kolmogorov quantile 1.36 sqrt(2/N) (equal sizes)."""
    n_b = n_a if n_b is None else n_b
    return 1.5 * 1.36 * math.sqrt((n_a + n_b) / (n_a * n_b))


def tw_cdf_for(beta, table: Optional[TWTable] = None):
    table = table or default_table()
    return lambda x: table.cdf(x, beta)


def regime_label(n, p):
    """'theorem' when n - p = O(p^{1/3}) (here |n - p| <= p^{1/3}), else 'conjecture-level'."""
    return "theorem" if abs(n - p) <= p ** (1.0 / 3.0) else "conjecture-level"


@dataclass
class UniversalityReport:
    distance: float
    threshold: float
    distance_a_tw: float
    distance_b_tw: float
    regime: str
    passed: bool


def universality_comparison(cfg_a: ExperimentConfig, cfg_b: ExperimentConfig,
                            records_a=None, records_b=None, table=None) -> UniversalityReport:
    """Two-sample KS of rescaled lambda_1 under two entry laws, plus each vs TW."""
    for name in ("n", "p"):
        if getattr(cfg_a.spec, name) != getattr(cfg_b.spec, name):
            raise ValueError(f"configs differ in {name}; only the entry law may differ")
    if cfg_a.replicas != cfg_b.replicas or cfg_a.johnstone_centering != cfg_b.johnstone_centering:
        raise ValueError("configs differ beyond the entry law")
    ra = records_a if records_a is not None else run_edge_experiment(cfg_a)
    rb = records_b if records_b is not None else run_edge_experiment(cfg_b)
    xa, xb = rescaled_column(ra), rescaled_column(rb)
    dist = two_sample_ks(xa, xb)
    thr = same_law_threshold(len(xa), len(xb))
    return UniversalityReport(
        distance=dist, threshold=thr,
        distance_a_tw=ks_statistic(xa, tw_cdf_for(cfg_a.beta, table)),
        distance_b_tw=ks_statistic(xb, tw_cdf_for(cfg_b.beta, table)),
        regime=regime_label(cfg_a.spec.n, cfg_a.spec.p),
        passed=dist < thr)


@dataclass
class TailBoundReport:
    s_grid: list
    survival: list
    log_survival: list
    fitted_rate: float
    max_ratio: float
    decreasing: bool

    @property
    def bounded(self):
        return self.max_ratio < 1.0


def tail_bound_experiment(cfg: ExperimentConfig, s_grid, records=None) -> TailBoundReport:
    """Empirical P(lambda_1 > mu + sigma s) with a log-linear fit.

    ``decreasing`` requires log-survival to drop strictly between successive
    grid points; an empty tail counts as -inf, and once there it stays there.
    The fitted rate is minus the least-squares slope over the nonzero points.
    ``max_ratio`` is max over replicas of (lambda_1 - mu) / (sqrt(p) log p).
    """
    records = records if records is not None else run_edge_experiment(cfg)
    s_grid = [float(s) for s in s_grid]
    x = rescaled_column(records)
    surv = [float(np.mean(x > s)) for s in s_grid]
    logs = [math.log(v) if v > 0 else -math.inf for v in surv]
    decreasing = all(b < a or (a == -math.inf and b == -math.inf) for a, b in zip(logs, logs[1:]))
    pts = [(s, ls) for s, ls in zip(s_grid, logs) if ls > -math.inf]
    if len(pts) >= 2:
        ss, ls = np.array(pts).T
        rate = float(-np.polyfit(ss, ls, 1)[0])
    else:
        rate = math.nan
    c = scaling_constants(cfg.spec.n, cfg.spec.p, johnstone=cfg.johnstone_centering)
    lam = np.array([r.lambda1 for r in records])
    p = cfg.spec.p
    ratio = float(np.max((lam - c.mu) / (math.sqrt(p) * math.log(p)))) if p > 1 else math.nan
    return TailBoundReport(s_grid, surv, logs, rate, ratio, decreasing)


@dataclass
class TraceMomentRow:
    m: int
    mc_mean: float
    std_error: float
    prediction: float
    ratio: float
    regime: str


def _trace_replica(args):
    spec, index, seed, m_values = args
    try:
        s = gram_eigenvalues(sample_matrix(spec, seed))
    except Exception as exc:  # noqa: BLE001
        raise ReplicaError(index, exc) from exc
    var = _entry_variance(spec)
    eig = s.eigenvalues / var
    scaled = type(s)(eigenvalues=eig, n=s.n, p=s.p, seed=s.seed)
    return index, [trace_power(scaled, m) for m in m_values]


def trace_moment_experiment(cfg: ExperimentConfig, m_values: Sequence[int]) -> list:
    """Monte Carlo E Tr A^m against theorem3_constant(gamma) p mu^m / m^{3/2}.

    Rows with m <= sqrt(p) / 2 are labelled '3a' (asymptotic equality); larger
    m are labelled '3b', where only boundedness of the ratio is claimed.
    """
    spec = cfg.spec
    m_values = [int(m) for m in m_values]
    tasks = [(spec, i, derive_seed(cfg.master_seed, i), m_values) for i in range(cfg.replicas)]
    results = sorted(_map(_trace_replica, tasks, cfg.workers))
    values = np.array([r[1] for r in results])
    c = scaling_constants(spec.n, spec.p)
    rows = []
    for j, m in enumerate(m_values):
        col = values[:, j]
        mean = math.fsum(col) / len(col)
        se = float(np.std(col, ddof=1) / math.sqrt(len(col))) if len(col) > 1 else math.nan
        pred = theorem3_constant(c.gamma) * spec.p * c.mu ** m / m ** 1.5
        regime = "3a" if m <= 0.5 * math.sqrt(spec.p) else "3b"
        rows.append(TraceMomentRow(m, mean, se, pred, mean / pred, regime))
    return rows


@dataclass
class TopKReport:
    s_grid: list
    empirical: dict          # k -> empirical CDF values on s_grid
    predicted: dict          # k -> topk_cdf_complex values on s_grid
    ks: dict                 # k -> KS of rescaled lambda_k vs prediction (k >= 2)
    one_count_empirical: list
    one_count_predicted: list
    ordering_holds: bool

    @property
    def max_one_count_error(self):
        return max(abs(a - b) for a, b in zip(self.one_count_empirical, self.one_count_predicted))


@functools.lru_cache(maxsize=8)
def _topk_spline(k, step=0.05, lo=-8.0, hi=6.0, m_nodes=40):
    grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    vals = [float(np.sum(count_distribution(s, k - 1, m_nodes=m_nodes, check=False))) for s in grid]
    return CubicSpline(grid, vals), lo, hi


def topk_cdf_callable(k):
    """Vectorised s -> P(lambda_k <= s) under the complex edge law.

    Tabulated on [-8, 6] (step 0.05) and interpolated by a cubic spline, which
    is accurate to ~1e-7; 0 below the table (the law is < 1e-19 there) and
    the exact sum above it.
    """
    spline, lo, hi = _topk_spline(k)

    def cdf(xs):
        xs = np.asarray(xs, dtype=float)
        out = np.clip(spline(np.clip(xs, lo, hi)), 0.0, 1.0)
        out = np.where(xs < lo, 0.0, out)
        above = xs > hi
        if np.any(above):
            out = np.where(above, topk_cdf_complex(k, min(float(np.max(xs)), 8.0)), out)
        return out
    return cdf


def topk_joint_experiment(cfg: ExperimentConfig, s_grid, records=None) -> TopKReport:
    """Empirical marginals of rescaled lambda_2, lambda_3 vs the Fredholm prediction,
    and the identity P(lambda_2 <= s) - P(lambda_1 <= s) = P(#(s, inf) = 1)."""
    if cfg.k_top < 2:
        raise ValueError("topk_joint_experiment needs k_top >= 2")
    records = records if records is not None else run_edge_experiment(cfg)
    s_grid = [float(s) for s in s_grid]
    kmax = min(cfg.k_top, 3)
    emp, pred, ks = {}, {}, {}
    cols = {k: rescaled_column(records, k) for k in range(1, kmax + 1)}
    for k in range(1, kmax + 1):
        emp[k] = [float(np.mean(cols[k] <= s)) for s in s_grid]
        pred[k] = [topk_cdf_complex(k, s) for s in s_grid]
        if k >= 2:
            ks[k] = ks_statistic(cols[k], topk_cdf_callable(k))
    one_emp = [b - a for a, b in zip(emp[1], emp[2])]
    one_pred = [float(count_distribution(s, 1)[1]) for s in s_grid]
    ordering = all(b >= a for a, b in zip(emp[1], emp[2]))
    return TopKReport(s_grid, emp, pred, ks, one_emp, one_pred, ordering)
