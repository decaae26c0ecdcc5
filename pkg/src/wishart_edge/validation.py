"""Desk-scale acceptance checks, shared by ``wishart-edge validate`` and the test suite.

Each check returns a :class:`CriterionResult`; none of them raises on a
failed tolerance. Criteria 6, 8 and 9 share the Monte Carlo runs held in
:class:`EdgeRuns`, so a full sweep simulates every configuration once.
"""
from __future__ import annotations

import filecmp
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .airy_kernel import fredholm_gap, kernel_sup_difference
from .combinatorics import (
    PathSumSpec, catalan, dyck_bruteforce, dyck_polynomials, expected_trace_bruteforce,
    expected_trace_exact, gm_asymptotic, gprime_polynomials, verify_functional_equation,
    wigner_domination_check)
from .ensembles import EnsembleSpec, EntryDistribution, sample_matrix
from .harness import (
    KS_TOLERANCE, ExperimentConfig, ks_statistic, rescaled_column, run_edge_experiment,
    same_law_threshold, tail_bound_experiment, topk_cdf_callable, trace_moment_experiment,
    tw_cdf_for, two_sample_ks, write_csv, write_records)
from .scaling import mp_distance
from .spectral import empirical_spectral_distribution, gram_eigenvalues
from .tracy_widom import default_table

EDGE_N = 200
EDGE_REPLICAS = 2000
TOPK_REPLICAS = 4000
TAIL_GRID = (1.0, 2.0, 3.0, 4.0)
MOMENT_P = 300
MOMENT_M = (8, 12, 16)
MOMENT_REPLICAS = 500


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    values: dict = field(default_factory=dict)

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {verdict}  {self.name}: {self.detail} [{self.seconds:.1f}s]"


def _timed(number, name, func):
    t0 = time.perf_counter()
    passed, detail, values = func()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0, values)


# ---------------------------------------------------------------------------
# configurations of the Monte Carlo criteria

def edge_configs(workers=1):
    """The record streams behind criteria 6 and 9 (fixed seeds).

    Criteria 6 and 9 read the first 2000 real and complex records; the extra
    replicas feed the lambda_2 comparison and the real edge-density histogram.
    """
    def cfg(dist, replicas, k_top, seed):
        return ExperimentConfig(EnsembleSpec(dist, EDGE_N, EDGE_N), replicas=replicas,
                                k_top=k_top, master_seed=seed, workers=workers)
    return {
        "complex": cfg(EntryDistribution.gaussian_complex(), TOPK_REPLICAS, 3, 1),
        "real": cfg(EntryDistribution.gaussian_real(), TOPK_REPLICAS, 10, 2),
        "rademacher": cfg(EntryDistribution.rademacher(), EDGE_REPLICAS, 1, 3),
    }


def moment_config(workers=1):
    return ExperimentConfig(EnsembleSpec(EntryDistribution.gaussian_real(), MOMENT_P, MOMENT_P),
                            replicas=MOMENT_REPLICAS, master_seed=5, workers=workers)


@dataclass
class EdgeRuns:
    records: dict
    moments: list
    workers: int
    timings: dict = field(default_factory=dict)  # seconds spent simulating, by stream

    @property
    def real_2000(self):
        """First EDGE_REPLICAS real records: the same stream as a 2000-replica run."""
        return self.records["real"][:EDGE_REPLICAS]

    @classmethod
    def simulate(cls, workers=1):
        records, timings = {}, {}
        for name, c in edge_configs(workers).items():
            t0 = time.perf_counter()
            records[name] = run_edge_experiment(c)
            timings[name] = time.perf_counter() - t0
        t0 = time.perf_counter()
        moments = trace_moment_experiment(moment_config(workers), MOMENT_M)
        timings["moments"] = time.perf_counter() - t0
        return cls(records, moments, workers, timings)

    def write(self, out_dir):
        """Every CSV that criterion 10 compares byte for byte."""
        for name, recs in self.records.items():
            write_records(recs, os.path.join(out_dir, f"records_{name}.csv"))
        write_csv(os.path.join(out_dir, "moments.csv"),
                  ["m", "mc_mean", "std_error", "prediction", "ratio", "regime"],
                  [(r.m, r.mc_mean, r.std_error, r.prediction, r.ratio, r.regime) for r in self.moments])
        tail = tail_bound_experiment(edge_configs()["real"], TAIL_GRID, self.real_2000)
        write_csv(os.path.join(out_dir, "tail.csv"), ["s", "survival"],
                  list(zip(tail.s_grid, tail.survival)))
        return sorted(f for f in os.listdir(out_dir) if f.endswith(".csv"))


# ---------------------------------------------------------------------------
# criteria

def criterion_1():
    def run():
        g = dyck_polynomials(40)
        catalan_ok = all(g[m](1) == catalan(m) for m in range(41))
        fe = verify_functional_equation(15)
        brute_ok = all(dyck_polynomials(8)[m] == dyck_bruteforce(m, 0)
                       and gprime_polynomials(8)[m] == dyck_bruteforce(m, 1) for m in range(9))
        detail = (f"g_m(1)=Catalan(m) m<=40: {catalan_ok}; {fe}; "
                  f"DP = brute force m<=8: {brute_ok}")
        return catalan_ok and fe.passed and brute_ok, detail, {}
    return _timed(1, "exact Dyck combinatorics", run)


def criterion_2():
    def run():
        g50 = dyck_polynomials(50)[50]
        ratios = {y: g50(y) / gm_asymptotic(50, y) for y in (1, 2, 4)}
        ok = all(0.95 <= r <= 1.05 for r in ratios.values())
        detail = ", ".join(f"y={y}: {r:.4f}" for y, r in ratios.items()) + " (need [0.95, 1.05])"
        return ok, detail, ratios
    return _timed(2, "g_50 / asymptotic", run)


def criterion_3():
    def run():
        mismatches, dominated, cases = [], True, 0
        for dist in (EntryDistribution.gaussian_real(), EntryDistribution.rademacher()):
            for n in range(1, 4):
                for p in range(1, 4):
                    for m in range(1, 4):
                        spec = PathSumSpec.from_distribution(dist, n, p, m)
                        cases += 1
                        if expected_trace_exact(spec) != expected_trace_bruteforce(spec):
                            mismatches.append((dist.family.value, n, p, m))
                        dominated &= wigner_domination_check(spec).passed
        detail = f"{cases} cases, {len(mismatches)} mismatches, domination holds: {dominated}"
        return not mismatches and dominated, detail, {"mismatches": mismatches}
    return _timed(3, "exact trace moments", run)


def criterion_4(step=0.1):
    def run():
        grid = np.round(np.arange(-5.0, 2.0 + 1e-9, step), 10)
        table = default_table()
        painleve = table.cdf(grid, 2)
        fredholm = np.array([fredholm_gap(s) for s in grid])
        err = float(np.max(np.abs(painleve - fredholm)))
        return err < 1e-6, f"sup |F2 - det(I - K_Ai)| on [-5, 2] = {err:.2e} (need < 1e-6)", {"error": err}
    return _timed(4, "Painleve vs Fredholm", run)


def criterion_5():
    def run():
        sups = {p: kernel_sup_difference(p, 0) for p in (50, 100, 200, 400)}
        vals = list(sups.values())
        monotone = all(b < a for a, b in zip(vals, vals[1:]))
        detail = ", ".join(f"p={p}: {v:.4f}" for p, v in sups.items()) + " (monotone, last < 0.05)"
        return monotone and vals[-1] < 0.05, detail, sups
    return _timed(5, "Laguerre -> Airy kernel", run)


def criterion_6(runs: EdgeRuns):
    def run():
        table = default_table()
        cplx, rad = runs.records["complex"], runs.records["rademacher"]
        real = runs.real_2000
        first = cplx[:EDGE_REPLICAS]
        ks2 = ks_statistic(rescaled_column(first), tw_cdf_for(2, table))
        ks1 = ks_statistic(rescaled_column(real), tw_cdf_for(1, table))
        uni = two_sample_ks(rescaled_column(real), rescaled_column(rad))
        thr = same_law_threshold(len(real), len(rad))
        ks_l2 = ks_statistic(rescaled_column(cplx, 2), topk_cdf_callable(2))
        parts = {
            "complex_F2": (ks2, KS_TOLERANCE, ks2 < KS_TOLERANCE),
            "real_F1": (ks1, KS_TOLERANCE, ks1 < KS_TOLERANCE),
            "gaussian_vs_rademacher": (uni, thr, uni < thr),
            "complex_lambda2": (ks_l2, KS_TOLERANCE, ks_l2 < KS_TOLERANCE),
        }
        detail = "; ".join(f"{k} {v:.4f} < {t:.4f} {'ok' if ok else 'FAILED'}"
                           for k, (v, t, ok) in parts.items())
        return all(ok for _, _, ok in parts.values()), detail, parts
    return _timed(6, "edge universality", run)


def criterion_7(seed=7):
    def run():
        spec = EnsembleSpec(EntryDistribution.gaussian_real(), 800, 400)
        spectrum = gram_eigenvalues(sample_matrix(spec, seed))
        dist = mp_distance(empirical_spectral_distribution(spectrum, spec.n), spec.n / spec.p)
        return dist < 0.07, f"sup |ESD - MP| at p=400, gamma=2 = {dist:.4f} (need < 0.07)", {"distance": dist}
    return _timed(7, "Marchenko-Pastur bulk", run)


def criterion_8(runs: EdgeRuns):
    def run():
        ratios = {r.m: r.ratio for r in runs.moments}
        ok = all(0.8 <= r <= 1.2 for r in ratios.values())
        detail = ", ".join(f"m={m}: {r:.3f}" for m, r in ratios.items()) + " (need [0.8, 1.2])"
        return ok, detail, ratios
    return _timed(8, "trace moments vs asymptotic", run)


def criterion_9(runs: EdgeRuns):
    def run():
        rep = tail_bound_experiment(edge_configs()["real"], TAIL_GRID, runs.real_2000)
        ok = rep.decreasing and rep.fitted_rate > 0 and rep.bounded
        surv = ", ".join(f"{v:.4f}" for v in rep.survival)
        detail = (f"survival on s=1..4: {surv}; rate {rep.fitted_rate:.3f}; "
                  f"max (l1 - mu)/(sqrt(p) log p) = {rep.max_ratio:.3f} (need < 1)")
        return ok, detail, {"report": rep}
    return _timed(9, "tail bounds", run)


def criterion_10(runs: EdgeRuns, dir_a, dir_b, workers=2):
    """Write ``runs`` to dir_a, rerun everything with ``workers`` processes into dir_b."""
    def run():
        files = runs.write(dir_a)
        other = EdgeRuns.simulate(workers=workers if runs.workers == 1 else 1)
        other.write(dir_b)
        match, mismatch, errors = filecmp.cmpfiles(dir_a, dir_b, files, shallow=False)
        ok = not mismatch and not errors
        detail = f"{len(match)}/{len(files)} CSVs byte-identical (workers {runs.workers} vs {other.workers})"
        return ok, detail, {"mismatch": mismatch + errors}
    return _timed(10, "determinism", run)


def run_all(out_dir, workers=1, quick=False, log=None):
    """Every criterion in order; ``quick`` skips the Monte Carlo ones (6, 8, 9, 10)."""
    results = []

    def emit(res):
        results.append(res)
        if log:
            log(res.line())

    for check in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5):
        emit(check())
    emit(criterion_7())
    if quick:
        return results
    runs = EdgeRuns.simulate(workers)
    for check in (criterion_6, criterion_8, criterion_9):
        emit(check(runs))
    emit(criterion_10(runs, os.path.join(out_dir, "run_a"), os.path.join(out_dir, "run_b")))
    results.sort(key=lambda r: r.number)
    return results
