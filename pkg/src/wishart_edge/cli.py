"""``wishart-edge`` command line.

Parameters come from an INI file (one section per subcommand, ``key = value``)
and from flags; a flag beats the file, the file beats the built-in default.
Every run writes its resolved configuration (``config.ini``) and the tool
version (``VERSION``) next to its CSV outputs.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 an acceptance tolerance was missed. Failures print a single line on stderr::

    error kind=<config|numerical|tolerance|io> key=<key or -> message=<text>
"""
from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import __version__
from .airy_kernel import (
    FredholmConvergenceError, count_distribution, fredholm_gap, real_edge_density,
    rescaled_kernel_convergence)
from .combinatorics import dyck_polynomials, gprime_polynomials, verify_functional_equation
from .ensembles import EnsembleSpec, sample_matrix
from .harness import (
    ExperimentConfig, ReplicaError, ks_statistic, read_records, read_summary, regime_label,
    rescaled_column, run_edge_experiment, trace_moment_experiment, tw_cdf_for, write_csv,
    write_records, write_summary)
from .scaling import rescale, scaling_constants
from .spectral import ConvergenceError, gram_eigenvalues
from .tracy_widom import PainleveBlowUp, default_table, tw_table
from .validation import run_all

OUTPUT_ENV = "WISHART_EDGE_OUTPUT"
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_TOLERANCE = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, kind, key, message, code):
        super().__init__(message)
        self.kind, self.key, self.code = kind, key, code

    def line(self):
        return f"error kind={self.kind} key={self.key or '-'} message={self}"


def config_error(key, message):
    return CliError("config", key, message, EXIT_USAGE)


# ---------------------------------------------------------------------------
# parameter schema

def _int(text):
    return int(text)


def _float(text):
    return float(text)


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _grid(text):
    """lo:hi:step (inclusive of hi) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        if step <= 0 or hi < lo:
            raise ValueError("grid needs lo <= hi and step > 0")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(count), 12)
    return np.array([float(v) for v in text.split(",")])


def _int_list(text):
    return [int(v) for v in text.split(",")]


def _str(text):
    return text.strip()


@dataclass(frozen=True)
class Param:
    convert: Callable
    default: Optional[str]
    help: str
    minimum: Optional[float] = None
    required: bool = False


def _ensemble_params(replicas=None):
    out = {
        "n": Param(_int, None, "rows of X", 1, required=True),
        "p": Param(_int, None, "columns of X", 1, required=True),
        "family": Param(_str, "gaussian_real", "entry law: gaussian_real, gaussian_complex, "
                        "rademacher, symmetric_uniform, discrete"),
        "field": Param(_str, "", "real or complex (default: from the family)"),
        "values": Param(_str, "", "discrete support points, comma separated"),
        "weights": Param(_str, "", "discrete weights, comma separated"),
        "convention": Param(_str, "unit", "complex Gaussian variance: unit or wishart"),
        "seed": Param(_int, "0", "master seed"),
    }
    if replicas is not None:
        out["replicas"] = Param(_int, str(replicas), "Monte Carlo replicas", 1)
        out["workers"] = Param(_int, "1", "worker processes", 1)
    return out


SCHEMA = {
    "tw-table": {
        "grid": Param(_grid, "-8:6:0.05", "s grid as lo:hi:step or a list"),
        "x0": Param(_float, "8.0", "matching point for the Airy tail", 4.0),
    },
    "sample": dict(_ensemble_params(), top=Param(_int, "10", "eigenvalues reported", 1)),
    "edge-exp": dict(
        _ensemble_params(replicas=1000),
        k_top=Param(_int, "1", "top eigenvalues kept per replica", 1),
        johnstone=Param(_bool, "false", "use n - 1 in the centring and scale"),
        tolerance=Param(_float, "0", "fail (exit 3) if KS vs Tracy-Widom >= tolerance; 0 disables", 0.0),
    ),
    "kernel": {
        "mode": Param(_str, "gap", "gap, counts, laguerre or real"),
        "grid": Param(_grid, "-6:2:0.25", "s grid"),
        "k_max": Param(_int, "3", "largest count in counts mode", 0),
        "nodes": Param(_int, "60", "Gauss-Legendre nodes", 20),
        "p": Param(_int, "200", "Laguerre kernel size in laguerre mode", 1),
        "alpha": Param(_int, "0", "n - p in laguerre mode", 0),
    },
    "moments": dict(_ensemble_params(replicas=200),
                    m=Param(_int_list, "1,2,4,8", "trace powers, comma separated")),
    "paths": {
        "mmax": Param(_int, "20", "largest m in the table", 0),
        "which": Param(_str, "g", "g (even-time up-steps) or gprime (odd-time)"),
        "check": Param(_int, "15", "verify the functional equations up to this m (0 skips)", 0),
    },
    "validate": {
        "quick": Param(_bool, "false", "skip the Monte Carlo criteria"),
        "workers": Param(_int, "1", "worker processes", 1),
    },
    "report": {
        "input": Param(_str, None, "directory written by edge-exp", required=True),
    },
}


# ---------------------------------------------------------------------------
# configuration

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", None, message, EXIT_USAGE)


def build_parser():
    parser = _Parser(prog="wishart-edge", description="Edge statistics of sample covariance matrices.")
    parser.add_argument("--version", action="version", version=f"wishart-edge {__version__}")
    parser.add_argument("--config", help="INI file with one [section] per subcommand")
    parser.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV}/<subcommand> "
                                         "or ./wishart-edge-out/<subcommand>)")
    parser.add_argument("--workers", dest="global_workers",
                        help="worker processes for Monte Carlo subcommands")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, params in SCHEMA.items():
        sp = sub.add_parser(name, help=f"{name} subcommand")
        for key, prm in params.items():
            kwargs = dict(dest=key, default=argparse.SUPPRESS, metavar=key.upper())
            text = prm.help + (" (required)" if prm.required else f" (default: {prm.default!r})")
            sp.add_argument("--" + key.replace("_", "-"), help=text, **kwargs)
    return parser


def _key_line(path, section, key):
    current = None
    with open(path, encoding="utf-8") as fh:
        for num, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip()
            elif current == section and "=" in line and line.split("=", 1)[0].strip().lower() == key:
                return num
    return None


def read_config_file(path, section):
    """Raw ``key -> (text, context)`` for one section of an INI file."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, UnicodeDecodeError) as exc:
        raise config_error(None, f"cannot read {path}: {exc}")
    except configparser.Error as exc:
        raise config_error(None, f"{path}: {' '.join(str(exc).split())}")
    for name in parser.sections():
        if name not in SCHEMA:
            raise config_error(None, f"{path}: unknown section [{name}]")
    if not parser.has_section(section):
        return {}
    out = {}
    for key, value in parser.items(section):
        ctx = f"{path}:{_key_line(path, section, key)} [{section}]"
        if key not in SCHEMA[section]:
            raise config_error(key, f"unknown key {key!r} in {ctx}")
        out[key] = (value, ctx)
    return out


def resolve(command, file_values, flag_values, global_workers=None):
    """Merge defaults < file < flags, convert and validate every key."""
    raw = {}
    for key, prm in SCHEMA[command].items():
        if prm.default is not None:
            raw[key] = (prm.default, "default")
    raw.update(file_values)
    if global_workers is not None and "workers" in SCHEMA[command]:
        raw["workers"] = (global_workers, "flag --workers")
    for key, value in flag_values.items():
        raw[key] = (value, f"flag --{key.replace('_', '-')}")
    out = {}
    for key, prm in SCHEMA[command].items():
        if key not in raw:
            raise config_error(key, f"missing required key {key!r} (set it in [{command}] "
                                    f"or pass --{key.replace('_', '-')})")
        text, ctx = raw[key]
        try:
            value = prm.convert(text)
        except ValueError as exc:
            raise config_error(key, f"{key} = {text!r} ({ctx}): {exc}")
        if prm.minimum is not None and value < prm.minimum:
            raise config_error(key, f"{key} = {text!r} ({ctx}): must be >= {prm.minimum:g}")
        out[key] = value
    return out, {k: v[0] for k, v in raw.items()}


def _glue_negative_values(argv):
    """['--grid', '-6:4:0.05'] -> ['--grid=-6:4:0.05'] so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and len(nxt) > 1 and nxt[0] == "-" \
                and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_config(argv):
    """argv -> (command, resolved values, resolved raw text, output dir)."""
    args = build_parser().parse_args(_glue_negative_values(list(argv)))
    command = args.command
    flags = {k: v for k, v in vars(args).items()
             if k in SCHEMA[command] and k not in ("command",)}
    file_values = read_config_file(args.config, command) if args.config else {}
    values, text = resolve(command, file_values, flags, args.global_workers)
    output = args.output or os.path.join(os.environ.get(OUTPUT_ENV, "wishart-edge-out"), command)
    return command, values, text, output


def write_resolved(output, command, text):
    os.makedirs(output, exist_ok=True)
    cp = configparser.ConfigParser(interpolation=None)
    cp[command] = {k: str(v) for k, v in text.items()}
    with open(os.path.join(output, "config.ini"), "w", encoding="utf-8", newline="\n") as fh:
        cp.write(fh)
    with open(os.path.join(output, "VERSION"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"wishart-edge {__version__}\n")


# ---------------------------------------------------------------------------
# subcommands

def _ensemble(values):
    cfg = {k: values[k] for k in ("family", "values", "weights", "convention", "field")}
    cfg["n"], cfg["p"] = str(values["n"]), str(values["p"])
    try:
        return EnsembleSpec.from_config(cfg)
    except (ValueError, KeyError) as exc:
        msg = str(exc)
        key = msg.split(":", 1)[0] if msg.split(":", 1)[0] in cfg else "family"
        raise config_error(key, msg)


def cmd_tw_table(values, out, log):
    try:
        table = tw_table(values["grid"], x0=values["x0"])
    except ValueError as exc:
        raise config_error("grid", str(exc))
    rows = [tuple(float(v) for v in r) for r in table.to_rows()]
    write_csv(os.path.join(out, "tw_table.csv"), ["s", "q", "F1", "F2", "f1", "f2"], rows)
    log(f"wrote {len(rows)} rows to {os.path.join(out, 'tw_table.csv')}")
    return EXIT_OK


def cmd_sample(values, out, log):
    spec = _ensemble(values)
    spectrum = gram_eigenvalues(sample_matrix(spec, values["seed"]))
    c = scaling_constants(spec.n, spec.p)
    top = min(values["top"], spec.p)
    var = 2.0 if (spec.entry.is_complex and spec.entry.convention == "wishart") else 1.0
    lam = spectrum.eigenvalues[:top] / var
    rows = [(i + 1, float(v), float(rescale(v, c))) for i, v in enumerate(lam)]
    write_csv(os.path.join(out, "eigenvalues.csv"), ["index", "lambda", "rescaled"], rows)
    log(f"lambda_1 = {float(lam[0])!r} (rescaled {rows[0][2]:.4f})")
    return EXIT_OK


def _experiment(values, k_top=1):
    spec = _ensemble(values)
    try:
        return ExperimentConfig(spec, replicas=values["replicas"], k_top=k_top,
                                master_seed=values["seed"], workers=values["workers"],
                                johnstone_centering=values.get("johnstone", False))
    except ValueError as exc:
        raise config_error("k_top" if "k_top" in str(exc) else None, str(exc))


def cmd_edge_exp(values, out, log):
    cfg = _experiment(values, values["k_top"])
    records = run_edge_experiment(cfg)
    write_records(records, os.path.join(out, "records.csv"))
    ks = ks_statistic(rescaled_column(records), tw_cdf_for(cfg.beta)) if len(records) > 1 else math.nan
    tol = values["tolerance"]
    passed = (not tol) or ks < tol
    write_summary(os.path.join(out, "summary.txt"), {
        "config_hash": cfg.config_hash(), "master_seed": cfg.master_seed, "replicas": cfg.replicas,
        "seed_first": records[0].seed, "seed_last": records[-1].seed, "beta": cfg.beta,
        "regime": regime_label(cfg.spec.n, cfg.spec.p), "ks_tracy_widom": ks,
        "tolerance": tol, "passed": str(passed).lower()})
    log(f"KS(rescaled lambda_1, F{cfg.beta}) = {ks:.4f} over {len(records)} replicas")
    if not passed:
        raise CliError("tolerance", "tolerance", f"KS {ks:.4f} >= tolerance {tol}", EXIT_TOLERANCE)
    return EXIT_OK


def cmd_kernel(values, out, log):
    grid, mode = values["grid"], values["mode"]
    nodes = values["nodes"]
    if mode == "gap":
        table = default_table()
        rows = []
        for s in grid:
            fd = fredholm_gap(float(s), m_nodes=nodes)
            pv = float(table.cdf(float(s), 2))
            rows.append((float(s), fd, pv, fd - pv))
        header = ["s", "fredholm", "painleve", "difference"]
    elif mode == "counts":
        k = values["k_max"]
        rows = [(float(s),) + tuple(float(v) for v in count_distribution(float(s), k, m_nodes=nodes))
                for s in grid]
        header = ["s"] + [f"P{j}" for j in range(k + 1)]
    elif mode == "laguerre":
        p, alpha = values["p"], values["alpha"]
        rows = []
        for s1 in grid:
            for s2 in grid:
                kc = rescaled_kernel_convergence(p, alpha, float(s1), float(s2))
                rows.append((float(s1), float(s2), kc.finite_p_value, kc.airy_value, kc.difference))
        header = ["s1", "s2", "laguerre", "airy", "difference"]
    elif mode == "real":
        rows = [(float(s), float(real_edge_density(float(s)))) for s in grid]
        header = ["s", "density"]
    else:
        raise config_error("mode", f"mode = {mode!r}: expected gap, counts, laguerre or real")
    write_csv(os.path.join(out, f"kernel_{mode}.csv"), header, rows)
    log(f"wrote {len(rows)} rows to {os.path.join(out, f'kernel_{mode}.csv')}")
    return EXIT_OK


def cmd_moments(values, out, log):
    cfg = _experiment(values)
    rows = trace_moment_experiment(cfg, values["m"])
    write_csv(os.path.join(out, "moments.csv"),
              ["m", "mc_mean", "std_error", "prediction", "ratio", "regime"],
              [(r.m, r.mc_mean, r.std_error, r.prediction, r.ratio, r.regime) for r in rows])
    for r in rows:
        log(f"m={r.m}: ratio {r.ratio:.4f} ({r.regime})")
    return EXIT_OK


def cmd_paths(values, out, log):
    mmax = values["mmax"]
    which = values["which"]
    if which not in ("g", "gprime"):
        raise config_error("which", f"which = {which!r}: expected g or gprime")
    polys = (dyck_polynomials if which == "g" else gprime_polynomials)(mmax)
    header = ["m"] + [f"c{j}" for j in range(mmax + 1)]
    rows = [[m] + [polys[m].coeffs[j] if j < len(polys[m].coeffs) else 0 for j in range(mmax + 1)]
            for m in range(mmax + 1)]
    write_csv(os.path.join(out, f"{which}_coefficients.csv"), header, rows)
    if values["check"] >= 2:
        report = verify_functional_equation(values["check"])
        with open(os.path.join(out, "functional_equation.txt"), "w", newline="\n") as fh:
            fh.write(str(report) + "\n")
        log(str(report))
        if not report.passed:
            raise CliError("tolerance", "check", str(report), EXIT_TOLERANCE)
    log(f"wrote m = 0..{mmax} to {os.path.join(out, f'{which}_coefficients.csv')}")
    return EXIT_OK


def cmd_validate(values, out, log):
    results = run_all(out, workers=values["workers"], quick=values["quick"], log=log)
    # timings vary between runs, so they go to the text log and not the CSV
    write_csv(os.path.join(out, "acceptance.csv"), ["criterion", "name", "passed", "detail"],
              [(r.number, r.name.replace(",", ";"), str(r.passed).lower(), r.detail.replace(",", ";"))
               for r in results])
    with open(os.path.join(out, "acceptance.txt"), "w", newline="\n") as fh:
        fh.writelines(r.line() + "\n" for r in results)
    failed = [r.number for r in results if not r.passed]
    if failed:
        raise CliError("tolerance", "criterion",
                       f"criteria {','.join(map(str, failed))} failed", EXIT_TOLERANCE)
    return EXIT_OK


def cmd_report(values, out, log):
    src = values["input"]
    summary_path = os.path.join(src, "summary.txt")
    if not os.path.exists(summary_path):
        raise CliError("io", "input", f"no summary.txt in {src}", EXIT_USAGE)
    summary = read_summary(summary_path)
    for k, v in summary.items():
        log(f"{k} = {v}")
    records_path = os.path.join(src, "records.csv")
    if os.path.exists(records_path) and "ks_tracy_widom" in summary:
        records = read_records(records_path)
        ks = ks_statistic(rescaled_column(records), tw_cdf_for(int(summary.get("beta", 2))))
        stored = float(summary["ks_tracy_widom"])
        log(f"recomputed ks_tracy_widom = {ks!r}")
        if abs(ks - stored) > 1e-12:
            raise CliError("numerical", "ks_tracy_widom",
                           f"records give {ks!r}, summary says {stored!r}", EXIT_NUMERICAL)
    if summary.get("passed") == "false":
        raise CliError("tolerance", "passed", f"{summary_path} records a failed tolerance", EXIT_TOLERANCE)
    return EXIT_OK


COMMANDS = {
    "tw-table": cmd_tw_table, "sample": cmd_sample, "edge-exp": cmd_edge_exp,
    "kernel": cmd_kernel, "moments": cmd_moments, "paths": cmd_paths,
    "validate": cmd_validate, "report": cmd_report,
}

NUMERICAL = (PainleveBlowUp, FredholmConvergenceError, ReplicaError, ArithmeticError) + ConvergenceError


def run(command, values, text, output, log=print):
    write_resolved(output, command, text)
    return COMMANDS[command](values, output, log)


def main(argv=None):
    try:
        command, values, text, output = parse_config(sys.argv[1:] if argv is None else argv)
        return run(command, values, text, output)
    except CliError as exc:
        print(exc.line(), file=sys.stderr)
        return exc.code
    except NUMERICAL as exc:
        print(f"error kind=numerical key=- message={exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error kind=config key=- message={exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error kind=io key=- message={exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
