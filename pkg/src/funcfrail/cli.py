"""Command-line front end.

Exit codes: 0 ok, 1 input error, 2 numerical failure, 3 non-convergence
(outputs are still written, with ``converged`` recorded as false).
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import cox, io as fio
from .inference import bootstrap_beta, concordance
from .pipeline import PipelineSettings, fit_pipeline
from .simulation import TABLE1_GRID, SimConfig, frailty_augment, run_study

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NONCONV = 0, 1, 2, 3
DESK_GRID = dict(n=(100, 250), tau=(0.01, 0.2), phi=(0.01, 2))


def _settings(cfg: fio.RunConfig) -> PipelineSettings:
    return PipelineSettings(n_basis=cfg.n_basis, order=cfg.order, ridge=cfg.ridge,
                            fpca_threshold=cfg.fpca_threshold)


def _fit_config(cfg: fio.RunConfig) -> cox.FrailtyConfig:
    return cox.FrailtyConfig(alpha_init=cfg.alpha_init, tol_inner=cfg.tol_inner, tol_outer=cfg.tol_outer,
                             max_inner=cfg.max_inner, max_outer=cfg.max_outer, frailty_enabled=cfg.frailty,
                             fixed_alpha=cfg.fixed_alpha or None)


def _sim_base(cfg: fio.RunConfig, with_reduction: bool) -> SimConfig:
    return SimConfig(n=cfg.n, tau=cfg.tau, phi=cfg.phi, replications=cfg.replications, seed=cfg.seed,
                     fpca_threshold=cfg.fpca_threshold, n_basis=cfg.n_basis, fit_no_frailty=with_reduction)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def fit_report(res, data) -> dict:
    """JSON document describing a pipeline fit."""
    doc = res.fit.to_dict()
    fp = res.fpca
    c_in = concordance(data.time, data.status, res.in_sample_eta(include_frailty=True))
    doc["meta"] = {
        "n": int(data.n),
        "events": int(data.status.sum()),
        "covariates": list(data.covariate_names),
        "K": int(fp.K),
        "n_basis": res.settings.n_basis,
        "fpca_threshold": res.settings.fpca_threshold,
        "ridge": res.settings.ridge,
        "concordance_in_sample": float(c_in),
    }
    return json.loads(json.dumps(doc, default=_json_default))


def eigen_csv(fp) -> str:
    """Rows ``k,lambda,phi_s1..phi_sJ`` for every computed component."""
    J = fp.grid.J
    rows = [[k + 1, fp.eigenvalues[k], *fp.eigenfunctions[k]] for k in range(fp.eigenvalues.size)]
    return fio.csv_text(["k", "lambda", *(f"phi_s{j + 1}" for j in range(J))], rows)


def beta_csv(beta) -> str:
    return fio.csv_text(["s", "beta"], list(zip(beta.grid.points, beta.values)))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fit(args, cfg: fio.RunConfig) -> int:
    data = fio.ingest(args.subjects, args.curves)
    res = fit_pipeline(data, _settings(cfg), _fit_config(cfg))
    fio.write_outputs(args.out, {
        "fit.json": fio.dump_json(fit_report(res, data)),
        "beta_hat.csv": beta_csv(res.beta_hat),
        "eigen.csv": eigen_csv(res.fpca),
        "config.txt": cfg.as_text(),
    })
    return EXIT_OK if res.fit.converged else EXIT_NONCONV


def _study_exit(study) -> int:
    return EXIT_OK if all(r.converged for r in study.replications) else EXIT_NONCONV


def _write_study(args, cfg, study) -> None:
    fio.write_outputs(args.out, {"table1.csv": study.table_csv(),
                                 "replications.csv": study.replications_csv(),
                                 "config.txt": cfg.as_text()})


def cmd_simulate(args, cfg: fio.RunConfig) -> int:
    base = _sim_base(cfg, args.no_frailty)
    study = run_study([(cfg.n, cfg.tau, cfg.phi)], cfg.replications, cfg.seed, cfg.jobs, base)
    _write_study(args, cfg, study)
    return _study_exit(study)


def cmd_reproduce_table1(args, cfg: fio.RunConfig) -> int:
    grid = TABLE1_GRID if args.full_grid else DESK_GRID
    cells = list(itertools.product(grid["n"], grid["tau"], grid["phi"]))
    study = run_study(cells, cfg.replications, cfg.seed, cfg.jobs, _sim_base(cfg, args.no_frailty))
    _write_study(args, cfg, study)
    return _study_exit(study)


def cmd_bootstrap(args, cfg: fio.RunConfig) -> int:
    data = fio.ingest(args.subjects, args.curves)
    settings, fcfg = _settings(cfg), _fit_config(cfg)
    full = fit_pipeline(data, settings, fcfg)
    boot = bootstrap_beta(data, fcfg, B=cfg.bootstrap_reps, seed=cfg.seed, jobs=cfg.jobs, settings=settings)
    s = data.grid.points
    long_rows = [[b, s[j], curve[j]] for b, curve in zip(boot.replicate_ids, boot.curves) for j in range(s.size)]
    lo, mid, hi = boot.percentiles()
    summary = [[s[j], full.beta_hat.values[j], boot.mean[j], lo[j], mid[j], hi[j]] for j in range(s.size)]
    fio.write_outputs(args.out, {
        "bootstrap.csv": fio.csv_text(["replicate", "s", "beta_hat"], long_rows),
        "summary.csv": fio.csv_text(["s", "beta_full", "mean", "q2.5", "q50", "q97.5"], summary),
        "config.txt": cfg.as_text() + f"skipped_replicates={len(boot.skipped)}\n",
    })
    return EXIT_OK


def cmd_augment(args, cfg: fio.RunConfig) -> int:
    with open(args.subjects, newline="") as fh:
        reader = csv.DictReader(fh)
        header = list(reader.fieldnames or [])
        rows = list(reader)
    try:
        out = frailty_augment(rows)
    except KeyError as exc:
        raise fio.InputError(f"{args.subjects}: {exc.args[0]}") from None
    except ValueError as exc:
        raise fio.InputError(f"{args.subjects}: {exc}") from None
    cols = header + ["frailty_score"]
    table = [[r[c] for c in cols] for r in out]
    fio.write_outputs(args.out, {"subjects_augmented.csv": fio.csv_text(cols, table),
                                 "config.txt": cfg.as_text()})
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "reproduce-table1": cmd_reproduce_table1,
    "bootstrap": cmd_bootstrap,
    "augment": cmd_augment,
}
NEEDS_DATA = {"fit": ("subjects", "curves"), "bootstrap": ("subjects", "curves"), "augment": ("subjects",)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="funcfrail", description="Functional Cox regression with frailty.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--subjects", help="subjects CSV (id,time,status[,group],covariates...)")
    p.add_argument("--curves", help="curves CSV (grid header row, then id,x_1..x_J)")
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--no-frailty", action="store_true",
                   help="fit: drop the frailty term; simulate: also report the no-frailty model")
    p.add_argument("--fpca-threshold", type=float)
    p.add_argument("--n-basis", type=int)
    p.add_argument("--ridge", type=float)
    p.add_argument("--replications", type=int, help="Monte Carlo or bootstrap replications")
    p.add_argument("--full-grid", action="store_true", help="reproduce-table1: the full 4x3x4 grid")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        for name in NEEDS_DATA.get(args.command, ()):
            if getattr(args, name) is None:
                raise fio.InputError(f"{args.command} requires --{name}")
        overrides = {"seed": args.seed, "jobs": args.jobs, "fpca_threshold": args.fpca_threshold,
                     "n_basis": args.n_basis, "ridge": args.ridge}
        if args.command == "fit" and args.no_frailty:
            overrides["frailty"] = False
        cfg = fio.load_config(args.config, overrides)
        if args.replications is not None:
            key = "bootstrap_reps" if args.command == "bootstrap" else "replications"
            cfg = replace(cfg, **{key: args.replications}).validate()
        return COMMANDS[args.command](args, cfg)
    except (fio.InputError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
