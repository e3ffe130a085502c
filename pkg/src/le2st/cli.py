"""Command-line entry point: ``le2st {run,sweep,theory,lpcheck,synth}``.

Exit codes: 0 success, 1 numeric/internal failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from .errors import Le2stError
from .harness import (
    ExperimentConfig,
    SyntheticSpec,
    dimension_sweep,
    estimate_error_rates,
    generate_synthetic,
    resolve_budget,
    summarize_divergence,
    write_summary_csv,
    write_trials_csv,
    _fmt,
)
from .posterior import TrainConfig
from .query import SCHEMES, LpInstance, lp_brute_force, lp_closed_form
from .theory import (
    TheoryParams,
    expected_fr_variant_bimodal,
    expected_fr_variant_passive_lower_bound,
    expected_mn,
)

# key -> (type, default); None default means required where the command needs it
CONFIG_KEYS = {
    "kind": (str, None),
    "n_total": (int, None),
    "d": (int, 2),
    "delta1": (float, 1.0),
    "delta2": (float, 0.6),
    "sigma": (float, 0.6),
    "Q": (int, 30),
    "Q_max": (float, None),
    "alpha": (float, 0.05),
    "scheme": (str, None),
    "trials": (int, 200),
    "master_seed": (int, 0),
    "learning_rate": (float, 0.1),
    "iterations": (int, 500),
    "l2_penalty": (float, 1e-3),
    "cv_folds": (int, 3),
}


class ConfigError(Exception):
    pass


def _coerce(key, value):
    typ = CONFIG_KEYS[key][0]
    try:
        if typ is int:
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if typ is float:
            if isinstance(value, bool):
                raise ValueError
            # Q_max: an integer is a count, a float in (0, 1] a fraction
            if key == "Q_max" and (
                isinstance(value, int) or (isinstance(value, str) and value.strip().isdigit())
            ):
                return int(value)
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key '{key}': cannot read {value!r} as {typ.__name__}") from None


def load_config(path, overrides: dict) -> dict:
    """Merge a YAML/JSON config file with command-line overrides."""
    cfg = {}
    if path:
        try:
            raw = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        raw = raw or {}
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a mapping of keys to values")
        for key, val in raw.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key '{key}'")
            cfg[key] = _coerce(key, val)
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = _coerce(key, val)
    return cfg


def _require(cfg: dict, keys) -> None:
    for key in keys:
        if key not in cfg:
            raise ConfigError(f"missing required config key '{key}'")


def _get(cfg, key):
    return cfg.get(key, CONFIG_KEYS[key][1])


def _schemes(cfg, default) -> list[str]:
    raw = cfg.get("scheme", default)
    names = list(SCHEMES) if raw == "all" else [s.strip() for s in raw.split(",") if s.strip()]
    for s in names:
        if s not in SCHEMES:
            raise ConfigError(f"config key 'scheme': unknown scheme {s!r}")
    if not names:
        raise ConfigError("config key 'scheme': no scheme given")
    return names


def _spec(cfg: dict) -> SyntheticSpec:
    try:
        return SyntheticSpec(
            kind=cfg["kind"],
            n_total=cfg["n_total"],
            d=_get(cfg, "d"),
            delta1=_get(cfg, "delta1"),
            delta2=_get(cfg, "delta2"),
            sigma=_get(cfg, "sigma"),
            seed=_get(cfg, "master_seed"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build(cfg: dict, q_max=None):
    spec = _spec(cfg)
    try:
        train = TrainConfig(
            learning_rate=_get(cfg, "learning_rate"),
            iterations=_get(cfg, "iterations"),
            l2_penalty=_get(cfg, "l2_penalty"),
            cv_folds=_get(cfg, "cv_folds"),
        )
        if q_max is None:
            q_max = resolve_budget(cfg["Q_max"], spec.n_total)
        exp = ExperimentConfig(
            Q_max=q_max,
            Q=_get(cfg, "Q"),
            alpha=_get(cfg, "alpha"),
            trials=_get(cfg, "trials"),
            train=train,
            master_seed=_get(cfg, "master_seed"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if exp.Q_max > spec.n_total:
        raise ConfigError(f"config key 'Q_max': {exp.Q_max} exceeds n_total={spec.n_total}")
    return spec, exp


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LE2ST_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LE2ST_THREADS={env!r} is not an integer") from None
    return 1


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--{name}: cannot parse {text!r}") from None


def cmd_run(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    _require(cfg, ("kind", "n_total", "Q_max"))
    spec, exp = _build(cfg)
    threads = _threads(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for scheme in _schemes(cfg, "bimodal"):
        summaries.append(estimate_error_rates(spec, replace(exp, scheme=scheme), threads))
    write_trials_csv(out / "trials.csv", [r for s in summaries for r in s.records])
    write_summary_csv(out / "summary.csv", summaries)
    for s in summaries:
        print(f"{s.scheme}: rejection rate {s.rejection_rate:.4f} "
              f"[{s.ci_low:.4f}, {s.ci_high:.4f}] over {s.trials} trials")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    if args.budgets is None and args.dims is None:
        raise ConfigError("sweep needs --budgets or --dims")
    threads = _threads(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schemes = _schemes(cfg, "all")

    if args.dims is not None:
        dims = [int(x) for x in _float_list(args.dims, "dims")]
        if not dims:
            raise ConfigError("--dims: empty list")
        cfg.setdefault("kind", "location_alt")
        _require(cfg, ("n_total",))
        spec, exp = _build(cfg, q_max=max(_get(cfg, "Q"), 1))
        rows = dimension_sweep(exp, dims, args.budget, spec=spec, schemes=schemes, threads=threads)
        summaries = [r["summary"] for r in rows]
        write_trials_csv(out / "trials.csv", [t for s in summaries for t in s.records])
        write_summary_csv(out / "summary.csv", summaries, extra=[{"d": r["d"]} for r in rows])
        for r in rows:
            print(f"d={r['d']} {r['scheme']}: type II error {r['type2']:.4f}")
        return 0

    budgets = _float_list(args.budgets, "budgets")
    if not budgets:
        raise ConfigError("--budgets: empty list")
    _require(cfg, ("kind", "n_total"))
    summaries, divs = [], []
    for scheme in schemes:
        for b in budgets:
            q_max = resolve_budget(b, cfg["n_total"])
            spec, exp = _build(cfg, q_max=q_max)
            s = estimate_error_rates(spec, replace(exp, scheme=scheme), threads)
            summaries.append(s)
            divs.append(summarize_divergence(s.records, scheme, s.budget_fraction))
    write_trials_csv(out / "trials.csv", [t for s in summaries for t in s.records])
    write_summary_csv(out / "summary.csv", summaries)
    with open(out / "divergence.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "budget_fraction", "divergence_mean", "divergence_std", "trials"])
        for dp in divs:
            w.writerow([dp.scheme, _fmt(dp.budget_fraction), _fmt(dp.mean), _fmt(dp.std), len(dp.values)])
    for s, dp in zip(summaries, divs):
        print(f"{s.scheme} @ {s.budget_fraction:.2f}: rejection {s.rejection_rate:.4f}, divergence {dp.mean:.4f}")
    return 0


def _nq_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--nq: cannot parse {text!r}") from None


def cmd_theory(args) -> int:
    nqs = _nq_range(args.nq)
    if not nqs or min(nqs) < 2:
        raise ConfigError("--nq: need values >= 2")
    if not 0.0 <= args.u <= 1.0:
        raise ConfigError("--u must lie in [0, 1]")
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N_q", "E_qb", "E_qb_ratio", "E_qp_lb", "E_qp_lb_ratio", "E_mn"])
        for nq in nqs:
            eb = expected_fr_variant_bimodal(nq)
            ep = expected_fr_variant_passive_lower_bound(TheoryParams(N_q=nq, risk=args.risk, d=args.d))
            w.writerow([nq, _fmt(eb), _fmt(eb / (nq - 1)), _fmt(ep), _fmt(ep / (nq - 1)),
                        _fmt(expected_mn(nq, args.u))])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_lpcheck(args) -> int:
    if args.H < 2:
        raise ConfigError("--H must be at least 2")
    us = _float_list(args.u, "u")
    if not us:
        raise ConfigError("--u: empty list")
    rng = np.random.default_rng(args.seed)
    failed_total = 0
    for u in us:
        passed = failed = skipped = 0
        for _ in range(args.instances):
            H = int(rng.integers(2, args.H + 1))
            inst = LpInstance(tuple(rng.uniform(0.0, 1.0, H)), u)
            if not inst.feasible:
                skipped += 1
                continue
            cf = lp_closed_form(inst)
            bf = lp_brute_force(inst)
            p = np.asarray(inst.posteriors)
            w = cf.weights(H)
            ok = (
                abs(cf.objective - bf.objective) <= args.tol
                and abs(w.sum() - 1.0) <= args.tol
                and abs(float(p @ w) - u) <= args.tol
                and w.min() >= -args.tol
            )
            passed += ok
            failed += not ok
        failed_total += failed
        print(f"u={u:g}: passed={passed} failed={failed} skipped={skipped}")
    print("PASS" if failed_total == 0 else "FAIL")
    return 0 if failed_total == 0 else 1


def cmd_synth(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    _require(cfg, ("kind", "n_total"))
    ps, oracle = generate_synthetic(_spec(cfg))
    labels = oracle.reveal() if args.reveal_labels else None
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + [f"x{k}" for k in range(ps.d)] + (["label"] if labels else []))
        for i, row in zip(ps.ids, ps.points):
            w.writerow([int(i)] + [_fmt(v) for v in row] + ([labels[int(i)]] if labels else []))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML or JSON file with run keys")
    for key in CONFIG_KEYS:
        p.add_argument(f"--{key}", dest=f"cfg_{key}", default=None, metavar=key.upper())
    p.add_argument("--threads", type=int, default=None, help="worker cap (env LE2ST_THREADS)")


def _overrides(args) -> dict:
    return {k: getattr(args, f"cfg_{k}") for k in CONFIG_KEYS}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="le2st", description="Label-efficient two-sample testing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Monte Carlo error rates for one configuration")
    _add_config_flags(p)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep query budgets or dimensions")
    _add_config_flags(p)
    p.add_argument("--budgets", help="comma-separated budget fractions")
    p.add_argument("--dims", help="comma-separated dimensions (location alternative)")
    p.add_argument("--budget", type=float, default=0.2, help="budget fraction for --dims")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("theory", help="closed-form expectations table")
    p.add_argument("--nq", default="2:20", help="range lo:hi or comma list")
    p.add_argument("--u", type=float, default=0.5)
    p.add_argument("--risk", type=float, default=0.1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("lpcheck", help="closed-form LP solution vs vertex enumeration")
    p.add_argument("--H", type=int, default=8, help="largest instance size")
    p.add_argument("--u", default="0.2,0.4,0.6")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_lpcheck)

    p = sub.add_parser("synth", help="dump a synthetic dataset as CSV")
    _add_config_flags(p)
    p.add_argument("--out")
    p.add_argument("--reveal-labels", action="store_true", help="include hidden labels (debugging)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"le2st: error: {exc}", file=sys.stderr)
        return 2
    except (Le2stError, ArithmeticError) as exc:
        print(f"le2st: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
