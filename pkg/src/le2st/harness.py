"""Synthetic data, the three-stage driver, and Monte Carlo error estimates.

Each trial owns a counter-based (Philox) generator keyed by
``(master_seed, trial index)``, so results do not depend on how trials are
scheduled across threads.  Within a trial, the dataset stream is separate
from the querying stream: different schemes see the same data for the same
trial index.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateTrainingError, DegenerateVarianceError, InvalidInputError, PoolExhaustedError
from .frtest import FrInputs, TestOutcome, estimate_Ad, f_divergence_estimate, fr_statistic, p_value
from .geometry import PointSet, cut_edge_count, euclidean_mst, shared_node_pairs
from .posterior import PosteriorModel, TrainConfig, train_logistic
from .query import (
    SCHEMES,
    QueryState,
    bimodal_select,
    certainty_select,
    passive_select,
    uncertainty_select,
)

__all__ = [
    "KINDS",
    "SyntheticSpec",
    "ExperimentConfig",
    "LabelOracle",
    "TrialRecord",
    "ErrorRateSummary",
    "DivergencePoint",
    "trial_rng",
    "trial_seed",
    "generate_synthetic",
    "stage_one",
    "run_three_stage",
    "run_trial",
    "estimate_error_rates",
    "divergence_curve",
    "summarize_divergence",
    "dimension_sweep",
    "classifier_null_error",
    "wilson_interval",
    "two_proportion_test",
    "resolve_budget",
    "write_trials_csv",
    "write_summary_csv",
    "TRIAL_COLUMNS",
    "SUMMARY_COLUMNS",
]

KINDS = ("location_alt", "scale_alt", "null")
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SyntheticSpec:
    """Two Gaussian groups in ``d`` dimensions.

    * ``location_alt``: ``N(+delta1 e1, I)`` vs ``N(-delta1 e1, I)``
    * ``scale_alt``: ``N(+delta2 e1, I)`` vs ``N(-delta2 e1, (1 + sigma) I)``
    * ``null``: both ``N(0, I)``
    """

    kind: str
    n_total: int
    d: int = 2
    delta1: float = 1.0
    delta2: float = 0.6
    sigma: float = 0.6
    class_balance: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n_total < 4:
            raise InvalidInputError("n_total must be at least 4")
        if self.d < 1:
            raise InvalidInputError("d must be at least 1")
        if not 0.0 < self.class_balance < 1.0:
            raise InvalidInputError("class_balance must lie in (0, 1)")
        if self.sigma <= -1.0:
            raise InvalidInputError("sigma must exceed -1")


@dataclass(frozen=True)
class ExperimentConfig:
    Q_max: int
    Q: int = 30
    alpha: float = 0.05
    scheme: str = "bimodal"
    trials: int = 200
    train: TrainConfig = TrainConfig()
    master_seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 1 <= self.Q <= self.Q_max:
            raise InvalidInputError(f"need 1 <= Q <= Q_max, got Q={self.Q}, Q_max={self.Q_max}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError("alpha must lie in (0, 1)")
        if self.trials < 1:
            raise InvalidInputError("trials must be at least 1")


def resolve_budget(value, n_total: int) -> int:
    """A float in ``(0, 1]`` is a fraction of ``n_total``; an int is a count."""
    if isinstance(value, (float, np.floating)) and 0.0 < value <= 1.0:
        return int(round(value * n_total))
    if float(value) != int(value):
        raise InvalidInputError(f"budget {value!r} is neither a fraction in (0, 1] nor a count")
    return int(value)


class LabelOracle:
    """Hidden labels behind a metered ``query``."""

    def __init__(self, labels: dict):
        self._labels = {int(k): int(v) for k, v in labels.items()}
        self._calls = 0

    @property
    def calls(self) -> int:
        return self._calls

    def query(self, id_: int) -> int:
        try:
            z = self._labels[int(id_)]
        except KeyError:
            raise InvalidInputError(f"no point with id {id_}") from None
        self._calls += 1
        return z

    def reveal(self) -> dict:
        """All labels without charging; for debugging dumps and diagnostics only."""
        return dict(self._labels)


def trial_seed(master_seed: int, index: int) -> int:
    """64-bit seed for trial ``index``; a pure function of its arguments."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def trial_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def generate_synthetic(spec: SyntheticSpec, seed: Optional[int] = None) -> tuple[PointSet, LabelOracle]:
    """Draw a dataset and hide its labels behind an oracle.

    Ids are assigned after a random shuffle, so an id carries no label
    information.  ``seed`` overrides ``spec.seed``.
    """
    rng = trial_rng(spec.seed if seed is None else seed, 0)
    m = int(round(spec.n_total * spec.class_balance))
    m = min(max(m, 1), spec.n_total - 1)
    n = spec.n_total - m
    x = rng.standard_normal((m, spec.d))
    y = rng.standard_normal((n, spec.d))
    if spec.kind == "location_alt":
        x[:, 0] += spec.delta1
        y[:, 0] -= spec.delta1
    elif spec.kind == "scale_alt":
        x[:, 0] += spec.delta2
        y *= math.sqrt(1.0 + spec.sigma)
        y[:, 0] -= spec.delta2
    pts = np.vstack([x, y])
    z = np.r_[np.zeros(m, dtype=np.int64), np.ones(n, dtype=np.int64)]
    perm = rng.permutation(spec.n_total)
    pts, z = pts[perm], z[perm]
    ids = np.arange(spec.n_total, dtype=np.int64)
    return PointSet(pts, ids), LabelOracle(dict(zip(ids.tolist(), z.tolist())))


def stage_one(ps: PointSet, oracle: LabelOracle, cfg: ExperimentConfig, rng: np.random.Generator):
    """Label ``cfg.Q`` uniform points and fit the posterior model.

    Returns ``(state, model, degenerate)``.  A single-class seed set yields
    the constant 0.5 model and ``degenerate = True``.
    """
    if cfg.Q > ps.n:
        raise InvalidInputError(f"Q={cfg.Q} exceeds the {ps.n} available points")
    state = QueryState(ps)
    seed_pos = np.sort(rng.choice(ps.n, size=cfg.Q, replace=False))
    for i in ps.ids[seed_pos]:
        state.record(int(i), oracle.query(int(i)))
    ids = [i for i, _ in state.queried]
    labels = [z for _, z in state.queried]
    try:
        train_cfg = replace(cfg.train, seed=int(rng.integers(2**31)))
        model = train_logistic(ps.points[ps.positions(ids)], labels, train_cfg)
        degenerate = False
    except DegenerateTrainingError:
        model = PosteriorModel.constant(ps.d)
        degenerate = True
    return state, model, degenerate


def _select(scheme: str, state: QueryState, model: PosteriorModel, rng) -> tuple[int, int]:
    if scheme == "bimodal":
        return bimodal_select(state, model)
    if scheme == "passive":
        return passive_select(state, rng)
    if scheme == "uncertainty":
        return uncertainty_select(state, model)
    return certainty_select(state, model)


def run_three_stage(
    ps: PointSet,
    oracle: LabelOracle,
    cfg: ExperimentConfig,
    rng: Optional[np.random.Generator] = None,
) -> TestOutcome:
    """Seed-label and train, query in pairs up to ``cfg.Q_max``, then run the FR test.

    When ``Q_max - Q`` is odd the final batch holds only the scheme's first
    pick.  Degenerate queried sets (one class, fewer than four points, zero
    null variance) are reported as non-rejections with ``degenerate=True``.
    """
    if rng is None:
        rng = trial_rng(cfg.master_seed, 1)
    if cfg.Q_max > ps.n:
        raise InvalidInputError(f"Q_max={cfg.Q_max} exceeds the {ps.n} available points")
    state, model, _ = stage_one(ps, oracle, cfg, rng)

    while state.budget_used < cfg.Q_max and state.pool:
        remaining = cfg.Q_max - state.budget_used
        if len(state.pool) == 1:
            picks = (next(iter(state.pool)),)
        else:
            try:
                picks = _select(cfg.scheme, state, model, rng)
            except PoolExhaustedError:
                break
        if remaining == 1:
            picks = picks[:1]
        for i in picks:
            state.record(i, oracle.query(i))

    return _fr_outcome(ps, state, cfg.alpha, oracle.calls)


def _fr_outcome(ps: PointSet, state: QueryState, alpha: float, calls: int) -> TestOutcome:
    ids = [i for i, _ in state.queried]
    labels = np.array([z for _, z in state.queried], dtype=np.int64)
    n1 = int(labels.sum())
    m0 = labels.shape[0] - n1
    common = dict(oracle_calls=calls, m_q=m0, n_q=n1, queried_ids=tuple(ids))
    if len(ids) < 2:
        return TestOutcome(math.nan, math.nan, False, None, degenerate=True, **common)
    mst = euclidean_mst(ps.subset(ids))
    A_d = estimate_Ad(mst)
    try:
        fr = FrInputs(cut_edge_count(mst, labels), m0, n1, shared_node_pairs(mst))
        W = fr_statistic(fr)
    except (InvalidInputError, DegenerateVarianceError):
        return TestOutcome(math.nan, math.nan, False, None, degenerate=True, A_d=A_d, **common)
    p = p_value(W)
    return TestOutcome(W, p, p < alpha, fr, A_d=A_d, **common)


TRIAL_COLUMNS = (
    "trial", "seed", "scheme", "budget_fraction", "N", "d", "Q", "Q_max", "R", "m_q", "n_q",
    "C_N", "W", "p", "reject", "degenerate_flag", "oracle_calls",
)
SUMMARY_COLUMNS = ("scheme", "budget_fraction", "rejection_rate", "ci_low", "ci_high", "trials")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    scheme: str
    budget_fraction: float
    N: int
    d: int
    Q: int
    Q_max: int
    R: Optional[int]
    m_q: int
    n_q: int
    C_N: Optional[int]
    W: float
    p: float
    reject: bool
    degenerate_flag: bool
    oracle_calls: int
    divergence: float = math.nan


@dataclass(frozen=True)
class ErrorRateSummary:
    """Rejection rate over trials with a Wilson 95% interval."""

    scheme: str
    budget_fraction: float
    rejection_rate: float
    ci_low: float
    ci_high: float
    trials: int
    records: tuple = field(default=(), repr=False)

    @property
    def rejections(self) -> int:
        return int(round(self.rejection_rate * self.trials))


def run_trial(spec: SyntheticSpec, cfg: ExperimentConfig, index: int) -> tuple[TrialRecord, TestOutcome]:
    """One independent replicate: fresh data, then the three-stage test."""
    seed = trial_seed(cfg.master_seed, index)
    ps, oracle = generate_synthetic(spec, seed=seed)
    out = run_three_stage(ps, oracle, cfg, rng=trial_rng(seed, 1))
    div = math.nan
    if out.fr is not None:
        try:
            div = f_divergence_estimate(out.fr, out.A_d)
        except DegenerateVarianceError:
            pass
    rec = TrialRecord(
        trial=index,
        seed=seed,
        scheme=cfg.scheme,
        budget_fraction=cfg.Q_max / spec.n_total,
        N=spec.n_total,
        d=spec.d,
        Q=cfg.Q,
        Q_max=cfg.Q_max,
        R=None if out.fr is None else out.fr.R,
        m_q=out.m_q,
        n_q=out.n_q,
        C_N=None if out.fr is None else out.fr.C_N,
        W=out.W,
        p=out.p,
        reject=out.reject,
        degenerate_flag=out.degenerate,
        oracle_calls=out.oracle_calls,
        divergence=div,
    )
    return rec, out


def _run_many(spec, cfg, threads: int) -> list[TrialRecord]:
    idx = range(cfg.trials)
    if threads <= 1:
        return [run_trial(spec, cfg, i)[0] for i in idx]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [r for r, _ in pool.map(lambda i: run_trial(spec, cfg, i), idx)]


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes in ``n`` trials."""
    if n < 1 or not 0 <= k <= n:
        raise InvalidInputError(f"bad counts k={k}, n={n}")
    phat = k / n
    den = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / den
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / den
    return max(0.0, center - half), min(1.0, center + half)


def two_proportion_test(k1: int, n1: int, k2: int, n2: int) -> float:
    """One-sided pooled z-test p-value for ``H1: p1 > p2``."""
    p1, p2 = k1 / n1, k2 / n2
    pool = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pool * (1 - pool) * (1 / n1 + 1 / n2))
    if se == 0.0:
        return 0.5 if p1 == p2 else (0.0 if p1 > p2 else 1.0)
    return 0.5 * math.erfc(((p1 - p2) / se) / math.sqrt(2.0))


def _summarize(records: Sequence[TrialRecord], scheme: str, budget: float) -> ErrorRateSummary:
    k = sum(r.reject for r in records)
    n = len(records)
    lo, hi = wilson_interval(k, n)
    return ErrorRateSummary(scheme, budget, k / n, lo, hi, n, tuple(records))


def estimate_error_rates(spec: SyntheticSpec, cfg: ExperimentConfig, threads: int = 1) -> ErrorRateSummary:
    """Rejection rate of ``cfg.trials`` independent replicates.

    Under ``null`` data this is the Type I error; otherwise it is the power
    (one minus the Type II error).
    """
    records = _run_many(spec, cfg, threads)
    return _summarize(records, cfg.scheme, cfg.Q_max / spec.n_total)


@dataclass(frozen=True)
class DivergencePoint:
    scheme: str
    budget_fraction: float
    mean: float
    std: float
    values: tuple = field(default=(), repr=False)


def divergence_curve(
    spec: SyntheticSpec,
    cfg: ExperimentConfig,
    budgets: Iterable[float],
    threads: int = 1,
) -> list[DivergencePoint]:
    """Mean plug-in divergence of the queried set at each budget.

    Trials with no defined divergence (degenerate queried set) are skipped.
    """
    budgets = list(budgets)
    if not budgets:
        raise InvalidInputError("empty budget list")
    out = []
    for b in budgets:
        c = replace(cfg, Q_max=resolve_budget(float(b), spec.n_total))
        out.append(summarize_divergence(_run_many(spec, c, threads), c.scheme, c.Q_max / spec.n_total))
    return out


def summarize_divergence(records: Sequence[TrialRecord], scheme: str, budget: float) -> DivergencePoint:
    vals = np.array([r.divergence for r in records])
    vals = vals[np.isfinite(vals)]
    mean = float(vals.mean()) if vals.size else math.nan
    std = float(vals.std(ddof=1)) if vals.size > 1 else math.nan
    return DivergencePoint(scheme, budget, mean, std, tuple(vals))


def dimension_sweep(
    cfg: ExperimentConfig,
    dims: Iterable[int],
    budget: float,
    spec: Optional[SyntheticSpec] = None,
    schemes: Sequence[str] = ("bimodal", "passive"),
    threads: int = 1,
) -> list[dict]:
    """Type II error per dimension and scheme on location-alternative data.

    ``spec`` supplies everything but ``d``; it defaults to a 500-point
    location alternative.
    """
    dims = list(dims)
    if not dims:
        raise InvalidInputError("empty dimension list")
    if spec is None:
        spec = SyntheticSpec("location_alt", 500)
    rows = []
    for d in dims:
        s = replace(spec, d=int(d))
        q_max = resolve_budget(float(budget), s.n_total)
        for scheme in schemes:
            summ = estimate_error_rates(s, replace(cfg, scheme=scheme, Q_max=q_max), threads)
            rows.append({"d": int(d), "scheme": scheme, "type2": 1.0 - summ.rejection_rate, "summary": summ})
    return rows


def classifier_null_error(spec: SyntheticSpec, cfg: ExperimentConfig, model: Optional[PosteriorModel] = None) -> float:
    """Mean hold-out error of the stage-one classifier on never-labeled points.

    Averaged over ``cfg.trials`` replicates.  Passing ``model`` skips training
    and scores that fixed model instead.  Hold-out labels go through the
    oracle like any other label read.
    """
    errs = []
    for i in range(cfg.trials):
        seed = trial_seed(cfg.master_seed, i)
        ps, oracle = generate_synthetic(spec, seed=seed)
        state, fitted, _ = stage_one(ps, oracle, cfg, trial_rng(seed, 1))
        m = fitted if model is None else model
        hold = state.pool_ids()
        z = np.array([oracle.query(int(i)) for i in hold])
        pred = (m.prob1(ps.points[ps.positions(hold)]) > 0.5).astype(np.int64)
        errs.append(float(np.mean(pred != z)))
    return float(np.mean(errs))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".9g")
    return str(v)


def write_trials_csv(path, records: Iterable[TrialRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in TRIAL_COLUMNS])


def write_summary_csv(path, summaries: Iterable[ErrorRateSummary], extra: Optional[Sequence[dict]] = None) -> None:
    """Summary rows; ``extra`` adds leading columns (e.g. ``d``) row by row."""
    summaries = list(summaries)
    lead = list(extra[0].keys()) if extra else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(lead + list(SUMMARY_COLUMNS))
        for k, s in enumerate(summaries):
            pre = [_fmt(extra[k][c]) for c in lead] if extra else []
            w.writerow(pre + [_fmt(getattr(s, c)) for c in SUMMARY_COLUMNS])
