"""Greedy upload-sequence search: shared prefix, hard-pair continuation, regimes.

The search is beam-width-one and progressive. A shallow prefix is chosen by
aggregating the per-task metric over every class pair; pairs that stay below
the accuracy target (or whose class means are nearly collinear) then receive
pair-specific continuation rounds. In the budget regime candidates are ranked
by finite-shot noisy accuracy with a budget score as tie-breaker; in the ideal
regime by exact accuracy. A sequence adopted over the incumbent must strictly
improve the regime metric, so easy pairs keep the bare prefix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import budget as budget_mod
from .budget import BudgetEvaluation, pair_rank, stream_key
from .data import Dataset, angle_matrix, fit_encoder, make_pair_tasks, split
from .discrimination import (
    class_mean_cosine,
    disc_scores,
    fisher_score,
    penalize,
    select_top_m,
)
from .errors import PauliPairError
from .pauli import enumerate_family, feature_matrix, greedy_group
from .probe import fit_probe, task_accuracy
from .sim import GATE_LIBRARY, encode_batch

REGIMES = ("ideal", "budget")


@dataclass(frozen=True)
class SearchConfig:
    n: int = 4
    k: int = 2
    m: int = 12
    full_family: bool = False
    R: int = 3
    R0: int = 1
    tau_acc: float = 0.95
    tau_cos: float = 0.99
    regime: str = "ideal"
    alpha: float = math.pi / 2
    test_fraction: float = 0.3
    seed: int = 0
    lambda_cost: float = 0.1
    lambda_fisher: float = 1e-3
    probe_iterations: int = 100
    rho: float | None = None
    B: int = 2048
    beta: float = 1.0
    gamma: float = 0.1
    trials: int = 5

    def violations(self) -> list[str]:
        bad = []
        if self.n < 2:
            bad.append(f"n must be >= 2 (ring blocks undefined below that), got {self.n}")
        if not 1 <= self.k <= self.n:
            bad.append(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.m < 1:
            bad.append(f"m must be >= 1, got {self.m}")
        if not 1 <= self.R0 <= self.R:
            bad.append(f"need 1 <= R0 <= R, got R0={self.R0}, R={self.R}")
        if not 0 < self.tau_acc <= 1:
            bad.append(f"tau_acc must be in (0, 1], got {self.tau_acc}")
        if not -1 <= self.tau_cos <= 1:
            bad.append(f"tau_cos must be in [-1, 1], got {self.tau_cos}")
        if self.regime not in REGIMES:
            bad.append(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if not 0 < self.test_fraction < 1:
            bad.append(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.lambda_cost < 0:
            bad.append(f"lambda_cost must be >= 0, got {self.lambda_cost}")
        if self.lambda_fisher <= 0:
            bad.append(f"lambda_fisher must be > 0, got {self.lambda_fisher}")
        if self.probe_iterations < 1:
            bad.append(f"probe_iterations must be >= 1, got {self.probe_iterations}")
        if self.B < 1:
            bad.append(f"B must be >= 1, got {self.B}")
        if self.trials < 1:
            bad.append(f"trials must be >= 1, got {self.trials}")
        if self.beta < 0 or self.gamma < 0:
            bad.append(f"beta and gamma must be >= 0, got beta={self.beta}, gamma={self.gamma}")
        return bad


@dataclass(frozen=True)
class TaskSummary:
    """One candidate sequence evaluated on one class-pair task."""

    task_index: int
    sequence: tuple
    readout_columns: tuple[int, ...]
    readout_paulis: tuple[str, ...]
    readout_scores: tuple[float, ...]
    ideal_acc: float
    fisher: float
    cosine: float
    groups: int
    budget: BudgetEvaluation | None = None


@dataclass(frozen=True)
class PairResult:
    task_index: int
    class_a: int
    class_b: int
    prefix: tuple
    suffix: tuple
    summary: TaskSummary | None
    is_hard: bool | None
    evaluations_used: int
    error: str | None = None
    detail: dict | None = None  # strategy-specific extras (baseline diagnostics)

    @property
    def sequence(self) -> tuple:
        return self.prefix + self.suffix


class CandidateEngine:
    """Shared evaluation state: split, encoder, angle rows, and caches.

    Feature matrices are cached per upload sequence (they are task independent);
    task summaries are cached per (sequence, task). All noise streams are keyed
    by (run seed, task, sequence), so evaluation order never changes a result.
    """

    def __init__(self, ds: Dataset, cfg: SearchConfig):
        bad = cfg.violations()
        if bad:
            raise ValueError("; ".join(bad))
        self.cfg = cfg
        self.dataset = ds
        self.train_rows, self.test_rows = split(ds, cfg.test_fraction, cfg.seed)
        self.encoder = fit_encoder(ds, self.train_rows, cfg.n, cfg.alpha)
        self.family = enumerate_family(cfg.n, cfg.k, self.encoder.excluded_qubits)
        self.angles = angle_matrix(self.encoder, ds)
        self.tasks = make_pair_tasks(ds, self.train_rows, self.test_rows)
        self._states: dict[tuple, np.ndarray] = {}
        self._features: dict[tuple, np.ndarray] = {}
        self._summaries: dict[tuple, TaskSummary] = {}
        self.fresh_evaluations = 0

    def states(self, seq) -> np.ndarray:
        seq = tuple(seq)
        if seq not in self._states:
            self._states[seq] = encode_batch(seq, self.angles, self.cfg.n)
        return self._states[seq]

    def features(self, seq) -> np.ndarray:
        seq = tuple(seq)
        if seq not in self._features:
            self._features[seq] = feature_matrix(self.states(seq), self.family)
        return self._features[seq]

    def phi(self, summary: TaskSummary) -> float:
        if self.cfg.regime == "budget":
            return summary.budget.noisy_acc
        return summary.ideal_acc

    def evaluate(self, seq, task_index: int) -> TaskSummary:
        seq = tuple(seq)
        key = (seq, task_index)
        if key in self._summaries:
            return self._summaries[key]
        cfg = self.cfg
        task = self.tasks[task_index]
        feats = self.features(seq)
        f_train = feats[task.train_rows]
        f_test = feats[task.test_rows]
        y_train = self.dataset.labels[task.train_rows]
        y_test = self.dataset.labels[task.test_rows]

        scores = disc_scores(f_train, y_train)
        penalized = penalize(scores, self.family, cfg.lambda_cost)
        m = len(self.family) if cfg.full_family else cfg.m
        readout = select_top_m(penalized, m)
        cols = list(readout.columns)
        paulis = tuple(self.family.members[j] for j in cols)

        model = fit_probe(f_train[:, cols], y_train, iterations=cfg.probe_iterations, rho=cfg.rho)
        ideal_acc = task_accuracy(model, f_test[:, cols], y_test)
        groups = len(greedy_group(paulis))
        fisher = fisher_score(f_train[:, cols], y_train, cfg.lambda_fisher)
        cosine = class_mean_cosine(f_train[:, cols], y_train)

        budget_eval = None
        if cfg.regime == "budget":
            n_shot = budget_mod.shots_per_group(cfg.B, groups)
            noise_seed = stream_key(cfg.seed, "noise", task_index, "/".join(seq))
            noisy = budget_mod.noisy_accuracy(
                f_train,
                f_test,
                y_train,
                y_test,
                cols,
                n_shot,
                cfg.trials,
                noise_seed,
                iterations=cfg.probe_iterations,
                rho=cfg.rho,
            )
            vp = budget_mod.variance_penalty(f_train[:, cols], n_shot)
            score = budget_mod.budget_score(fisher, vp, groups, len(cols), cfg.beta, cfg.gamma)
            budget_eval = BudgetEvaluation(
                groups=groups,
                shots_per_group=n_shot,
                noisy_acc=noisy,
                var_penalty=vp,
                budget_score=score,
            )

        summary = TaskSummary(
            task_index=task_index,
            sequence=seq,
            readout_columns=readout.columns,
            readout_paulis=paulis,
            readout_scores=readout.scores,
            ideal_acc=ideal_acc,
            fisher=fisher,
            cosine=cosine,
            groups=groups,
            budget=budget_eval,
        )
        self._summaries[key] = summary
        self.fresh_evaluations += 1
        return summary


def global_prefix_search(engine: CandidateEngine, cfg: SearchConfig) -> tuple[tuple, int]:
    """Shared prefix from the first R0 rounds; returns (prefix, sequences tried).

    Each round keeps the candidate with the best mean metric over all tasks.
    An extension replaces the incumbent only on strict improvement, so ties
    fall to the shorter sequence (and, within a round, to library order).
    """
    incumbent: tuple = ()
    incumbent_score = -np.inf
    sequences = 0
    for round_index in range(1, cfg.R0 + 1):
        if round_index == 1:
            candidates = [(g,) for g in GATE_LIBRARY]
        else:
            candidates = [incumbent + (g,) for g in GATE_LIBRARY]
        best_cand, best_score = None, -np.inf
        for cand in candidates:
            mean_phi = float(
                np.mean([engine.phi(engine.evaluate(cand, ti)) for ti in range(len(engine.tasks))])
            )
            if mean_phi > best_score:
                best_cand, best_score = cand, mean_phi
        sequences += len(candidates)
        if best_score > incumbent_score:
            incumbent, incumbent_score = best_cand, best_score
        else:
            break  # no extension improves the mean; later rounds would repeat
    return incumbent, sequences


def detect_hard(summary: TaskSummary, cfg: SearchConfig, phi_value: float) -> bool:
    """Hard = metric below target, or class means nearly collinear."""
    return phi_value < cfg.tau_acc or summary.cosine >= cfg.tau_cos


def _round_winner(engine: CandidateEngine, summaries: list[TaskSummary]) -> TaskSummary:
    if engine.cfg.regime == "budget":
        entries = [
            (s.budget.noisy_acc, s.budget.budget_score, s.ideal_acc, s.groups, len(s.sequence))
            for s in summaries
        ]
        return summaries[pair_rank(entries)[0]]
    best = summaries[0]
    for s in summaries[1:]:
        if s.ideal_acc > best.ideal_acc:
            best = s
    return best


def continue_pair(engine: CandidateEngine, task_index: int, prefix: tuple, cfg: SearchConfig) -> PairResult:
    """Greedy continuation rounds for one hard pair, stopping at the target."""
    incumbent = prefix
    incumbent_summary = engine.evaluate(prefix, task_index)
    evaluations = 0
    for _ in range(cfg.R0 + 1, cfg.R + 1):
        candidates = [incumbent + (g,) for g in GATE_LIBRARY]
        summaries = [engine.evaluate(c, task_index) for c in candidates]
        evaluations += len(candidates)
        winner = _round_winner(engine, summaries)
        if engine.phi(winner) > engine.phi(incumbent_summary):
            incumbent, incumbent_summary = winner.sequence, winner
            if engine.phi(incumbent_summary) >= cfg.tau_acc:
                break
        else:
            break  # nothing improved; extending the same incumbent again is futile
    task = engine.tasks[task_index]
    return PairResult(
        task_index=task_index,
        class_a=task.class_a,
        class_b=task.class_b,
        prefix=prefix,
        suffix=incumbent[len(prefix):],
        summary=incumbent_summary,
        is_hard=True,
        evaluations_used=evaluations,
    )


@dataclass
class PipelineResult:
    config: SearchConfig
    prefix: tuple
    pair_results: list[PairResult]
    global_sequences_evaluated: int
    tasks: list
    class_names: list[str]
    family_size: int
    retained_dimension: int
    train_rows: np.ndarray = field(repr=False, default=None)
    test_rows: np.ndarray = field(repr=False, default=None)


def run_pipeline(ds: Dataset, cfg: SearchConfig, on_result=None) -> PipelineResult:
    """Full run: split, encode, shared prefix, per-pair continuation.

    on_result, when given, is called with each PairResult as its task finishes
    (task order), so callers can stream records out mid-run.
    """
    engine = CandidateEngine(ds, cfg)
    prefix, global_sequences = global_prefix_search(engine, cfg)
    results: list[PairResult] = []
    for ti, task in enumerate(engine.tasks):
        try:
            base = engine.evaluate(prefix, ti)
            hard = detect_hard(base, cfg, engine.phi(base))
            if hard and cfg.R > cfg.R0:
                result = continue_pair(engine, ti, prefix, cfg)
            else:
                result = PairResult(
                    task_index=ti,
                    class_a=task.class_a,
                    class_b=task.class_b,
                    prefix=prefix,
                    suffix=(),
                    summary=base,
                    is_hard=hard,
                    evaluations_used=0,
                )
        except PauliPairError as exc:
            result = PairResult(
                task_index=ti,
                class_a=task.class_a,
                class_b=task.class_b,
                prefix=prefix,
                suffix=(),
                summary=None,
                is_hard=None,
                evaluations_used=0,
                error=f"{type(exc).__name__}: {exc}",
            )
        results.append(result)
        if on_result is not None:
            on_result(result)
    return PipelineResult(
        config=cfg,
        prefix=prefix,
        pair_results=results,
        global_sequences_evaluated=global_sequences,
        tasks=engine.tasks,
        class_names=ds.class_names,
        family_size=len(engine.family),
        retained_dimension=engine.encoder.p,
        train_rows=engine.train_rows,
        test_rows=engine.test_rows,
    )
