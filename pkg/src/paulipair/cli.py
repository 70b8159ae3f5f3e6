"""Command-line front end: run, compare, group, inspect."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import report as report_mod
from .baselines import run_baseline
from .config import ENV_CONFIG_VAR, STRATEGIES, RunConfig, load_config_file, merge_config
from .data import fixture_path, load_csv
from .errors import ConfigError, PauliPairError
from .pauli import greedy_group
from .search import run_pipeline

_FLAG_FIELDS = (
    # (flag, dest, type, help)
    ("--dataset", "dataset", str, "CSV path, or bundled:<iris|wine|breast_cancer>"),
    ("--label", "label_column", str, "name of the label column"),
    ("--strategy", "strategy", str, f"one of {', '.join(STRATEGIES)}"),
    ("--out", "out", str, "report directory (tasks.jsonl + summary.txt)"),
    ("--n", "n", int, "qubit count"),
    ("--k", "k", int, "maximum Pauli weight"),
    ("--m", "m", int, "sparse Pauli budget"),
    ("--rounds", "R", int, "maximum search rounds"),
    ("--prefix-rounds", "R0", int, "shared-prefix rounds"),
    ("--tau-acc", "tau_acc", float, "target accuracy threshold"),
    ("--tau-cos", "tau_cos", float, "class-mean cosine threshold for hard pairs"),
    ("--alpha", "alpha", float, "angle-map scale"),
    ("--shots", "B", int, "total measurement shot budget"),
    ("--trials", "trials", int, "noisy perturbation repetitions"),
    ("--iterations", "probe_iterations", int, "probe training iterations"),
    ("--seed", "seed", int, "split / noise seed"),
    ("--lambda-cost", "lambda_cost", float, "Pauli-weight penalty coefficient"),
    ("--lambda-fisher", "lambda_fisher", float, "Fisher ridge coefficient"),
    ("--beta", "beta", float, "variance-penalty weight in the budget score"),
    ("--gamma", "gamma", float, "group-cost weight in the budget score"),
    ("--test-fraction", "test_fraction", float, "held-out fraction per class"),
    ("--folds", "folds", int, "cross-validation folds (template_cv)"),
    ("--rho", "rho", float, "probe L2 strength (default 1/N_train)"),
)


def _add_config_flags(parser: argparse.ArgumentParser, include_strategy=True) -> None:
    parser.add_argument("--config", help=f"flat key=value config file (default: ${ENV_CONFIG_VAR})")
    for flag, dest, typ, help_text in _FLAG_FIELDS:
        if dest == "strategy" and not include_strategy:
            continue
        parser.add_argument(flag, dest=dest, type=typ, default=None, help=help_text)


def _build_config(args: argparse.Namespace, **overrides) -> RunConfig:
    config_path = args.config or os.environ.get(ENV_CONFIG_VAR)
    file_options = load_config_file(config_path) if config_path else None
    flag_options = {dest: getattr(args, dest, None) for _, dest, _, _ in _FLAG_FIELDS}
    flag_options.update(overrides)
    return merge_config(file_options, flag_options)


def _resolve_dataset(spec: str) -> str:
    if spec.startswith("bundled:"):
        return str(fixture_path(spec[len("bundled:"):]))
    return spec


def _load_dataset(cfg: RunConfig):
    path = _resolve_dataset(cfg.dataset)
    if not Path(path).is_file():
        raise ConfigError([f"dataset: no such file {path!r}"])
    return load_csv(path, cfg.label_column)


def _execute_strategy(ds, cfg: RunConfig, out_dir=None):
    """Run one strategy and return its RunReport (streaming records if out_dir)."""
    search_cfg = cfg.search_config_unchecked()
    if cfg.strategy in ("template_cv", "kta_exact"):
        pipeline = run_baseline(ds, search_cfg, cfg.strategy, folds=cfg.folds)
        report = report_mod.build_report(pipeline, cfg.strategy, cfg.as_flat_dict())
        if out_dir:
            report_mod.emit(report, out_dir)
        return report
    if out_dir:
        # Stream task records as they complete so long sweeps stay inspectable.
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / report_mod.TASKS_FILE, "w", encoding="utf-8") as stream:

            def on_result(result):
                line = report_mod.record_line(report_mod.pair_record(result, ds.class_names))
                stream.write(line + "\n")
                stream.flush()

            pipeline = run_pipeline(ds, search_cfg, on_result=on_result)
        report = report_mod.build_report(pipeline, cfg.strategy, cfg.as_flat_dict())
        with open(out / report_mod.SUMMARY_FILE, "w", encoding="utf-8") as fh:
            fh.write("\n".join(report_mod.summary_lines(report)) + "\n")
        return report
    pipeline = run_pipeline(ds, search_cfg)
    return report_mod.build_report(pipeline, cfg.strategy, cfg.as_flat_dict())


def cmd_run(args) -> int:
    cfg = _build_config(args).validate()
    ds = _load_dataset(cfg)
    report = _execute_strategy(ds, cfg, out_dir=cfg.out or None)
    print(report_mod.format_aggregate_table([(cfg.strategy, report.aggregates)]))
    if cfg.out:
        print(f"report written to {cfg.out}/")
    return 0


def cmd_compare(args) -> int:
    if len(args.strategies) < 2:
        print("compare needs at least 2 strategy names", file=sys.stderr)
        return 2
    rows = []
    for strategy in args.strategies:
        cfg = _build_config(args, strategy=strategy).validate()
        ds = _load_dataset(cfg)
        out_dir = str(Path(cfg.out) / strategy) if cfg.out else None
        report = _execute_strategy(ds, cfg, out_dir=out_dir)
        rows.append((strategy, report.aggregates))
    print(report_mod.format_aggregate_table(rows))
    return 0


def cmd_group(args) -> int:
    paulis = []
    with open(args.paulis, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                paulis.append(line)
    if not paulis:
        print(f"{args.paulis}: no Pauli strings found", file=sys.stderr)
        return 2
    groups = greedy_group(paulis)
    print(f"{len(paulis)} strings -> {len(groups)} measurement groups")
    for i, group in enumerate(groups, start=1):
        print(f"group {i} basis={group.basis}: {' '.join(group.members)}")
    return 0


def cmd_inspect(args) -> int:
    report = report_mod.load(args.report)
    print(f"strategy: {report.strategy} (format v{report.version})")
    print(report_mod.format_aggregate_table([(report.strategy, report.aggregates)]))
    print()
    for r in report.records:
        seq = " ".join(r["sequence"]) or "(empty)"
        if r["error"]:
            print(f"{r['label_a']} | {r['label_b']}: FAILED {r['error']}")
            continue
        noisy = f" noisy={r['noisy_acc']:.4f}" if r["noisy_acc"] is not None else ""
        hard = " hard" if r["is_hard"] else ""
        print(
            f"{r['label_a']} | {r['label_b']}: acc={r['ideal_acc']:.4f}{noisy} "
            f"len={len(r['sequence'])} paulis={len(r['readout'])} groups={r['groups']}{hard}  [{seq}]"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paulipair",
        description="Pair-adaptive upload-circuit selection over low-weight Pauli features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one strategy on a dataset")
    _add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several strategies on the same split")
    p_cmp.add_argument("--strategies", nargs="+", required=True, choices=STRATEGIES)
    _add_config_flags(p_cmp, include_strategy=False)
    p_cmp.set_defaults(func=cmd_compare)

    p_grp = sub.add_parser("group", help="group a Pauli list from a text file")
    p_grp.add_argument("--paulis", required=True, help="file with one Pauli string per line")
    p_grp.set_defaults(func=cmd_group)

    p_ins = sub.add_parser("inspect", help="pretty-print a report directory")
    p_ins.add_argument("--report", required=True, help="directory with tasks.jsonl + summary.txt")
    p_ins.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PauliPairError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
