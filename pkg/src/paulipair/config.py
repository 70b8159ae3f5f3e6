"""Run configuration: defaults, config-file parsing, strategy presets.

The config file is flat ``key = value`` text, one option per line, values in
JSON scalar syntax (bare strings are accepted too). Command-line flags win
over the file, which wins over the defaults.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigError
from .search import SearchConfig

STRATEGIES = (
    "full_global_ideal",
    "sparse_global_ideal",
    "sparse_pair_adaptive_ideal",
    "sparse_pair_adaptive_budget",
    "full_pair_adaptive_ideal",
    "template_cv",
    "kta_exact",
)

ENV_CONFIG_VAR = "PAULIPAIR_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    dataset: str = ""
    label_column: str = ""
    strategy: str = "sparse_pair_adaptive_ideal"
    out: str = ""
    n: int = 4
    k: int = 2
    m: int = 12
    R: int = 3
    R0: int = 1
    tau_acc: float = 0.95
    tau_cos: float = 0.99
    alpha: float = math.pi / 2
    B: int = 2048
    trials: int = 5
    probe_iterations: int = 100
    seed: int = 0
    lambda_cost: float = 0.1
    lambda_fisher: float = 1e-3
    beta: float = 1.0
    gamma: float = 0.1
    test_fraction: float = 0.3
    folds: int = 5
    rho: float | None = None

    def violations(self) -> list[str]:
        bad = []
        if not self.dataset:
            bad.append("dataset: a CSV path (or bundled:<name>) is required")
        if not self.label_column:
            bad.append("label_column: the label column name is required")
        if self.strategy not in STRATEGIES:
            bad.append(f"strategy: {self.strategy!r} is not one of {list(STRATEGIES)}")
        if self.folds < 2:
            bad.append(f"folds: must be >= 2, got {self.folds}")
        bad.extend(self.search_config_unchecked().violations())
        return bad

    def validate(self) -> "RunConfig":
        bad = self.violations()
        if bad:
            raise ConfigError(bad)
        return self

    def search_config_unchecked(self) -> SearchConfig:
        """SearchConfig with the strategy preset applied (no validation)."""
        full_family = self.strategy in ("full_global_ideal", "full_pair_adaptive_ideal",
                                        "template_cv", "kta_exact")
        global_only = self.strategy in ("full_global_ideal", "sparse_global_ideal")
        regime = "budget" if self.strategy == "sparse_pair_adaptive_budget" else "ideal"
        return SearchConfig(
            n=self.n,
            k=self.k,
            m=self.m,
            full_family=full_family,
            R=self.R,
            R0=self.R if global_only else self.R0,
            tau_acc=self.tau_acc,
            tau_cos=self.tau_cos,
            regime=regime,
            alpha=self.alpha,
            test_fraction=self.test_fraction,
            seed=self.seed,
            lambda_cost=self.lambda_cost,
            lambda_fisher=self.lambda_fisher,
            probe_iterations=self.probe_iterations,
            rho=self.rho,
            B=self.B,
            beta=self.beta,
            gamma=self.gamma,
            trials=self.trials,
        )

    def search_config(self) -> SearchConfig:
        self.validate()
        return self.search_config_unchecked()

    def as_flat_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(raw: str):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare string


def load_config_file(path) -> dict:
    """Read flat key = value lines; '#' starts a comment."""
    options = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError([f"{path}:{lineno}: expected 'key = value', got {line!r}"])
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ConfigError([f"{path}:{lineno}: unknown option {key!r}"])
            options[key] = _parse_value(raw)
    return options


def merge_config(file_options: dict | None, flag_options: dict) -> RunConfig:
    """defaults < config file < flags (flags with value None are 'unset')."""
    cfg = RunConfig()
    if file_options:
        cfg = replace(cfg, **file_options)
    set_flags = {k: v for k, v in flag_options.items() if v is not None}
    if set_flags:
        cfg = replace(cfg, **set_flags)
    return cfg
