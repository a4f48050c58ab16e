"""Synthetic KPI snapshots with injected faults.

Each class draws every KPI independently from a Gaussian and clamps it to a
physically plausible range. Draws come from numpy's PCG64 generator and its
ziggurat normal sampler, so a given seed always yields the same dataset.

The fault class is described by how far each KPI mean moves from its
fault-free value. ``SEVERE_FAULT_PARAMS`` is a fully degraded cell (dead
coverage, collapsed throughput); at that level the two classes barely
overlap and every detector scores an AUC of 1. The default scenario keeps
the severe spreads but moves the means a quarter of the way
(``fault_params(0.25)``), which gives a plain linear SVM an AUC near 0.9 and
leaves room for resampling and cost weighting to matter.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dataio import FAULT, FAULT_FREE, FEATURE_NAMES, Dataset

# (mean, std) per KPI, in FEATURE_NAMES order
FAULT_FREE_PARAMS = {
    "retainability": (0.99, 0.01),
    "ho_success_rate": (0.97, 0.02),
    "rsrp": (-85.0, 6.0),
    "rsrq": (-9.0, 2.0),
    "sinr": (15.0, 5.0),
    "throughput": (25.0, 8.0),
    "distance": (400.0, 200.0),
}
SEVERE_FAULT_PARAMS = {
    "retainability": (0.85, 0.08),
    "ho_success_rate": (0.80, 0.10),
    "rsrp": (-105.0, 8.0),
    "rsrq": (-15.0, 3.0),
    "sinr": (3.0, 5.0),
    "throughput": (5.0, 4.0),
    "distance": (900.0, 300.0),
}
DEFAULT_SEVERITY = 0.25


def fault_params(severity: float) -> dict:
    """Fault-class table whose means sit ``severity`` of the way from the
    fault-free means to the severe ones; spreads are the severe spreads."""
    out = {}
    for name in FEATURE_NAMES:
        ok_mean = FAULT_FREE_PARAMS[name][0]
        bad_mean, bad_std = SEVERE_FAULT_PARAMS[name]
        out[name] = (ok_mean + severity * (bad_mean - ok_mean), bad_std)
    return out


FAULT_PARAMS = fault_params(DEFAULT_SEVERITY)

CLAMPS = {
    "retainability": (0.0, 1.0),
    "ho_success_rate": (0.0, 1.0),
    "rsrp": (-140.0, -40.0),
    "rsrq": (-25.0, 0.0),
    "sinr": (-10.0, 40.0),
    "throughput": (0.0, 150.0),
    "distance": (1.0, 3000.0),
}


class ConfigError(ValueError):
    pass


def _copy(d):
    return {k: tuple(v) for k, v in d.items()}


@dataclass(frozen=True)
class SimConfig:
    n_fault: int = 117
    n_ok: int = 3363
    fault: dict = field(default_factory=lambda: _copy(FAULT_PARAMS))
    ok: dict = field(default_factory=lambda: _copy(FAULT_FREE_PARAMS))
    clamp: dict = field(default_factory=lambda: _copy(CLAMPS))
    seed: int = 0

    def validate(self) -> None:
        if int(self.n_fault) < 1 or int(self.n_ok) < 1:
            raise ConfigError("class counts must be positive")
        if self.n_fault > self.n_ok:
            raise ConfigError("n_fault must not exceed n_ok (faults are the minority)")
        for section in ("fault", "ok", "clamp"):
            table = getattr(self, section)
            missing = set(FEATURE_NAMES) - set(table)
            if missing:
                raise ConfigError(f"{section}: missing KPIs {sorted(missing)}")
        for name in FEATURE_NAMES:
            for section in ("fault", "ok"):
                mu, sd = getattr(self, section)[name]
                if not (np.isfinite(mu) and np.isfinite(sd)) or sd < 0:
                    raise ConfigError(f"{section}.{name}: need finite mean and std >= 0")
            lo, hi = self.clamp[name]
            if not lo <= hi:
                raise ConfigError(f"clamp.{name}: lower bound exceeds upper bound")

    def class_arrays(self, label: int):
        table = self.fault if label == FAULT else self.ok
        mu = np.array([table[k][0] for k in FEATURE_NAMES], dtype=np.float64)
        sd = np.array([table[k][1] for k in FEATURE_NAMES], dtype=np.float64)
        return mu, sd

    def clamp_arrays(self):
        lo = np.array([self.clamp[k][0] for k in FEATURE_NAMES], dtype=np.float64)
        hi = np.array([self.clamp[k][1] for k in FEATURE_NAMES], dtype=np.float64)
        return lo, hi


def default_scenario() -> SimConfig:
    return SimConfig()


def generate_dataset(config: SimConfig) -> Dataset:
    config.validate()
    rng = np.random.default_rng(config.seed)
    lo, hi = config.clamp_arrays()
    blocks, labels = [], []
    for label, n in ((FAULT, config.n_fault), (FAULT_FREE, config.n_ok)):
        mu, sd = config.class_arrays(label)
        blocks.append(np.clip(mu + sd * rng.standard_normal((n, len(FEATURE_NAMES))), lo, hi))
        labels.append(np.full(n, label, dtype=np.int64))
    X = np.vstack(blocks)
    y = np.concatenate(labels)
    order = rng.permutation(len(y))
    return Dataset(X[order], y[order])


# ---------------------------------------------------------------- config file
#
# One "section.key = value" per line, '#' starts a comment:
#
#   sim.n_fault = 117
#   sim.seed = 7
#   fault.rsrp = -105, 8        # mean, std
#   clamp.rsrp = -140, -40      # lower, upper


def _pair(text, where):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{where}: expected two comma-separated numbers")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{where}: not a number: {text!r}") from None


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    cfg = base or default_scenario()
    updates = {}
    tables = {"fault": dict(cfg.fault), "ok": dict(cfg.ok), "clamp": dict(cfg.clamp)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        where = f"line {lineno}"
        if not sep or "." not in key:
            raise ConfigError(f"{where}: expected 'section.key = value'")
        section, name = key.split(".", 1)
        if section == "sim":
            if name not in ("n_fault", "n_ok", "seed"):
                raise ConfigError(f"{where}: unknown key sim.{name}")
            try:
                updates[name] = int(value)
            except ValueError:
                raise ConfigError(f"{where}: sim.{name} must be an integer") from None
        elif section in tables:
            if name not in FEATURE_NAMES:
                raise ConfigError(f"{where}: unknown KPI {name!r}")
            tables[section][name] = _pair(value, where)
        else:
            raise ConfigError(f"{where}: unknown section {section!r}")
    cfg = replace(cfg, **updates, **tables)
    cfg.validate()
    return cfg


def load_config(path) -> SimConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def format_config(cfg: SimConfig) -> str:
    lines = [f"sim.n_fault = {cfg.n_fault}", f"sim.n_ok = {cfg.n_ok}", f"sim.seed = {cfg.seed}"]
    for section in ("fault", "ok", "clamp"):
        table = getattr(cfg, section)
        for name in FEATURE_NAMES:
            a, b = table[name]
            lines.append(f"{section}.{name} = {a!r}, {b!r}")
    return "\n".join(lines) + "\n"
