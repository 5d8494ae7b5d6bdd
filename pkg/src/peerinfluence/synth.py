"""Seeded synthetic cohort generator.

Emits a seven-feature oncology-flavoured table (dose, staging codes, and
body measurements) with a binary six-month survival label drawn from a
documented logistic ground-truth mechanism:

    z = intercept + sum_f  coef[f] * (value_f - loc_f) / scale_f
    P(label = 1) = 1 / (1 + exp(-z))

``loc``/``scale`` are fixed standardisation constants (not estimated from
the sample), so a zero coefficient makes a feature exactly independent of
the label. Default coefficient signs: higher staging codes and age lower
survival, higher dose and weight raise it, height is inert.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .data import CATEGORICAL, NUMERICAL, Dataset, FeatureSchema

LABEL_COLUMN = "survived_6mo"

CASE_FEATURES: tuple[FeatureSchema, ...] = (
    FeatureSchema("Dose Administration", NUMERICAL, controllable=True, unit="mg"),
    FeatureSchema("M Best", CATEGORICAL, categories=("0", "1", "1b")),
    FeatureSchema("N Best", CATEGORICAL, categories=("0", "1", "2", "3")),
    FeatureSchema("T Best", CATEGORICAL, categories=("1", "2", "3", "4")),
    FeatureSchema("Weight", NUMERICAL, controllable=True, unit="kg"),
    FeatureSchema("Age", NUMERICAL, unit="years"),
    FeatureSchema("Height", NUMERICAL, unit="m"),
)

# (loc, scale) standardisation constants of the mechanism, per feature.
MECHANISM_SCALING: dict[str, tuple[float, float]] = {
    "Dose Administration": (500.0, 400.0),
    "M Best": (0.9, 0.8),
    "N Best": (1.1, 1.05),
    "T Best": (1.6, 1.0),
    "Weight": (76.0, 14.0),
    "Age": (68.0, 10.0),
    "Height": (1.72, 0.10),
}

DEFAULT_COEFFICIENTS: dict[str, float] = {
    "Dose Administration": 1.6,
    "M Best": -3.2,
    "N Best": -2.4,
    "T Best": -1.8,
    "Weight": 2.0,
    "Age": -1.6,
    "Height": 0.0,
}

DEFAULT_INTERCEPT = 0.6


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    seed: int
    coefficients: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_COEFFICIENTS))
    intercept: float = DEFAULT_INTERCEPT

    def __post_init__(self) -> None:
        if self.n < 10:
            raise ValueError(f"generator requires n >= 10, got {self.n}")
        unknown = set(self.coefficients) - {f.name for f in CASE_FEATURES}
        if unknown:
            raise ValueError(f"coefficients for unknown features {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "coefficients": dict(self.coefficients),
            "intercept": self.intercept,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorConfig":
        return cls(
            n=int(doc["n"]),
            seed=int(doc["seed"]),
            coefficients=dict(doc.get("coefficients", DEFAULT_COEFFICIENTS)),
            intercept=float(doc.get("intercept", DEFAULT_INTERCEPT)),
        )


def _sample_columns(rng: np.random.Generator, n: int) -> np.ndarray:
    cols = np.empty((n, len(CASE_FEATURES)))
    cols[:, 0] = np.clip(rng.lognormal(mean=np.log(420.0), sigma=0.75, size=n), 25.0, 3000.0)
    cols[:, 1] = rng.choice(3, size=n, p=(0.45, 0.30, 0.25))
    cols[:, 2] = rng.choice(4, size=n, p=(0.40, 0.25, 0.20, 0.15))
    cols[:, 3] = rng.choice(4, size=n, p=(0.20, 0.30, 0.30, 0.20))
    cols[:, 4] = np.clip(rng.normal(76.0, 14.0, size=n), 35.0, 160.0)
    cols[:, 5] = np.clip(rng.normal(68.0, 10.0, size=n), 18.0, 95.0)
    cols[:, 6] = np.clip(rng.normal(1.72, 0.10, size=n), 1.40, 2.10)
    return cols


def mechanism_logits(rows: np.ndarray, config: GeneratorConfig) -> np.ndarray:
    """Ground-truth log-odds of label 1 for encoded rows."""
    z = np.full(rows.shape[0], float(config.intercept))
    for j, feature in enumerate(CASE_FEATURES):
        coef = float(config.coefficients.get(feature.name, 0.0))
        if coef == 0.0:
            continue
        loc, scale = MECHANISM_SCALING[feature.name]
        z += coef * (rows[:, j] - loc) / scale
    return z


def generate_synthetic(config: GeneratorConfig) -> Dataset:
    """Draw a dataset from the mechanism; deterministic per seed."""
    rng = np.random.default_rng(config.seed)
    rows = _sample_columns(rng, config.n)
    p = 1.0 / (1.0 + np.exp(-mechanism_logits(rows, config)))
    labels = (rng.random(config.n) < p).astype(np.int64)
    return Dataset(schema=CASE_FEATURES, rows=rows, labels=labels)
