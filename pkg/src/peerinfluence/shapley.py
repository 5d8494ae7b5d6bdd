"""Feature attribution by interventional Shapley values.

The value of a coalition S is the marginal (interventional) expectation
over a background dataset: rows are composed by taking the features in S
from the explained instance and the remaining features from each
background row, and the model's raw scores are averaged. The exact
backend enumerates all 2^m coalitions and applies the combinatorial
Shapley weights; the sampled backend averages marginal contributions
over seeded random feature permutations.

Both backends satisfy the efficiency identity

    base_value + sum(phi) == score(x)

to floating-point accuracy, because per-permutation marginal
contributions telescope between the empty and full coalitions.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, Instance, ReducedDataset
from .errors import CapacityError
from .validation import as_float_matrix, as_float_vector

EXACT = "exact"
SAMPLED = "sampled"

# Upper bound on floats materialised per scoring batch (~16 MiB).
_BATCH_FLOATS = 2_000_000


@dataclass(frozen=True)
class ExplainerConfig:
    backend: str = EXACT
    background_rows: int = 100
    seed: int = 0
    permutations: int = 2000
    max_exact_features: int = 15

    def __post_init__(self) -> None:
        if self.backend not in (EXACT, SAMPLED):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.background_rows < 1:
            raise ValueError("background_rows must be >= 1")
        if self.permutations < 1:
            raise ValueError("permutations must be >= 1")


@dataclass(frozen=True, eq=False)
class Attribution:
    """Per-feature contributions to one prediction's raw score."""

    feature_names: tuple[str, ...]
    phi: np.ndarray
    base_value: float
    target_score: float
    backend: str
    background_digest: str
    seed: int | None = None
    stderr: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        phi = np.array(self.phi, dtype=np.float64)
        phi.flags.writeable = False
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    def efficiency_gap(self) -> float:
        return abs(self.base_value + float(self.phi.sum()) - self.target_score)

    def to_dict(self) -> dict:
        doc = {
            "phi": {name: float(v) for name, v in zip(self.feature_names, self.phi)},
            "base_value": self.base_value,
            "target_score": self.target_score,
            "backend": self.backend,
            "seed": self.seed,
            "background_digest": self.background_digest,
        }
        if self.stderr is not None:
            doc["stderr"] = {name: float(v) for name, v in zip(self.feature_names, self.stderr)}
        return doc


def _background_parts(background) -> tuple[np.ndarray, tuple[str, ...] | None]:
    if isinstance(background, (Dataset, ReducedDataset)):
        return background.rows, background.feature_names
    rows = as_float_matrix(background, "background")
    return rows, None


def _instance_vector(x) -> np.ndarray:
    if isinstance(x, Instance):
        return np.asarray(x.values, dtype=np.float64)
    return as_float_vector(x, "instance")


def _digest(rows: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(rows).tobytes()).hexdigest()[:16]


def _names(names, m) -> tuple[str, ...]:
    return tuple(names) if names is not None else tuple(f"f{i}" for i in range(m))


def _score(model, rows: np.ndarray) -> np.ndarray:
    return np.asarray(model.decision_function(rows), dtype=np.float64).ravel()


def _coalition_values(model, x, B, bits) -> np.ndarray:
    """v(S) for every coalition mask, means taken with ``math.fsum``.

    fsum rounds the background mean correctly, so the exact backend is
    bitwise invariant to background row order.
    """
    nb, m = B.shape
    n_masks = bits.shape[0]
    v = np.empty(n_masks)
    chunk = max(1, _BATCH_FLOATS // (nb * m))
    for start in range(0, n_masks, chunk):
        sub = bits[start : start + chunk]
        comp = np.where(sub[:, None, :], x[None, None, :], B[None, :, :])
        scores = _score(model, comp.reshape(-1, m)).reshape(sub.shape[0], nb)
        for k in range(sub.shape[0]):
            v[start + k] = math.fsum(scores[k]) / nb
    return v


def shapley_exact(model, background, x, *, max_features: int = 15) -> Attribution:
    """Exact Shapley attribution by coalition enumeration.

    Costs ``2^m * len(background)`` model evaluations; guarded by
    ``max_features``.
    """
    B, names = _background_parts(background)
    xv = _instance_vector(x)
    m = xv.shape[0]
    if B.shape[1] != m:
        raise ValueError(f"instance has {m} features, background has {B.shape[1]}")
    if m > max_features:
        raise CapacityError(
            f"exact backend enumerates 2^{m} coalitions which exceeds the "
            f"guard of {max_features} features; use the sampled backend"
        )

    masks = np.arange(2**m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)
    v = _coalition_values(model, xv, B, bits)
    sizes = bits.sum(axis=1)

    # weight(s) = s! (m - s - 1)! / m!  for |S| = s
    weights = np.array(
        [math.factorial(s) * math.factorial(m - s - 1) / math.factorial(m) for s in range(m)]
    )

    phi = np.empty(m)
    for i in range(m):
        without = np.nonzero(~bits[:, i])[0]
        with_i = without + (1 << i)
        phi[i] = float(np.sum(weights[sizes[without]] * (v[with_i] - v[without])))

    return Attribution(
        feature_names=_names(names, m),
        phi=phi,
        base_value=float(v[0]),
        target_score=float(_score(model, xv[None, :])[0]),
        backend=EXACT,
        background_digest=_digest(B),
    )


def _permutation_marginals(model, x, B, perms: np.ndarray) -> np.ndarray:
    """Marginal-contribution matrix (one row per permutation)."""
    P, m = perms.shape
    nb = B.shape[0]
    positions = np.argsort(perms, axis=1)  # positions[p, j] = index of j in perm p
    out = np.empty((P, m))
    chunk = max(1, _BATCH_FLOATS // ((m + 1) * nb * m))
    for start in range(0, P, chunk):
        pos = positions[start : start + chunk]
        member = pos[:, None, :] < np.arange(m + 1)[None, :, None]  # (c, m+1, m)
        comp = np.where(member[:, :, None, :], x[None, None, None, :], B[None, None, :, :])
        scores = _score(model, comp.reshape(-1, m)).reshape(pos.shape[0], m + 1, nb)
        v = scores.mean(axis=2)
        np.put_along_axis(out[start : start + chunk], perms[start : start + chunk], np.diff(v, axis=1), axis=1)
    return out


def shapley_sampled(model, background, x, *, permutations: int, seed: int) -> Attribution:
    """Monte-Carlo Shapley attribution over sampled feature permutations.

    Deterministic for a fixed seed; ``stderr`` carries the per-feature
    standard error of the permutation sample.
    """
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    B, names = _background_parts(background)
    xv = _instance_vector(x)
    m = xv.shape[0]
    if B.shape[1] != m:
        raise ValueError(f"instance has {m} features, background has {B.shape[1]}")

    rng = np.random.default_rng(seed)
    perms = np.array([rng.permutation(m) for _ in range(permutations)], dtype=np.int64)
    marginals = _permutation_marginals(model, xv, B, perms)

    phi = marginals.mean(axis=0)
    if permutations > 1:
        stderr = marginals.std(axis=0, ddof=1) / math.sqrt(permutations)
    else:
        stderr = np.zeros(m)

    base = math.fsum(_score(model, B)) / B.shape[0]
    return Attribution(
        feature_names=_names(names, m),
        phi=phi,
        base_value=base,
        target_score=float(_score(model, xv[None, :])[0]),
        backend=SAMPLED,
        background_digest=_digest(B),
        seed=seed,
        stderr=stderr,
    )


def subsample_background(background, limit: int, seed: int):
    """Take at most ``limit`` rows (ascending index order) from the background."""
    rows, _ = _background_parts(background)
    if rows.shape[0] <= limit:
        return background
    idx = np.sort(np.random.default_rng(seed).choice(rows.shape[0], size=limit, replace=False))
    if isinstance(background, Dataset):
        return background.take(idx)
    if isinstance(background, ReducedDataset):
        # Reduce first, then subsample: the replacement value stays the
        # mean over the full base dataset.
        return Dataset(background.schema, background.rows[idx], background.labels[idx])
    return rows[idx]


def explain(model, background, x, config: ExplainerConfig = ExplainerConfig()) -> Attribution:
    """Dispatch to the configured backend on a subsampled background."""
    background = subsample_background(background, config.background_rows, config.seed)
    if config.backend == EXACT:
        return shapley_exact(model, background, x, max_features=config.max_exact_features)
    return shapley_sampled(
        model, background, x, permutations=config.permutations, seed=config.seed
    )
