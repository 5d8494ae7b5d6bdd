"""Peer-influence explanations: how each feature shifts its peers' attributions.

An m-by-m influence matrix is assembled from one baseline attribution and
m attributions computed with one feature nullified at a time (column
replaced by its mean in the background, the same value substituted into
the explained instance). The stored orientation is rows-as-influencers:

    matrix[i][j] = baseline.phi[j] - phi_with_i_nullified[j]

so row i reads "what feature i's presence does to every peer j", the
diagonal is forced to zero, and positive entries are supports while
negative entries are attacks. The model is never retrained; nullification
acts only on the attribution inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from .data import Dataset, Instance, nullify_instance, reduce_dataset
from .errors import DegenerateColumnError, PeerInfluenceError
from .shapley import Attribution, ExplainerConfig, explain
from .validation import as_float_matrix

ORIENTATION = "rows-influence-columns"

STRICT = "strict"        # sign(0) -> -1
INCLUSIVE = "inclusive"  # sign(0) -> +1
ZERO_POLICIES = (STRICT, INCLUSIVE)


@dataclass(frozen=True, eq=False)
class PIExplanation:
    """Pairwise influence matrix plus the attributions it was derived from."""

    feature_names: tuple[str, ...]
    matrix: np.ndarray
    baseline: Attribution
    reduced: tuple[Attribution, ...]
    replacement_values: tuple[float, ...]

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.float64)
        m = len(self.feature_names)
        if matrix.shape != (m, m):
            raise ValueError(f"matrix shape {matrix.shape} does not match {m} features")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "reduced", tuple(self.reduced))
        object.__setattr__(self, "replacement_values", tuple(self.replacement_values))

    @property
    def m(self) -> int:
        return len(self.feature_names)

    def verify(self, tol: float = 1e-12) -> None:
        """Re-derive the matrix from the stored attributions and compare."""
        if np.abs(np.diag(self.matrix)).max() != 0.0:
            raise PeerInfluenceError("influence matrix diagonal must be exactly zero")
        for i, red in enumerate(self.reduced):
            expected = self.baseline.phi - red.phi
            expected[i] = 0.0
            gap = np.abs(self.matrix[i] - expected).max()
            if gap > tol:
                raise PeerInfluenceError(
                    f"row {i} deviates from baseline/reduced attributions by {gap:.3e}"
                )

    def scaled(self, lam: float) -> "PIExplanation":
        """Influence under attributions scaled by ``lam`` (covariance helper)."""
        return PIExplanation(
            feature_names=self.feature_names,
            matrix=self.matrix * lam,
            baseline=replace(self.baseline, phi=self.baseline.phi * lam),
            reduced=tuple(replace(r, phi=r.phi * lam) for r in self.reduced),
            replacement_values=self.replacement_values,
        )

    @classmethod
    def from_attributions(
        cls,
        baseline: Attribution,
        reduced,
        replacement_values=None,
    ) -> "PIExplanation":
        reduced = tuple(reduced)
        m = baseline.m
        if len(reduced) != m:
            raise ValueError(f"need one reduced attribution per feature, got {len(reduced)}")
        matrix = np.empty((m, m))
        for i, red in enumerate(reduced):
            matrix[i] = baseline.phi - red.phi
            matrix[i, i] = 0.0
        if replacement_values is None:
            replacement_values = (float("nan"),) * m
        return cls(
            feature_names=baseline.feature_names,
            matrix=matrix,
            baseline=baseline,
            reduced=reduced,
            replacement_values=tuple(replacement_values),
        )


@dataclass(frozen=True, eq=False)
class PIGraph:
    """Sign partition of features (vertices) and influences (arcs)."""

    feature_names: tuple[str, ...]
    proponents: tuple[int, ...]
    opponents: tuple[int, ...]
    support_arcs: tuple[tuple[int, int], ...]
    attack_arcs: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.feature_names)


@dataclass(frozen=True, eq=False)
class ConflictMatrix:
    """Elementwise sign of the influence matrix, entries in {-1, +1}."""

    feature_names: tuple[str, ...]
    matrix: np.ndarray
    zero_policy: str

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.int64)
        if not np.all(np.isin(matrix, (-1, 1))):
            raise ValueError("conflict matrix entries must be -1 or +1")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))


@dataclass(frozen=True, eq=False)
class AlterationResult:
    """Row sums and the argmin feature set of an alteration index."""

    feature_names: tuple[str, ...]
    row_sums: np.ndarray
    selected: tuple[int, ...]
    restricted_to: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        sums = np.array(self.row_sums, dtype=np.float64)
        sums.flags.writeable = False
        object.__setattr__(self, "row_sums", sums)
        object.__setattr__(self, "selected", tuple(self.selected))

    def selected_names(self) -> tuple[str, ...]:
        return tuple(self.feature_names[i] for i in self.selected)


def pi_explanation(model, background: Dataset, x, config: ExplainerConfig = ExplainerConfig()) -> PIExplanation:
    """Build the influence matrix for one instance against a background.

    Runs m + 1 attribution passes (baseline plus one per nullified
    feature) with a shared seed, so every pass subsamples the same
    background rows.
    """
    baseline = explain(model, background, x, config)
    xv = x.values if isinstance(x, Instance) else np.asarray(x, dtype=np.float64)
    reduced: list[Attribution] = []
    replacements: list[float] = []
    for j in range(background.m):
        try:
            rd = reduce_dataset(background, j)
            xj = nullify_instance(Instance(values=xv), j, rd.replacement_value)
            reduced.append(explain(model, rd, xj, config))
            replacements.append(rd.replacement_value)
        except (PeerInfluenceError, ValueError) as exc:
            name = background.feature_names[j]
            raise type(exc)(f"while nullifying feature {j} ({name}): {exc}") from exc
    return PIExplanation.from_attributions(baseline, reduced, replacements)


def pi_graph(e: PIExplanation) -> PIGraph:
    """Partition vertices by attribution sign and arcs by influence sign.

    A non-negative attribution makes a proponent; a non-negative
    influence entry makes a support arc. Self-arcs are excluded.
    """
    phi = e.baseline.phi
    proponents = tuple(i for i in range(e.m) if phi[i] >= 0)
    opponents = tuple(i for i in range(e.m) if phi[i] < 0)
    support = []
    attack = []
    for i in range(e.m):
        for j in range(e.m):
            if i == j:
                continue
            (support if e.matrix[i, j] >= 0 else attack).append((i, j))
    return PIGraph(
        feature_names=e.feature_names,
        proponents=proponents,
        opponents=opponents,
        support_arcs=tuple(support),
        attack_arcs=tuple(attack),
    )


def _argmin_selection(row_sums: np.ndarray, names, mask) -> AlterationResult:
    m = row_sums.shape[0]
    if mask is not None:
        mask = tuple(sorted(set(int(i) for i in mask)))
        if not mask:
            raise ValueError("controllable mask must be non-empty when given")
        for i in mask:
            if not 0 <= i < m:
                raise IndexError(f"mask index {i} out of range for {m} features")
        candidates = mask
    else:
        candidates = tuple(range(m))
    best = min(row_sums[i] for i in candidates)
    selected = tuple(i for i in candidates if row_sums[i] == best)
    return AlterationResult(
        feature_names=tuple(names),
        row_sums=row_sums,
        selected=selected,
        restricted_to=mask,
    )


def alt(e: PIExplanation, controllable_mask=None) -> AlterationResult:
    """Alteration index: feature(s) whose influence row sums are minimal.

    Row sums always run over every column; the mask only restricts which
    rows compete in the argmin. All ties are returned.
    """
    return _argmin_selection(e.matrix.sum(axis=1), e.feature_names, controllable_mask)


def conflict_matrix(e: PIExplanation, zero_policy: str = STRICT) -> ConflictMatrix:
    """Signs of the influence matrix under the chosen zero policy.

    ``strict`` maps zero entries (including the forced diagonal) to -1,
    ``inclusive`` maps them to +1; the policies agree everywhere else.
    """
    if zero_policy not in ZERO_POLICIES:
        raise ValueError(f"zero_policy must be one of {ZERO_POLICIES}, got {zero_policy!r}")
    if zero_policy == STRICT:
        signs = np.where(e.matrix > 0, 1, -1)
    else:
        signs = np.where(e.matrix >= 0, 1, -1)
    return ConflictMatrix(feature_names=e.feature_names, matrix=signs, zero_policy=zero_policy)


def calt(c: ConflictMatrix, controllable_mask=None) -> AlterationResult:
    """Conflict alteration index: argmin of conflict-matrix row sums."""
    return _argmin_selection(
        c.matrix.sum(axis=1).astype(np.float64), c.feature_names, controllable_mask
    )


def pearson_matrix(d: Dataset) -> np.ndarray:
    """Global feature correlation matrix (diagnostic counterpart to the
    instance-local influence matrix)."""
    rows = d.rows
    for j, f in enumerate(d.schema):
        col = rows[:, j]
        if col.min() == col.max():
            raise DegenerateColumnError(
                f"feature {f.name!r} is constant; correlation undefined"
            )
    r = np.corrcoef(rows, rowvar=False)
    r = (r + r.T) / 2.0  # exact symmetry
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


class PeerInfluenceExplainer(BaseEstimator):
    """Estimator-style front door: fit on a background, explain instances.

    ``fit`` stores the background (a :class:`Dataset` or a plain matrix);
    ``explain`` / ``peer_influence`` then operate per instance, and
    ``transform`` maps a matrix of instances to their attribution rows.
    """

    def __init__(
        self,
        model=None,
        backend="exact",
        background_rows=100,
        permutations=2000,
        seed=0,
        max_exact_features=15,
        zero_policy=STRICT,
    ):
        self.model = model
        self.backend = backend
        self.background_rows = background_rows
        self.permutations = permutations
        self.seed = seed
        self.max_exact_features = max_exact_features
        self.zero_policy = zero_policy

    def _config(self) -> ExplainerConfig:
        return ExplainerConfig(
            backend=self.backend,
            background_rows=self.background_rows,
            seed=self.seed,
            permutations=self.permutations,
            max_exact_features=self.max_exact_features,
        )

    def fit(self, X, y=None):
        if self.model is None:
            raise ValueError("PeerInfluenceExplainer requires a fitted model")
        self.background_ = X if isinstance(X, Dataset) else as_float_matrix(X, "background")
        return self

    def explain(self, x) -> Attribution:
        self._check_fitted()
        return explain(self.model, self.background_, x, self._config())

    def peer_influence(self, x) -> PIExplanation:
        self._check_fitted()
        if not isinstance(self.background_, Dataset):
            raise ValueError("peer_influence requires the background to be a Dataset")
        return pi_explanation(self.model, self.background_, x, self._config())

    def transform(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_float_matrix(X)
        return np.stack([self.explain(X[i]).phi for i in range(X.shape[0])])

    def _check_fitted(self) -> None:
        if not hasattr(self, "background_"):
            raise ValueError("explainer is not fitted; call fit(background) first")
