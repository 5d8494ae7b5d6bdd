import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from peerinfluence import (
    Dataset,
    DegenerateColumnError,
    ExplainerConfig,
    FeatureSchema,
    GbdtClassifier,
    LogisticClassifier,
    PeerInfluenceExplainer,
    alt,
    calt,
    conflict_matrix,
    pearson_matrix,
    pi_explanation,
    pi_graph,
)

from . import cases


class TestCaseFixtures:
    def test_case1_alt_row_sums_and_selection(self):
        result = alt(cases.case1_pi())
        assert np.abs(result.row_sums - np.array(cases.CASE1_ALT_SUMS)).max() <= 0.005
        assert result.selected_names() == cases.CASE1_ALT_SELECTED

    def test_case2_alt_row_sums_and_selection(self):
        result = alt(cases.case2_pi())
        assert np.abs(result.row_sums - np.array(cases.CASE2_ALT_SUMS)).max() <= 0.005
        assert result.selected_names() == cases.CASE2_ALT_SELECTED

    def test_case2_calt_strict(self):
        c = conflict_matrix(cases.case2_pi(), "strict")
        result = calt(c)
        assert tuple(result.row_sums.astype(int)) == cases.CASE2_CALT_STRICT_SUMS
        assert set(result.selected_names()) == set(cases.CASE2_CALT_SELECTED)

    def test_case1_calt_inclusive(self):
        c = conflict_matrix(cases.case1_pi(), "inclusive")
        result = calt(c)
        assert tuple(result.row_sums.astype(int)) == cases.CASE1_CALT_INCLUSIVE_SUMS
        assert set(result.selected_names()) == set(cases.CASE1_CALT_SELECTED)

    def test_partition_from_attribution_table(self):
        pi = cases.make_pi(
            cases.TABLE1_ORDER,
            np.zeros((5, 5)),
            cases.TABLE1_PHI,
        )
        g = pi_graph(pi)
        assert {pi.feature_names[i] for i in g.proponents} == cases.TABLE1_PROPONENTS
        assert {pi.feature_names[i] for i in g.opponents} == cases.TABLE1_OPPONENTS

    def test_fixture_matrices_verify(self):
        cases.case1_pi().verify()
        cases.case2_pi().verify()


class TestGraph:
    def test_all_non_negative_phi_means_no_opponents(self):
        pi = cases.make_pi(("a", "b", "c"), np.zeros((3, 3)), (0.0, 1.0, 2.0))
        g = pi_graph(pi)
        assert g.opponents == ()
        assert len(g.proponents) == 3

    def test_positive_matrix_has_no_attack_arcs(self):
        m = np.ones((4, 4))
        np.fill_diagonal(m, 0.0)
        pi = cases.make_pi(("a", "b", "c", "d"), m, (1.0, -1.0, 1.0, -1.0))
        g = pi_graph(pi)
        assert g.attack_arcs == ()
        assert len(g.support_arcs) == 12

    @given(
        hnp.arrays(
            np.float64,
            (4, 4),
            elements=st.floats(-5, 5, allow_nan=False),
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_arc_partition_complete_and_disjoint(self, m):
        np.fill_diagonal(m, 0.0)
        pi = cases.make_pi(("a", "b", "c", "d"), m, (1.0, -1.0, 0.5, 0.0))
        g = pi_graph(pi)
        support = set(g.support_arcs)
        attack = set(g.attack_arcs)
        assert support.isdisjoint(attack)
        assert support | attack == {(i, j) for i in range(4) for j in range(4) if i != j}
        assert set(g.proponents).isdisjoint(g.opponents)
        assert set(g.proponents) | set(g.opponents) == set(range(4))


class TestAlterationIndices:
    def test_zero_matrix_ties_all(self):
        pi = cases.make_pi(("a", "b", "c"), np.zeros((3, 3)), (1.0, -1.0, 1.0))
        assert alt(pi).selected == (0, 1, 2)

    def test_mask_restricts_selection(self):
        result = alt(cases.case1_pi(), controllable_mask=(1,))  # Weight only
        assert result.selected == (1,)
        assert result.restricted_to == (1,)

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError):
            alt(cases.case1_pi(), controllable_mask=())

    def test_mask_out_of_range(self):
        with pytest.raises(IndexError):
            alt(cases.case1_pi(), controllable_mask=(9,))

    def test_row_sums_cover_all_columns_even_when_masked(self):
        full = alt(cases.case2_pi())
        masked = alt(cases.case2_pi(), controllable_mask=(0, 1))
        assert np.array_equal(full.row_sums, masked.row_sums)

    @given(st.sets(st.integers(0, 6), min_size=1))
    @settings(max_examples=40, deadline=None)
    def test_mask_selection_is_minimal_within_mask(self, mask):
        result = alt(cases.case2_pi(), controllable_mask=tuple(mask))
        best = min(result.row_sums[i] for i in mask)
        assert all(result.row_sums[i] == best for i in result.selected)
        assert set(result.selected) <= mask

    def test_all_positive_conflict_ties_all(self):
        pi = cases.make_pi(("a", "b", "c"), np.ones((3, 3)), (1.0, 1.0, 1.0))
        # inclusive policy maps the zero diagonal to +1 as well
        c = conflict_matrix(pi, "inclusive")
        assert np.all(c.matrix == 1)
        assert calt(c).selected == (0, 1, 2)


class TestConflictMatrix:
    def test_policies_agree_without_zeros(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(5, 5))
        np.fill_diagonal(m, 0.0)
        pi = cases.make_pi(tuple("abcde"), m, rng.normal(size=5))
        strict = conflict_matrix(pi, "strict")
        inclusive = conflict_matrix(pi, "inclusive")
        off = ~np.eye(5, dtype=bool)
        assert np.array_equal(strict.matrix[off], inclusive.matrix[off])

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            conflict_matrix(cases.case1_pi(), "sometimes")

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_zero_policy_equivalence_when_zeros_only_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.normal(size=(5, 5))
        m[m == 0.0] = 1.0  # zeros off the diagonal are measure-zero; force none
        np.fill_diagonal(m, 0.0)
        pi = cases.make_pi(tuple("abcde"), m, rng.normal(size=5))
        strict = calt(conflict_matrix(pi, "strict"))
        inclusive = calt(conflict_matrix(pi, "inclusive"))
        assert strict.selected == inclusive.selected
        assert np.all(inclusive.row_sums - strict.row_sums == 2)


class TestScalingCovariance:
    @pytest.mark.parametrize("lam", [0.5, 2.0, 17.3])
    def test_scaling(self, lam):
        pi = cases.case2_pi()
        scaled = pi.scaled(lam)
        assert np.allclose(scaled.matrix, lam * pi.matrix, atol=1e-12)
        assert np.array_equal(
            conflict_matrix(scaled, "strict").matrix, conflict_matrix(pi, "strict").matrix
        )
        assert alt(scaled).selected == alt(pi).selected
        assert calt(conflict_matrix(scaled, "strict")).selected == calt(
            conflict_matrix(pi, "strict")
        ).selected


class TestPiExplanation:
    def test_diagonal_forced_zero(self, gbdt, background, synth_dataset):
        pi = pi_explanation(gbdt, background, synth_dataset.instance(0), ExplainerConfig())
        assert np.all(np.diag(pi.matrix) == 0.0)
        pi.verify()

    def test_matrix_consistency_invariant(self, gbdt, background, synth_dataset):
        pi = pi_explanation(gbdt, background, synth_dataset.instance(4), ExplainerConfig())
        for i in range(pi.m):
            for j in range(pi.m):
                if i == j:
                    continue
                expected = pi.baseline.phi[j] - pi.reduced[i].phi[j]
                assert abs(pi.matrix[i, j] - expected) <= 1e-12

    def test_ignored_feature_has_zero_row_and_column(self):
        rng = np.random.default_rng(31)
        X = np.column_stack(
            [rng.normal(size=200), np.zeros(200), rng.normal(size=200), rng.normal(size=200)]
        )
        y = (X[:, 0] + X[:, 2] > 0).astype(np.int64)
        model = GbdtClassifier(rounds=20, max_depth=2).fit(X, y)
        assert 1 not in model.used_features()
        schema = tuple(FeatureSchema(f"f{i}") for i in range(4))
        bg_rows = np.column_stack(
            [rng.normal(size=40), rng.normal(size=40), rng.normal(size=40), rng.normal(size=40)]
        )
        background = Dataset(schema=schema, rows=bg_rows, labels=rng.integers(0, 2, size=40))
        pi = pi_explanation(model, background, background.instance(0), ExplainerConfig())
        assert np.abs(pi.matrix[1, :]).max() <= 1e-9
        assert np.abs(pi.matrix[:, 1]).max() <= 1e-9

    def test_explainer_error_names_offending_feature(self, numeric_dataset):
        class PickyModel:
            n_features_in_ = 3

            def decision_function(self, X):
                X = np.asarray(X)
                # chokes exactly when column 1 arrives fully nullified
                if X.shape[0] > 1 and np.all(X[:, 1] == X[0, 1]):
                    raise ValueError("cannot score a constant column")
                return X[:, 0]

        with pytest.raises(ValueError, match=r"feature 1 \(weight\)"):
            pi_explanation(
                PickyModel(), numeric_dataset, numeric_dataset.instance(0), ExplainerConfig()
            )

    def test_linear_model_has_zero_off_diagonals(self):
        rng = np.random.default_rng(33)
        X = rng.normal(size=(300, 2))
        y = (2 * X[:, 0] - X[:, 1] > 0).astype(np.int64)
        model = LogisticClassifier(epochs=200).fit(X, y)
        schema = (FeatureSchema("a"), FeatureSchema("b"))
        background = Dataset(
            schema=schema, rows=rng.normal(size=(50, 2)), labels=rng.integers(0, 2, size=50)
        )
        pi = pi_explanation(model, background, background.instance(3), ExplainerConfig())
        assert abs(pi.matrix[0, 1]) <= 1e-9
        assert abs(pi.matrix[1, 0]) <= 1e-9


class TestPearson:
    def test_duplicated_column_correlates_perfectly(self):
        rng = np.random.default_rng(1)
        col = rng.normal(size=60)
        d = Dataset(
            schema=(FeatureSchema("a"), FeatureSchema("b"), FeatureSchema("c")),
            rows=np.column_stack([col, col, rng.normal(size=60)]),
            labels=rng.integers(0, 2, size=60),
        )
        r = pearson_matrix(d)
        assert r[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_exactly_symmetric_unit_diagonal(self, synth_dataset):
        r = pearson_matrix(synth_dataset)
        assert np.array_equal(r, r.T)
        assert np.all(np.diag(r) == 1.0)
        assert r.min() >= -1.0 and r.max() <= 1.0

    def test_independent_columns_near_zero(self):
        rng = np.random.default_rng(2)
        d = Dataset(
            schema=(FeatureSchema("a"), FeatureSchema("b")),
            rows=rng.normal(size=(10000, 2)),
            labels=rng.integers(0, 2, size=10000),
        )
        assert abs(pearson_matrix(d)[0, 1]) < 0.05

    def test_constant_column_error_names_feature(self, numeric_dataset):
        rows = np.array(numeric_dataset.rows)
        rows[:, 1] = 5.0
        d = Dataset(schema=numeric_dataset.schema, rows=rows, labels=numeric_dataset.labels)
        with pytest.raises(DegenerateColumnError, match="weight"):
            pearson_matrix(d)


class TestEstimatorWrapper:
    def test_fit_explain_transform(self, gbdt, background, synth_dataset):
        explainer = PeerInfluenceExplainer(model=gbdt, background_rows=50, seed=1).fit(background)
        att = explainer.explain(synth_dataset.instance(0))
        assert att.m == 7
        phis = explainer.transform(synth_dataset.rows[:3])
        assert phis.shape == (3, 7)

    def test_get_params_contract(self, gbdt):
        explainer = PeerInfluenceExplainer(model=gbdt, seed=5)
        params = explainer.get_params(deep=False)
        assert params["seed"] == 5
        clone = PeerInfluenceExplainer(**params)
        assert clone.get_params(deep=False) == params

    def test_requires_fit(self, gbdt, synth_dataset):
        with pytest.raises(ValueError, match="not fitted"):
            PeerInfluenceExplainer(model=gbdt).explain(synth_dataset.instance(0))

    def test_peer_influence_end_to_end(self, gbdt, background, synth_dataset):
        explainer = PeerInfluenceExplainer(model=gbdt).fit(background)
        pi = explainer.peer_influence(synth_dataset.instance(0))
        assert pi.m == 7
        pi.verify()
