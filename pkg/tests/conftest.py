import numpy as np
import pytest

from peerinfluence import (
    Dataset,
    FeatureSchema,
    GbdtClassifier,
    GeneratorConfig,
    LogisticClassifier,
    generate_synthetic,
    split,
    subsample_background,
)


@pytest.fixture(scope="session")
def synth_dataset() -> Dataset:
    return generate_synthetic(GeneratorConfig(n=600, seed=3))


@pytest.fixture(scope="session")
def synth_train(synth_dataset) -> Dataset:
    train, _ = split(synth_dataset, 0.7, 0)
    return train


@pytest.fixture(scope="session")
def gbdt(synth_train) -> GbdtClassifier:
    return GbdtClassifier(rounds=40, max_depth=3, learning_rate=0.2).fit(synth_train)


@pytest.fixture(scope="session")
def logistic(synth_train) -> LogisticClassifier:
    return LogisticClassifier(epochs=400, learning_rate=0.5).fit(synth_train)


@pytest.fixture(scope="session")
def background(synth_train) -> Dataset:
    return subsample_background(synth_train, 100, 0)


@pytest.fixture
def numeric_dataset() -> Dataset:
    schema = (
        FeatureSchema("age"),
        FeatureSchema("weight"),
        FeatureSchema("grade", kind="categorical", categories=("low", "mid", "high")),
    )
    rows = np.array(
        [
            [61.0, 70.0, 0.0],
            [67.0, 65.0, 1.0],
            [73.0, 90.0, 2.0],
            [55.0, 82.0, 1.0],
        ]
    )
    labels = np.array([0, 1, 1, 0])
    return Dataset(schema=schema, rows=rows, labels=labels)
