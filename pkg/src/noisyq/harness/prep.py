"""Dataset construction shared by the histogram study and the grid.

Synthetic datasets are drawn fresh per cell seed so sweeps average over
draws; file-backed datasets are split once with the configured split seed
so the cell seed only affects training stochasticity.
"""

from __future__ import annotations

from noisyq.data import (
    load_sequences,
    make_synthetic_benchmark,
    prepare_from_records,
)


def build_dataset(dataset_doc: dict, seed: int):
    """Return (train, test) LabeledDatasets for one grid cell."""
    if dataset_doc["kind"] == "synthetic":
        return make_synthetic_benchmark(
            seed=seed,
            n_train=dataset_doc["n_train"],
            n_test=dataset_doc["n_test"],
            dim=dataset_doc["dim"],
        )
    records = load_sequences(dataset_doc["path"], dataset_doc["format"])
    subset = dataset_doc["subset"]
    if subset and len(records) > subset:
        records = records[:subset]
    train, test, _, _ = prepare_from_records(
        records,
        k=dataset_doc["k"],
        dims=dataset_doc["dims"],
        test_fraction=dataset_doc["test_fraction"],
        split_seed=dataset_doc["split_seed"],
    )
    return train, test
