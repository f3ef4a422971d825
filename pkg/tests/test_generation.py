import numpy as np
import pytest

from rationale_lab import (
    GenerationError,
    GeneratorRequest,
    build_domain,
    gen_tort,
    gen_welfare,
    generate,
)
from rationale_lab.generation import DEDICATED_TARGET


class TestRequestValidation:
    @pytest.mark.parametrize(
        "domain,kind,size",
        [
            ("welfare", "type-a", None),  # size required
            ("welfare", "type-a", 2401),  # odd
            ("tort", "regular", 501),  # odd
            ("tort", "unique", 10),  # size forbidden
            ("welfare", "age-gender", 100),  # size forbidden
            ("welfare", "unique", None),  # tort kind on welfare
            ("tort", "type-a", 100),  # welfare kind on tort
            ("maritime", "type-a", 100),  # unknown domain
        ],
    )
    def test_invalid_requests_rejected(self, domain, kind, size):
        with pytest.raises(GenerationError):
            GeneratorRequest(domain, kind, size).validate()

    def test_generate_dispatches(self):
        ds = generate(GeneratorRequest("simplified", "type-b", 200, seed=5))
        assert ds.schema_id == "simplified" and len(ds) == 200


class TestBalancedSets:
    @pytest.mark.parametrize("kind", ["type-a", "type-b"])
    @pytest.mark.parametrize("simplified", [False, True])
    def test_exact_balance(self, kind, simplified):
        ds = gen_welfare(kind, size=2400, seed=7, simplified=simplified)
        assert len(ds) == 2400
        assert int(ds.labels.sum()) == 1200
        assert ds.meta.positive_fraction == 0.5

    def test_labels_match_rule(self, welfare_schema):
        ds = gen_welfare("type-a", size=2000, seed=3)
        assert np.array_equal(
            ds.labels.astype(bool), welfare_schema.label_matrix(ds.values)
        )

    def test_type_b_negatives_fail_exactly_one(self, welfare_schema):
        ds = gen_welfare("type-b", size=4000, seed=11)
        truth = welfare_schema.condition_matrix(ds.values)
        negatives = truth[~ds.labels.astype(bool)]
        assert np.array_equal((~negatives).sum(axis=1), np.ones(len(negatives)))

    def test_type_b_buckets_near_equal(self, welfare_schema):
        ds = gen_welfare("type-b", size=2400, seed=1)
        truth = welfare_schema.condition_matrix(ds.values)
        negatives = truth[~ds.labels.astype(bool)]
        per_condition = (~negatives).sum(axis=0)
        assert per_condition.tolist() == [200] * 6

    def test_type_a_negatives_fail_at_least_one(self, welfare_schema):
        ds = gen_welfare("type-a", size=4000, seed=11)
        truth = welfare_schema.condition_matrix(ds.values)
        negatives = truth[~ds.labels.astype(bool)]
        fails = (~negatives).sum(axis=1)
        assert fails.min() >= 1

    def test_type_a_mean_failures_near_four(self, welfare_schema):
        """Chance failures on the free features push the average to ~4."""
        ds = gen_welfare("type-a", size=24_000, seed=5)
        truth = welfare_schema.condition_matrix(ds.values)
        negatives = truth[~ds.labels.astype(bool)]
        assert len(negatives) >= 10_000
        mean_fails = float((~negatives).sum(axis=1).mean())
        assert 3.8 <= mean_fails <= 4.3

    def test_simplified_type_a_fails_at_most_two(self, simplified_schema):
        ds = gen_welfare("type-a", size=4000, seed=2, simplified=True)
        truth = simplified_schema.condition_matrix(ds.values)
        negatives = truth[~ds.labels.astype(bool)]
        assert set((~negatives).sum(axis=1).tolist()) <= {1, 2}


class TestDedicatedWelfareSets:
    def test_age_gender_full(self, welfare_schema):
        ds = gen_welfare("age-gender", seed=9)
        assert len(ds) == 40_000
        assert ds.meta.positive_fraction == 0.425
        ages = ds.values[:, welfare_schema.index_of("Age")]
        genders = ds.values[:, welfare_schema.index_of("Gender")]
        cells, counts = np.unique(np.stack([ages, genders], 1), axis=0, return_counts=True)
        assert len(cells) == 40 and set(counts.tolist()) == {1000}
        assert set(ages.tolist()) == set(range(5, 101, 5))
        # all conditions except the target hold everywhere
        truth = welfare_schema.condition_matrix(ds.values)
        others = [j for j, c in enumerate(welfare_schema.conditions) if c.id != "C1"]
        assert truth[:, others].all()
        assert np.array_equal(ds.labels.astype(bool), truth[:, 0])

    def test_patient_distance_full(self, welfare_schema):
        ds = gen_welfare("patient-distance", seed=9)
        assert len(ds) == 40_000
        assert ds.meta.positive_fraction == 0.5
        truth = welfare_schema.condition_matrix(ds.values)
        others = [j for j, c in enumerate(welfare_schema.conditions) if c.id != "C6"]
        assert truth[:, others].all()

    def test_age_gender_simplified(self):
        ds = gen_welfare("age-gender", simplified=True)
        assert len(ds) == 4242
        # one unique instance per (age, gender, distance-grid) combination
        assert len(np.unique(ds.values, axis=0)) == 4242
        assert ds.meta.positive_fraction == 77 / 202

    def test_patient_distance_simplified(self):
        ds = gen_welfare("patient-distance", simplified=True)
        assert len(ds) == 3234
        assert len(np.unique(ds.values, axis=0)) == 3234
        assert ds.meta.positive_fraction == 0.5

    @pytest.mark.parametrize("kind", ["age-gender", "patient-distance"])
    def test_dedicated_label_tracks_target_condition(self, kind, simplified_schema):
        ds = gen_welfare(kind, simplified=True)
        target = DEDICATED_TARGET[("simplified", kind)]
        j = [c.id for c in simplified_schema.conditions].index(target)
        truth = simplified_schema.condition_matrix(ds.values)
        assert np.array_equal(ds.labels.astype(bool), truth[:, j])


class TestTortSets:
    def test_unique_enumeration(self):
        ds = gen_tort("unique")
        assert len(ds) == 1024
        assert int(ds.labels.sum()) == 112
        assert ds.meta.positive_fraction == 112 / 1024
        assert len(np.unique(ds.values, axis=0)) == 1024
        # lexicographic over the canonical feature order
        first_as_int = [int("".join(map(str, row)), 2) for row in ds.values[:5]]
        assert first_as_int == [0, 1, 2, 3, 4]

    def test_unlawfulness_set(self, tort_schema):
        ds = gen_tort("unlawfulness")
        assert (len(ds), int(ds.labels.sum())) == (168, 112)
        truth = tort_schema.condition_matrix(ds.values)
        others = [j for j, c in enumerate(tort_schema.conditions) if c.id != "c3"]
        assert truth[:, others].all()
        assert np.array_equal(ds.labels.astype(bool), truth[:, 2])

    def test_imputability_set(self, tort_schema):
        ds = gen_tort("imputability")
        assert (len(ds), int(ds.labels.sum())) == (128, 112)
        truth = tort_schema.condition_matrix(ds.values)
        others = [j for j, c in enumerate(tort_schema.conditions) if c.id != "c2"]
        assert truth[:, others].all()
        assert np.array_equal(ds.labels.astype(bool), truth[:, 1])

    def test_regular_is_balanced_resample(self, tort_schema):
        ds = gen_tort("regular", size=5000, seed=21)
        assert int(ds.labels.sum()) == 2500
        # every row is one of the 1024 unique cases with its true label
        assert np.array_equal(ds.labels.astype(bool), tort_schema.label_matrix(ds.values))

    def test_regular_small(self):
        ds = gen_tort("regular", size=500, seed=21)
        assert (len(ds), int(ds.labels.sum())) == (500, 250)


class TestDeterminism:
    @pytest.mark.parametrize(
        "make",
        [
            lambda seed: gen_welfare("type-a", size=600, seed=seed),
            lambda seed: gen_welfare("type-b", size=600, seed=seed, simplified=True),
            lambda seed: gen_welfare("age-gender", seed=seed),
            lambda seed: gen_tort("regular", size=600, seed=seed),
        ],
    )
    def test_same_seed_same_dataset(self, make):
        a, b = make(99), make(99)
        assert a.equals(b)

    @pytest.mark.parametrize(
        "make",
        [
            lambda seed: gen_welfare("type-a", size=600, seed=seed),
            lambda seed: gen_tort("regular", size=600, seed=seed),
        ],
    )
    def test_different_seed_different_cases(self, make):
        assert not np.array_equal(make(1).values, make(2).values)

    @pytest.mark.parametrize(
        "make",
        [
            lambda seed: gen_tort("unique", seed=seed),
            lambda seed: gen_tort("unlawfulness", seed=seed),
            lambda seed: gen_tort("imputability", seed=seed),
            lambda seed: gen_welfare("age-gender", seed=seed, simplified=True),
            lambda seed: gen_welfare("patient-distance", seed=seed, simplified=True),
        ],
    )
    def test_enumerated_kinds_seed_independent(self, make):
        a, b = make(1), make(2)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.labels, b.labels)
        assert len(np.unique(a.values, axis=0)) == len(a)

    def test_meta_consistency(self):
        ds = gen_welfare("type-b", size=800, seed=4)
        assert ds.meta.size == len(ds)
        assert ds.meta.positive_fraction == float(ds.labels.mean())
        assert ds.meta.seed == 4
