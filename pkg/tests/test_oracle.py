import itertools

import numpy as np
import pytest

from rationale_lab import (
    SchemaValidationError,
    build_domain,
    enumerate_tort,
    eval_label,
    expected_stats,
    gen_tort,
    gen_welfare,
    generate,
    uniform_positive_rate,
    verify_dataset,
)
from rationale_lab.generation import Dataset, DatasetMeta, GeneratorRequest


class TestEnumerateTort:
    def test_positive_count(self):
        ds = enumerate_tort()
        assert len(ds) == 1024
        assert int(ds.labels.sum()) == 112

    def test_agrees_with_rule_module_on_all_cases(self, tort_schema):
        """Two independent transcriptions of the formulas, one verdict."""
        ds = enumerate_tort()
        assert np.array_equal(
            ds.labels.astype(bool), tort_schema.label_matrix(ds.values)
        )
        # and against the scalar evaluator on a stride of cases
        for i in range(0, 1024, 101):
            case = tort_schema.row_to_case(ds.values[i])
            assert eval_label(tort_schema, case) == bool(ds.labels[i])

    def test_all_false_case_is_negative(self):
        ds = enumerate_tort()
        assert ds.values[0].tolist() == [0] * 10
        assert ds.labels[0] == 0

    def test_sixteen_contexts_satisfy_both_dependent_conditions(self):
        """Brute force over the 32 (vun,vst,vrt,jus,prp) assignments."""
        count = 0
        for vun, vst, vrt, jus, prp in itertools.product((0, 1), repeat=5):
            c3 = vun or (vst and not jus) or (vrt and not jus)
            c5 = not (vst and not prp)
            count += c3 and c5
        assert count == 16


class TestExpectedStats:
    @pytest.mark.parametrize(
        "domain,kind,size,fraction",
        [
            ("tort", "unique", 1024, 112 / 1024),
            ("tort", "unlawfulness", 168, 112 / 168),
            ("tort", "imputability", 128, 112 / 128),
            ("welfare", "age-gender", 40_000, 0.425),
            ("welfare", "patient-distance", 40_000, 0.5),
            ("simplified", "age-gender", 4242, 77 / 202),
            ("simplified", "patient-distance", 3234, 0.5),
        ],
    )
    def test_closed_form_values(self, domain, kind, size, fraction):
        stats = expected_stats(domain, kind)
        assert stats.size == size
        assert stats.positive_fraction == fraction

    @pytest.mark.parametrize(
        "domain,kind",
        [
            ("tort", "unique"),
            ("tort", "unlawfulness"),
            ("tort", "imputability"),
            ("welfare", "age-gender"),
            ("welfare", "patient-distance"),
            ("simplified", "age-gender"),
            ("simplified", "patient-distance"),
        ],
    )
    def test_matches_generated_datasets_exactly(self, domain, kind):
        ds = generate(GeneratorRequest(domain, kind, seed=123))
        stats = expected_stats(domain, kind)
        assert len(ds) == stats.size
        assert ds.meta.positive_fraction == stats.positive_fraction

    @pytest.mark.parametrize(
        "domain,kind", [("tort", "regular"), ("welfare", "type-a"), ("welfare", "type-b")]
    )
    def test_sampled_kinds_rejected(self, domain, kind):
        with pytest.raises(ValueError, match="no enumerated statistics"):
            expected_stats(domain, kind)


class TestVerifyDataset:
    def test_unlawfulness_audit(self, tort_schema):
        report = verify_dataset(gen_tort("unlawfulness"), tort_schema)
        assert report.passed
        assert report.size_ok
        assert report.label_mismatches == 0
        assert report.positive_fraction == 112 / 168
        assert report.duplicate_count == 0

    def test_flipped_label_detected(self, tort_schema):
        ds = gen_tort("unique")
        labels = ds.labels.copy()
        labels[37] ^= 1
        broken = Dataset(ds.schema_id, ds.kind, ds.values.copy(), labels, ds.meta)
        report = verify_dataset(broken, tort_schema)
        assert not report.passed
        assert report.label_mismatches == 1
        assert report.mismatch_rows == (37,)

    def test_wrong_size_detected(self, tort_schema):
        ds = gen_tort("unique")
        truncated = Dataset(
            ds.schema_id,
            ds.kind,
            ds.values[:1000].copy(),
            ds.labels[:1000].copy(),
            DatasetMeta(0, "1", 1000, float(ds.labels[:1000].mean())),
        )
        report = verify_dataset(truncated, tort_schema)
        assert not report.size_ok and not report.passed

    def test_type_b_histogram_mass_at_one(self, welfare_schema):
        report = verify_dataset(gen_welfare("type-b", size=10_000, seed=5), welfare_schema)
        assert report.passed
        assert set(report.failed_condition_histogram) == {1}
        assert report.failed_condition_histogram[1] == 5000

    def test_type_a_mean_failures(self, welfare_schema):
        report = verify_dataset(gen_welfare("type-a", size=24_000, seed=5), welfare_schema)
        hist = report.failed_condition_histogram
        mean = sum(k * n for k, n in hist.items()) / sum(hist.values())
        assert 3.8 <= mean <= 4.3

    def test_per_condition_counts_cover_all_negatives(self, welfare_schema):
        report = verify_dataset(gen_welfare("type-b", size=2400, seed=1), welfare_schema)
        # type B: each negative fails exactly one condition, buckets equal
        assert sorted(report.per_condition_failure_counts) == [
            "C1", "C2", "C3", "C4", "C5", "C6",
        ]
        assert sum(report.per_condition_failure_counts.values()) == 1200

    def test_schema_mismatch_rejected(self, welfare_schema):
        with pytest.raises(SchemaValidationError, match="schema"):
            verify_dataset(gen_tort("unique"), welfare_schema)

    def test_report_serialises(self, tort_schema):
        doc = verify_dataset(gen_tort("imputability"), tort_schema).to_dict()
        assert doc["passed"] is True
        assert doc["dataset_kind"] == "imputability"


def test_uniform_welfare_positives_are_rare():
    """The 50/50 balance of type A/B is engineered, not chance: a uniform
    draw over all 64 features is almost never eligible."""
    rate = uniform_positive_rate("welfare", 1_000_000, seed=97)
    assert rate < 0.05
    assert rate > 0  # but not impossible
