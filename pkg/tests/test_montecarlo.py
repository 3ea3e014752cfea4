import numpy as np
import pytest
from hypothesis import given, strategies as st

from stickprob.closedform import pn_pickup
from stickprob.errors import DomainError
from stickprob.montecarlo import (
    ALL_POLYGON,
    NO_POLYGON,
    RANDOM_SUBSET_POLYGON,
    DistributionSpec,
    EventSpec,
    all_polygon,
    estimate,
    no_polygon,
    random_subset_polygon,
    sample_lengths,
)


class ScriptedStream:
    """Feeds predetermined uniforms to the scalar sampling helpers."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size):
        out, self.values = self.values[:size], self.values[size:]
        assert len(out) == size, "scripted stream exhausted"
        return np.array(out, dtype=np.float64)


class TestSpecs:
    def test_distribution_validation(self):
        with pytest.raises(DomainError):
            DistributionSpec("lognormal")
        with pytest.raises(DomainError):
            DistributionSpec.uniform_truncated(1.0)
        with pytest.raises(DomainError):
            DistributionSpec.exponential(0.0)

    def test_event_validation(self):
        with pytest.raises(DomainError):
            EventSpec("sometimes_polygon", 2)
        with pytest.raises(DomainError):
            EventSpec(NO_POLYGON, 1)

    def test_uniform_budget(self):
        assert DistributionSpec.broken_stick().uniforms_per_trial(5) == 4
        assert DistributionSpec.uniform01().uniforms_per_trial(5) == 5
        assert EventSpec(RANDOM_SUBSET_POLYGON, 3).uniforms_per_trial() == 4
        assert EventSpec(NO_POLYGON, 3).uniforms_per_trial() == 0


class TestSampling:
    def test_broken_single_cut(self):
        lengths = sample_lengths(
            DistributionSpec.broken_stick(), 2, ScriptedStream([0.3])
        )
        assert np.allclose(lengths, [0.3, 0.7])

    def test_broken_sums_to_one_and_sorted(self):
        rng = np.random.default_rng(5)
        for n in (1, 2, 5, 9):
            lengths = sample_lengths(DistributionSpec.broken_stick(), n, rng)
            assert lengths.shape == (n,)
            assert abs(lengths.sum() - 1.0) < 1e-12
            assert (np.diff(lengths) >= 0).all()

    def test_truncated_support(self):
        rng = np.random.default_rng(6)
        lengths = sample_lengths(DistributionSpec.uniform_truncated(0.5), 200, rng)
        assert (lengths >= 0.5).all() and (lengths <= 1.0).all()

    def test_exponential_pooled_mean(self):
        rng = np.random.default_rng(7)
        lengths = sample_lengths(DistributionSpec.exponential(1.0), 10**6, rng)
        assert abs(lengths.mean() - 1.0) <= 4e-3  # 4 sigma of the mean

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            sample_lengths(DistributionSpec.uniform01(), 0, np.random.default_rng(0))


class TestNoPolygon:
    def test_fibonacci_boundary(self):
        assert no_polygon([1, 1, 2, 3, 5], 2)

    def test_equilateral_forms(self):
        assert not no_polygon([1, 1, 1], 2)

    def test_powers_of_two_for_p3(self):
        assert no_polygon([1, 1, 2, 4, 8, 16], 3)

    def test_vacuous_below_window(self):
        assert no_polygon([0.2, 0.9], 2)
        assert no_polygon([], 2)

    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            no_polygon([3, 1, 2], 2)

    def test_rejects_bad_p(self):
        with pytest.raises(DomainError):
            no_polygon([1, 2, 3], 1)


class TestAllPolygon:
    def test_equilateral(self):
        assert all_polygon([1, 1, 1], 2)

    def test_degenerate_tie_fails(self):
        assert not all_polygon([1, 1, 2], 2)

    def test_tie_within_larger_sample(self):
        # 3 + 4 == 7: the strict rule counts this as not forming
        assert not all_polygon([3, 4, 5, 6, 7], 2)

    def test_forms_when_shortest_dominate(self):
        assert all_polygon([3, 4, 5, 6, 6.9], 2)

    def test_vacuous(self):
        assert all_polygon([0.5], 2)

    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            all_polygon([2, 1, 3], 2)


class TestMutualExclusion:
    def test_never_both(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            p = int(rng.integers(2, 5))
            n = int(rng.integers(p + 1, 10))
            lengths = np.sort(rng.random(n))
            assert not (no_polygon(lengths, p) and all_polygon(lengths, p))


@given(
    st.lists(st.floats(0.001, 1.0), min_size=2, max_size=9),
    st.integers(2, 4),
    st.sampled_from([1e-3, 0.5, 3.0, 1e3]),
)
def test_predicates_scale_invariant(values, p, scale):
    lengths = sorted(values)
    scaled = [scale * x for x in lengths]
    assert no_polygon(lengths, p) == no_polygon(scaled, p)
    assert all_polygon(lengths, p) == all_polygon(scaled, p)


class TestRandomSubset:
    def test_full_set_matches_all_polygon(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            p = int(rng.integers(2, 5))
            lengths = np.sort(rng.random(p + 1))
            got = random_subset_polygon(lengths, p, rng)
            assert got == all_polygon(lengths, p)

    def test_scripted_choice_hits_small_triple(self):
        # zeros pick indices 0, 1, 2: the (1, 1, 1) triple forms
        stream = ScriptedStream([0.0, 0.0, 0.0])
        assert random_subset_polygon([1, 1, 1, 100], 2, stream)

    def test_requires_enough_lengths(self):
        with pytest.raises(DomainError):
            random_subset_polygon([1, 2], 2, np.random.default_rng(0))


class TestEstimate:
    def test_validation(self):
        event = EventSpec(NO_POLYGON, 2)
        dist = DistributionSpec.uniform01()
        with pytest.raises(DomainError):
            estimate(event, dist, 4, 0, 1)
        with pytest.raises(DomainError):
            estimate(event, dist, 4, 10, 1, workers=0)
        with pytest.raises(DomainError):
            estimate(event, dist, 4, 10, -1)
        with pytest.raises(DomainError):
            estimate(event, dist, 4, 10, 2**64)
        with pytest.raises(DomainError):
            estimate(EventSpec(RANDOM_SUBSET_POLYGON, 3), dist, 3, 10, 1)

    def test_p_hat_is_exact_ratio(self):
        est = estimate(
            EventSpec(NO_POLYGON, 2), DistributionSpec.uniform01(), 4, 12345, 3
        )
        assert est.p_hat == est.successes / est.trials
        assert est.trials == 12345
        assert est.std_err >= 0

    def test_workers_bit_identical(self):
        cases = [
            (EventSpec(NO_POLYGON, 2), DistributionSpec.uniform01(), 5),
            (EventSpec(ALL_POLYGON, 3), DistributionSpec.broken_stick(), 6),
            (EventSpec(RANDOM_SUBSET_POLYGON, 2), DistributionSpec.exponential(), 5),
        ]
        for event, dist, n in cases:
            runs = [
                estimate(event, dist, n, 200_000, 42, workers=w) for w in (1, 4, 8)
            ]
            assert runs[0].successes == runs[1].successes == runs[2].successes
            assert runs[0].p_hat == runs[1].p_hat == runs[2].p_hat

    def test_counter_scheme_splits_cleanly(self):
        # an estimate over [0, N) equals the sum of [0, k) and [k, N) halves
        from stickprob.montecarlo import _run_chunk

        event = EventSpec(NO_POLYGON, 2)
        dist = DistributionSpec.uniform01()
        whole = _run_chunk(event, dist, 4, 99, 1, (0, 1000))
        split = _run_chunk(event, dist, 4, 99, 1, (0, 337)) + _run_chunk(
            event, dist, 4, 99, 1, (337, 1000)
        )
        assert whole == split

    def test_quick_concordance(self):
        est = estimate(
            EventSpec(NO_POLYGON, 2), DistributionSpec.uniform01(), 4, 200_000, 7
        )
        exact = float(pn_pickup(2, 4).fraction)
        assert abs(est.p_hat - exact) <= 4 * est.std_err

    def test_exponential_rate_invariance(self):
        event = EventSpec(NO_POLYGON, 2)
        lo = estimate(event, DistributionSpec.exponential(1.0), 4, 300_000, 21)
        hi = estimate(event, DistributionSpec.exponential(5.0), 4, 300_000, 22)
        joint = (lo.std_err**2 + hi.std_err**2) ** 0.5
        assert abs(lo.p_hat - hi.p_hat) <= 4 * joint

    def test_broken_single_piece(self):
        # degenerate but well-defined: one piece of length 1, no polygon
        est = estimate(
            EventSpec(NO_POLYGON, 2), DistributionSpec.broken_stick(), 1, 100, 5
        )
        assert est.p_hat == 1.0
