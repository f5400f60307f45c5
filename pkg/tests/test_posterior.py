import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evintel.cluster import DomainPrior, EvidenceCorpus, Report
from evintel.ds import Frame, ValidationError, combine_dempster, make_mass, vacuous
from evintel.posterior import (
    CountingBpa,
    counting_bpa,
    counting_bpa_enumeration,
    counting_to_mass,
    posterior_distribution,
    prior_to_mass,
    subset_support,
)

AB = Frame(("A", "B"))


def corpus_with_theta(*theta_masses):
    reports = []
    for i, t in enumerate(theta_masses):
        entries = [(("A",), 1.0 - t)] if t < 1.0 else []
        if t > 0:
            entries.append((("A", "B"), t))
        reports.append(Report(f"e{i}", make_mass(AB, entries)))
    return EvidenceCorpus(AB, tuple(reports))


class TestSubsetSupport:
    def test_worked_example(self):
        corpus = corpus_with_theta(0.4, 0.5)
        assert subset_support(corpus, ["e0", "e1"]) == pytest.approx(0.8, abs=1e-12)

    def test_all_vacuous(self):
        corpus = corpus_with_theta(1.0, 1.0)
        assert subset_support(corpus, ["e0", "e1"]) == 0.0

    def test_categorical_member_gives_full_support(self):
        corpus = corpus_with_theta(0.0, 0.5)
        assert subset_support(corpus, ["e0", "e1"]) == 1.0

    def test_empty_block(self):
        with pytest.raises(ValidationError):
            subset_support(corpus_with_theta(0.5), [])


class TestCountingBpa:
    def test_worked_example(self):
        cb = counting_bpa([0.8, 0.5])
        assert cb.at_least[0] == pytest.approx(0.5, abs=1e-12)
        assert cb.at_least[1] == pytest.approx(0.4, abs=1e-12)
        assert cb.vacuous == pytest.approx(0.1, abs=1e-12)

    def test_certain_single(self):
        cb = counting_bpa([1.0])
        assert cb.at_least == (1.0,)
        assert cb.vacuous == 0.0

    def test_all_zero(self):
        cb = counting_bpa([0.0, 0.0, 0.0])
        assert cb.vacuous == 1.0
        assert all(v == 0.0 for v in cb.at_least)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            counting_bpa([1.2])

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_matches_enumeration(self, supports):
        fast = counting_bpa(supports)
        slow = counting_bpa_enumeration(supports)
        assert fast.vacuous == pytest.approx(slow.vacuous, abs=1e-12)
        for a, b in zip(fast.at_least, slow.at_least):
            assert a == pytest.approx(b, abs=1e-12)

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_masses_sum_to_one(self, supports):
        cb = counting_bpa(supports)
        assert math.fsum(cb.at_least) + cb.vacuous == pytest.approx(1.0, abs=1e-9)


class TestPosterior:
    def test_worked_example(self):
        post = posterior_distribution(counting_bpa([0.8, 0.5]), DomainPrior.uniform(3))
        assert post.probabilities[1] == pytest.approx(0.6 / 2.6, abs=1e-9)
        assert post.probabilities[2] == pytest.approx(1.0 / 2.6, abs=1e-9)
        assert post.probabilities[3] == pytest.approx(1.0 / 2.6, abs=1e-9)

    def test_vacuous_returns_prior(self):
        prior = DomainPrior({1: 0.2, 2: 0.5, 3: 0.3})
        post = posterior_distribution(CountingBpa((), 1.0), prior)
        assert post.probabilities == prior.probabilities

    def test_certain_prior(self):
        post = posterior_distribution(counting_bpa([0.8, 0.5]), DomainPrior({1: 0.0, 2: 1.0}))
        assert post.probabilities[2] == pytest.approx(1.0)

    def test_block_count_beyond_prior(self):
        with pytest.raises(ValidationError, match="at most"):
            posterior_distribution(counting_bpa([0.5, 0.5, 0.5]), DomainPrior.uniform(2))

    def test_incompatible_prior(self):
        prior = DomainPrior({1: 1.0, 2: 0.0})
        with pytest.raises(ValidationError, match="incompatible"):
            posterior_distribution(counting_bpa([1.0, 1.0]), prior)

    def test_matches_mass_function_combination(self):
        rng = random.Random(2)
        for _ in range(50):
            r_max = rng.randint(2, 6)
            n = rng.randint(1, r_max)
            supports = [rng.random() for _ in range(n)]
            weights = [rng.random() + 1e-3 for _ in range(r_max)]
            total = sum(weights)
            prior = DomainPrior({r + 1: w / total for r, w in enumerate(weights)})
            cb = counting_bpa(supports)
            direct = posterior_distribution(cb, prior)
            combined, _ = combine_dempster(counting_to_mass(cb, r_max), prior_to_mass(prior))
            for r in range(1, r_max + 1):
                assert direct.probabilities[r] == pytest.approx(
                    combined.mass((str(r),)), abs=1e-9
                )

    def test_raising_support_never_lowers_mean(self):
        rng = random.Random(9)
        prior = DomainPrior.uniform(6)
        for _ in range(100):
            supports = [rng.random() for _ in range(rng.randint(1, 5))]
            base = posterior_distribution(counting_bpa(supports), prior).mean()
            i = rng.randrange(len(supports))
            bumped = list(supports)
            bumped[i] = min(1.0, bumped[i] + rng.random() * (1.0 - bumped[i]))
            raised = posterior_distribution(counting_bpa(bumped), prior).mean()
            assert raised >= base - 1e-12


class TestCountingToMass:
    def test_at_least_one_merges_with_vacuous(self):
        cb = counting_bpa([0.8, 0.5])
        m = counting_to_mass(cb, 3)
        # "at least 1" is the whole count frame, so it folds into the vacuous focal
        assert m.theta_mass == pytest.approx(0.6, abs=1e-12)
        assert m.mass(("2", "3")) == pytest.approx(0.4, abs=1e-12)

    def test_prior_to_mass_is_bayesian(self):
        prior = DomainPrior({1: 0.25, 2: 0.75})
        m = prior_to_mass(prior)
        assert m.mass(("1",)) == 0.25
        assert m.mass(("2",)) == 0.75

    def test_vacuous_counting_bpa(self):
        m = counting_to_mass(CountingBpa((), 1.0), 4)
        assert m == vacuous(Frame(("1", "2", "3", "4")))
