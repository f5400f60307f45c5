"""Posterior distribution over the number of events from per-block support.

Each block supports its own existence to the degree its evidence says anything
at all beyond the full frame: s = 1 - prod m(frame). Combining the per-block
simple supports (which cannot conflict) and keeping only cardinality yields a
counting bpa on propositions "at least k events"; a Bayesian prior over counts
then turns it into a posterior by one more Dempster combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .cluster import DomainPrior, EvidenceCorpus
from .ds import Frame, MassFunction, ValidationError, make_mass


@dataclass(frozen=True)
class CountingBpa:
    """Masses on "at least k events" (index k-1) plus the vacuous remainder."""

    at_least: tuple[float, ...]
    vacuous: float

    @property
    def n(self) -> int:
        return len(self.at_least)


@dataclass(frozen=True)
class PosteriorDistribution:
    probabilities: dict[int, float]

    def mean(self) -> float:
        return math.fsum(r * p for r, p in self.probabilities.items())

    def mode(self) -> int:
        return max(self.probabilities, key=lambda r: (self.probabilities[r], -r))


def subset_support(corpus: EvidenceCorpus, block: Iterable[str]) -> float:
    """s = 1 - prod of frame masses over the block's reports."""
    ids = list(block)
    if not ids:
        raise ValidationError("block must be nonempty")
    return 1.0 - math.prod(corpus.report(r).evidence.theta_mass for r in ids)


def counting_bpa(supports: Sequence[float]) -> CountingBpa:
    """Combine per-block existence supports into masses on "at least k".

    mass("at least k") is the probability that exactly k independent supports
    fire, computed by the O(n^2) polynomial-product recurrence.
    """
    for s in supports:
        if not 0.0 <= s <= 1.0:
            raise ValidationError(f"support {s} outside [0, 1]")
    pmf = [1.0]
    for s in supports:
        nxt = [0.0] * (len(pmf) + 1)
        for k, v in enumerate(pmf):
            nxt[k] += v * (1.0 - s)
            nxt[k + 1] += v * s
        pmf = nxt
    return CountingBpa(tuple(pmf[1:]), pmf[0])


def counting_bpa_enumeration(supports: Sequence[float]) -> CountingBpa:
    """Oracle route: sum over all 2^n existence patterns. Exponential; keep n small."""
    n = len(supports)
    acc = [0.0] * (n + 1)
    for pattern in product((0, 1), repeat=n):
        weight = math.prod(s if on else 1.0 - s for s, on in zip(supports, pattern))
        acc[sum(pattern)] += weight
    return CountingBpa(tuple(acc[1:]), acc[0])


def posterior_distribution(cb: CountingBpa, prior: DomainPrior) -> PosteriorDistribution:
    """Dempster combination of the counting bpa with a Bayesian count prior.

    Since the prior is Bayesian the result is Bayesian:
    P(r) is proportional to prior(r) * (vacuous + sum of mass("at least k") for k <= r).
    """
    r_max = prior.r_max
    if cb.n > r_max:
        raise ValidationError(
            f"counting bpa supports {cb.n} events but the prior allows at most {r_max}"
        )
    unnorm: dict[int, float] = {}
    for r in range(1, r_max + 1):
        reachable = cb.vacuous + math.fsum(cb.at_least[: min(r, cb.n)])
        unnorm[r] = prior(r) * reachable
    total = math.fsum(unnorm.values())
    if total <= 0.0:
        raise ValidationError("prior is incompatible with every supported count")
    return PosteriorDistribution({r: v / total for r, v in unnorm.items()})


def counting_frame(r_max: int) -> Frame:
    return Frame(tuple(str(r) for r in range(1, r_max + 1)))


def counting_to_mass(cb: CountingBpa, r_max: int) -> MassFunction:
    """The counting bpa as a plain mass function on the count frame {1..r_max}."""
    frame = counting_frame(r_max)
    entries: list[tuple[tuple[str, ...], float]] = []
    for k, mass in enumerate(cb.at_least, start=1):
        entries.append((tuple(str(r) for r in range(k, r_max + 1)), mass))
    entries.append((frame.elements, cb.vacuous))
    return make_mass(frame, entries)


def prior_to_mass(prior: DomainPrior) -> MassFunction:
    """The Bayesian prior as a singleton-focal mass function on the count frame."""
    frame = counting_frame(prior.r_max)
    entries = [((str(r),), p) for r, p in sorted(prior.probabilities.items()) if p > 0]
    return make_mass(frame, entries)
