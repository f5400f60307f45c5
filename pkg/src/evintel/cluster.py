"""Partitioning of uncertain reports into per-event clusters.

Each candidate partition is scored by the metaconflict criterion

    mcf = 1 - (1 - c0) * prod_i (1 - c_i)

where ``c_i`` is the Dempster conflict of combining all evidence inside block
``i`` and ``c0 = 1 - prior(n)`` is the conflict between the hypothesis "there
are n blocks" and a prior over block counts. Low metaconflict means the
grouping explains the corpus without forcing incompatible reports together.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .ds import Frame, MassFunction, TotalConflictError, ValidationError, combine_all

IMPROVEMENT_TOL = 1e-12


@dataclass(frozen=True)
class Report:
    """One intelligence report: evidence over the corpus frame plus optional kinematics."""

    id: str
    evidence: MassFunction
    time_s: float | None = None
    pos_km: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class EvidenceCorpus:
    frame: Frame
    reports: tuple[Report, ...]
    _conflict_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.reports:
            raise ValidationError("corpus must contain at least one report")
        seen: set[str] = set()
        for r in self.reports:
            if r.id in seen:
                raise ValidationError(f"duplicate report id {r.id!r}")
            seen.add(r.id)
            if r.evidence.frame != self.frame:
                raise ValidationError(f"report {r.id!r} uses a different frame")
        object.__setattr__(self, "_by_id", {r.id: i for i, r in enumerate(self.reports)})

    def index_of(self, report_id: str) -> int:
        try:
            return self._by_id[report_id]  # type: ignore[attr-defined]
        except KeyError:
            raise ValidationError(f"unknown report id {report_id!r}") from None

    def report(self, report_id: str) -> Report:
        return self.reports[self.index_of(report_id)]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.reports)


@dataclass(frozen=True)
class DomainPrior:
    """Bayesian prior over the number of events, on counts 1..r_max."""

    probabilities: dict[int, float]

    def __post_init__(self):
        if not self.probabilities:
            raise ValidationError("prior must not be empty")
        for r, p in self.probabilities.items():
            if not (isinstance(r, int) and r >= 1):
                raise ValidationError(f"prior count {r!r} must be an integer >= 1")
            if p < 0:
                raise ValidationError(f"prior probability for {r} is negative")
        total = math.fsum(self.probabilities.values())
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"prior probabilities sum to {total:.10g}, expected 1")

    @classmethod
    def uniform(cls, r_max: int) -> "DomainPrior":
        if r_max < 1:
            raise ValidationError("r_max must be >= 1")
        return cls({r: 1.0 / r_max for r in range(1, r_max + 1)})

    @property
    def r_max(self) -> int:
        return max(self.probabilities)

    def __call__(self, n: int) -> float:
        return self.probabilities.get(n, 0.0)


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint nonempty blocks of report ids covering the corpus."""

    corpus: EvidenceCorpus
    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for block in self.blocks:
            if not block:
                raise ValidationError("partition contains an empty block")
            for rid in block:
                self.corpus.index_of(rid)
                if rid in seen:
                    raise ValidationError(f"report {rid!r} appears in two blocks")
                seen.add(rid)
        if len(seen) != len(self.corpus.reports):
            raise ValidationError("partition does not cover the corpus")

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, report_id: str) -> int:
        for i, block in enumerate(self.blocks):
            if report_id in block:
                return i
        raise ValidationError(f"unknown report id {report_id!r}")


@dataclass(frozen=True)
class MetaConflictReport:
    c0: float
    cluster_conflicts: tuple[float, ...]
    mcf: float


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    seed: int = 0
    max_sweeps: int = 200


def make_partition(corpus: EvidenceCorpus, blocks: Iterable[Iterable[str]]) -> Partition:
    """Normalize blocks (members in corpus order, blocks by least member) and validate."""
    ordered = [tuple(sorted(b, key=corpus.index_of)) for b in blocks]
    ordered = [b for b in ordered if b]
    ordered.sort(key=lambda b: corpus.index_of(b[0]))
    return Partition(corpus, tuple(ordered))


def cluster_conflict(corpus: EvidenceCorpus, block: Iterable[str]) -> float:
    """Accumulated Dempster conflict of the block's evidence; 0 for <= 1 report."""
    ids = frozenset(block)
    cached = corpus._conflict_cache.get(ids)
    if cached is not None:
        return cached
    indices = sorted(map(corpus.index_of, ids))
    if len(ids) <= 1:
        conflict = 0.0
    else:
        try:
            _, conflict = combine_all([corpus.reports[i].evidence for i in indices])
        except TotalConflictError:
            conflict = 1.0
    corpus._conflict_cache[ids] = conflict
    return conflict


def domain_conflict(n: int, prior: DomainPrior) -> float:
    """Conflict between the categorical hypothesis "n events" and the count prior."""
    if n < 1:
        raise ValidationError("block count must be >= 1")
    return 1.0 - prior(n)


def _mcf_value(c0: float, cluster_conflicts: Sequence[float]) -> float:
    return 1.0 - (1.0 - c0) * math.prod(1.0 - c for c in cluster_conflicts)


def metaconflict(partition: Partition, prior: DomainPrior) -> MetaConflictReport:
    c0 = domain_conflict(partition.n_blocks, prior)
    conflicts = tuple(cluster_conflict(partition.corpus, b) for b in partition.blocks)
    return MetaConflictReport(c0, conflicts, _mcf_value(c0, conflicts))


def _canonical_key(corpus: EvidenceCorpus, blocks: Sequence[Iterable[str]]) -> tuple:
    """Ordering key for value-tied partitions: fewer blocks first, then lexicographic.

    Preferring the coarsest tied partition matters: refining a zero-conflict
    block leaves the criterion unchanged, and the coarsest representative is
    the one where every block is a maximal compatible group.
    """
    index_blocks = sorted(tuple(sorted(corpus.index_of(r) for r in b)) for b in blocks)
    return (len(index_blocks), index_blocks)


def _descend(
    corpus: EvidenceCorpus,
    prior: DomainPrior,
    blocks: list[list[str]],
    max_sweeps: int,
) -> tuple[list[list[str]], float]:
    """Steepest-descent single-report moves until no move improves mcf."""
    conflicts = [cluster_conflict(corpus, b) for b in blocks]
    mcf = _mcf_value(domain_conflict(len(blocks), prior), conflicts)

    for _ in range(max_sweeps):
        best_cand = math.inf
        best_move: tuple[int, int] | None = None  # (report index, target block or -1 for fresh)
        for j, report in enumerate(corpus.reports):
            origin = next(i for i, b in enumerate(blocks) if report.id in b)
            origin_rest = [r for r in blocks[origin] if r != report.id]
            c_origin_rest = cluster_conflict(corpus, origin_rest) if origin_rest else None
            targets: list[int] = [t for t in range(len(blocks)) if t != origin]
            if origin_rest:
                targets.append(-1)  # fresh block last; a singleton's fresh move is a no-op
            for target in targets:
                new_conflicts = []
                for i in range(len(blocks)):
                    if i == origin:
                        if origin_rest:
                            new_conflicts.append(c_origin_rest)
                    elif i == target:
                        new_conflicts.append(
                            cluster_conflict(corpus, blocks[i] + [report.id])
                        )
                    else:
                        new_conflicts.append(conflicts[i])
                if target == -1:
                    new_conflicts.append(0.0)
                cand = _mcf_value(domain_conflict(len(new_conflicts), prior), new_conflicts)
                # applicable only on a strict improvement; ties keep the first-encountered move
                if mcf - cand > IMPROVEMENT_TOL and cand < best_cand:
                    best_cand = cand
                    best_move = (j, target)
        if best_move is None:
            break
        j, target = best_move
        rid = corpus.reports[j].id
        origin = next(i for i, b in enumerate(blocks) if rid in b)
        blocks[origin] = [r for r in blocks[origin] if r != rid]
        if target == -1:
            blocks.append([rid])
        else:
            blocks[target] = blocks[target] + [rid]
        blocks = [b for b in blocks if b]
        conflicts = [cluster_conflict(corpus, b) for b in blocks]
        mcf = best_cand
    return blocks, mcf


def _random_start(corpus: EvidenceCorpus, prior: DomainPrior, rng: random.Random) -> list[list[str]]:
    n = rng.randint(1, min(prior.r_max, len(corpus.reports)))
    blocks: list[list[str]] = [[] for _ in range(n)]
    for report in corpus.reports:
        blocks[rng.randrange(n)].append(report.id)
    return [b for b in blocks if b]


def _restart(args) -> tuple[float, tuple, list[list[str]]]:
    corpus, prior, seed, index, max_sweeps = args
    rng = random.Random(f"{seed}:{index}")
    blocks, mcf = _descend(corpus, prior, _random_start(corpus, prior, rng), max_sweeps)
    return mcf, _canonical_key(corpus, blocks), blocks


def partition_search(
    corpus: EvidenceCorpus,
    prior: DomainPrior,
    config: SearchConfig = SearchConfig(),
    threads: int = 1,
) -> tuple[Partition, MetaConflictReport]:
    """Best partition over seeded random restarts of steepest single-move descent.

    Deterministic given (corpus order, seed, restarts): restarts are merged by
    (mcf, canonical key), so the result does not depend on execution order.
    """
    if config.restarts < 1:
        raise ValidationError("restarts must be >= 1")
    jobs = [(corpus, prior, config.seed, i, config.max_sweeps) for i in range(config.restarts)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_restart, jobs))
    else:
        results = [_restart(j) for j in jobs]
    _, _, best_blocks = min(results, key=lambda r: (r[0], r[1]))
    partition = make_partition(corpus, best_blocks)
    return partition, metaconflict(partition, prior)


def enumerate_partitions(n_items: int, max_blocks: int) -> Iterator[list[list[int]]]:
    """All set partitions of range(n_items) with at most ``max_blocks`` blocks.

    Generated via restricted growth strings: item 0 is always in block 0 and
    item i may open at most one new block.
    """
    labels = [0] * n_items

    def grow(i: int, used: int) -> Iterator[list[list[int]]]:
        if i == n_items:
            blocks: list[list[int]] = [[] for _ in range(used)]
            for item, label in enumerate(labels):
                blocks[label].append(item)
            yield blocks
            return
        for label in range(min(used + 1, max_blocks)):
            labels[i] = label
            yield from grow(i + 1, max(used, label + 1))

    yield from grow(0, 0)


def exhaustive_search(
    corpus: EvidenceCorpus, prior: DomainPrior, max_blocks: int | None = None
) -> tuple[Partition, MetaConflictReport]:
    """Global metaconflict minimum by enumerating every partition (oracle route).

    Only partitions with at most min(r_max, n) blocks are scored; any block
    count outside the prior's support has c0 = 1 and cannot beat them.
    """
    n = len(corpus.reports)
    cap = min(prior.r_max, n) if max_blocks is None else min(max_blocks, n)
    ids = corpus.ids
    best: tuple[float, tuple, list[list[str]]] | None = None
    for index_blocks in enumerate_partitions(n, cap):
        blocks = [[ids[i] for i in block] for block in index_blocks]
        conflicts = [cluster_conflict(corpus, b) for b in blocks]
        mcf = _mcf_value(domain_conflict(len(blocks), prior), conflicts)
        key = (mcf, _canonical_key(corpus, blocks))
        if best is None or key < (best[0], best[1]):
            best = (mcf, key[1], blocks)
    assert best is not None
    partition = make_partition(corpus, best[2])
    return partition, metaconflict(partition, prior)
