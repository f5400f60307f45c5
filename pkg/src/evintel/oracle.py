"""Cross-checks between fast routes and independent brute-force oracles.

Every check pits a production computation against a structurally different
one (enumeration, grid scan, exhaustive search) on seeded random instances,
and reports the largest deviation seen. The CLI exposes them as
``oracle-check``; the test suite drives the same generators harder.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import posterior as post
from .cluster import (
    DomainPrior,
    EvidenceCorpus,
    Report,
    SearchConfig,
    exhaustive_search,
    partition_search,
)
from .decide import UtilityIntervalChoice, rho_segmentation
from .ds import Frame, MassFunction, combine_all, combine_dempster, enumerate_conflict, make_mass
from .tracks import TrackGraph, best_path_dp, combine_oracle, path_plausibility_unnorm


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    max_dev: float
    detail: str = ""


def random_mass(frame: Frame, rng: random.Random, max_focals: int = 3) -> MassFunction:
    """Random mass function with a guaranteed frame remainder (so conflict < 1)."""
    n_focals = rng.randint(1, max_focals)
    subsets = []
    for _ in range(n_focals):
        members = [e for e in frame.elements if rng.random() < 0.5]
        if members:
            subsets.append(tuple(members))
    weights = [rng.random() for _ in subsets] + [0.25 + rng.random()]
    total = sum(weights)
    entries = [(s, w / total) for s, w in zip(subsets, weights)]
    entries.append((frame.elements, weights[-1] / total))
    return make_mass(frame, entries)


def random_simple_support(frame: Frame, rng: random.Random) -> MassFunction:
    members = [e for e in frame.elements if rng.random() < 0.5] or [frame.elements[0]]
    w = rng.uniform(0.05, 0.95)
    return make_mass(frame, [(tuple(members), w), (frame.elements, 1.0 - w)])


def random_track_graph(n: int, rng: random.Random) -> TrackGraph:
    p = tuple(rng.uniform(0.0, 0.95) for _ in range(n))
    q = {(i, j): rng.uniform(0.0, 0.95) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    return TrackGraph(p, q)


def separable_corpus(
    rng: random.Random, n_reports: int = 10, n_groups: int = 3, frame_size: int | None = None
) -> tuple[EvidenceCorpus, list[set[str]]]:
    """Corpus whose ground-truth groups carry pairwise-disjoint focal sets."""
    frame_size = frame_size or n_groups
    frame = Frame(tuple(f"t{g + 1}" for g in range(frame_size)))
    assignment = [g % n_groups for g in range(n_groups)]  # every group occupied
    assignment += [rng.randrange(n_groups) for _ in range(n_reports - n_groups)]
    rng.shuffle(assignment)
    reports = []
    groups: list[set[str]] = [set() for _ in range(n_groups)]
    for i, g in enumerate(assignment):
        rid = f"e{i + 1:02d}"
        w = rng.uniform(0.3, 0.9)
        evidence = make_mass(frame, [((frame.elements[g],), w), (frame.elements, 1.0 - w)])
        reports.append(Report(rid, evidence))
        groups[g].add(rid)
    return EvidenceCorpus(frame, tuple(reports)), [g for g in groups if g]


def check_sequential_conflict(seed: int, trials: int) -> CheckResult:
    """combine_all's accumulated conflict vs full product-space enumeration."""
    rng = random.Random(seed)
    frame = Frame(("a", "b", "c", "d"))
    max_dev = 0.0
    for _ in range(trials):
        ms = [random_simple_support(frame, rng) for _ in range(rng.randint(2, 6))]
        _, acc = combine_all(ms)
        max_dev = max(max_dev, abs(acc - enumerate_conflict(ms)))
    return CheckResult("sequential vs simultaneous conflict", max_dev <= 1e-9, max_dev)


def check_counting_bpa(seed: int, trials: int) -> CheckResult:
    rng = random.Random(seed)
    max_dev = 0.0
    for _ in range(trials):
        supports = [rng.random() for _ in range(rng.randint(1, 10))]
        a = post.counting_bpa(supports)
        b = post.counting_bpa_enumeration(supports)
        max_dev = max(max_dev, abs(a.vacuous - b.vacuous))
        for x, y in zip(a.at_least, b.at_least):
            max_dev = max(max_dev, abs(x - y))
    return CheckResult("counting bpa vs 2^n enumeration", max_dev <= 1e-12, max_dev)


def check_posterior_combination(seed: int, trials: int) -> CheckResult:
    """Closed-form posterior vs an actual Dempster combination with the prior."""
    rng = random.Random(seed)
    max_dev = 0.0
    for _ in range(trials):
        r_max = rng.randint(2, 6)
        n = rng.randint(1, r_max)
        supports = [rng.random() for _ in range(n)]
        weights = [rng.random() + 1e-3 for _ in range(r_max)]
        prior = DomainPrior(
            {r + 1: w / sum(weights) for r, w in enumerate(weights)}
        )
        cb = post.counting_bpa(supports)
        direct = post.posterior_distribution(cb, prior)
        combined, _ = combine_dempster(post.counting_to_mass(cb, r_max), post.prior_to_mass(prior))
        for r in range(1, r_max + 1):
            via_ds = combined.mass((str(r),))
            max_dev = max(max_dev, abs(direct.probabilities[r] - via_ds))
    return CheckResult("posterior vs mass-function combination", max_dev <= 1e-9, max_dev)


def check_track_plausibility(seed: int, trials: int) -> CheckResult:
    rng = random.Random(seed)
    max_dev = 0.0
    for _ in range(trials):
        g = random_track_graph(rng.randint(2, 5), rng)
        analysis = combine_oracle(g)
        for path in g.all_paths():
            max_dev = max(
                max_dev, abs(path_plausibility_unnorm(g, path) - analysis.plausibility_unnorm[path])
            )
    return CheckResult("track plausibility closed form vs oracle", max_dev <= 1e-9, max_dev)


def check_best_path(seed: int, trials: int) -> CheckResult:
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        g = random_track_graph(rng.randint(2, 5), rng)
        (best, value), *_ = best_path_dp(g, top_k=1)
        best_val = max(path_plausibility_unnorm(g, p) for p in g.all_paths())
        brute = min(p for p in g.all_paths() if path_plausibility_unnorm(g, p) == best_val)
        if best != brute or abs(value - best_val) > 1e-12:
            failures += 1
    return CheckResult("best path DP vs exhaustive argmax", failures == 0, float(failures))


def check_rho_preferences(seed: int, trials: int, grid: int = 10_000) -> CheckResult:
    rng = random.Random(seed)
    max_dev = 0.0
    for _ in range(trials):
        choices = []
        for i in range(rng.randint(1, 5)):
            a, b = sorted((rng.random(), rng.random()))
            choices.append(UtilityIntervalChoice(f"c{i}", a, b))
        seg = rho_segmentation(choices)
        counts = {c.id: 0.0 for c in choices}
        for k in range(grid):
            rho = (k + 0.5) / grid
            values = [c.value_at(rho) for c in choices]
            best = max(values)
            winners = [c.id for c, v in zip(choices, values) if v == best]
            for w in winners:
                counts[w] += 1.0 / (grid * len(winners))
        for cid, pref in seg.preferences.items():
            max_dev = max(max_dev, abs(pref - counts[cid]))
    return CheckResult("rho preferences vs grid scan", max_dev <= 2e-4, max_dev)


def check_partition_search(seed: int, trials: int) -> CheckResult:
    """Local search attains the exhaustive metaconflict minimum on small corpora."""
    rng = random.Random(seed)
    misses = 0
    for t in range(trials):
        corpus, _ = separable_corpus(rng, n_reports=6, n_groups=rng.randint(2, 3))
        prior = DomainPrior.uniform(4)
        _, found = partition_search(corpus, prior, SearchConfig(restarts=20, seed=seed + t))
        _, best = exhaustive_search(corpus, prior)
        if abs(found.mcf - best.mcf) > 1e-9:
            misses += 1
    return CheckResult("partition search vs exhaustive minimum", misses == 0, float(misses))


def run_all_checks(seed: int = 0, trials: int = 25) -> list[CheckResult]:
    return [
        check_sequential_conflict(seed, trials),
        check_counting_bpa(seed + 1, trials),
        check_posterior_combination(seed + 2, trials),
        check_track_plausibility(seed + 3, trials),
        check_best_path(seed + 4, trials),
        check_rho_preferences(seed + 5, max(5, trials // 5)),
        check_partition_search(seed + 6, max(5, trials // 5)),
    ]
