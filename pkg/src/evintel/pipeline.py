"""File ingestion, pipeline orchestration and result export.

One self-describing JSON document carries the frame, the reports, the count
prior and (optionally) a decision problem, so a run is reproducible from a
single artifact. The pipeline sequences clustering, membership specification,
the count posterior and per-cluster track analysis; stage failures are
wrapped with the stage name.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FilePath

from . import decide, posterior, specify, tracks
from .cluster import (
    DomainPrior,
    EvidenceCorpus,
    MetaConflictReport,
    Partition,
    Report,
    SearchConfig,
    partition_search,
)
from .ds import Frame, MassFunction, ValidationError, make_mass

P_CAP = 0.999999  # vertex masses must stay below 1


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    restarts: int = 20
    max_sweeps: int = 200
    v_max_kmh: float = 25.0
    q_cap: float = tracks.DEFAULT_Q_CAP
    top_k: int = 3
    threads: int = 1
    rho: float | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.top_k < 1 or self.threads < 1:
            raise ValidationError("restarts, top_k and threads must be >= 1")
        if self.v_max_kmh <= 0:
            raise ValidationError("v_max must be positive")
        if not 0.0 <= self.q_cap < 1.0:
            raise ValidationError("q_cap must lie in [0, 1)")
        if self.rho is not None and not 0.0 <= self.rho <= 1.0:
            raise ValidationError("rho must lie in [0, 1]")


@dataclass(frozen=True)
class TrackResult:
    block: int
    report_ids: tuple[str, ...]
    excluded: tuple[str, ...]
    graph: tracks.TrackGraph | None
    best_paths: tuple[tuple[tracks.Path, float], ...]
    conflict: float | None  # from the oracle; None past its limit
    analysis: tracks.TrackAnalysis | None


@dataclass(frozen=True)
class DecisionResult:
    intervals: dict[str, dict[str, tuple[float, float]]]  # maker -> choice -> (low, high)
    segmentation: decide.RhoSegmentation
    assignment: dict[str, str] | None  # only when a rho was supplied


@dataclass(frozen=True)
class PipelineResult:
    partition: Partition
    metaconflict: MetaConflictReport
    membership: specify.MembershipSpecification | None
    posterior: posterior.PosteriorDistribution | None
    track_results: tuple[TrackResult, ...] | None
    decision: DecisionResult | None
    warnings: tuple[str, ...] = field(default_factory=tuple)


ALL_STAGES = frozenset({"specify", "posterior", "tracks"})


def _parse_masses(frame: Frame, raw: object, where: str) -> MassFunction:
    if not isinstance(raw, list) or not raw:
        raise ValidationError(f"{where}: 'masses' must be a nonempty list")
    entries = []
    for item in raw:
        if not isinstance(item, dict) or "set" not in item or "mass" not in item:
            raise ValidationError(f"{where}: each mass entry needs 'set' and 'mass'")
        entries.append((tuple(item["set"]), float(item["mass"])))
    try:
        return make_mass(frame, entries)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def parse_document(doc: dict, where: str = "input") -> tuple[EvidenceCorpus, DomainPrior]:
    if "frame" not in doc or "reports" not in doc or "prior" not in doc:
        raise ValidationError(f"{where}: document needs 'frame', 'prior' and 'reports'")
    if not isinstance(doc["frame"], list) or not isinstance(doc["reports"], list):
        raise ValidationError(f"{where}: 'frame' and 'reports' must be lists")
    frame = Frame(tuple(doc["frame"]))
    try:
        prior = DomainPrior({int(k): float(v) for k, v in doc["prior"].items()})
    except (TypeError, AttributeError, ValueError):
        raise ValidationError(f"{where}: 'prior' must map counts to probabilities") from None
    reports = []
    for i, raw in enumerate(doc["reports"]):
        loc = f"{where}: reports[{i}]"
        if not isinstance(raw, dict):
            raise ValidationError(f"{loc}: report must be an object")
        rid = raw.get("id")
        if not isinstance(rid, str) or not rid:
            raise ValidationError(f"{loc}: missing report id")
        loc = f"{loc} (id {rid!r})"
        evidence = _parse_masses(frame, raw.get("masses"), loc)
        try:
            time_s = float(raw["time"]) if "time" in raw else None
            pos = raw.get("pos")
            pos_km = (float(pos[0]), float(pos[1])) if pos is not None else None
        except (TypeError, ValueError, IndexError, KeyError):
            raise ValidationError(f"{loc}: malformed 'time' or 'pos'") from None
        reports.append(Report(rid, evidence, time_s, pos_km))
    try:
        corpus = EvidenceCorpus(frame, tuple(reports))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    return corpus, prior


def ingest_corpus(path: str | FilePath) -> tuple[EvidenceCorpus, DomainPrior]:
    """Load and validate a corpus file; errors carry the file location."""
    path = FilePath(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return parse_document(doc, where=str(path))


def parse_decision(doc: dict, where: str = "input") -> tuple[dict[str, float], list[decide.DecisionMaker]] | None:
    """The optional decision section: utilities plus per-maker choice bpas."""
    section = doc.get("decision")
    if section is None:
        return None
    utilities = section.get("utilities")
    if not isinstance(utilities, dict) or not utilities:
        raise ValidationError(f"{where}: decision section needs nonempty 'utilities'")
    utilities = {str(k): float(v) for k, v in utilities.items()}
    frame = Frame(tuple(utilities))
    makers = []
    for raw_maker in section.get("makers", []):
        mid = raw_maker.get("id")
        if not isinstance(mid, str) or not mid:
            raise ValidationError(f"{where}: decision maker without id")
        choices = []
        for raw_choice in raw_maker.get("choices", []):
            cid = raw_choice.get("id")
            if not isinstance(cid, str) or not cid:
                raise ValidationError(f"{where}: maker {mid!r} has a choice without id")
            mass = _parse_masses(frame, raw_choice.get("masses"), f"{where}: choice {cid!r}")
            bpa = decide.UtilityBpa(mass, utilities)
            choices.append(decide.expected_interval(bpa, cid))
        makers.append(decide.DecisionMaker(mid, tuple(choices)))
    if not makers:
        raise ValidationError(f"{where}: decision section has no decision makers")
    return utilities, makers


def _track_block(
    corpus: EvidenceCorpus, block_index: int, block: tuple[str, ...], cfg: PipelineConfig
) -> TrackResult:
    reports = [corpus.report(r) for r in block]
    usable = [r for r in reports if r.time_s is not None and r.pos_km is not None]
    usable.sort(key=lambda r: (r.time_s, r.id))
    excluded = tuple(r.id for r in reports if r.time_s is None or r.pos_km is None)
    if not usable:
        return TrackResult(block_index, (), excluded, None, (), None, None)
    vertices = tuple(
        tracks.TrackVertex(rank, r.time_s, r.pos_km) for rank, r in enumerate(usable, start=1)
    )
    p = tuple(min(1.0 - r.evidence.theta_mass, P_CAP) for r in usable)
    graph = tracks.kinematic_graph(vertices, p, cfg.v_max_kmh, cfg.q_cap)
    best = tuple(tracks.best_path_dp(graph, cfg.top_k))
    analysis = tracks.cached_oracle(graph) if graph.n <= tracks.ORACLE_VERTEX_LIMIT else None
    conflict = analysis.conflict if analysis is not None else None
    return TrackResult(
        block_index, tuple(r.id for r in usable), excluded, graph, best, conflict, analysis
    )


def analyze_decision(
    makers: list[decide.DecisionMaker], rho: float | None = None
) -> DecisionResult:
    intervals = {m.id: {c.id: (c.e_low, c.e_high) for c in m.choices} for m in makers}
    segmentation = decide.game_preferences(makers)
    assignment = decide.sequential_play(makers, rho) if rho is not None else None
    return DecisionResult(intervals, segmentation, assignment)


def run_pipeline(
    corpus: EvidenceCorpus,
    prior: DomainPrior,
    cfg: PipelineConfig = PipelineConfig(),
    decision: tuple[dict[str, float], list[decide.DecisionMaker]] | None = None,
    stages: frozenset[str] = ALL_STAGES,
) -> PipelineResult:
    """cluster -> specify -> posterior -> per-cluster tracks -> optional decision."""
    warnings: list[str] = []
    try:
        search_cfg = SearchConfig(cfg.restarts, cfg.seed, cfg.max_sweeps)
        partition, mcr = partition_search(corpus, prior, search_cfg, threads=cfg.threads)
    except Exception as exc:
        raise StageError("cluster", exc) from exc
    membership = None
    if "specify" in stages:
        try:
            membership = specify.specify_corpus(partition, prior)
        except Exception as exc:
            raise StageError("specify", exc) from exc
    post = None
    if "posterior" in stages:
        try:
            supports = [posterior.subset_support(corpus, b) for b in partition.blocks]
            post = posterior.posterior_distribution(posterior.counting_bpa(supports), prior)
        except Exception as exc:
            raise StageError("posterior", exc) from exc
    track_results = None
    if "tracks" in stages:
        try:
            jobs = list(enumerate(partition.blocks))
            if cfg.threads > 1:
                with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                    track_results = tuple(
                        pool.map(lambda job: _track_block(corpus, job[0], job[1], cfg), jobs)
                    )
            else:
                track_results = tuple(_track_block(corpus, i, b, cfg) for i, b in jobs)
            for tr in track_results:
                for rid in tr.excluded:
                    warnings.append(f"block {tr.block}: report {rid!r} lacks time/pos, not tracked")
        except Exception as exc:
            raise StageError("tracks", exc) from exc
    decision_result = None
    if decision is not None:
        try:
            decision_result = analyze_decision(decision[1], cfg.rho)
        except Exception as exc:
            raise StageError("decide", exc) from exc
    return PipelineResult(partition, mcr, membership, post, track_results, decision_result, tuple(warnings))


def _membership_json(membership: specify.MembershipSpecification) -> dict:
    out: dict[str, dict] = {}
    for rid, pl in membership.plausibility.items():
        out[rid] = {
            "plausibility": {str(k): v for k, v in pl.items()},
            "weights": {str(k): v for k, v in membership.weights[rid].items()},
        }
    return out


def _tracks_json(track_results: tuple[TrackResult, ...]) -> dict:
    out: dict[str, dict] = {}
    for tr in track_results:
        paths = []
        for path, unnorm in tr.best_paths:
            entry: dict = {"vertices": list(path), "plausibility_unnorm": unnorm}
            if tr.analysis is not None:
                entry["plausibility_norm"] = tr.analysis.plausibility[path]
                entry["support"] = tr.analysis.support[path]
            paths.append(entry)
        block: dict = {"reports": list(tr.report_ids), "best_paths": paths}
        if tr.conflict is not None:
            block["conflict"] = tr.conflict
        if tr.excluded:
            block["excluded"] = list(tr.excluded)
        out[str(tr.block)] = block
    return out


def result_to_json(result: PipelineResult) -> dict:
    doc: dict = {
        "partition": [list(b) for b in result.partition.blocks],
        "metaconflict": {
            "c0": result.metaconflict.c0,
            "clusters": list(result.metaconflict.cluster_conflicts),
            "mcf": result.metaconflict.mcf,
        },
    }
    if result.membership is not None:
        doc["membership"] = _membership_json(result.membership)
    if result.posterior is not None:
        doc["posterior"] = {str(r): p for r, p in sorted(result.posterior.probabilities.items())}
    if result.track_results is not None:
        doc["tracks"] = _tracks_json(result.track_results)
    if result.decision is not None:
        dec: dict = {
            "intervals": {
                m: {c: [lo, hi] for c, (lo, hi) in choices.items()}
                for m, choices in result.decision.intervals.items()
            },
            "segmentation": [
                {"lo": s.lo, "hi": s.hi, "winners": list(s.winners)}
                for s in result.decision.segmentation.segments
            ],
            "preferences": dict(result.decision.segmentation.preferences),
        }
        if result.decision.assignment is not None:
            dec["assignment"] = result.decision.assignment
        doc["decision"] = dec
    if result.warnings:
        doc["warnings"] = list(result.warnings)
    return doc


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines.extend(fmt.format(*r) for r in rows)
    return "\n".join(lines)


def format_result(result: PipelineResult) -> str:
    """Aligned human-readable tables; plausibilities with 6 decimals."""
    parts: list[str] = []
    mc = result.metaconflict
    rows = [
        [str(i), str(len(b)), f"{c:.6f}", " ".join(b)]
        for i, (b, c) in enumerate(zip(result.partition.blocks, mc.cluster_conflicts))
    ]
    parts.append("Partition (c0 = {:.6f}, mcf = {:.6f})".format(mc.c0, mc.mcf))
    parts.append(_table(rows, ["block", "size", "conflict", "reports"]))

    if result.posterior is not None:
        rows = [[str(r), f"{p:.6f}"] for r, p in sorted(result.posterior.probabilities.items())]
        parts.append("\nPosterior over number of events")
        parts.append(_table(rows, ["count", "probability"]))

    if result.membership is not None:
        n_blocks = result.partition.n_blocks
        header = ["report"] + [f"w{k}" for k in range(n_blocks)] + ["pls(new)"]
        rows = []
        for rid in result.partition.corpus.ids:
            w = result.membership.weights[rid]
            pl = result.membership.plausibility[rid]
            rows.append(
                [rid]
                + [f"{w[k]:.6f}" for k in range(n_blocks)]
                + [f"{pl[specify.NEW_BLOCK]:.6f}"]
            )
        parts.append("\nMembership weights")
        parts.append(_table(rows, header))

    for tr in result.track_results or ():
        parts.append(f"\nTracks for block {tr.block} ({len(tr.report_ids)} position reports)")
        if not tr.best_paths:
            parts.append("  no reports with time and position")
            continue
        rows = []
        for path, unnorm in tr.best_paths:
            norm = (
                f"{tr.analysis.plausibility[path]:.6f}" if tr.analysis is not None else "n/a"
            )
            sup = f"{tr.analysis.support[path]:.6f}" if tr.analysis is not None else "n/a"
            rows.append(["-".join(map(str, path)), f"{unnorm:.6f}", norm, sup])
        parts.append(_table(rows, ["path", "pls_unnorm", "pls_norm", "support"]))
        if tr.conflict is not None:
            parts.append(f"  combination conflict: {tr.conflict:.6f}")

    if result.decision is not None:
        parts.append("\nDecision analysis")
        rows = []
        for m, choices in result.decision.intervals.items():
            for c, (lo, hi) in choices.items():
                rows.append([m, c, f"{lo:.6f}", f"{hi:.6f}"])
        parts.append(_table(rows, ["maker", "choice", "E_low", "E_high"]))
        rows = [
            [f"[{s.lo:.6f}, {s.hi:.6f}]", " ".join(s.winners)]
            for s in result.decision.segmentation.segments
        ]
        parts.append(_table(rows, ["rho interval", "winner"]))
        rows = [
            [c, f"{p:.6f}"]
            for c, p in sorted(result.decision.segmentation.preferences.items())
        ]
        parts.append(_table(rows, ["choice", "preference"]))
        if result.decision.assignment is not None:
            rows = [[m, c] for m, c in result.decision.assignment.items()]
            parts.append(_table(rows, ["maker", "plays"]))

    for w in result.warnings:
        parts.append(f"warning: {w}")
    return "\n".join(parts) + "\n"
