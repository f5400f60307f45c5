"""Command-line interface.

Subcommands: gen, cluster, specify, posterior, tracks, decide, pipeline,
oracle-check. Results print as aligned tables on stdout; --out writes the
machine-readable JSON document. Exit codes: 0 success, 2 validation error,
3 stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import decide
from . import pipeline as pl
from . import tracks
from .cluster import DomainPrior
from .ds import ValidationError
from .oracle import run_all_checks
from .scenario import ScenarioConfig, generate_scenario


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="corpus JSON file")
    p.add_argument("--out", type=Path, default=None, help="write result JSON here")
    p.add_argument("--rmax", type=int, default=None, help="override the prior with uniform {1..RMAX}")


def _add_search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-sweeps", type=int, default=200)
    p.add_argument("--threads", type=int, default=1)


def _add_track_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vmax", type=float, default=25.0, help="speed limit in km/h")
    p.add_argument("--q-cap", type=float, default=tracks.DEFAULT_Q_CAP)
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--dot", type=Path, default=None, help="write Graphviz DOT export(s) here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evintel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic scenario file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--targets", type=int, default=3)
    p.add_argument("--reports-per-target", type=int, default=4)
    p.add_argument("--frame-size", type=int, default=6)
    p.add_argument("--contradiction", type=float, default=0.3)
    p.add_argument("--area", type=float, default=50.0, help="side of the area box in km")
    p.add_argument("--vmax", type=float, default=25.0)
    p.add_argument("--time-span", type=float, default=7200.0, help="seconds")
    p.add_argument("--rmax", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")

    for name, help_text in [
        ("cluster", "partition the corpus by metaconflict minimization"),
        ("specify", "cluster, then derive graded per-block membership"),
        ("posterior", "cluster, then compute the posterior over the number of events"),
        ("tracks", "cluster, then analyze per-cluster track graphs"),
        ("pipeline", "run every stage"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_io_args(p)
        _add_search_args(p)
        if name in ("tracks", "pipeline"):
            _add_track_args(p)
        if name == "pipeline":
            p.add_argument("--rho", type=float, default=None)

    p = sub.add_parser("decide", help="rho-interval decision analysis of the input's decision section")
    p.add_argument("input")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--rho", type=float, default=None, help="also play the game at this rho")

    p = sub.add_parser("oracle-check", help="run dual-route verification checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)
    return parser


def _load(args) -> tuple:
    corpus, prior = pl.ingest_corpus(args.input)
    if getattr(args, "rmax", None) is not None:
        prior = DomainPrior.uniform(args.rmax)
    return corpus, prior


def _config(args, rho=None) -> pl.PipelineConfig:
    return pl.PipelineConfig(
        seed=getattr(args, "seed", 0),
        restarts=getattr(args, "restarts", 20),
        max_sweeps=getattr(args, "max_sweeps", 200),
        v_max_kmh=getattr(args, "vmax", 25.0),
        q_cap=getattr(args, "q_cap", tracks.DEFAULT_Q_CAP),
        top_k=getattr(args, "top_k", 3),
        threads=getattr(args, "threads", 1),
        rho=rho,
    )


def _emit(doc: dict, text: str, out: Path | None) -> None:
    sys.stdout.write(text)
    if out is not None:
        out.write_text(pl.render_json(doc), encoding="utf-8")


_STAGES = {
    "cluster": frozenset(),
    "specify": frozenset({"specify"}),
    "posterior": frozenset({"posterior"}),
    "tracks": frozenset({"tracks"}),
    "pipeline": pl.ALL_STAGES,
}


def _write_dot(result: pl.PipelineResult, dot_path: Path) -> None:
    graphs = [(tr.block, tr.graph) for tr in result.track_results or () if tr.graph is not None]
    for block, graph in graphs:
        path = dot_path
        if len(graphs) > 1:
            path = dot_path.with_name(f"{dot_path.stem}_block{block}{dot_path.suffix}")
        path.write_text(tracks.dot_export(graph), encoding="utf-8")


def _run_stage_command(args) -> int:
    corpus, prior = _load(args)
    decision = None
    if args.command == "pipeline":
        raw = json.loads(Path(args.input).read_text(encoding="utf-8"))
        decision = pl.parse_decision(raw, where=args.input)
    cfg = _config(args, rho=getattr(args, "rho", None))
    result = pl.run_pipeline(corpus, prior, cfg, decision=decision, stages=_STAGES[args.command])
    if getattr(args, "dot", None) is not None:
        _write_dot(result, args.dot)
    _emit(pl.result_to_json(result), pl.format_result(result), args.out)
    return 0


def _run_decide(args) -> int:
    try:
        raw = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"{args.input}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.input}: invalid JSON ({exc})") from None
    decision = pl.parse_decision(raw, where=args.input)
    if decision is None:
        raise ValidationError(f"{args.input}: no decision section")
    _, makers = decision
    intervals = {m.id: {c.id: (c.e_low, c.e_high) for c in m.choices} for m in makers}
    segmentation = decide.game_preferences(makers)
    assignment = decide.sequential_play(makers, args.rho) if args.rho is not None else None
    doc: dict = {
        "decision": {
            "intervals": {
                m: {c: [lo, hi] for c, (lo, hi) in cs.items()} for m, cs in intervals.items()
            },
            "segmentation": [
                {"lo": s.lo, "hi": s.hi, "winners": list(s.winners)} for s in segmentation.segments
            ],
            "preferences": dict(segmentation.preferences),
        }
    }
    lines = ["Decision analysis"]
    for m, cs in intervals.items():
        for c, (lo, hi) in cs.items():
            lines.append(f"  {m} {c}: [{lo:.6f}, {hi:.6f}]")
    for s in segmentation.segments:
        lines.append(f"  rho [{s.lo:.6f}, {s.hi:.6f}] -> {' '.join(s.winners)}")
    for c, p in sorted(segmentation.preferences.items()):
        lines.append(f"  preference {c}: {p:.6f}")
    if assignment is not None:
        doc["decision"]["assignment"] = assignment
        for m, c in assignment.items():
            lines.append(f"  at rho={args.rho}: {m} plays {c}")
    _emit(doc, "\n".join(lines) + "\n", args.out)
    return 0


def _run_gen(args) -> int:
    cfg = ScenarioConfig(
        seed=args.seed,
        targets=args.targets,
        reports_per_target=args.reports_per_target,
        frame_size=args.frame_size,
        contradiction=args.contradiction,
        area_km=args.area,
        v_max_kmh=args.vmax,
        time_span_s=args.time_span,
        r_max=args.rmax,
    )
    content = generate_scenario(cfg)
    if args.out is not None:
        args.out.write_text(content, encoding="utf-8")
    else:
        sys.stdout.write(content)
    return 0


def _run_oracle_check(args) -> int:
    results = run_all_checks(seed=args.seed, trials=args.trials)
    width = max(len(r.name) for r in results)
    failed = False
    for r in results:
        status = "ok  " if r.ok else "FAIL"
        print(f"{status}  {r.name:<{width}}  max_dev={r.max_dev:.3g}")
        failed = failed or not r.ok
    return 3 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _run_gen(args)
        if args.command == "decide":
            return _run_decide(args)
        if args.command == "oracle-check":
            return _run_oracle_check(args)
        return _run_stage_command(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except pl.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
