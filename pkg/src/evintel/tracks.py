"""Track analysis over a complete DAG of ranked position evidence.

Vertices carry masses supporting "the target was at this position"; every
ordered pair (i, j) with i < j carries a mass against the direct transition
i -> j (for example because the implied speed is infeasible). A track is a
strictly increasing vertex sequence. The unnormalized plausibility of a track
factorizes as

    prod_{i not on track} (1 - p_i) * prod_{consecutive (i,j)} (1 - q_ij)

which the DP exploits; ``combine_oracle`` recomputes everything by enumerating
the full product space of evidence selections and is the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .ds import ValidationError

ORACLE_VERTEX_LIMIT = 6
DEFAULT_Q_CAP = 0.999

Path = tuple[int, ...]


class OracleSizeError(ValueError):
    """The enumeration oracle refuses graphs beyond its vertex limit."""

    def __init__(self, n: int):
        super().__init__(
            f"combine_oracle enumerates 2^(n + n(n-1)/2) selections and supports "
            f"at most {ORACLE_VERTEX_LIMIT} vertices; got {n}"
        )


@dataclass(frozen=True)
class TrackVertex:
    """Ranked position report; rank is 1-based and orders admissible transitions."""

    rank: int
    time_s: float | None = None
    pos_km: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class TrackGraph:
    p: tuple[float, ...]  # vertex masses, index rank-1
    q: dict[tuple[int, int], float]  # edge masses keyed by (i, j) with i < j, 1-based
    vertices: tuple[TrackVertex, ...] | None = None
    _oracle_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.p)
        if n == 0:
            raise ValidationError("track graph needs at least one vertex")
        for i, pi in enumerate(self.p, start=1):
            if not 0.0 <= pi < 1.0:
                raise ValidationError(f"vertex mass p_{i} = {pi} outside [0, 1)")
        expected = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        if set(self.q) != expected:
            raise ValidationError("edge masses must cover exactly every pair i < j")
        for (i, j), qij in self.q.items():
            if not 0.0 <= qij < 1.0:
                raise ValidationError(f"edge mass q_{i}{j} = {qij} outside [0, 1)")
        if self.vertices is not None:
            if len(self.vertices) != n:
                raise ValidationError("vertex metadata length differs from p")
            if [v.rank for v in self.vertices] != list(range(1, n + 1)):
                raise ValidationError("vertex ranks must be 1..n in order")

    @property
    def n(self) -> int:
        return len(self.p)

    def all_paths(self) -> list[Path]:
        """Every strictly increasing vertex sequence, by subset encoding order."""
        n = self.n
        return [_bits_to_path(bits) for bits in range(1, 1 << n)]


@dataclass(frozen=True)
class TrackAnalysis:
    """Oracle output: per-path support and plausibility plus the total conflict."""

    conflict: float
    support: dict[Path, float]
    plausibility: dict[Path, float]
    plausibility_unnorm: dict[Path, float]


def _bits_to_path(bits: int) -> Path:
    return tuple(i + 1 for i in range(bits.bit_length()) if bits >> i & 1)


def _check_path(g: TrackGraph, path: Sequence[int]) -> Path:
    path = tuple(path)
    if not path:
        raise ValidationError("a track visits at least one vertex")
    if any(not 1 <= v <= g.n for v in path):
        raise ValidationError(f"path {path} leaves the vertex range 1..{g.n}")
    if any(a >= b for a, b in zip(path, path[1:])):
        raise ValidationError(f"path {path} is not strictly increasing")
    return path


def kinematic_edge_mass(
    v_i: TrackVertex,
    v_j: TrackVertex,
    v_max_kmh: float,
    q_cap: float = DEFAULT_Q_CAP,
) -> float:
    """Doubt against the direct transition i -> j from the speed it would require.

    Zero while the required speed stays within ``v_max_kmh``; beyond that the
    doubt is 1 - v_max/v, capped at ``q_cap``. A non-positive time difference
    gets the full cap.
    """
    if v_max_kmh <= 0:
        raise ValidationError("v_max must be positive")
    if v_i.rank >= v_j.rank:
        raise ValidationError("edges run from lower to higher rank")
    if v_i.time_s is None or v_j.time_s is None or v_i.pos_km is None or v_j.pos_km is None:
        raise ValidationError("kinematic edge mass needs time and position on both vertices")
    dt_h = (v_j.time_s - v_i.time_s) / 3600.0
    if dt_h <= 0.0:
        return q_cap
    distance = math.dist(v_i.pos_km, v_j.pos_km)
    speed = distance / dt_h
    if speed <= v_max_kmh:
        return 0.0
    return min(q_cap, 1.0 - v_max_kmh / speed)


def kinematic_graph(
    vertices: Sequence[TrackVertex],
    p: Sequence[float],
    v_max_kmh: float,
    q_cap: float = DEFAULT_Q_CAP,
) -> TrackGraph:
    """Complete track graph with kinematically derived edge doubts."""
    q = {
        (vi.rank, vj.rank): kinematic_edge_mass(vi, vj, v_max_kmh, q_cap)
        for a, vi in enumerate(vertices)
        for vj in vertices[a + 1 :]
    }
    return TrackGraph(tuple(p), q, tuple(vertices))


def path_plausibility_unnorm(g: TrackGraph, path: Sequence[int]) -> float:
    path = _check_path(g, path)
    on = set(path)
    value = math.prod(1.0 - pi for i, pi in enumerate(g.p, start=1) if i not in on)
    return value * math.prod(1.0 - g.q[i, j] for i, j in zip(path, path[1:]))


def path_plausibility(g: TrackGraph, path: Sequence[int]) -> tuple[float, float | None]:
    """(unnormalized, normalized) plausibility of one completely specified track.

    Normalization divides by 1 - total conflict, which requires the oracle's
    full combination; past the oracle limit it is reported as None.
    """
    unnorm = path_plausibility_unnorm(g, path)
    if g.n > ORACLE_VERTEX_LIMIT:
        return unnorm, None
    return unnorm, unnorm / (1.0 - cached_oracle(g).conflict)


def _evidence_focals(g: TrackGraph) -> list[tuple[int, float]]:
    """Each piece of evidence as (set-of-paths bitmask, mass) over the path frame."""
    n = g.n
    n_paths = (1 << n) - 1
    focals: list[tuple[int, float]] = []
    for i in range(1, n + 1):
        mask = 0
        for bits in range(1, n_paths + 1):
            if bits >> (i - 1) & 1:
                mask |= 1 << (bits - 1)
        focals.append((mask, g.p[i - 1]))
    for (i, j), qij in sorted(g.q.items()):
        between = ((1 << (j - 1)) - 1) & ~((1 << i) - 1)
        mask = 0
        for bits in range(1, n_paths + 1):
            direct = bits >> (i - 1) & 1 and bits >> (j - 1) & 1 and not bits & between
            if not direct:
                mask |= 1 << (bits - 1)
        focals.append((mask, qij))
    return focals


def combine_oracle(g: TrackGraph) -> TrackAnalysis:
    """Support and plausibility of every track by full product-space enumeration.

    The frame is the set of all nonempty tracks. Vertex evidence i puts mass
    p_i on "the track visits i"; edge evidence (i, j) puts mass q_ij on "the
    track does not make the direct transition i -> j". All 2^(#evidence)
    focal selections are enumerated (sharing selection prefixes) and their
    intersections accumulated.
    """
    if g.n > ORACLE_VERTEX_LIMIT:
        raise OracleSizeError(g.n)
    n_paths = (1 << g.n) - 1
    full = (1 << n_paths) - 1
    acc: dict[int, float] = {}
    focals = _evidence_focals(g)
    stack: list[tuple[int, int, float]] = [(0, full, 1.0)]
    while stack:
        idx, mask, weight = stack.pop()
        if weight == 0.0:
            continue
        if idx == len(focals):
            acc[mask] = acc.get(mask, 0.0) + weight
            continue
        fmask, w = focals[idx]
        stack.append((idx + 1, mask, weight * (1.0 - w)))
        stack.append((idx + 1, mask & fmask, weight * w))

    conflict = acc.pop(0, 0.0)
    norm = 1.0 - conflict
    bel_unnorm = [0.0] * n_paths
    pls_unnorm = [0.0] * n_paths
    for mask, weight in acc.items():
        if mask.bit_count() == 1:
            bel_unnorm[mask.bit_length() - 1] += weight
        m = mask
        while m:
            low = m & -m
            pls_unnorm[low.bit_length() - 1] += weight
            m ^= low
    support: dict[Path, float] = {}
    plausibility: dict[Path, float] = {}
    plausibility_unnorm: dict[Path, float] = {}
    for bits in range(1, n_paths + 1):
        path = _bits_to_path(bits)
        support[path] = bel_unnorm[bits - 1] / norm
        plausibility[path] = pls_unnorm[bits - 1] / norm
        plausibility_unnorm[path] = pls_unnorm[bits - 1]
    return TrackAnalysis(conflict, support, plausibility, plausibility_unnorm)


def cached_oracle(g: TrackGraph) -> TrackAnalysis:
    """combine_oracle memoized on the (immutable) graph."""
    if not g._oracle_cache:
        g._oracle_cache.append(combine_oracle(g))
    return g._oracle_cache[0]


def best_path_dp(g: TrackGraph, top_k: int = 1) -> list[tuple[Path, float]]:
    """Top-k tracks by unnormalized plausibility via longest-path DP, O(n^2 k).

    Factoring out the constant prod(1 - p_i) turns the plausibility product
    into the additive score sum(-log(1-p_i) over the path) + sum(log(1-q_ij)
    over consecutive pairs). Ties prefer lexicographically smaller sequences.
    """
    if top_k < 1:
        raise ValidationError("top_k must be >= 1")
    n = g.n
    gain = [-math.log(1.0 - pi) for pi in g.p]
    ranked: dict[int, list[tuple[float, Path]]] = {}
    for j in range(1, n + 1):
        candidates: list[tuple[float, Path]] = [(gain[j - 1], (j,))]
        for i in range(1, j):
            step = math.log(1.0 - g.q[i, j]) + gain[j - 1]
            candidates.extend((score + step, path + (j,)) for score, path in ranked[i])
        candidates.sort(key=lambda sp: (-sp[0], sp[1]))
        ranked[j] = candidates[:top_k]
    pool = [sp for lst in ranked.values() for sp in lst]
    pool.sort(key=lambda sp: (-sp[0], sp[1]))
    # report exact products, not exp(score), so values match path_plausibility bit-for-bit
    return [(path, path_plausibility_unnorm(g, path)) for _, path in pool[:top_k]]


def dot_export(g: TrackGraph) -> str:
    """Graphviz rendering with vertex and edge masses as 6-decimal labels."""
    lines = ["digraph trackgraph {"]
    for i in range(1, g.n + 1):
        meta = ""
        if g.vertices is not None and g.vertices[i - 1].time_s is not None:
            meta = f" t={g.vertices[i - 1].time_s:.0f}s"
        lines.append(f'  v{i} [label="{i}{meta} p={g.p[i - 1]:.6f}"];')
    for (i, j), qij in sorted(g.q.items()):
        lines.append(f'  v{i} -> v{j} [label="{qij:.6f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
