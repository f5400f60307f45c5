"""Expected-utility-interval decisions and the rho interpolation parameter.

A mass function over a utility-labelled frame yields an interval
[E_low, E_high] (mass times worst / best utility of each focal set). The
parameter rho in [0, 1] picks the point value E_low + rho (E_high - E_low);
which alternative is best is then piecewise constant in rho, and an
alternative's preference is the total length of rho where it wins. The same
machinery scores sequential games where each player wants to end up holding
the highest point value on the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .ds import MassFunction, ValidationError


@dataclass(frozen=True)
class UtilityBpa:
    """Evidence over outcomes plus a utility for every frame element."""

    mass: MassFunction
    utilities: dict[str, float]

    def __post_init__(self):
        for e in self.mass.frame.elements:
            u = self.utilities.get(e)
            if u is None:
                raise ValidationError(f"no utility for frame element {e!r}")
            if not math.isfinite(u):
                raise ValidationError(f"utility for {e!r} is not finite")


@dataclass(frozen=True)
class UtilityIntervalChoice:
    id: str
    e_low: float
    e_high: float

    def __post_init__(self):
        if self.e_low > self.e_high + 1e-12:
            raise ValidationError(f"choice {self.id!r}: e_low {self.e_low} > e_high {self.e_high}")

    def value_at(self, rho: float) -> float:
        return self.e_low + rho * (self.e_high - self.e_low)


@dataclass(frozen=True)
class RhoSegment:
    lo: float
    hi: float
    winners: tuple[str, ...]  # more than one only for affinely identical choices


@dataclass(frozen=True)
class RhoSegmentation:
    segments: tuple[RhoSegment, ...]
    preferences: dict[str, float]


@dataclass(frozen=True)
class DecisionMaker:
    id: str
    choices: tuple[UtilityIntervalChoice, ...]

    def __post_init__(self):
        if not self.choices:
            raise ValidationError(f"decision maker {self.id!r} has no choices")


def expected_interval(u: UtilityBpa, choice_id: str = "") -> UtilityIntervalChoice:
    """[E_low, E_high]: every focal set contributes its worst / best utility."""
    e_low = 0.0
    e_high = 0.0
    for focal, mass in u.mass.items():
        values = [u.utilities[e] for e in focal.members]
        e_low += mass * min(values)
        e_high += mass * max(values)
    return UtilityIntervalChoice(choice_id, e_low, e_high)


def _breakpoints(choices: Sequence[UtilityIntervalChoice]) -> list[float]:
    points = {0.0, 1.0}
    for a_i, a in enumerate(choices):
        for b in choices[a_i + 1 :]:
            slope = (a.e_high - a.e_low) - (b.e_high - b.e_low)
            if slope == 0.0:
                continue
            x = (b.e_low - a.e_low) / slope
            if 0.0 < x < 1.0:
                points.add(x)
    return sorted(points)


def _winners_at(choices: Sequence[UtilityIntervalChoice], rho: float) -> tuple[str, ...]:
    values = [c.value_at(rho) for c in choices]
    best = max(values)
    return tuple(c.id for c, v in zip(choices, values) if v == best)


def rho_segmentation(choices: Sequence[UtilityIntervalChoice]) -> RhoSegmentation:
    """Upper envelope of the choices' point values over rho in [0, 1].

    Each segment is decided at its midpoint: strictly distinct lines can only
    tie at breakpoints, so the winner set is constant inside a segment and the
    boundary point belongs to the right-hand segment. Affinely identical
    winners share a segment and split its length equally.
    """
    if not choices:
        raise ValidationError("need at least one choice")
    ids = [c.id for c in choices]
    if len(set(ids)) != len(ids):
        raise ValidationError("choice ids must be unique")
    points = _breakpoints(choices)
    segments: list[RhoSegment] = []
    for lo, hi in zip(points, points[1:]):
        if hi - lo <= 0.0:
            continue
        winners = _winners_at(choices, (lo + hi) / 2.0)
        if segments and segments[-1].winners == winners:
            segments[-1] = RhoSegment(segments[-1].lo, hi, winners)
        else:
            segments.append(RhoSegment(lo, hi, winners))
    preferences = {c.id: 0.0 for c in choices}
    for seg in segments:
        share = (seg.hi - seg.lo) / len(seg.winners)
        for w in seg.winners:
            preferences[w] += share
    return RhoSegmentation(tuple(segments), preferences)


def _play(makers: Sequence[DecisionMaker], t: int, chosen: list[UtilityIntervalChoice], rho: float) -> tuple[UtilityIntervalChoice, ...]:
    """Backward induction: win the table if possible, then maximize own value,
    then take the earliest-listed alternative."""
    if t == len(makers):
        return tuple(chosen)
    best_key: tuple[bool, float] | None = None
    best_outcome: tuple[UtilityIntervalChoice, ...] | None = None
    for choice in makers[t].choices:
        chosen.append(choice)
        outcome = _play(makers, t + 1, chosen, rho)
        chosen.pop()
        own = choice.value_at(rho)
        table_max = max(c.value_at(rho) for c in outcome)
        key = (own >= table_max, own)
        if best_key is None or key > best_key:
            best_key, best_outcome = key, outcome
    assert best_outcome is not None
    return best_outcome


def _validate_game(makers: Sequence[DecisionMaker]) -> None:
    if not makers:
        raise ValidationError("need at least one decision maker")
    ids = [c.id for m in makers for c in m.choices]
    if len(set(ids)) != len(ids):
        raise ValidationError("choice ids must be unique across the game")


def sequential_play(makers: Sequence[DecisionMaker], rho: float) -> dict[str, str]:
    """Subgame-perfect assignment of one choice per decision maker at a fixed rho."""
    _validate_game(makers)
    if not 0.0 <= rho <= 1.0:
        raise ValidationError(f"rho {rho} outside [0, 1]")
    outcome = _play(makers, 0, [], rho)
    return {m.id: c.id for m, c in zip(makers, outcome)}


def game_preferences(makers: Sequence[DecisionMaker]) -> RhoSegmentation:
    """Competitive preference of every alternative over unknown rho.

    The solved game's outcome is piecewise constant between crossings of the
    alternatives' value lines, so each segment is played once at its midpoint
    and the winning (table-maximal) alternatives collect its length.
    """
    _validate_game(makers)
    all_choices = [c for m in makers for c in m.choices]
    points = _breakpoints(all_choices)
    segments: list[RhoSegment] = []
    for lo, hi in zip(points, points[1:]):
        if hi - lo <= 0.0:
            continue
        mid = (lo + hi) / 2.0
        outcome = _play(makers, 0, [], mid)
        table_max = max(c.value_at(mid) for c in outcome)
        winners = tuple(c.id for c in outcome if c.value_at(mid) == table_max)
        if segments and segments[-1].winners == winners:
            segments[-1] = RhoSegment(segments[-1].lo, hi, winners)
        else:
            segments.append(RhoSegment(lo, hi, winners))
    preferences = {c.id: 0.0 for c in all_choices}
    for seg in segments:
        share = (seg.hi - seg.lo) / len(seg.winners)
        for w in seg.winners:
            preferences[w] += share
    return RhoSegmentation(tuple(segments), preferences)
