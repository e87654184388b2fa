"""Greedy search for shift-index sets giving collision-free two-stage paths.

The objective rewards clearance: a path whose traced zero never collides
scores +min_gap (bigger is safer), a colliding path scores minus the depth of
the excursion into the upper half plane, and a path whose trace truncated
scores NaN and is excluded from ranking. Exhaustive subset search over a pool
of 16 indices is out of reach (2^16 traces), so the search grows the shift
set greedily, line-searching the mid-level parameter rho at each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import EvalConfig
from .special import ConfigurationError
from .tracker import (
    SECTION_CONFIG,
    STATUS_REAL,
    PathSpec,
    StepControl,
    ZeroTrace,
    trace_block,
)
from .zeros import core_zero

# screening resolution: 1/32 keeps one verify call near 2 s at desk scale
# while still straddling every collision bracket wider than ~3e-2
SCREEN_STEPS = StepControl(initial_dr=1.0 / 32.0)

FORCE_INCLUDE = (1, 2, 4, 6, 12)
FORCE_INCLUDE_RHO = 0.41


@dataclass(frozen=True)
class SearchSpec:
    """What to search: target index, candidate pool, and evaluation budget.

    budget counts verify calls (one full path trace each). n_terms defaults
    to the target zero's native family size, floor(t_n / 2).
    """

    n: int
    candidate_pool: tuple[int, ...] = tuple(range(1, 17))
    budget: int = 200
    rho_grid: tuple[float, ...] = (0.3, 0.41, 0.5)
    n_terms: int | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ConfigurationError("budget must be >= 1")
        pool = tuple(sorted(set(int(k) for k in self.candidate_pool)))
        object.__setattr__(self, "candidate_pool", pool)
        if any(k < 1 for k in pool):
            raise ConfigurationError("candidate indices must be >= 1")
        for rho in self.rho_grid:
            if not 0.0 < rho < 1.0:
                raise ConfigurationError(f"rho = {rho} outside (0, 1)")

    def resolved_terms(self) -> int:
        if self.n_terms is not None:
            return int(self.n_terms)
        return int(core_zero(self.n) // 2)


@dataclass(frozen=True)
class ScoredCandidate:
    shift_indices: tuple[int, ...]
    rho: float
    score: float
    status: str  # OK | UNKNOWN
    min_gap: float
    merge_depth: float

    @property
    def rankable(self) -> bool:
        return not math.isnan(self.score)


@dataclass
class SearchResult:
    spec: SearchSpec
    ranking: list[ScoredCandidate] = field(default_factory=list)
    accepted: list[ScoredCandidate] = field(default_factory=list)
    verify_calls: int = 0
    complete: bool = True

    @property
    def winner(self) -> ScoredCandidate | None:
        ranked = [c for c in self.ranking if c.rankable]
        return ranked[0] if ranked else None


def _path_for(n_terms: int, shift_indices: tuple[int, ...], rho: float) -> PathSpec:
    if not shift_indices:
        # an empty shift set leaves only the rest-level ramp, which visits the
        # same coefficient vectors as the linear path
        return PathSpec.linear(n_terms)
    return PathSpec.two_stage(n_terms, shift_indices, rho=rho)


def _score_traces(n: int, traces: dict[int, ZeroTrace]) -> ScoredCandidate:
    tr = traces[n]
    depth = max((abs(loc.imag) for _, loc, _ in tr.samples), default=0.0)
    if tr.truncated:
        return ScoredCandidate((), 0.0, math.nan, "UNKNOWN", math.inf, depth)
    neighbors = [m for m in (n - 1, n + 1) if m in traces]
    min_gap = math.inf
    for i, (_, loc, status) in enumerate(tr.samples):
        if status != STATUS_REAL:
            continue
        for m in neighbors:
            _, locm, statm = traces[m].samples[i]
            if statm == STATUS_REAL:
                min_gap = min(min_gap, abs(loc.real - locm.real))
    collided = any(e.involves(n) for e in tr.events)
    score = -depth if collided else min_gap
    return ScoredCandidate((), 0.0, score, "OK", min_gap, depth)


def score_path(n: int, path: PathSpec, steps: StepControl | None = None,
               config: EvalConfig = SECTION_CONFIG) -> float:
    """+min_gap when the traced zero never collides, -merge depth when it
    does, NaN when the trace truncated (excluded from ranking)."""
    traces = trace_block([n], path, steps or SCREEN_STEPS, config)
    return _score_traces(n, traces).score


def search_split_indices(spec: SearchSpec, steps: StepControl | None = None,
                         config: EvalConfig = SECTION_CONFIG) -> SearchResult:
    """Greedy forward selection of shift indices.

    Starts from the empty set (the linear path), at each step evaluating every
    remaining pool index at every rho on the grid, accepting the best
    candidate whenever its score is at least the incumbent's. Stops on a
    positive score, an improvement dead end, or budget exhaustion; the last
    case flags the result INCOMPLETE. The reference set {1,2,4,6,12} at
    rho=0.41 is evaluated afterwards when budget remains and the pool
    contains all five indices. Everything is deterministic: fixed spec,
    fixed ranking.
    """
    steps = steps or SCREEN_STEPS
    n_terms = spec.resolved_terms()
    result = SearchResult(spec=spec)
    cache: dict[tuple[tuple[int, ...], float], ScoredCandidate] = {}

    def evaluate(indices: tuple[int, ...], rho: float) -> ScoredCandidate | None:
        key = (indices, rho if indices else 0.0)
        if key in cache:
            return cache[key]
        if result.verify_calls >= spec.budget:
            return None
        result.verify_calls += 1
        traces = trace_block([spec.n], _path_for(n_terms, indices, rho), steps, config)
        scored = _score_traces(spec.n, traces)
        scored = ScoredCandidate(indices, key[1], scored.score, scored.status,
                                 scored.min_gap, scored.merge_depth)
        cache[key] = scored
        result.ranking.append(scored)
        return scored

    incumbent = evaluate((), 0.0)
    if incumbent is None:  # pragma: no cover - budget >= 1 guarantees one call
        result.complete = False
        return result
    result.accepted.append(incumbent)
    exhausted = False

    def effective(c: ScoredCandidate) -> float:
        return c.score if c.rankable else -math.inf

    while effective(incumbent) <= 0.0:
        remaining = [k for k in spec.candidate_pool if k not in incumbent.shift_indices]
        best = None
        for k in remaining:
            trial = tuple(sorted(incumbent.shift_indices + (k,)))
            for rho in spec.rho_grid:
                cand = evaluate(trial, rho)
                if cand is None:
                    exhausted = True
                    break
                if cand.rankable and (best is None or cand.score > best.score):
                    best = cand
            if exhausted:
                break
        if exhausted or best is None or best.score < effective(incumbent):
            break
        incumbent = best
        result.accepted.append(incumbent)
    if exhausted and effective(incumbent) <= 0.0:
        result.complete = False
    if set(FORCE_INCLUDE) <= set(spec.candidate_pool):
        evaluate(FORCE_INCLUDE, FORCE_INCLUDE_RHO)
    result.ranking.sort(
        key=lambda c: (
            -(c.score if c.rankable else -math.inf),
            c.shift_indices,
            c.rho,
        )
    )
    return result
