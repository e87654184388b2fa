"""Greedy shift-index search: scoring, acceptance, budget accounting.

Control-flow paths (descent, exhaustion, unknowns) run against a stubbed
tracer with prescribed outcomes; scoring itself is also exercised on the
real 117-term family where (97, 98) collide on the two-stage curve.
"""

import math

import pytest

import hardyz.search as search_mod
from hardyz import (
    ConfigurationError,
    PathKind,
    PathSpec,
    SearchSpec,
    core_zero,
    score_path,
    search_split_indices,
)
from hardyz.tracker import (
    MERGE,
    STATUS_COMPLEX,
    STATUS_REAL,
    CollisionEvent,
    ZeroTrace,
)

N_TERMS = 117


class TestSearchSpec:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            SearchSpec(n=98, budget=0)
        with pytest.raises(ConfigurationError):
            SearchSpec(n=98, candidate_pool=(0, 1))
        with pytest.raises(ConfigurationError):
            SearchSpec(n=98, rho_grid=(1.2,))

    def test_pool_normalized(self):
        spec = SearchSpec(n=98, candidate_pool=(4, 2, 2))
        assert spec.candidate_pool == (2, 4)

    def test_resolved_terms(self):
        assert SearchSpec(n=98, n_terms=50).resolved_terms() == 50
        assert SearchSpec(n=98).resolved_terms() == int(core_zero(98) // 2)


class TestScorePath:
    def test_clean_path_scores_positive_gap(self):
        s = score_path(98, PathSpec.linear(N_TERMS))
        assert abs(s - 0.7437566734137704) <= 1e-6

    def test_colliding_path_scores_negative_depth(self):
        path = PathSpec.two_stage(N_TERMS, (1, 2, 4, 6, 12), rho=0.41)
        s = score_path(98, path)
        assert abs(s - (-0.43726288662973317)) <= 1e-6


class TestSearchReal:
    def test_stops_at_positive_root(self):
        spec = SearchSpec(n=98, candidate_pool=(1, 2, 3, 4), budget=30,
                          rho_grid=(0.41,), n_terms=N_TERMS)
        res = search_split_indices(spec)
        assert res.complete
        assert res.verify_calls == 1
        assert res.winner.shift_indices == ()
        assert res.winner.score > 0.0
        assert [c.shift_indices for c in res.accepted] == [()]

    def test_empty_pool_scores_linear_only(self):
        spec = SearchSpec(n=98, candidate_pool=(), budget=30,
                          rho_grid=(0.41,), n_terms=N_TERMS)
        res = search_split_indices(spec)
        assert res.complete
        assert res.verify_calls == 1
        assert len(res.ranking) == 1
        assert res.winner.shift_indices == ()

    def test_reference_set_appended_when_pool_contains_it(self):
        spec = SearchSpec(n=98, candidate_pool=tuple(range(1, 17)), budget=30,
                          rho_grid=(0.41,), n_terms=N_TERMS)
        res = search_split_indices(spec)
        assert res.verify_calls == 2
        ref = [c for c in res.ranking if c.shift_indices == (1, 2, 4, 6, 12)]
        assert len(ref) == 1 and ref[0].rho == 0.41
        assert ref[0].score < 0.0  # that curve collides for this index
        assert res.winner.shift_indices == ()

    def test_determinism(self):
        spec = SearchSpec(n=98, candidate_pool=(1, 2), budget=30,
                          rho_grid=(0.41,), n_terms=N_TERMS)
        a = search_split_indices(spec)
        b = search_split_indices(spec)
        rows = lambda r: [(c.shift_indices, c.rho, repr(c.score)) for c in r.ranking]
        assert rows(a) == rows(b)
        assert a.verify_calls == b.verify_calls


def _fake_traces(n: int, outcome) -> dict:
    """Prescribed tracer outcomes: ('gap', g), ('depth', d), or ('trunc',)."""
    base = 100.0
    rs = (0.0, 0.5, 1.0)

    def flat(m, offset):
        return ZeroTrace(index=m, samples=[
            (r, complex(base + offset), STATUS_REAL) for r in rs])

    kind = outcome[0]
    if kind == "trunc":
        tr = ZeroTrace(index=n, samples=[(0.0, complex(base), STATUS_REAL)],
                       truncated=True, truncation_reason="step_budget_exhausted")
        return {n - 1: flat(n - 1, -2.0), n: tr, n + 1: flat(n + 1, 2.0)}
    if kind == "depth":
        d = outcome[1]
        tr = ZeroTrace(index=n, samples=[
            (0.0, complex(base), STATUS_REAL),
            (0.5, complex(base, d), STATUS_COMPLEX),
            (1.0, complex(base), STATUS_REAL),
        ], events=[CollisionEvent(n - 1, n, 0.3, 0.30002, base, MERGE)])
        return {n - 1: flat(n - 1, -2.0), n: tr, n + 1: flat(n + 1, 2.0)}
    g = outcome[1]
    return {n - 1: flat(n - 1, -2.0), n: flat(n, 0.0), n + 1: flat(n + 1, g)}


def _key_of(path: PathSpec):
    if path.kind is PathKind.LINEAR:
        return (), 0.0
    return path.shift_indices, path.waypoints[4][1]


@pytest.fixture
def scripted_search(monkeypatch):
    """Patch the tracer with a (indices, rho) -> outcome table; returns the
    call log so budget accounting can be checked against it."""
    table = {}
    calls = []

    def fake_trace_block(indices, path, steps=None, config=None):
        key = _key_of(path)
        calls.append(key)
        return _fake_traces(indices[0], table[key])

    monkeypatch.setattr(search_mod, "trace_block", fake_trace_block)
    return table, calls


class TestSearchScripted:
    def test_greedy_descent_and_monotone_acceptance(self, scripted_search):
        table, calls = scripted_search
        table.update({
            ((), 0.0): ("depth", 0.5),
            ((1,), 0.3): ("depth", 0.4),
            ((1,), 0.5): ("depth", 0.2),
            ((2,), 0.3): ("depth", 0.45),
            ((2,), 0.5): ("depth", 0.35),
            ((1, 2), 0.3): ("gap", 0.3),
            ((1, 2), 0.5): ("gap", 0.1),
        })
        spec = SearchSpec(n=500, candidate_pool=(1, 2), budget=50,
                          rho_grid=(0.3, 0.5), n_terms=400)
        res = search_split_indices(spec)
        assert res.verify_calls == len(calls) == 7
        assert res.complete
        assert res.winner.shift_indices == (1, 2) and res.winner.rho == 0.3
        chain = [(c.shift_indices, round(c.score, 9)) for c in res.accepted]
        assert chain == [((), -0.5), ((1,), -0.2), ((1, 2), 0.3)]
        scores = [c.score for c in res.accepted]
        assert scores == sorted(scores)  # monotone acceptance

    def test_budget_exhaustion_flags_incomplete(self, scripted_search):
        table, calls = scripted_search
        table.update({
            ((), 0.0): ("depth", 0.5),
            ((1,), 0.3): ("depth", 0.4),
            ((1,), 0.5): ("depth", 0.2),
        })
        spec = SearchSpec(n=500, candidate_pool=(1, 2), budget=3,
                          rho_grid=(0.3, 0.5), n_terms=400)
        res = search_split_indices(spec)
        assert res.verify_calls == 3
        assert not res.complete
        # best evaluated candidate still wins the ranking
        assert res.winner.shift_indices == (1,) and res.winner.rho == 0.5
        assert [c.shift_indices for c in res.accepted] == [()]

    def test_unknown_root_does_not_stall(self, scripted_search):
        table, _ = scripted_search
        table.update({
            ((), 0.0): ("trunc",),
            ((1,), 0.3): ("gap", 0.2),
        })
        spec = SearchSpec(n=500, candidate_pool=(1,), budget=50,
                          rho_grid=(0.3,), n_terms=400)
        res = search_split_indices(spec)
        assert res.complete
        assert res.accepted[0].status == "UNKNOWN"
        assert math.isnan(res.accepted[0].score)
        assert res.winner.shift_indices == (1,)

    def test_ranking_sorted_with_unknown_last(self, scripted_search):
        table, _ = scripted_search
        table.update({
            ((), 0.0): ("depth", 0.5),
            ((1,), 0.3): ("trunc",),
            ((2,), 0.3): ("gap", 0.4),
        })
        spec = SearchSpec(n=500, candidate_pool=(1, 2), budget=50,
                          rho_grid=(0.3,), n_terms=400)
        res = search_split_indices(spec)
        ranked = res.ranking
        assert ranked[0].shift_indices == (2,)
        assert abs(ranked[0].score - 0.4) <= 1e-9
        assert math.isnan(ranked[-1].score)
        assert ranked[-1].status == "UNKNOWN"
        finite = [c.score for c in ranked if not math.isnan(c.score)]
        assert finite == sorted(finite, reverse=True)
