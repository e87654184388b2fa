"""Continuation of section zeros along curves in coefficient space.

A path gamma(r) assigns a coefficient vector to each r in [0, 1], from the
all-zeros core at r=0 to the all-ones section at r=1. Zeros are tracked in
blocks of adjacent indices (the requested ones plus two guards per side) by
Newton continuation with adaptive r-steps. When an adjacent pair collides its
zeros leave the real axis as a conjugate pair; the tracker records a MERGE
event with an r-bracket refined by bisection, follows the upper-half-plane
member by complex Newton (the lower one is its conjugate), and records a
RETURN event when a real sign-change pair reappears under it.

Near a collision the pair gap behaves like sqrt(|r - r*|), so positions move
arbitrarily fast in r right at the event. Plain step halving therefore cannot
ride through it; once halving has shrunk the step by 2^6 the tracker switches
to a sign-change scan across the tightest pair's window, which either yields
bisected positions (still real), or certifies that the sign change is gone
(merged), or that it reappeared under a complex pair (returned).
"""

from __future__ import annotations

import bisect as _bisect_mod
import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    CoefficientVector,
    EvalConfig,
    Method,
    section_value_and_derivative,
    split_section_vd,
    subset_term_rows,
)
from .special import ConfigurationError, DomainError, theta_prime
from .zeros import core_zero

STATUS_REAL = "REAL"
STATUS_COMPLEX = "COMPLEX_PAIR"

MERGE = "MERGE"
RETURN = "RETURN"

SECTION_CONFIG = EvalConfig(method=Method.SECTION)


class PathKind(enum.Enum):
    LINEAR = "linear"
    TWO_STAGE = "two_stage"
    PIECEWISE = "piecewise"


def two_stage_waypoints(rho: float = 0.41) -> tuple[tuple[float, float], ...]:
    """The reference two-stage curve shape in the (shift level, rest level)
    plane: shifting stage to (1, rho), then the rest level rises to 1."""
    if not 0.25 <= rho <= 0.6:
        raise ConfigurationError(
            f"rho = {rho} breaks waypoint monotonicity; need 0.25 <= rho <= 0.6"
        )
    return (
        (0.0, 0.0),
        (0.25, 0.05),
        (0.55, 0.15),
        (0.75, 0.25),
        (1.0, rho),
        (1.0, 0.6),
        (1.0, 0.8),
        (1.0, 0.95),
        (1.0, 1.0),
    )


@dataclass(frozen=True)
class PathSpec:
    """A curve r -> coefficient vector of a fixed family size n_terms.

    LINEAR: every coefficient equals r. TWO_STAGE: coefficients on
    shift_indices follow the first waypoint coordinate, the rest the second,
    with piecewise-linear interpolation through the waypoints, uniform in r
    across segments. PIECEWISE: linear interpolation between (r, vector) knots.
    """

    n_terms: int
    kind: PathKind
    shift_indices: tuple[int, ...] = ()
    waypoints: tuple[tuple[float, float], ...] = ()
    knots: tuple[tuple[float, CoefficientVector], ...] = ()

    def __post_init__(self):
        if self.n_terms < 1:
            raise ConfigurationError(f"n_terms must be >= 1, got {self.n_terms}")
        if self.kind is PathKind.LINEAR:
            if self.shift_indices or self.waypoints or self.knots:
                raise ConfigurationError("a LINEAR path takes no extra structure")
        elif self.kind is PathKind.TWO_STAGE:
            idx = tuple(sorted(set(int(k) for k in self.shift_indices)))
            if any(k < 1 or k > self.n_terms for k in idx):
                raise ConfigurationError(
                    f"shift indices must lie in 1..{self.n_terms}, got {idx}"
                )
            object.__setattr__(self, "shift_indices", idx)
            wps = tuple((float(x), float(y)) for x, y in self.waypoints)
            if len(wps) < 2:
                raise ConfigurationError("a TWO_STAGE path needs at least two waypoints")
            for x, y in wps:
                if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                    raise ConfigurationError(f"waypoint ({x}, {y}) outside [0,1]^2")
            for (x0, y0), (x1, y1) in zip(wps, wps[1:]):
                if x1 < x0 or y1 < y0:
                    raise ConfigurationError("waypoints must be monotone in both levels")
            if wps[0] != (0.0, 0.0) or wps[-1] != (1.0, 1.0):
                raise ConfigurationError("waypoints must run from (0,0) to (1,1)")
            object.__setattr__(self, "waypoints", wps)
            if self.knots:
                raise ConfigurationError("a TWO_STAGE path takes no knots")
        elif self.kind is PathKind.PIECEWISE:
            if len(self.knots) < 2:
                raise ConfigurationError("a PIECEWISE path needs at least two knots")
            rs = [float(r) for r, _ in self.knots]
            if rs != sorted(set(rs)) or rs[0] != 0.0 or rs[-1] != 1.0:
                raise ConfigurationError("knot parameters must increase from 0 to 1")
            for _, vec in self.knots:
                if vec.n_terms != self.n_terms:
                    raise ConfigurationError("knot vectors must match n_terms")
            first = self.knots[0][1].coeffs
            last = self.knots[-1][1].coeffs
            if np.any(first != 0.0) or np.any(last != 1.0):
                raise ConfigurationError("knots must run from the zero to the ones vector")
            if self.shift_indices or self.waypoints:
                raise ConfigurationError("a PIECEWISE path takes only knots")
        else:  # pragma: no cover
            raise ConfigurationError(f"unknown path kind {self.kind!r}")

    @classmethod
    def linear(cls, n_terms: int) -> "PathSpec":
        return cls(n_terms=n_terms, kind=PathKind.LINEAR)

    @classmethod
    def two_stage(cls, n_terms: int, shift_indices, rho: float = 0.41) -> "PathSpec":
        return cls(
            n_terms=n_terms,
            kind=PathKind.TWO_STAGE,
            shift_indices=tuple(shift_indices),
            waypoints=two_stage_waypoints(rho),
        )


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"path parameter r = {r} outside [0, 1]")
    return r


def path_levels(path: PathSpec, r: float) -> tuple[float, float]:
    """(shift level, rest level) at parameter r for LINEAR and TWO_STAGE."""
    r = _check_r(r)
    if path.kind is PathKind.LINEAR:
        return r, r
    if path.kind is not PathKind.TWO_STAGE:
        raise ConfigurationError("levels are defined for LINEAR and TWO_STAGE paths")
    nseg = len(path.waypoints) - 1
    pos = r * nseg
    i = min(int(math.floor(pos)), nseg - 1)
    lam = pos - i
    x0, y0 = path.waypoints[i]
    x1, y1 = path.waypoints[i + 1]
    return x0 + lam * (x1 - x0), y0 + lam * (y1 - y0)


def path_eval(path: PathSpec, r: float) -> CoefficientVector:
    """The coefficient vector at parameter r."""
    r = _check_r(r)
    if path.kind is PathKind.PIECEWISE:
        rs = [kr for kr, _ in path.knots]
        j = min(max(_bisect_mod.bisect_right(rs, r) - 1, 0), len(rs) - 2)
        r0, v0 = path.knots[j]
        r1, v1 = path.knots[j + 1]
        lam = 0.0 if r1 == r0 else (r - r0) / (r1 - r0)
        return CoefficientVector(v0.coeffs + lam * (v1.coeffs - v0.coeffs))
    r_in, r_out = path_levels(path, r)
    arr = np.full(path.n_terms, r_out)
    for k in path.shift_indices:
        arr[k - 1] = r_in
    return CoefficientVector(arr)


@dataclass(frozen=True)
class StepControl:
    initial_dr: float = 1.0 / 256.0
    min_dr: float = 1e-6
    max_steps: int = 20000
    gap_tol: float = 1e-4
    newton_max_iter: int = 30
    return_im_tol: float = 1e-6
    complex_seed_im: float = 1e-3
    bracket_tol: float = 2e-5

    def __post_init__(self):
        if not 0.0 < self.min_dr <= self.initial_dr <= 1.0:
            raise ConfigurationError("need 0 < min_dr <= initial_dr <= 1")
        if self.max_steps < 1 or self.newton_max_iter < 1:
            raise ConfigurationError("step and iteration budgets must be >= 1")
        if min(self.gap_tol, self.return_im_tol, self.complex_seed_im, self.bracket_tol) <= 0:
            raise ConfigurationError("tolerances must be positive")


@dataclass(frozen=True)
class CollisionEvent:
    lower_index: int
    upper_index: int
    r_lo: float
    r_hi: float
    t_estimate: float
    kind: str

    def involves(self, n: int) -> bool:
        return n in (self.lower_index, self.upper_index)


@dataclass
class ZeroTrace:
    index: int
    samples: list[tuple[float, complex, str]] = field(default_factory=list)
    events: list[CollisionEvent] = field(default_factory=list)
    truncated: bool = False
    truncation_reason: str = ""

    @property
    def endpoint(self) -> complex:
        return self.samples[-1][1]


@dataclass(frozen=True)
class NonCollidingReport:
    n: int
    noncolliding: bool | None
    min_gap: float
    argmin_r: float
    status: str
    events: tuple[CollisionEvent, ...] = ()


def _t_tol(t: float) -> float:
    # float64 phase noise grows like eps*t; 4e-14*t keeps Newton honest there
    return max(1e-10, 4e-14 * abs(t))


class _PathEvaluator:
    """Value/derivative of the section along the path, using the two-group
    split decomposition when the path supports it."""

    def __init__(self, path: PathSpec, config: EvalConfig):
        self.path = path
        self.config = config
        if path.kind is PathKind.PIECEWISE:
            self.split = False
        else:
            self.split = True
            self.sub_logs, self.sub_invs = subset_term_rows(path.shift_indices)

    def vd(self, t, r: float):
        if self.split:
            r_in, r_out = path_levels(self.path, r)
            return split_section_vd(
                t, self.path.n_terms, self.sub_logs, self.sub_invs, r_in, r_out, self.config
            )
        a = path_eval(self.path, r)
        return section_value_and_derivative(t, a, self.config)

    def value(self, t, r: float):
        return self.vd(t, r)[0]

    def newton_real(self, t0: float, r: float, max_iter: int):
        t = float(t0)
        for _ in range(max_iter):
            v, d = self.vd(t, r)
            if abs(d) < 1e-14:
                return t, False
            step = v / d
            cap = math.pi / theta_prime(t, self.config.precision)
            if abs(step) > cap:
                step = math.copysign(cap, step)
            t -= step
            if abs(step) <= _t_tol(t):
                return t, True
        return t, False

    def newton_complex(self, z0: complex, r: float, max_iter: int):
        z = complex(z0)
        for _ in range(max_iter):
            v, d = self.vd(z, r)
            if abs(d) < 1e-14:
                return z, False
            step = v / d
            cap = math.pi / theta_prime(z.real, self.config.precision)
            if abs(step) > cap:
                step *= cap / abs(step)
            z -= step
            if abs(step) <= _t_tol(abs(z)):
                return z, True
        return z, False


def _scan_sign_zeros(ev: _PathEvaluator, r: float, lo: float, hi: float,
                     points: int = 65, refine: bool = True):
    """Zeros of the section over [lo, hi] found by a sign-change scan.

    With refine=False the crossing midpoints come back unbisected; event
    predicates only need the count, so they skip the extra evaluations.
    """
    xs = np.linspace(lo, hi, points)
    vals = [ev.value(float(x), r) for x in xs]
    zeros = []
    for i in range(points - 1):
        a, fa = float(xs[i]), vals[i]
        b, fb = float(xs[i + 1]), vals[i + 1]
        if fa == 0.0:
            zeros.append(a)
            continue
        if (fa < 0.0) != (fb < 0.0):
            if refine:
                for _ in range(60):
                    m = 0.5 * (a + b)
                    if m == a or m == b:
                        break
                    fm = ev.value(m, r)
                    if fm == 0.0:
                        a = b = m
                        break
                    if (fa < 0.0) == (fm < 0.0):
                        a, fa = m, fm
                    else:
                        b = m
            zeros.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        zeros.append(float(xs[-1]))
    return zeros


class _Block:
    """Mutable tracking state for a set of adjacent indices."""

    def __init__(self, indices, path, steps, config):
        self.indices = sorted(indices)
        self.path = path
        self.steps = steps
        self.ev = _PathEvaluator(path, config)
        self.real: dict[int, float] = {}
        self.pairs: dict[tuple[int, int], complex] = {}
        self.traces = {n: ZeroTrace(index=n) for n in self.indices}
        self.r = 0.0
        self.events: list[CollisionEvent] = []

    # -- bookkeeping ---------------------------------------------------------

    def record(self):
        for n in self.indices:
            if n in self.real:
                self.traces[n].samples.append((self.r, complex(self.real[n]), STATUS_REAL))
            else:
                pair = self._pair_of(n)
                z = self.pairs[pair]
                loc = z if n == pair[1] else z.conjugate()
                self.traces[n].samples.append((self.r, loc, STATUS_COMPLEX))

    def _pair_of(self, n: int):
        for pair in self.pairs:
            if n in pair:
                return pair
        raise KeyError(n)

    def add_event(self, event: CollisionEvent):
        self.events.append(event)
        for n in (event.lower_index, event.upper_index):
            # an edge merge names a partner outside the block; it has no trace
            if n in self.traces:
                self.traces[n].events.append(event)

    def truncate(self, reason: str):
        for tr in self.traces.values():
            tr.truncated = True
            tr.truncation_reason = reason

    def ordered_members(self):
        """(position, key) pairs in ascending t; complex pairs collapse to Re."""
        items = []
        for n, t in self.real.items():
            items.append((t, ("real", n)))
        for pair, z in self.pairs.items():
            items.append((z.real, ("pair", pair)))
        items.sort(key=lambda x: x[0])
        return items

    def neighbor_gap(self, pos: float) -> float:
        gaps = [abs(pos - q) for q, _ in self.ordered_members() if q != pos]
        return min(gaps) if gaps else math.inf

    # -- stepping ------------------------------------------------------------

    def attempt(self, r_next: float):
        """Try to move every member to r_next. Returns (ok, new_real, new_pairs)."""
        members = self.ordered_members()
        positions = [q for q, _ in members]
        new_real = {}
        new_pairs = {}
        for i, (pos, (tag, key)) in enumerate(members):
            left = positions[i - 1] if i > 0 else -math.inf
            right = positions[i + 1] if i + 1 < len(positions) else math.inf
            limit = 0.5 * min(pos - left, right - pos)
            if tag == "real":
                t_new, ok = self.ev.newton_real(pos, r_next, self.steps.newton_max_iter)
                if not ok or not math.isfinite(t_new) or abs(t_new - pos) > limit:
                    return False, None, None
                new_real[key] = t_new
            else:
                z = self.pairs[key]
                z_new, ok = self.ev.newton_complex(z, r_next, self.steps.newton_max_iter)
                moved = abs(z_new - z)
                if not ok or not cmath.isfinite(z_new) or moved > max(limit, 10.0 * self.steps.complex_seed_im):
                    return False, None, None
                if z_new.imag < 0.0:
                    z_new = z_new.conjugate()
                new_pairs[key] = z_new
        order = sorted(
            [(t, ("real", n)) for n, t in new_real.items()]
            + [(z.real, ("pair", pair)) for pair, z in new_pairs.items()],
            key=lambda x: x[0],
        )
        if [k for _, k in order] != [k for _, k in members]:
            return False, None, None
        # distinct real members must stay separated by more than Newton noise
        reals = sorted(new_real.values())
        for a, b in zip(reals, reals[1:]):
            if b - a <= 10.0 * _t_tol(b):
                return False, None, None
        return True, new_real, new_pairs

    def tightest_real_pair(self):
        reals = sorted((t, n) for n, t in self.real.items())
        best = None
        for (ta, na), (tb, nb) in zip(reals, reals[1:]):
            if best is None or tb - ta < best[0]:
                best = (tb - ta, na, nb, ta, tb)
        return best

    def scan_window(self, ta: float, tb: float):
        gap = tb - ta
        span = max(4.0 * gap, 1e-3)
        lo = ta - span
        hi = tb + span
        for q, _ in self.ordered_members():
            if q < ta and q > lo:
                lo = 0.5 * (q + ta)
            if q > tb and q < hi:
                hi = 0.5 * (q + tb)
        return lo, hi

    def _step_real_except(self, r_next: float, exclude: tuple):
        """Newton-step every real member not in exclude; None on any failure."""
        members = self.ordered_members()
        positions = [q for q, _ in members]
        out = {}
        for i, (pos, (tag, key)) in enumerate(members):
            if tag != "real" or key in exclude:
                continue
            left = positions[i - 1] if i > 0 else -math.inf
            right = positions[i + 1] if i + 1 < len(positions) else math.inf
            limit = 0.5 * min(pos - left, right - pos)
            t_new, ok = self.ev.newton_real(pos, r_next, self.steps.newton_max_iter)
            if not ok or not math.isfinite(t_new) or abs(t_new - pos) > limit:
                return None
            out[key] = t_new
        return out

    def _step_pairs_except(self, r_next: float, exclude: tuple):
        out = {}
        for pair, z in self.pairs.items():
            if pair in exclude or pair == exclude:
                continue
            z_new, ok = self.ev.newton_complex(z, r_next, self.steps.newton_max_iter)
            if not ok or not cmath.isfinite(z_new):
                return None
            if z_new.imag < 0.0:
                z_new = z_new.conjugate()
            out[pair] = z_new
        return out

    # -- event handling ------------------------------------------------------

    def _do_merge(self, na: int, nb: int, r_next: float) -> bool:
        """Commit a MERGE of real members (na, nb) somewhere in (r, r_next].

        Steps the rest of the block to r_next first, bisects the event bracket
        on the sign-change predicate, then seeds the complex pair. Returns
        False if the rest of the block cannot step (caller keeps halving) and
        True once the state sits at r_next, possibly truncated.
        """
        others_real = self._step_real_except(r_next, (na, nb))
        if others_real is None:
            return False
        others_pairs = self._step_pairs_except(r_next, ())
        if others_pairs is None:
            return False
        old = {k: self.real[k] for k in others_real}
        drift = (
            float(np.mean([others_real[k] - old[k] for k in others_real]))
            if others_real
            else 0.0
        )
        ta, tb = self.real[na], self.real[nb]
        span = max(4.0 * (tb - ta), 1e-3)
        c0 = 0.5 * (ta + tb)

        def pair_zeros(q: float):
            lam = 0.0 if r_next == self.r else (q - self.r) / (r_next - self.r)
            c = c0 + lam * drift
            return _scan_sign_zeros(self.ev, q, c - span, c + span, refine=False)

        a, b = self.r, r_next
        best_real = (ta, tb)
        while b - a > self.steps.bracket_tol:
            m = 0.5 * (a + b)
            zs = pair_zeros(m)
            if len(zs) >= 2:
                a = m
                best_real = (zs[0], zs[-1])
            else:
                b = m
        t_est = 0.5 * (best_real[0] + best_real[1])
        event = CollisionEvent(
            lower_index=na, upper_index=nb, r_lo=a, r_hi=b, t_estimate=t_est, kind=MERGE
        )
        # seed the conjugate pair at r_next; the tracked member is the upper one
        z = None
        for eps in (self.steps.complex_seed_im, 4.0 * self.steps.complex_seed_im):
            z0 = complex(t_est, eps)
            z_try, ok = self.ev.newton_complex(z0, r_next, 2 * self.steps.newton_max_iter)
            if ok and cmath.isfinite(z_try) and abs(z_try.real - t_est) < max(10 * span, 0.05):
                z = z_try.conjugate() if z_try.imag < 0.0 else z_try
                break
        self.real = {k: v for k, v in self.real.items() if k not in (na, nb)}
        self.real.update(others_real)
        self.pairs = dict(others_pairs)
        self.add_event(event)
        self.r = r_next
        if z is None:
            self.record()
            self.truncate("complex_seed_failed")
            return True
        self.pairs[(na, nb)] = z
        self.record()
        return True

    def pair_bounds(self, pair: tuple) -> tuple:
        """Scan bounds for a complex pair: midpoints to adjacent members, or a
        final-spacing cap where the block has no member on that side."""
        c = self.pairs[pair].real
        lows, highs = [], []
        for q, key in self.ordered_members():
            if key == ("pair", pair):
                continue
            (lows if q < c else highs).append(q)
        lo_bound = 0.5 * (max(lows) + c) if lows else c - 1.0
        hi_bound = 0.5 * (min(highs) + c) if highs else c + 1.0
        return lo_bound, hi_bound

    def _do_return(self, pair: tuple, r_next: float) -> bool:
        """Commit a RETURN of a complex pair to two real zeros in (r, r_next].

        The returned pair separates like sqrt(r - r*), so by detection time it
        can be much wider than the last imaginary part; the scan window grows
        geometrically until it sees both crossings or hits the neighbors.
        """
        na, nb = pair
        z_old = self.pairs[pair]
        others_real = self._step_real_except(r_next, ())
        if others_real is None:
            return False
        others_pairs = self._step_pairs_except(r_next, (pair,))
        if others_pairs is None:
            return False
        lo_bound, hi_bound = self.pair_bounds(pair)
        span = max(4.0 * abs(z_old.imag), 1e-3)
        while True:
            lo = max(z_old.real - span, lo_bound)
            hi = min(z_old.real + span, hi_bound)
            zs_next = _scan_sign_zeros(self.ev, r_next, lo, hi, refine=False)
            if len(zs_next) >= 2 or (lo == lo_bound and hi == hi_bound):
                break
            span *= 2.0
        if len(zs_next) < 2:
            return False
        c1 = 0.5 * (zs_next[0] + zs_next[-1])
        span = max(span, 2.0 * (zs_next[-1] - zs_next[0]))

        def has_real_pair(q: float):
            lam = 0.0 if r_next == self.r else (q - self.r) / (r_next - self.r)
            c = z_old.real + lam * (c1 - z_old.real)
            zs = _scan_sign_zeros(self.ev, q, max(c - span, lo_bound),
                                  min(c + span, hi_bound), refine=False)
            return len(zs) >= 2

        a, b = self.r, r_next
        while b - a > self.steps.bracket_tol:
            m = 0.5 * (a + b)
            if has_real_pair(m):
                b = m
            else:
                a = m
        zs = _scan_sign_zeros(self.ev, r_next, max(c1 - span, lo_bound),
                              min(c1 + span, hi_bound), refine=True)
        if len(zs) < 2:
            return False
        # the two crossings nearest the pair's last real part, in order
        zs = sorted(sorted(zs, key=lambda x: abs(x - z_old.real))[:2])
        event = CollisionEvent(
            lower_index=na,
            upper_index=nb,
            r_lo=a,
            r_hi=b,
            t_estimate=0.5 * (zs[0] + zs[1]),
            kind=RETURN,
        )
        self.real.update(others_real)
        self.real[na], self.real[nb] = zs[0], zs[1]
        self.pairs = dict(others_pairs)
        self.add_event(event)
        self.r = r_next
        self.record()
        return True

    def _detect(self, r_next: float) -> bool:
        """After halving bottoms out, test for an event hiding in (r, r_next].

        Returns True if the block advanced to r_next (event committed or the
        tight pair re-acquired by scan); False to keep halving.
        """
        for pair in list(self.pairs):
            if self._do_return(pair, r_next):
                return True
        tight = self.tightest_real_pair()
        if tight is not None:
            gap, na, nb, ta, tb = tight
            lo, hi = self.scan_window(ta, tb)
            zs = _scan_sign_zeros(self.ev, r_next, lo, hi, refine=False)
            if len(zs) == 0:
                return self._do_merge(na, nb, r_next)
            if len(zs) >= 2:
                others = self._step_real_except(r_next, (na, nb))
                pairs_new = self._step_pairs_except(r_next, ())
                if others is None or pairs_new is None:
                    return self._edge_merge_probe(r_next)
                zs = _scan_sign_zeros(self.ev, r_next, lo, hi, refine=True)
                if len(zs) < 2:
                    return False
                mid = 0.5 * (ta + tb)
                picked = sorted(sorted(zs, key=lambda x: abs(x - mid))[:2])
                self.real.update(others)
                self.real[na], self.real[nb] = picked[0], picked[1]
                self.pairs = dict(pairs_new)
                self.r = r_next
                self.record()
                return True
        return self._edge_merge_probe(r_next)

    def _edge_merge_probe(self, r_next: float) -> bool:
        """An outermost real member can merge with an untracked zero outside
        the block. If its sign change vanished in a one-sided window, commit
        a MERGE against the adjacent outside index; if the window still shows
        crossings, re-acquire the member from the scan."""
        reals = sorted((t, n) for n, t in self.real.items())
        if len(reals) < 2:
            return False
        for t_e, n, side, inside in (
            (reals[0][0], reals[0][1], -1, reals[1][0]),
            (reals[-1][0], reals[-1][1], +1, reals[-2][0]),
        ):
            t_new, ok = self.ev.newton_real(t_e, r_next, self.steps.newton_max_iter)
            if ok and abs(t_new - t_e) <= 0.25 * abs(inside - t_e):
                continue  # this edge steps fine; it is not the obstruction
            delta = min(0.5 * abs(inside - t_e), 0.25)
            if side < 0:
                lo, hi = t_e - delta, min(t_e + 0.25 * delta, 0.5 * (t_e + inside))
            else:
                lo, hi = max(t_e - 0.25 * delta, 0.5 * (t_e + inside)), t_e + delta
            zs = _scan_sign_zeros(self.ev, r_next, lo, hi, refine=False)
            if len(zs) == 0:
                if self._do_edge_merge(n, side, (lo, hi), r_next):
                    return True
                continue
            others = self._step_real_except(r_next, (n,))
            pairs_new = self._step_pairs_except(r_next, ())
            if others is None or pairs_new is None:
                continue
            zs = _scan_sign_zeros(self.ev, r_next, lo, hi, refine=True)
            if not zs:
                continue
            self.real.update(others)
            # the member is the crossing on the block side of its partner
            self.real[n] = zs[-1] if side < 0 else zs[0]
            self.pairs = dict(pairs_new)
            self.r = r_next
            self.record()
            return True
        return False

    def _do_edge_merge(self, n: int, side: int, window: tuple, r_next: float) -> bool:
        partner = n + side
        others_real = self._step_real_except(r_next, (n,))
        if others_real is None:
            return False
        others_pairs = self._step_pairs_except(r_next, ())
        if others_pairs is None:
            return False
        lo, hi = window

        def edge_zeros(q: float):
            return _scan_sign_zeros(self.ev, q, lo, hi, refine=False)

        a, b = self.r, r_next
        best_real = None
        while b - a > self.steps.bracket_tol:
            m = 0.5 * (a + b)
            zs = edge_zeros(m)
            if len(zs) >= 2:
                a = m
                best_real = (zs[0], zs[-1])
            elif len(zs) == 1:
                a = m
                best_real = (zs[0], zs[0])
            else:
                b = m
        if best_real is None:
            zs = edge_zeros(self.r)
            best_real = (zs[0], zs[-1]) if zs else (self.real[n], self.real[n])
        t_est = 0.5 * (best_real[0] + best_real[1])
        pair = (min(n, partner), max(n, partner))
        event = CollisionEvent(
            lower_index=pair[0], upper_index=pair[1],
            r_lo=a, r_hi=b, t_estimate=t_est, kind=MERGE,
        )
        z = None
        for eps in (self.steps.complex_seed_im, 4.0 * self.steps.complex_seed_im):
            z0 = complex(t_est, eps)
            z_try, ok = self.ev.newton_complex(z0, r_next, 2 * self.steps.newton_max_iter)
            if ok and cmath.isfinite(z_try) and abs(z_try.real - t_est) < max(4.0 * (hi - lo), 0.05):
                z = z_try.conjugate() if z_try.imag < 0.0 else z_try
                break
        self.real = {k: v for k, v in self.real.items() if k != n}
        self.real.update(others_real)
        self.pairs = dict(others_pairs)
        self.add_event(event)
        self.r = r_next
        if z is None:
            self.record()
            self.truncate("complex_seed_failed")
            return True
        self.pairs[pair] = z
        self.record()
        return True

    # -- main loop -----------------------------------------------------------

    def seed(self):
        for n in self.indices:
            self.real[n] = core_zero(n)
        self.record()

    def run_from_current(self):
        dr = self.steps.initial_dr
        detect_dr = self.steps.initial_dr / 64.0
        accepted = 0
        while self.r < 1.0:
            if accepted >= self.steps.max_steps:
                self.truncate("step_budget_exhausted")
                return
            r_next = min(self.r + dr, 1.0)
            ok, new_real, new_pairs = self.attempt(r_next)
            if ok:
                landed = None
                for pair, z_new in new_pairs.items():
                    if abs(z_new.imag) < self.steps.return_im_tol:
                        landed = pair
                        break
                if landed is not None and self._do_return(landed, r_next):
                    accepted += 1
                    dr = self.steps.initial_dr
                    continue
                self.real = new_real
                self.pairs = new_pairs
                self.r = r_next
                self.record()
                accepted += 1
                dr = min(2.0 * dr, self.steps.initial_dr)
                continue
            if dr <= detect_dr and self._detect(r_next):
                if any(tr.truncated for tr in self.traces.values()):
                    return
                accepted += 1
                dr = self.steps.initial_dr
                continue
            dr *= 0.5
            if dr < self.steps.min_dr:
                self.truncate("step_underflow")
                return

    def run(self):
        self.seed()
        self.run_from_current()


def _guard_indices(ns) -> list[int]:
    """The traced indices plus two guard neighbors per side, clamped to >= 1."""
    lo = max(1, min(ns) - 2)
    hi = max(ns) + 2
    return list(range(lo, hi + 1))


def _check_native_window(n: int, n_terms: int):
    # the index-n core zero must sit in the family's native height 2*n_terms
    t_n = core_zero(n)
    if abs(2.0 * n_terms - t_n) > 0.1 * t_n:
        raise DomainError(
            f"family size {n_terms} puts index {n} (t ~ {t_n:.1f}) outside "
            f"its native window; expected n_terms near {int(t_n // 2)}"
        )


def trace_block(indices, path: PathSpec, steps: StepControl | None = None,
                config: EvalConfig = SECTION_CONFIG) -> dict[int, ZeroTrace]:
    """Trace every index in `indices` plus two guards per side, in lockstep.

    All traces share one r-schedule, so samples align across members. Returns
    the full dict including guard traces.
    """
    steps = steps or StepControl()
    block = _Block(_guard_indices(indices), path, steps, config)
    block.run()
    return block.traces


def trace_zero(n: int, path: PathSpec, steps: StepControl | None = None,
               config: EvalConfig = SECTION_CONFIG) -> ZeroTrace:
    """Track the index-n zero from the core (r=0) to the section (r=1)."""
    _check_native_window(n, path.n_terms)
    return trace_block([n], path, steps, config)[n]


def trace_pair(n_lo: int, n_hi: int, path: PathSpec,
               steps: StepControl | None = None,
               config: EvalConfig = SECTION_CONFIG) -> tuple[ZeroTrace, ZeroTrace]:
    """Track two (usually adjacent) zeros in one block."""
    if n_hi <= n_lo:
        raise ConfigurationError(f"need n_lo < n_hi, got ({n_lo}, {n_hi})")
    _check_native_window(n_lo, path.n_terms)
    traces = trace_block([n_lo, n_hi], path, steps, config)
    return traces[n_lo], traces[n_hi]


def verify_noncolliding(n: int, path: PathSpec, steps: StepControl | None = None,
                        config: EvalConfig = SECTION_CONFIG) -> NonCollidingReport:
    """Certify that the index-n zero stays real and simple along the path.

    min_gap is the smallest sampled distance to either neighbor while both
    members are real. A truncated trace yields status UNKNOWN and
    noncolliding=None; it never claims a non-collision it could not follow.
    """
    _check_native_window(n, path.n_terms)
    traces = trace_block([n], path, steps, config)
    tr = traces[n]
    neighbors = [m for m in (n - 1, n + 1) if m in traces]
    min_gap = math.inf
    argmin_r = 0.0
    for i, (r, loc, status) in enumerate(tr.samples):
        if status != STATUS_REAL:
            continue
        for m in neighbors:
            rm, locm, statm = traces[m].samples[i]
            if statm != STATUS_REAL:
                continue
            gap = abs(loc.real - locm.real)
            if gap < min_gap:
                min_gap = gap
                argmin_r = r
    own_events = tuple(e for e in tr.events)
    if tr.truncated:
        return NonCollidingReport(
            n=n, noncolliding=None, min_gap=min_gap, argmin_r=argmin_r,
            status="UNKNOWN", events=own_events,
        )
    clean = not any(e.involves(n) for e in tr.events)
    return NonCollidingReport(
        n=n, noncolliding=clean, min_gap=min_gap, argmin_r=argmin_r,
        status="OK", events=own_events,
    )


def continue_complex_pair(trace_lo: ZeroTrace, trace_hi: ZeroTrace,
                          path: PathSpec, from_r: float,
                          steps: StepControl | None = None,
                          config: EvalConfig = SECTION_CONFIG) -> tuple[ZeroTrace, ZeroTrace]:
    """Resume a merged pair from parameter from_r toward r=1.

    Refuses unless the traces carry a MERGE event at or before from_r that has
    not already resolved by a RETURN. The pair is continued on its own (no
    guard neighbors); the lower member is the conjugate of the tracked upper
    one by construction.
    """
    steps = steps or StepControl()
    from_r = _check_r(from_r)
    na, nb = trace_lo.index, trace_hi.index
    merges = [e for e in trace_hi.events if e.kind == MERGE and e.involves(na)
              and e.involves(nb) and e.r_lo <= from_r]
    if not merges:
        raise DomainError(
            f"no MERGE event for pair ({na}, {nb}) at or before r = {from_r}; "
            "cannot continue a pair that never merged"
        )
    merge = max(merges, key=lambda e: e.r_lo)
    returned = [e for e in trace_hi.events if e.kind == RETURN
                and e.involves(na) and e.involves(nb)
                and merge.r_lo < e.r_hi <= from_r]
    if returned:
        raise DomainError(
            f"pair ({na}, {nb}) already returned to the real axis before "
            f"r = {from_r}; nothing complex to continue"
        )
    z0 = None
    for r, loc, status in trace_hi.samples:
        if status == STATUS_COMPLEX and r <= from_r:
            z0 = complex(loc)
    block = _Block([na, nb], path, steps, config)
    block.r = from_r
    if z0 is not None:
        z0, ok = block.ev.newton_complex(z0, from_r, 2 * steps.newton_max_iter)
        if not ok:
            z0 = None
    if z0 is None:
        seed = complex(merge.t_estimate, steps.complex_seed_im)
        z0, ok = block.ev.newton_complex(seed, from_r, 2 * steps.newton_max_iter)
        if not ok:
            raise DomainError(
                f"complex re-acquisition failed at r = {from_r} for pair ({na}, {nb})"
            )
    if z0.imag < 0.0:
        z0 = z0.conjugate()
    block.pairs[(na, nb)] = z0
    block.record()
    block.run_from_current()
    return block.traces[na], block.traces[nb]
