"""Evaluators for the Z-function and its generalized sections.

Five evaluation routes share the phase function theta(t) but nothing else:

  CORE       cos(theta(t)), the zero-coefficient section
  AFE        2 * afe_main_sum(t, Ntilde(t)), Ntilde(t) = floor(sqrt(t/2pi))
  RS         AFE plus the order-k remainder assembled from Psi(p)
  SPIRA      the all-ones section with N = floor(t/2)
  EM_ORACLE  Re e^{i theta(t)} zeta(1/2+it), zeta by Euler-Maclaurin on an
             independent code path (its own k^-s loop, no shared term tables)
  SECTION    cos(theta) + sum_k a_k cos(theta - ln(k+1) t)/sqrt(k+1)

Section sums run over cached ln(m), 1/sqrt(m) tables through the selected
summation backend; see backends. Real t uses the real kernels and returns
floats; complex t (|Im t| small, continuation of zeros off the axis) uses the
complex kernels.
"""

from __future__ import annotations

import cmath
import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .special import (
    DEFAULT_POLICY,
    TWO_PI,
    ConfigurationError,
    DomainError,
    PrecisionError,
    PrecisionPolicy,
    phase_gap,
    psi_rs,
    theta,
    theta_prime,
)

_EPS = 2.220446049250313e-16


class Method(enum.Enum):
    RS = "rs"
    AFE = "afe"
    SPIRA = "spira"
    EM_ORACLE = "em"
    SECTION = "section"
    CORE = "core"

    @classmethod
    def parse(cls, token: str) -> "Method":
        token = token.strip().lower()
        for m in cls:
            if m.value == token:
                return m
        raise ConfigurationError(
            f"unknown method {token!r}; known: " + ", ".join(m.value for m in cls)
        )


class Summation(enum.Enum):
    SEQUENTIAL_COMPENSATED = "sequential_compensated"
    FIXED_CHUNK_PARALLEL = "fixed_chunk_parallel"


_MAX_RS_ORDER = 8
# Orders whose b/c expansion terms reproduce the oracle; higher b_n grow with
# t instead of shrinking, so those orders are rejected rather than used.
_VALID_RS_ORDERS = (0, 1)


@dataclass(frozen=True)
class EvalConfig:
    method: Method = Method.RS
    rs_order: int = 1
    precision: PrecisionPolicy = DEFAULT_POLICY
    summation: Summation = Summation.SEQUENTIAL_COMPENSATED

    def __post_init__(self):
        if not isinstance(self.method, Method):
            raise ConfigurationError(f"method must be a Method, got {self.method!r}")
        if not isinstance(self.rs_order, int) or isinstance(self.rs_order, bool):
            raise ConfigurationError(f"rs_order must be an integer, got {self.rs_order!r}")
        if not 0 <= self.rs_order <= _MAX_RS_ORDER:
            raise ConfigurationError(
                f"rs_order {self.rs_order} outside the allowed range 0..{_MAX_RS_ORDER}"
            )
        if not isinstance(self.summation, Summation):
            raise ConfigurationError(
                f"summation must be a Summation, got {self.summation!r}"
            )

    @property
    def chunked(self) -> bool:
        return self.summation is Summation.FIXED_CHUNK_PARALLEL


DEFAULT_CONFIG = EvalConfig()
EM_CONFIG = EvalConfig(method=Method.EM_ORACLE)


def _imag_ceiling(re: float, t: float) -> float:
    # 1e-9 * max(1, |re|) with a float64 noise floor: phase arguments of size
    # O(t log t) carry ~eps*t rounding, which rotates the assembled value.
    return max(1e-9 * max(1.0, abs(re)), 256.0 * _EPS * max(1.0, abs(t)))


@dataclass(frozen=True)
class ZValue:
    """An evaluated Z approximation, tagged with its method and argument."""

    value: complex
    method: Method
    t: complex

    def __post_init__(self):
        t = complex(self.t)
        v = complex(self.value)
        if t.imag == 0.0 and abs(v.imag) > _imag_ceiling(v.real, t.real):
            raise PrecisionError(
                f"method {self.method.value} at t={t.real}: imaginary residual "
                f"{v.imag:.3e} exceeds the realness ceiling"
            )

    @property
    def re(self) -> float:
        return self.value.real


@dataclass(frozen=True)
class CoefficientVector:
    """Section coefficients (a_1..a_N); a_k weighs the cos(theta - ln(k+1) t)
    term, so N coefficients span summands m = 2..N+1 on top of the core."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ConfigurationError("coefficient vector must be 1-D and non-empty")
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("coefficient vector entries must be finite")
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_terms(self) -> int:
        return int(self.coeffs.size)

    @classmethod
    def zeros(cls, n: int) -> "CoefficientVector":
        return cls(np.zeros(int(n)))

    @classmethod
    def ones(cls, n: int) -> "CoefficientVector":
        return cls(np.ones(int(n)))

    @classmethod
    def full(cls, n: int, value: float) -> "CoefficientVector":
        return cls(np.full(int(n), float(value)))

    @classmethod
    def from_file(cls, path) -> "CoefficientVector":
        vals = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    vals.append(float(line))
        return cls(np.array(vals, dtype=np.float64))


class _TermTable:
    """Grow-only cache of ln(m) and 1/sqrt(m), m = 1..size; index i holds m=i+1.

    Arrays are replaced wholesale on growth, so any slice already handed out
    stays valid and read-only in spirit; growth is serialized by a lock.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.logs = np.zeros(0)
        self.invs = np.zeros(0)

    def ensure(self, m_max: int):
        if m_max > self.logs.size:
            with self._lock:
                if m_max > self.logs.size:
                    size = max(m_max, 2 * self.logs.size, 1024)
                    m = np.arange(1, size + 1, dtype=np.float64)
                    logs = np.log(m)
                    invs = 1.0 / np.sqrt(m)
                    self.logs = logs
                    self.invs = invs
        return self.logs, self.invs


_TABLE = _TermTable()


def term_tables(m_max: int):
    """Shared ln/recip-sqrt tables covering m = 1..m_max."""
    return _TABLE.ensure(m_max)


def afe_term_count(t: float) -> int:
    """Ntilde(t) = floor(sqrt(t/2pi)), the main-sum cutoff."""
    if t <= 0:
        raise DomainError(f"main-sum cutoff needs t > 0, got {t}")
    return int(math.floor(math.sqrt(t / TWO_PI)))


def spira_term_count(t: float) -> int:
    """N(t) = floor(t/2), the all-ones section size."""
    return int(math.floor(t / 2.0))


def _is_complex(t) -> bool:
    return isinstance(t, complex) and t.imag != 0.0


def _check_policy(t, policy: PrecisionPolicy):
    if abs(t) > policy.max_t:
        raise PrecisionError(
            f"|t| = {abs(t):.6g} exceeds the precision policy bound {policy.max_t:.6g}"
        )


def afe_main_sum(t: float, n_terms: int, config: EvalConfig = DEFAULT_CONFIG) -> float:
    """Sum_{k=1}^{n_terms} cos(theta(t) - ln(k) t)/sqrt(k); the k=1 term is
    cos(theta(t))."""
    t = float(t)
    if t <= 0:
        raise DomainError(f"afe_main_sum needs t > 0, got {t}")
    if n_terms < 1:
        raise DomainError(f"afe_main_sum needs n_terms >= 1, got {n_terms}")
    _check_policy(t, config.precision)
    th = theta(t, config.precision)
    logs, invs = term_tables(n_terms)
    return backends.get_backend().cos_sum(
        th, t, logs[:n_terms], invs[:n_terms], config.chunked
    )


def _afe_main_sum_vd(t: float, n_terms: int, config: EvalConfig):
    th = theta(t, config.precision)
    dth = theta_prime(t, config.precision)
    logs, invs = term_tables(n_terms)
    return backends.get_backend().cos_sum_vd(
        th, dth, t, logs[:n_terms], invs[:n_terms], config.chunked
    )


def rs_remainder(t: float, order: int = 1, config: EvalConfig = DEFAULT_CONFIG) -> float:
    """Order-k remainder added to the doubled main sum.

    Assembled as Re of (-1)^(Ntilde-1) (t/2pi)^(-1/4) e^{i delta}/(1-i e^{-pi t})
    times sum_{n<=k} b_n c_n, with delta the phase gap computed by series. At
    k = 0 this reduces (within 1e-8) to (-1)^(Ntilde-1) (t/2pi)^(-1/4) Psi(p).
    """
    t = float(t)
    if not isinstance(order, int) or isinstance(order, bool) or not 0 <= order <= _MAX_RS_ORDER:
        raise ConfigurationError(
            f"rs order must be an integer in 0..{_MAX_RS_ORDER}, got {order!r}"
        )
    if order not in _VALID_RS_ORDERS:
        raise ConfigurationError(
            f"rs order {order} failed oracle validation and is unsupported; "
            f"supported orders: {_VALID_RS_ORDERS}"
        )
    if t <= TWO_PI:
        raise DomainError(f"rs_remainder needs t > 2*pi, got {t}")
    _check_policy(t, config.precision)
    x = t / TWO_PI
    sq = math.sqrt(x)
    n_til = int(math.floor(sq))
    p = sq - n_til
    sign = 1.0 if n_til % 2 == 1 else -1.0
    delta = phase_gap(t)
    damp = math.exp(-math.pi * t) if t < 700.0 else 0.0
    pref = cmath.exp(1j * delta) / (1.0 - 1j * damp)
    acc = complex(psi_rs(p, 0))
    if order >= 1:
        b1 = 1j * sq / (4.0 * math.pi)
        acc += b1 * (0.5 * psi_rs(p, 1))
    return sign * x ** -0.25 * (pref * acc).real


_BERN_FACT = (
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
)


def em_cutoff(t: float) -> int:
    # 1.5*t keeps |s/(2 pi M)| ~ 0.1, so six Bernoulli terms land far below
    # the 1e-9 target; the smaller classical cutoff near t/(2 pi) does not.
    return max(50, int(math.ceil(1.5 * t)))


def zeta_em(t: float, config: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(1/2 + it) by Euler-Maclaurin: truncated Dirichlet sum, tail and
    midpoint terms, six Bernoulli corrections. Independent of the section
    machinery except for float64 itself."""
    t = float(t)
    if t < 0:
        raise DomainError(f"zeta_em needs t >= 0, got {t}")
    _check_policy(t, config.precision)
    s = 0.5 + 1j * t
    m = em_cutoff(t)
    main = backends.get_backend().power_sum(0.5, t, m, config.chunked)
    lm = math.log(m)
    m_minus_s = cmath.exp(-s * lm)
    total = main + m * m_minus_s / (s - 1.0) + 0.5 * m_minus_s
    prod = s
    mpow = m_minus_s / m
    for j, bf in enumerate(_BERN_FACT, start=1):
        total += bf * prod * mpow
        prod *= (s + (2 * j - 1)) * (s + 2 * j)
        mpow /= m * m
    return total


def section_eval(t, a: CoefficientVector, config: EvalConfig = DEFAULT_CONFIG):
    """Z_N(t; a) = cos(theta) + sum_k a_k cos(theta - ln(k+1) t)/sqrt(k+1).

    Float in, float out; complex t gives the analytic continuation.
    """
    n = a.n_terms
    logs, invs = term_tables(n + 1)
    bk = backends.get_backend()
    if _is_complex(t):
        _check_policy(t, config.precision)
        th = theta(t, config.precision)
        s = bk.weighted_cos_sum_c(th, t, logs[1 : n + 1], invs[1 : n + 1], a.coeffs)
        return cmath.cos(th) + s
    t = float(t.real) if isinstance(t, complex) else float(t)
    _check_policy(t, config.precision)
    th = theta(t, config.precision)
    s = bk.weighted_cos_sum(
        th, t, logs[1 : n + 1], invs[1 : n + 1], a.coeffs, config.chunked
    )
    return math.cos(th) + s


def section_derivative(t, a: CoefficientVector, config: EvalConfig = DEFAULT_CONFIG):
    """d/dt of section_eval, term-wise via theta_prime."""
    return section_value_and_derivative(t, a, config)[1]


def section_value_and_derivative(t, a: CoefficientVector, config: EvalConfig = DEFAULT_CONFIG):
    """(value, d/dt) in one fused pass over the terms."""
    n = a.n_terms
    logs, invs = term_tables(n + 1)
    bk = backends.get_backend()
    if _is_complex(t):
        _check_policy(t, config.precision)
        th = theta(t, config.precision)
        dth = theta_prime(t, config.precision)
        sv, sd = bk.weighted_cos_sum_vd_c(
            th, dth, t, logs[1 : n + 1], invs[1 : n + 1], a.coeffs
        )
        return cmath.cos(th) + sv, -cmath.sin(th) * dth + sd
    t = float(t.real) if isinstance(t, complex) else float(t)
    _check_policy(t, config.precision)
    th = theta(t, config.precision)
    dth = theta_prime(t, config.precision)
    sv, sd = bk.weighted_cos_sum_vd(
        th, dth, t, logs[1 : n + 1], invs[1 : n + 1], a.coeffs, config.chunked
    )
    return math.cos(th) + sv, -math.sin(th) * dth + sd


def split_section_vd(
    t,
    n_terms: int,
    sub_logs: np.ndarray,
    sub_invs: np.ndarray,
    r_in: float,
    r_out: float,
    config: EvalConfig = DEFAULT_CONFIG,
):
    """(value, d/dt) of the section whose coefficients equal r_in on a subset
    of indices and r_out elsewhere.

    Decomposes as cos(theta) + r_out*F + (r_in - r_out)*A with F the full unit
    coefficient sum and A the subset sum, so continuation paths that move two
    coefficient groups cost two unit sums instead of a fresh N-vector per step.
    sub_logs/sub_invs are the ln(k+1), 1/sqrt(k+1) rows of the subset.
    """
    logs, invs = term_tables(n_terms + 1)
    bk = backends.get_backend()
    diff = r_in - r_out
    if _is_complex(t):
        _check_policy(t, config.precision)
        th = theta(t, config.precision)
        dth = theta_prime(t, config.precision)
        fv, fd = bk.cos_sum_vd_c(th, dth, t, logs[1 : n_terms + 1], invs[1 : n_terms + 1])
        if sub_logs.size and diff != 0.0:
            av, ad = bk.cos_sum_vd_c(th, dth, t, sub_logs, sub_invs)
        else:
            av = ad = 0j
        v = cmath.cos(th) + r_out * fv + diff * av
        d = -cmath.sin(th) * dth + r_out * fd + diff * ad
        return v, d
    t = float(t.real) if isinstance(t, complex) else float(t)
    _check_policy(t, config.precision)
    th = theta(t, config.precision)
    dth = theta_prime(t, config.precision)
    fv, fd = bk.cos_sum_vd(
        th, dth, t, logs[1 : n_terms + 1], invs[1 : n_terms + 1], config.chunked
    )
    if sub_logs.size and diff != 0.0:
        av, ad = bk.cos_sum_vd(th, dth, t, sub_logs, sub_invs, config.chunked)
    else:
        av = ad = 0.0
    v = math.cos(th) + r_out * fv + diff * av
    d = -math.sin(th) * dth + r_out * fd + diff * ad
    return v, d


def subset_term_rows(indices) -> tuple[np.ndarray, np.ndarray]:
    """ln(k+1) and 1/sqrt(k+1) rows for coefficient indices k (sorted)."""
    idx = sorted(int(k) for k in indices)
    if not idx:
        return np.zeros(0), np.zeros(0)
    if idx[0] < 1:
        raise ConfigurationError(f"coefficient indices start at 1, got {idx[0]}")
    logs, invs = term_tables(idx[-1] + 1)
    rows = np.array(idx, dtype=np.intp)
    return np.ascontiguousarray(logs[rows]), np.ascontiguousarray(invs[rows])


def z_value(t: float, config: EvalConfig = DEFAULT_CONFIG, coeffs: CoefficientVector | None = None) -> ZValue:
    """Evaluate Z(t) by the configured method; real t only."""
    t = float(t)
    m = config.method
    if m in (Method.RS, Method.AFE, Method.SPIRA):
        if t <= 10.0:
            raise DomainError(f"method {m.value} needs t > 10, got {t}")
    elif t < 0.0:
        raise DomainError(f"method {m.value} needs t >= 0, got {t}")
    _check_policy(t, config.precision)
    if m is Method.CORE:
        val = complex(math.cos(theta(t, config.precision)))
    elif m is Method.AFE:
        val = complex(2.0 * afe_main_sum(t, afe_term_count(t), config))
    elif m is Method.RS:
        val = complex(
            2.0 * afe_main_sum(t, afe_term_count(t), config)
            + rs_remainder(t, config.rs_order, config)
        )
    elif m is Method.SPIRA:
        val = complex(section_eval(t, CoefficientVector.ones(spira_term_count(t)), config))
    elif m is Method.EM_ORACLE:
        th = theta(t, config.precision)
        val = cmath.exp(1j * th) * zeta_em(t, config)
    elif m is Method.SECTION:
        if coeffs is None:
            raise ConfigurationError("SECTION method needs a coefficient vector")
        val = complex(section_eval(t, coeffs, config))
    else:  # pragma: no cover - enum is closed
        raise ConfigurationError(f"unhandled method {m!r}")
    return ZValue(value=val, method=m, t=complex(t))


def z_value_and_derivative(
    t: float, config: EvalConfig = DEFAULT_CONFIG, coeffs: CoefficientVector | None = None
) -> tuple[float, float]:
    """(F, F') for Newton. Analytic derivative where the evaluator is a plain
    phase sum (CORE/AFE/SPIRA/SECTION, holding the term count fixed at t);
    central finite difference with step 1e-6*max(1,|t|)^(1/2) for RS and the
    Euler-Maclaurin oracle, whose remainders have no clean d/dt."""
    t = float(t)
    m = config.method
    if m is Method.CORE:
        _check_policy(t, config.precision)
        th = theta(t, config.precision)
        return math.cos(th), -math.sin(th) * theta_prime(t, config.precision)
    if m is Method.AFE:
        v, d = _afe_main_sum_vd(t, afe_term_count(t), config)
        return 2.0 * v, 2.0 * d
    if m is Method.SPIRA:
        ones = CoefficientVector.ones(spira_term_count(t))
        return section_value_and_derivative(t, ones, config)
    if m is Method.SECTION:
        if coeffs is None:
            raise ConfigurationError("SECTION method needs a coefficient vector")
        return section_value_and_derivative(t, coeffs, config)
    h = 1e-6 * max(1.0, abs(t)) ** 0.5
    f = z_value(t, config, coeffs).re
    fp = (z_value(t + h, config, coeffs).re - z_value(t - h, config, coeffs).re) / (2.0 * h)
    return f, fp
