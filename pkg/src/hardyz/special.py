"""Scalar special functions underlying the Z-function machinery.

Complex log-gamma and digamma (Stirling series with recurrence push-up and
reflection), the phase function theta(t) = arg Gamma(1/4 + it/2) - (t/2) ln pi
and its derivative, the principal Lambert W branch, and the remainder
coefficient function Psi(p) with numerical derivatives.

Everything here is pure float64 arithmetic with no third-party dependencies;
accuracy contracts are stated per function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

LN_PI = math.log(math.pi)
LN_2PI = math.log(2.0 * math.pi)
TWO_PI = 2.0 * math.pi

# Stirling tail coefficients B_2n / (2n (2n-1)) for log-gamma, n = 1..7.
_STIRLING_LOGG = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# B_2n / 2n for digamma, n = 1..7.
_STIRLING_DIG = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# |z| above which the Stirling tails are below 1e-15 relative.
_STIRLING_RADIUS = 12.0


class DomainError(ValueError):
    """Argument outside the mathematical domain (pole, branch cut end)."""


class PrecisionError(ValueError):
    """Argument outside the range where the accuracy contract holds."""


class ConfigurationError(ValueError):
    """A requested order or mode is not on the supported list."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Accuracy envelope for phase computations.

    phase_abs_tol: guaranteed absolute error of theta on |t| <= max_t.
    value_rel_tol: target relative error of function values.
    max_t: beyond this the phase guarantee is refused rather than degraded.
    """

    phase_abs_tol: float = 1e-8
    value_rel_tol: float = 1e-11
    max_t: float = 1e6


DEFAULT_POLICY = PrecisionPolicy()


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Relative error <= 1e-13 for |z| <= 1e7 with Re z >= 1/4, or for arguments
    reachable from that half-plane by one reflection. Poles (z a non-positive
    real integer) raise DomainError.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise DomainError(f"log_gamma pole at z = {z}")
    if z.real < 0.25:
        # reflection: log Gamma(z) = ln pi - log sin(pi z) - log Gamma(1 - z)
        if z.imag >= 0.0:
            return LN_PI - _log_sin_pi_upper(z) - log_gamma(1.0 - z)
        return log_gamma(z.conjugate()).conjugate()
    acc = 0.0 + 0.0j
    w = z
    while abs(w) < _STIRLING_RADIUS:
        acc -= cmath.log(w)
        w += 1.0
    res = (w - 0.5) * cmath.log(w) - w + 0.5 * LN_2PI
    winv2 = 1.0 / (w * w)
    term = 1.0 / w
    for c in _STIRLING_LOGG:
        res += c * term
        term *= winv2
    return res + acc


def _log_sin_pi_upper(z: complex) -> complex:
    # log sin(pi z) for Im z >= 0, analytic on the open upper half plane:
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}), |e^{2 pi i z}| < 1.
    q = cmath.exp(2j * math.pi * z)
    return 1j * math.pi / 2 - math.log(2.0) - 1j * math.pi * z + cmath.log(1.0 - q)


def digamma(z: complex) -> complex:
    """Logarithmic derivative of Gamma, same domain handling as log_gamma."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise DomainError(f"digamma pole at z = {z}")
    if z.real < 0.25:
        if z.imag < 0.0:
            return digamma(z.conjugate()).conjugate()
        # psi(z) = psi(1 - z) - pi cot(pi z)
        return digamma(1.0 - z) - math.pi * _cot_pi(z)
    acc = 0.0 + 0.0j
    w = z
    while abs(w) < _STIRLING_RADIUS:
        acc -= 1.0 / w
        w += 1.0
    winv2 = 1.0 / (w * w)
    res = cmath.log(w) - 0.5 / w
    term = winv2
    for c in _STIRLING_DIG:
        res -= c * term
        term *= winv2
    return res + acc


def _cot_pi(z: complex) -> complex:
    # cot(pi z) stable for Im z >= 0 via e^{2 pi i z}
    q = cmath.exp(2j * math.pi * z)
    return 1j * (q + 1.0) / (q - 1.0)


def _check_t(t: complex, policy: PrecisionPolicy) -> None:
    if abs(t) > policy.max_t:
        raise PrecisionError(
            f"|t| = {abs(t):.3g} exceeds the policy bound {policy.max_t:.3g}; "
            "phase accuracy is not guaranteed beyond it"
        )


def theta(t, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Phase function theta(t), real-valued for real t.

    theta(t) = (1/(2i)) [log Gamma(1/4 + it/2) - log Gamma(1/4 - it/2)]
               - (t/2) ln pi.
    Absolute phase error <= policy.phase_abs_tol for |t| <= policy.max_t.
    Returns a float for real input, complex otherwise.
    """
    if isinstance(t, complex) and t.imag != 0.0:
        _check_t(t, policy)
        z = 0.25 + 0.5j * t
        val = (log_gamma(z) - log_gamma(0.25 - 0.5j * t)) / 2j
        return val - (t / 2.0) * LN_PI
    t = float(t.real) if isinstance(t, complex) else float(t)
    _check_t(t, policy)
    # for real t the two log-gamma terms are conjugate: take the imag part once
    return log_gamma(0.25 + 0.5j * t).imag - 0.5 * t * LN_PI


def theta_prime(t, policy: PrecisionPolicy = DEFAULT_POLICY):
    """d theta / dt; real for real t, complex for complex t."""
    if isinstance(t, complex) and t.imag != 0.0:
        _check_t(t, policy)
        return 0.25 * (
            digamma(0.25 + 0.5j * t) + digamma(0.25 - 0.5j * t)
        ) - 0.5 * LN_PI
    t = float(t.real) if isinstance(t, complex) else float(t)
    _check_t(t, policy)
    return 0.5 * digamma(0.25 + 0.5j * t).real - 0.5 * LN_PI


def phase_gap(t: float) -> float:
    """Gap (t/2) ln(t/2pi) - t/2 - pi/8 - theta(t), by asymptotic series.

    Direct subtraction of the two ~1e6-sized sides loses 11 digits at
    t ~ 5e5; the series is exact to 1e-15 for t >= 100 and 2e-9 down to t=10.
    """
    t2 = t * t
    return -(1.0 / (48.0 * t) + 7.0 / (5760.0 * t * t2) + 31.0 / (80640.0 * t * t2 * t2))


def lambert_w0(x: float) -> float:
    """Principal branch W0: the root w of w e^w = x for x >= -1/e.

    Residual |w e^w - x| <= 1e-12 * max(|x|, 1).
    """
    x = float(x)
    branch = -1.0 / math.e
    if x < branch:
        if x > branch * (1.0 + 1e-12):
            x = branch
        else:
            raise DomainError(f"lambert_w0({x}) below -1/e: no real principal value")
    if x == 0.0:
        return 0.0
    # initial guess by regime
    if x < branch + 0.05:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0 - 43.0 * p ** 4 / 540.0
    elif x < math.e:
        w = 0.6 * math.log1p(x) if x > 0 else math.log1p(x)
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    # Halley iteration
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-15 * max(abs(w), 1e-3):
            break
    if abs(w * math.exp(w) - x) > 1e-12 * max(abs(x), 1.0):
        raise PrecisionError(f"lambert_w0({x}) residual did not converge")
    return w


_PSI_MAX_ORDER = 8
_PSI_SWITCH = 1e-3  # half-width of the reduced-form window around p = 1/4, 3/4
_PSI_FD_STEP = 1e-3


def _psi0(p: float) -> float:
    u = p - 0.25
    if abs(u) < _PSI_SWITCH:
        # exact reduced form near the removable singularity at 1/4
        if u == 0.0:
            return 0.5
        return math.sin(math.pi * u - TWO_PI * u * u) / math.sin(TWO_PI * u)
    u = p - 0.75
    if abs(u) < _PSI_SWITCH:
        if u == 0.0:
            return 0.5
        return math.sin(math.pi * u + TWO_PI * u * u) / math.sin(TWO_PI * u)
    return math.cos(TWO_PI * (p * p - p - 1.0 / 16.0)) / math.cos(TWO_PI * p)


def psi_rs(p: float, order: int = 0) -> float:
    """Psi(p) = cos(2pi(p^2 - p - 1/16))/cos(2pi p) and its derivatives.

    p in [0, 1). order m >= 1 returns Psi^(m)(p) by central differences with
    Richardson extrapolation (step 1e-3, two refinements); float64 noise grows
    with m, which is why callers cap the usable order well below the maximum.
    """
    if not 0.0 <= p < 1.0:
        raise DomainError(f"psi_rs argument p = {p} outside [0, 1)")
    if not isinstance(order, int) or order < 0:
        raise ConfigurationError(f"psi_rs order must be a non-negative integer, got {order!r}")
    if order > _PSI_MAX_ORDER:
        raise ConfigurationError(
            f"psi_rs order {order} above the supported maximum {_PSI_MAX_ORDER}"
        )
    if order == 0:
        return _psi0(p)

    def deriv(f, x, h):
        # first derivative, Richardson-extrapolated central differences
        d1 = (f(x + h) - f(x - h)) / (2.0 * h)
        d2 = (f(x + h / 2) - f(x - h / 2)) / h
        d4 = (f(x + h / 4) - f(x - h / 4)) / (h / 2)
        r1 = (4.0 * d2 - d1) / 3.0
        r2 = (4.0 * d4 - d2) / 3.0
        return (16.0 * r2 - r1) / 15.0

    f = _psi0
    for _ in range(order):
        g = f

        def f(x, _g=g):
            return deriv(_g, x, _PSI_FD_STEP)

    return f(p)
